"""Special extractors: a witness from two accepting conversations that
share ``(rand, com)`` but differ in the challenge."""

from __future__ import annotations

import itertools

import numpy as np


class ExtractionError(ValueError):
    pass


def k0_hc(graph, B, Y, resp0, resp1) -> list:
    """Pull the cycle back through the revealed permutation.

    ``resp0 = (perm, A)`` answers challenge 0 and ``resp1 = (edges, A')``
    challenge 1. The result is a vertex sequence; whether it is a Hamiltonian
    cycle of ``graph`` is for the caller to check.
    """
    perm, _ = resp0
    edges, _ = resp1
    perm = np.asarray(perm, dtype=np.int64)
    n = graph.n
    if perm.shape != (n,) or sorted(perm.tolist()) != list(range(n)):
        raise ExtractionError("revealed permutation is not a permutation")
    inv = np.empty(n, dtype=np.int64)
    inv[perm] = np.arange(n)
    out = []
    for u, v in edges:
        u = int(u)
        if not 0 <= u < n:
            raise ExtractionError("cycle vertex out of range")
        out.append(int(inv[u]))
    return out


def k0_subset(s, k, resp0, resp1) -> np.ndarray:
    """Candidate solution ``x xor z``."""
    z = np.asarray(resp0[0], dtype=np.int64)
    x = np.asarray(resp1[0], dtype=np.int64)
    if z.shape != x.shape or z.shape != (len(s),):
        raise ExtractionError("response vectors have mismatched lengths")
    return np.bitwise_xor(x, z)


# ---------------------------------------------------------------------------
# exhaustive double-opening adversaries for the Hamiltonian-cycle protocol


def _entry_pass_counts(q: int, bit: int) -> set:
    """Achievable ``#{b : both openings of one commitment entry verify}``.

    The first prover answers ``y = g(b)`` for an arbitrary ``g : F_q -> F_q``;
    the second prover fixes the challenge-0 opening ``a0`` and the challenge-1
    opening ``a1`` without seeing ``b``. Challenge 0 needs ``y = a0 + b*bit``,
    challenge 1 needs ``y = a1 + b``. Every ``(g, a0, a1)`` is enumerated.
    """
    counts = set()
    for g in itertools.product(range(q), repeat=q):
        for a0 in range(q):
            for a1 in range(q):
                counts.add(sum(1 for b in range(q)
                               if g[b] == (a0 + b * bit) % q and g[b] == (a1 + b) % q))
    return counts


def hc_double_opening_census(graph, q: int):
    """Every classical double-opening adversary against one commitment round.

    The second prover fixes a permutation for challenge 0 and a directed
    spanning cycle for challenge 1; each entry on that cycle is attacked
    with an arbitrary entry-local commitment function and arbitrary openings,
    while entries off the cycle are committed honestly (they only affect
    challenge 0, which they then always pass). Commitment entries use
    independent uniform ``b`` values, so the probability that both
    conversations verify is the product of per-entry pass rates.

    Yields ``(perm, cycle, p_both, k0_valid)`` with ``p_both`` an exact
    Fraction, one row per distinct achievable ``p_both``.
    """
    from fractions import Fraction

    from ..protocols.graphs import is_hamiltonian_cycle
    from ..protocols.hamiltonian import permuted_adjacency

    n = graph.n
    per_bit = {bit: sorted(_entry_pass_counts(q, bit)) for bit in (0, 1)}
    seen_cycles = set()
    for order in itertools.permutations(range(n)):
        # a directed cycle is determined by its vertex order up to rotation
        rot = min(order[k:] + order[:k] for k in range(n))
        if rot in seen_cycles:
            continue
        seen_cycles.add(rot)
        cyc = [(rot[k], rot[(k + 1) % n]) for k in range(n)]
        for perm in itertools.permutations(range(n)):
            perm = np.array(perm, dtype=np.int64)
            m = permuted_adjacency(graph, perm)
            try:
                w = k0_hc(graph, None, None, (perm, None), (cyc, None))
                valid = is_hamiltonian_cycle(graph, w)
            except ExtractionError:
                valid = False
            options = [per_bit[int(m[u, v])] for u, v in cyc]
            probs = {Fraction(int(np.prod(c)), q**n) for c in itertools.product(*options)}
            for p in sorted(probs):
                yield perm, cyc, p, valid
