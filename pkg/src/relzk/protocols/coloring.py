"""Graph 3-coloring protocols with two and three provers.

A question is ``(edge, b)`` with ``edge = (i, j)``, ``i < j`` and ``b`` a bit;
the honest answer is the pair of labels ``(l_i^b, l_j^b)`` where the two
label vectors add up to the coloring mod 3. Internally questions are indexed
``2*edge_index + b`` and answers are coded ``3*a_i + a_j``.
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .. import kernels
from .graphs import GraphInstance, is_proper_coloring

DEFAULT_EPSILON = Fraction(1, 3)


def as_fraction(eps) -> Fraction:
    if isinstance(eps, Fraction):
        out = eps
    elif isinstance(eps, float):
        out = Fraction(repr(eps))
    else:
        out = Fraction(eps)
    if not 0 <= out <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    return out


# ---------------------------------------------------------------------------
# questions and answers


def question_index(graph: GraphInstance, question) -> int:
    edge, b = question
    return 2 * graph.edge_index(*edge) + int(b)


def question_at(graph: GraphInstance, idx: int):
    return (graph.edges[idx // 2], idx % 2)


def num_questions(graph: GraphInstance) -> int:
    return 2 * graph.num_edges


def encode_answer(a) -> int:
    ai, aj = (int(x) for x in a)
    if not (0 <= ai < 3 and 0 <= aj < 3):
        raise ValueError(f"answer {a!r} is not in F3 x F3")
    return 3 * ai + aj


def decode_answer(code: int) -> tuple:
    return (int(code) // 3, int(code) % 3)


# ---------------------------------------------------------------------------
# question distribution


def dg_sample(graph: GraphInstance, eps, rng: np.random.Generator):
    """One question pair from the two-branch generative procedure."""
    eps = float(as_fraction(eps))
    m = graph.num_edges
    e = int(rng.integers(m))
    b = int(rng.integers(2))
    if rng.random() < eps:
        return ((graph.edges[e], b), (graph.edges[e], 1 - b))
    endpoint = graph.edges[e][int(rng.integers(2))]
    inc = graph.incident_edges(endpoint)
    e2 = inc[int(rng.integers(len(inc)))]
    return ((graph.edges[e], b), (graph.edges[e2], b))


@lru_cache(maxsize=64)
def _pair_masses_cached(graph: GraphInstance, eps: Fraction) -> dict:
    m = graph.num_edges
    masses: dict = {}
    for e in range(m):
        for b in (0, 1):
            key = (2 * e + b, 2 * e + (1 - b))
            masses[key] = masses.get(key, Fraction(0)) + eps / (2 * m)
            for endpoint in graph.edges[e]:
                inc = graph.incident_edges(endpoint)
                share = (1 - eps) / (4 * m * len(inc))
                for e2 in inc:
                    key = (2 * e + b, 2 * e2 + b)
                    masses[key] = masses.get(key, Fraction(0)) + share
    return {k: v for k, v in masses.items() if v != 0}


def dg_pair_masses(graph: GraphInstance, eps=DEFAULT_EPSILON) -> dict:
    """Exact probability of every ordered question-index pair the sampler emits."""
    return dict(_pair_masses_cached(graph, as_fraction(eps)))


def dg_eval_wdt(graph: GraphInstance, eps, e, b, e2) -> Fraction:
    """Printed well-definition mass for ``((e, b), (e2, b))``."""
    eps = as_fraction(eps)
    i, j = e
    e2i = graph.edge_index(*e2)
    inc_i, inc_j = graph.incident_edges(i), graph.incident_edges(j)
    term = Fraction(int(e2i in inc_i), len(inc_i)) + Fraction(int(e2i in inc_j), len(inc_j))
    return (1 - eps) / (4 * graph.num_edges) * term


def dg_eval_evt(graph: GraphInstance, eps, e, b) -> Fraction:
    """Printed edge-verification mass for ``((e, b), (e, 1-b))``.

    This reproduces the printed formula, whose second term the generative
    sampler never produces; compare :func:`dg_pair_masses`.
    """
    eps = as_fraction(eps)
    i, j = e
    m = graph.num_edges
    return eps / (2 * m) + (1 - eps) / (4 * m) * (
        Fraction(1, len(graph.incident_edges(i))) + Fraction(1, len(graph.incident_edges(j)))
    )


def dg_sample_triple(graph: GraphInstance, eps, rng: np.random.Generator):
    """Symmetric three-slot completion of the pair distribution.

    The third question copies one of the pair's two questions (each with
    probability one half) and the three slots are then shuffled uniformly.
    """
    q, q2 = dg_sample(graph, eps, rng)
    q3 = q if rng.random() < 0.5 else q2
    slots = [q, q2, q3]
    order = rng.permutation(3)
    return tuple(slots[k] for k in order)


@lru_cache(maxsize=64)
def _triple_masses_cached(graph: GraphInstance, eps: Fraction) -> dict:
    pairs = _pair_masses_cached(graph, eps)
    out: dict = {}
    perms = list(itertools.permutations(range(3)))
    for (x, y), mass in pairs.items():
        for third in (x, y):
            base = (x, y, third)
            for perm in perms:
                key = tuple(base[k] for k in perm)
                out[key] = out.get(key, Fraction(0)) + mass / 12
    return out


def dg_triple_masses(graph: GraphInstance, eps=DEFAULT_EPSILON) -> dict:
    return dict(_triple_masses_cached(graph, as_fraction(eps)))


# ---------------------------------------------------------------------------
# verifiers


def _shared(e, e2):
    return set(e) & set(e2)


def _pair_check(q, q2, a, a2) -> bool:
    (e, b), (e2, b2) = q, q2
    e, e2 = tuple(e), tuple(e2)
    ai = dict(zip(e, (int(x) for x in a)))
    ai2 = dict(zip(e2, (int(x) for x in a2)))
    if e == e2 and b != b2:
        i, j = e
        return (ai[i] + ai2[i]) % 3 != (ai[j] + ai2[j]) % 3
    if b == b2:
        return all(ai[v] == ai2[v] for v in _shared(e, e2))
    return True


def threecol_2p_verify(q, q2, a, a2) -> bool:
    """Edge-verification and well-definition tests; otherwise accept."""
    return _pair_check(q, q2, a, a2)


def threecol_3p_verify(q, q2, q3, a, a2, a3) -> bool:
    """Two-prover tests on slots one and two plus the third prover's consistency."""
    if tuple(q3[0]) == tuple(q[0]) and q3[1] == q[1]:
        if tuple(int(x) for x in a3) != tuple(int(x) for x in a):
            return False
    if tuple(q3[0]) == tuple(q2[0]) and q3[1] == q2[1]:
        if tuple(int(x) for x in a3) != tuple(int(x) for x in a2):
            return False
    return _pair_check(q, q2, a, a2)


# ---------------------------------------------------------------------------
# strategies


def labels_for_coloring(coloring, rng: np.random.Generator, permute_colors: bool = False):
    """Random label vectors ``(l0, l1)`` with ``l0 + l1 = coloring`` mod 3."""
    c = np.asarray(coloring, dtype=np.int64)
    if permute_colors:
        c = rng.permutation(3)[c]
    l0 = rng.integers(3, size=len(c)).astype(np.int64)
    l1 = (c - l0) % 3
    return l0, l1


def table_from_labels(graph: GraphInstance, l0, l1) -> np.ndarray:
    """Answer table (one code per question index) of a labeling strategy."""
    labels = (np.asarray(l0, dtype=np.int64), np.asarray(l1, dtype=np.int64))
    out = np.empty(num_questions(graph), dtype=np.int64)
    for k, (i, j) in enumerate(graph.edges):
        for b in (0, 1):
            out[2 * k + b] = 3 * labels[b][i] + labels[b][j]
    return out


class HonestColoringProvers:
    """Share a proper coloring and fresh random labels on every setup."""

    def __init__(self, graph: GraphInstance, coloring, permute_colors: bool = False):
        if not is_proper_coloring(graph, coloring):
            raise ValueError("witness is not a proper 3-coloring of the graph")
        self.graph = graph
        self.coloring = np.asarray(coloring, dtype=np.int64)
        self.permute_colors = permute_colors

    def setup(self, rng):
        l0, l1 = labels_for_coloring(self.coloring, rng, self.permute_colors)
        return table_from_labels(self.graph, l0, l1)


class FixedTableProvers:
    """Deterministic answer tables, possibly different per prover."""

    def __init__(self, *tables):
        self.tables = [np.asarray(t, dtype=np.int64) for t in tables]

    def setup(self, rng):
        return self.tables[0] if len(self.tables) == 1 else tuple(self.tables)


# ---------------------------------------------------------------------------
# exact acceptance


@lru_cache(maxsize=64)
def _support_arrays(graph: GraphInstance, eps: Fraction):
    masses = _pair_masses_cached(graph, eps)
    keys = sorted(masses)
    denom = math.lcm(*(masses[k].denominator for k in keys))
    q1 = np.array([k[0] for k in keys], dtype=np.int64)
    q2 = np.array([k[1] for k in keys], dtype=np.int64)
    weights = np.array([int(masses[k] * denom) for k in keys], dtype=np.int64)
    accept = np.zeros((len(keys), 9, 9), dtype=np.uint8)
    for p, (x, y) in enumerate(keys):
        qa, qb = question_at(graph, x), question_at(graph, y)
        for ca in range(9):
            for cb in range(9):
                accept[p, ca, cb] = threecol_2p_verify(qa, qb, decode_answer(ca), decode_answer(cb))
    return q1, q2, weights, int(denom), accept


def acceptance_2p_batch(graph: GraphInstance, tables1, tables2, eps=DEFAULT_EPSILON) -> tuple:
    """Exact acceptance numerators of many strategy pairs and their common denominator."""
    q1, q2, weights, denom, accept = _support_arrays(graph, as_fraction(eps))
    t1 = np.atleast_2d(np.asarray(tables1, dtype=np.int64))
    t2 = np.atleast_2d(np.asarray(tables2, dtype=np.int64))
    n_q = num_questions(graph)
    if t1.shape[1] != n_q or t2.shape[1] != n_q or len(t1) != len(t2):
        raise ValueError(f"answer tables must have one entry per question ({n_q})")
    if np.any((t1 < 0) | (t1 > 8)) or np.any((t2 < 0) | (t2 > 8)):
        raise ValueError("answer codes must lie in 0..8")
    nums = kernels.coloring_acceptance(t1, t2, q1, q2, weights, accept)
    return np.asarray(nums, dtype=np.int64), denom


def acceptance_2p(graph: GraphInstance, table1, table2=None, eps=DEFAULT_EPSILON) -> Fraction:
    table2 = table1 if table2 is None else table2
    nums, denom = acceptance_2p_batch(graph, [table1], [table2], eps)
    return Fraction(int(nums[0]), denom)


def acceptance_2p_reference(graph: GraphInstance, table1, table2=None, eps=DEFAULT_EPSILON) -> Fraction:
    """Same value as :func:`acceptance_2p` computed directly from the verifier."""
    table2 = table1 if table2 is None else table2
    total = Fraction(0)
    for (x, y), mass in dg_pair_masses(graph, eps).items():
        qa, qb = question_at(graph, x), question_at(graph, y)
        if threecol_2p_verify(qa, qb, decode_answer(table1[x]), decode_answer(table2[y])):
            total += mass
    return total


def acceptance_3p(graph: GraphInstance, t1, t2=None, t3=None, eps=DEFAULT_EPSILON) -> Fraction:
    t2 = t1 if t2 is None else t2
    t3 = t1 if t3 is None else t3
    total = Fraction(0)
    for (x, y, z), mass in dg_triple_masses(graph, eps).items():
        qs = [question_at(graph, k) for k in (x, y, z)]
        ans = [decode_answer(t[k]) for t, k in ((t1, x), (t2, y), (t3, z))]
        if threecol_3p_verify(*qs, *ans):
            total += mass
    return total


def play_2p(graph: GraphInstance, t1, t2, eps, rng) -> tuple:
    q, q2 = dg_sample(graph, eps, rng)
    a = decode_answer(t1[question_index(graph, q)])
    a2 = decode_answer(t2[question_index(graph, q2)])
    return (q, q2), (a, a2), threecol_2p_verify(q, q2, a, a2)


def play_3p(graph: GraphInstance, t1, t2, t3, eps, rng) -> tuple:
    qs = dg_sample_triple(graph, eps, rng)
    ans = tuple(decode_answer(t[question_index(graph, q)]) for t, q in zip((t1, t2, t3), qs))
    return qs, ans, threecol_3p_verify(*qs, *ans)


def all_labeling_tables(graph: GraphInstance) -> np.ndarray:
    """Answer tables of every shared labeling ``(l0, l1)`` in F3^n x F3^n."""
    n = graph.n
    grid = np.array(list(itertools.product(range(3), repeat=2 * n)), dtype=np.int64)
    l0, l1 = grid[:, :n], grid[:, n:]
    out = np.empty((len(grid), num_questions(graph)), dtype=np.int64)
    for k, (i, j) in enumerate(graph.edges):
        out[:, 2 * k] = 3 * l0[:, i] + l0[:, j]
        out[:, 2 * k + 1] = 3 * l1[:, i] + l1[:, j]
    return out


def best_labeling_table(graph: GraphInstance, eps=DEFAULT_EPSILON) -> tuple:
    """Exhaustive optimum over shared labeling tables: ``(table, acceptance)``."""
    tables = all_labeling_tables(graph)
    nums, denom = acceptance_2p_batch(graph, tables, tables, eps)
    best = int(np.argmax(nums))
    return tables[best], Fraction(int(nums[best]), denom)


def load_coloring_witness(path) -> list:
    data = json.loads(Path(path).read_text())
    if "coloring" not in data:
        raise ValueError("coloring witness needs a 'coloring' key")
    return [int(c) for c in data["coloring"]]
