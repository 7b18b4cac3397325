"""Two-prover Hamiltonian-cycle protocol over the F_q commitment.

The verifier sends a random matrix ``B`` to the first prover, who commits to
the adjacency matrix ``M`` of the permuted graph as ``Y = A + B*M``. On
challenge 0 the second prover reveals the permutation and all of ``A``; on
challenge 1 it reveals the permuted cycle and the entries of ``A`` on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..field import FieldSpec, sample_vector
from .graphs import GraphInstance, is_hamiltonian_cycle


class ShapeError(ValueError):
    pass


def _perm_array(perm, n: int) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (n,) or sorted(perm.tolist()) != list(range(n)):
        raise ShapeError("not a permutation of the vertex set")
    return perm


def permuted_adjacency(graph: GraphInstance, perm) -> np.ndarray:
    """Adjacency matrix of the graph with vertex ``i`` relabelled ``perm[i]``."""
    perm = _perm_array(perm, graph.n)
    m = np.zeros((graph.n, graph.n), dtype=np.int64)
    for u, v in graph.edges:
        m[perm[u], perm[v]] = m[perm[v], perm[u]] = 1
    return m


def hc_commit_matrix(graph: GraphInstance, perm, B, A, spec: FieldSpec) -> np.ndarray:
    n = graph.n
    B = spec.array(B)
    A = spec.array(A)
    if B.shape != (n, n) or A.shape != (n, n):
        raise ShapeError(f"A and B must be {n}x{n}")
    M = permuted_adjacency(graph, perm)
    return (A + B * M) % spec.q


def cycle_edges(cycle) -> list:
    """Directed edges ``(c_k, c_{k+1})`` of a closed vertex sequence."""
    cycle = [int(v) for v in cycle]
    return [(cycle[k], cycle[(k + 1) % len(cycle)]) for k in range(len(cycle))]


@dataclass(frozen=True)
class HamiltonianWitness:
    cycle: tuple
    perm: np.ndarray
    A: np.ndarray

    @property
    def permuted_cycle(self) -> list:
        return [(int(self.perm[u]), int(self.perm[v])) for u, v in cycle_edges(self.cycle)]


def hc_respond(ch: int, witness: HamiltonianWitness):
    if int(ch) == 0:
        return (witness.perm.copy(), witness.A.copy())
    if int(ch) == 1:
        cyc = witness.permuted_cycle
        return (cyc, [int(witness.A[u, v]) for u, v in cyc])
    raise ValueError("challenge must be 0 or 1")


def _closed_cycle_vertices(edges, n: int):
    """Vertex order of a closed directed cycle through all ``n`` vertices, or None."""
    edges = [(int(u), int(v)) for u, v in edges]
    if len(edges) != n or n < 3:
        return None
    for k in range(n):
        if edges[k][1] != edges[(k + 1) % n][0]:
            return None
    verts = [u for u, _ in edges]
    if sorted(verts) != list(range(n)):
        return None
    return verts


def hc_verify(graph: GraphInstance, B, Y, ch, resp, spec: FieldSpec) -> bool:
    """Verifier check for one conversation; shape problems raise ShapeError."""
    n, q = graph.n, spec.q
    B = spec.array(B)
    Y = spec.array(Y)
    if B.shape != (n, n) or Y.shape != (n, n):
        raise ShapeError("B and Y must be n x n")
    if int(ch) == 0:
        perm, A = resp
        perm = _perm_array(perm, n)
        A = np.asarray(A)
        if A.shape != (n, n):
            raise ShapeError("opening A must be n x n")
        if np.any((A < 0) | (A >= q)):
            return False
        M = permuted_adjacency(graph, perm)
        return bool(np.array_equal(Y, (spec.array(A) + B * M) % q))
    if int(ch) == 1:
        edges, opened = resp
        edges = list(edges)
        opened = [int(x) for x in opened]
        if len(opened) != len(edges):
            raise ShapeError("one opening per cycle edge is required")
        if _closed_cycle_vertices(edges, n) is None:
            return False
        for (u, v), a in zip(edges, opened):
            if not 0 <= a < q:
                return False
            if int(Y[u, v]) != (a + int(B[u, v])) % q:
                return False
        return True
    raise ValueError("challenge must be 0 or 1")


class HamiltonianProtocol:
    challenge_space = (0, 1)

    def __init__(self, graph: GraphInstance, spec: FieldSpec):
        self.graph = graph
        self.spec = spec

    def sample_rand(self, rng):
        return sample_vector(self.spec, rng, (self.graph.n, self.graph.n))

    def verify(self, rand, com, ch, resp) -> bool:
        return hc_verify(self.graph, rand, com, ch, resp, self.spec)


class _Committer:
    def __init__(self, graph, perm, A, spec):
        self.graph, self.perm, self.A, self.spec = graph, perm, A, spec

    def commit(self, B):
        return hc_commit_matrix(self.graph, self.perm, B, self.A, self.spec)


class _Responder:
    def __init__(self, witness):
        self.witness = witness

    def respond(self, ch):
        return hc_respond(ch, self.witness)


class HonestHCProvers:
    """Provers that know a Hamiltonian cycle and pre-agree ``perm`` and ``A``."""

    def __init__(self, graph: GraphInstance, cycle, spec: FieldSpec):
        if not is_hamiltonian_cycle(graph, cycle):
            raise ValueError("witness is not a Hamiltonian cycle of the graph")
        self.graph, self.cycle, self.spec = graph, tuple(int(v) for v in cycle), spec

    def setup(self, rng):
        n = self.graph.n
        perm = rng.permutation(n).astype(np.int64)
        A = sample_vector(self.spec, rng, (n, n))
        w = HamiltonianWitness(self.cycle, perm, A)
        return _Committer(self.graph, perm, A, self.spec), _Responder(w)


class OneBranchHCProvers:
    """Commit honestly to a permuted graph but know no cycle.

    Challenge 0 is always answered correctly; on challenge 1 a fixed vertex
    ordering is opened with values that only pass where ``M`` happens to be 1.
    """

    def __init__(self, graph: GraphInstance, spec: FieldSpec):
        self.graph, self.spec = graph, spec

    def setup(self, rng):
        n = self.graph.n
        perm = rng.permutation(n).astype(np.int64)
        A = sample_vector(self.spec, rng, (n, n))
        committer = _Committer(self.graph, perm, A, self.spec)
        fake_cycle = tuple(range(n))
        witness = HamiltonianWitness(fake_cycle, perm, A)
        return committer, _Responder(witness)


class _RandomP1:
    def __init__(self, n, spec, rng):
        self.n, self.spec, self.rng = n, spec, rng

    def commit(self, B):
        return sample_vector(self.spec, self.rng, (self.n, self.n))


class _RandomP2:
    def __init__(self, n, spec, rng):
        self.n, self.spec, self.rng = n, spec, rng

    def respond(self, ch):
        if int(ch) == 0:
            return (self.rng.permutation(self.n), sample_vector(self.spec, self.rng, (self.n, self.n)))
        order = self.rng.permutation(self.n)
        edges = cycle_edges(order)
        return (edges, [int(x) for x in sample_vector(self.spec, self.rng, (self.n,))])


class RandomHCProvers:
    """Provers answering uniformly random field elements and permutations."""

    def __init__(self, graph: GraphInstance, spec: FieldSpec):
        self.graph, self.spec = graph, spec

    def setup(self, rng):
        seeds = rng.integers(2**63, size=2)
        r1 = np.random.default_rng(int(seeds[0]))
        r2 = np.random.default_rng(int(seeds[1]))
        return _RandomP1(self.graph.n, self.spec, r1), _RandomP2(self.graph.n, self.spec, r2)
