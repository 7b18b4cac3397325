"""Simple undirected graphs, edge-list parsing and witness checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GraphInstance:
    """Graph on vertices ``0..n-1`` with edges stored as sorted pairs.

    Edge order is the order of first appearance in the input, which fixes the
    question indexing used by the coloring protocols.
    """

    n: int
    edges: tuple
    _incident: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise GraphFormatError("graph needs at least one vertex")
        seen = set()
        canon = []
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"edge ({u}, {v}) out of range for n={self.n}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError(f"duplicate edge {key}")
            seen.add(key)
            canon.append(key)
        object.__setattr__(self, "edges", tuple(canon))
        incident = [[] for _ in range(self.n)]
        for idx, (u, v) in enumerate(canon):
            incident[u].append(idx)
            incident[v].append(idx)
        object.__setattr__(self, "_incident", tuple(tuple(x) for x in incident))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def incident_edges(self, v: int) -> tuple:
        """Indices of the edges touching ``v``."""
        return self._incident[v]

    def edge_index(self, u: int, v: int) -> int:
        return self.edges.index((min(u, v), max(u, v)))

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def adjacency(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            m[u, v] = m[v, u] = 1
        return m

    def permuted(self, perm) -> GraphInstance:
        perm = [int(p) for p in perm]
        return GraphInstance(self.n, tuple((perm[u], perm[v]) for u, v in self.edges))


def complete_graph(n: int) -> GraphInstance:
    return GraphInstance(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def cycle_graph(n: int) -> GraphInstance:
    return GraphInstance(n, tuple((i, (i + 1) % n) for i in range(n)))


def star_graph(n: int) -> GraphInstance:
    return GraphInstance(n, tuple((0, i) for i in range(1, n)))


def path_graph(n: int) -> GraphInstance:
    return GraphInstance(n, tuple((i, i + 1) for i in range(n - 1)))


def parse_edge_list(text: str, n: int | None = None) -> GraphInstance:
    """Parse ``u v`` lines (0-indexed); blank lines and ``#`` comments are skipped."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: non-integer vertex") from exc
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex index")
        edges.append((u, v))
    if not edges:
        raise GraphFormatError("edge list is empty")
    size = max(max(e) for e in edges) + 1
    return GraphInstance(n if n is not None else size, tuple(edges))


def load_graph(path) -> GraphInstance:
    return parse_edge_list(Path(path).read_text())


def is_hamiltonian_cycle(graph: GraphInstance, cycle) -> bool:
    """``cycle`` is a vertex sequence visiting every vertex once, closing up."""
    cycle = [int(v) for v in cycle]
    if len(cycle) != graph.n or sorted(cycle) != list(range(graph.n)):
        return False
    if graph.n < 3:
        return False
    return all(graph.has_edge(cycle[k], cycle[(k + 1) % graph.n]) for k in range(graph.n))


def is_proper_coloring(graph: GraphInstance, coloring) -> bool:
    coloring = [int(c) for c in coloring]
    if len(coloring) != graph.n or any(c not in (0, 1, 2) for c in coloring):
        return False
    return all(coloring[u] != coloring[v] for u, v in graph.edges)
