"""Witness extraction for the 3-coloring protocols.

The classical extractor replays every question pair in the support of the
question distribution against deterministic answer tables, marking vertices
whose edge-verification tests pass and question-marking vertices whose
recorded colors conflict or whose well-definition tests fail. The quantum
extractor measures each prover on every question in turn (keeping the
collapsed state), turns the outcomes into two answer tables, and hands them
to the classical extractor.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..protocols.coloring import (
    DEFAULT_EPSILON,
    decode_answer,
    dg_pair_masses,
    dg_triple_masses,
    num_questions,
    question_at,
    threecol_2p_verify,
    threecol_3p_verify,
)
from ..protocols.graphs import GraphInstance, is_proper_coloring
from ..quantum import ProjectorFamily, QuantumConfigError, partial_trace

MAX_LOCAL_DIM = 4


@dataclass
class ColoringExtraction:
    coloring: list
    marked: dict
    question_marked: set
    candidates: list = field(repr=False)
    proper: bool = False

    def to_dict(self) -> dict:
        return {
            "witness": self.coloring,
            "proper": self.proper,
            "question_marked": sorted(self.question_marked),
        }


def _majority(counter: Counter) -> int:
    if not counter:
        return 0
    best = max(counter.values())
    return min(c for c, k in counter.items() if k == best)


def extract_3col_classical(graph: GraphInstance, table1, table2=None, eps=DEFAULT_EPSILON) -> ColoringExtraction:
    """Replay all question pairs against two deterministic answer tables.

    A vertex whose recorded colors conflict, or that fails a well-definition
    test, is question-marked. At the end question-marked and unmarked vertices
    take the most frequent color recorded for them in passing edge tests
    (lowest color on ties, color 0 when nothing was recorded).
    """
    table2 = table1 if table2 is None else table2
    marked: dict = {}
    qmarks: set = set()
    candidates = [Counter() for _ in range(graph.n)]
    for x, y in sorted(dg_pair_masses(graph, eps)):
        (e, b), (e2, b2) = question_at(graph, x), question_at(graph, y)
        a, a2 = decode_answer(table1[x]), decode_answer(table2[y])
        ok = threecol_2p_verify((e, b), (e2, b2), a, a2)
        if e == e2 and b != b2:
            if not ok:
                continue
            for pos, v in enumerate(e):
                color = (a[pos] + a2[pos]) % 3
                candidates[v][color] += 1
                if v not in marked:
                    marked[v] = color
                elif marked[v] != color:
                    qmarks.add(v)
        elif b == b2 and not ok:
            mine, theirs = dict(zip(e, a)), dict(zip(e2, a2))
            qmarks.update(v for v in set(e) & set(e2) if mine[v] != theirs[v])
    coloring = []
    for v in range(graph.n):
        if v in marked and v not in qmarks:
            coloring.append(int(marked[v]))
        else:
            coloring.append(_majority(candidates[v]))
    return ColoringExtraction(coloring, marked, qmarks, candidates, is_proper_coloring(graph, coloring))


# ---------------------------------------------------------------------------
# quantum


@dataclass
class ThreeProverQuantumSpec:
    """Symmetric three-prover strategy: one state, one family per question.

    ``families[k]`` is a complete projective measurement on one prover's
    register whose labels are answer codes ``3*a_i + a_j``.
    """

    graph: GraphInstance
    state: np.ndarray
    dim: int
    families: list

    def __post_init__(self):
        if self.dim > MAX_LOCAL_DIM:
            raise QuantumConfigError(f"local dimension limited to {MAX_LOCAL_DIM}")
        self.state = np.asarray(self.state, dtype=complex).reshape(-1)
        if self.state.shape != (self.dim**3,):
            raise QuantumConfigError("state must live on three registers of size dim")
        if not math.isclose(np.linalg.norm(self.state), 1.0, abs_tol=1e-10):
            raise QuantumConfigError("state must be normalised")
        if len(self.families) != num_questions(self.graph):
            raise QuantumConfigError("one measurement per question is required")
        for fam in self.families:
            fam.complete = True
            fam.check()
            if fam.dim != self.dim:
                raise QuantumConfigError("family dimension does not match the registers")

    def stacked(self, k: int) -> tuple:
        """Projectors of question ``k`` padded to all nine answer codes."""
        fam = self.families[k]
        out = np.zeros((9, self.dim, self.dim), dtype=complex)
        for label, p in fam.items():
            out[int(label)] = p
        return out


def diagonal_family(dim: int, answers) -> ProjectorFamily:
    """Computational-basis measurement answering ``answers[k]`` on ``|k>``."""
    groups: dict = {}
    for k, code in enumerate(answers):
        groups.setdefault(int(code), []).append(k)
    projs, labels = [], []
    for code, ks in sorted(groups.items()):
        p = np.zeros((dim, dim), dtype=complex)
        for k in ks:
            p[k, k] = 1
        projs.append(p)
        labels.append(code)
    return ProjectorFamily(projs, labels, complete=True)


def symmetrize(state: np.ndarray, dim: int) -> np.ndarray:
    """Average a three-register vector over all register permutations."""
    t = np.asarray(state, dtype=complex).reshape(dim, dim, dim)
    s = sum(np.transpose(t, p) for p in itertools.permutations(range(3)))
    return (s / np.linalg.norm(s)).reshape(-1)


def ghz_labeling_spec(graph: GraphInstance, tables) -> ThreeProverQuantumSpec:
    """Equal superposition of ``|k>|k>|k>`` over the given answer tables."""
    d = len(tables)
    psi = np.zeros(d**3, dtype=complex)
    for k in range(d):
        psi[k * d * d + k * d + k] = 1
    psi /= np.linalg.norm(psi)
    fams = [diagonal_family(d, [t[q] for t in tables]) for q in range(num_questions(graph))]
    return ThreeProverQuantumSpec(graph, psi, d, fams)


def quantum_acceptance_3p(spec: ThreeProverQuantumSpec, eps=DEFAULT_EPSILON) -> float:
    """Exact three-prover acceptance probability of ``spec``."""
    g, d = spec.graph, spec.dim
    psi = spec.state.reshape(d, d, d)
    stacks = [spec.stacked(k) for k in range(num_questions(g))]
    total = 0.0
    for (x, y, z), mass in dg_triple_masses(g, eps).items():
        amp = np.einsum("aij,bkl,cmn,jln->abcikm", stacks[x], stacks[y], stacks[z], psi, optimize=True)
        probs = np.sum(np.abs(amp) ** 2, axis=(3, 4, 5))
        qs = [question_at(g, k) for k in (x, y, z)]
        for a, b, c in zip(*np.nonzero(probs > 1e-15)):
            if threecol_3p_verify(*qs, decode_answer(a), decode_answer(b), decode_answer(c)):
                total += float(mass) * float(probs[a, b, c])
    return total


def _dephase(rho_effect: np.ndarray, stack: np.ndarray) -> np.ndarray:
    return np.einsum("aij,jk,akl->il", stack, rho_effect, stack)


def classical_acceptance_from_extraction(spec: ThreeProverQuantumSpec, eps=DEFAULT_EPSILON) -> float:
    """Exact acceptance of the answer tables the quantum extractor records.

    The table entry for the question in position ``i`` is distributed as the
    measurement of that question on the reduced two-prover state after the
    earlier questions' measurements have dephased it. Effects are evolved in
    the Heisenberg picture so each pair costs one contraction.
    """
    g, d = spec.graph, spec.dim
    N = num_questions(g)
    rho = np.outer(spec.state, spec.state.conj())
    rho12 = partial_trace(rho, [d, d, d], [0, 1]).reshape(d, d, d, d)
    stacks = [spec.stacked(k) for k in range(N)]
    effects = []
    for i in range(N):
        eff = stacks[i].copy()
        for k in range(i - 1, -1, -1):
            eff = np.array([_dephase(e, stacks[k]) for e in eff])
        effects.append(eff)
    total = 0.0
    for (x, y), mass in dg_pair_masses(g, eps).items():
        probs = np.einsum("aij,bkl,jlik->ab", effects[x], effects[y], rho12).real
        qa, qb = question_at(g, x), question_at(g, y)
        for a, b in zip(*np.nonzero(probs > 1e-15)):
            if threecol_2p_verify(qa, qb, decode_answer(a), decode_answer(b)):
                total += float(mass) * float(probs[a, b])
    return total


@dataclass
class QuantumColoringExtraction:
    table1: np.ndarray
    table2: np.ndarray
    classical: ColoringExtraction
    p_quantum: float
    p_classical: float
    delta: float

    @property
    def gap_ok(self) -> bool:
        return abs(self.p_quantum - self.p_classical) <= self.delta + 1e-9


def extract_3col_quantum(spec: ThreeProverQuantumSpec, rng: np.random.Generator, eps=DEFAULT_EPSILON):
    """Sample the extractor's recorded tables, extract, and report exact values.

    Each prover is asked every question in order; after each measurement the
    collapsed state is kept (rewinding a measurement-only activation is the
    identity). ``delta`` is ``16 |H| sqrt(1 - p_quantum)``.
    """
    g, d = spec.graph, spec.dim
    N = num_questions(g)
    psi = spec.state.reshape(d, d, d).copy()
    tables = []
    for axis in (0, 1):
        table = np.empty(N, dtype=np.int64)
        for k in range(N):
            stack = spec.stacked(k)
            branch = np.moveaxis(np.tensordot(stack, psi, axes=([2], [axis])), 1, axis + 1)
            probs = np.sum(np.abs(branch) ** 2, axis=(1, 2, 3))
            probs = np.clip(probs, 0, None)
            a = int(rng.choice(9, p=probs / probs.sum()))
            table[k] = a
            psi = branch[a] / math.sqrt(probs[a])
        tables.append(table)
    cls = extract_3col_classical(g, tables[0], tables[1], eps)
    pq = quantum_acceptance_3p(spec, eps)
    pc = classical_acceptance_from_extraction(spec, eps)
    delta = 16 * g.num_edges * math.sqrt(max(0.0, 1 - pq))
    return QuantumColoringExtraction(tables[0], tables[1], cls, pq, pc, delta)


def random_symmetric_spec(graph: GraphInstance, dim: int, rng: np.random.Generator, bias=None):
    """Random symmetric state with Haar-rotated families on random answers.

    With ``bias`` (an answer table) a fraction of each family's rank goes to
    the honest answer, which keeps acceptance high enough to be interesting.
    """
    from ..quantum import haar_unitary, random_state

    psi = symmetrize(random_state(dim**3, rng), dim)
    fams = []
    for k in range(num_questions(graph)):
        u = haar_unitary(dim, rng) if bias is None else np.eye(dim)
        codes = rng.integers(9, size=dim)
        if bias is not None:
            codes[: max(1, dim - 1)] = bias[k]
        groups: dict = {}
        for col, code in enumerate(codes):
            groups.setdefault(int(code), []).append(col)
        projs, labels = [], []
        for code, cols in sorted(groups.items()):
            v = u[:, cols]
            p = v @ v.conj().T
            projs.append((p + p.conj().T) / 2)
            labels.append(code)
        fams.append(ProjectorFamily(projs, labels, complete=True))
    return ThreeProverQuantumSpec(graph, psi, dim, fams)
