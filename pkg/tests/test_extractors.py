import itertools
from fractions import Fraction

import numpy as np
import pytest

from relzk.bounds import qpok_extraction_lower
from relzk.extractors.canonical import QuantumProverSpec, canonical_extract_classical, canonical_extract_quantum
from relzk.extractors.coloring import (
    extract_3col_classical,
    extract_3col_quantum,
    ghz_labeling_spec,
    random_symmetric_spec,
)
from relzk.extractors.special import ExtractionError, hc_double_opening_census, k0_hc, k0_subset
from relzk.extractors.toy_specs import KINDS, acceptance_suite, subset_toy_spec, toy_protocol
from relzk.field import FieldSpec
from relzk.protocols.coloring import (
    acceptance_2p,
    all_labeling_tables,
    labels_for_coloring,
    num_questions,
    table_from_labels,
)
from relzk.protocols.graphs import complete_graph, cycle_graph, is_hamiltonian_cycle, path_graph
from relzk.protocols.hamiltonian import (
    HamiltonianProtocol,
    HonestHCProvers,
    OneBranchHCProvers,
    hc_verify,
)
from relzk.protocols.subset_sum import HonestSubsetProvers, SubsetSumInstance, SubsetSumProtocol
from relzk.quantum import QuantumConfigError, apply_local
from relzk.rng import trial_rng

TRIANGLE = cycle_graph(3)
F101 = FieldSpec(101)


# -- special extractors ------------------------------------------------------------------


def test_k0_hc_identity():
    cyc = [(0, 1), (1, 2), (2, 0)]
    w = k0_hc(TRIANGLE, None, None, ([0, 1, 2], None), (cyc, None))
    assert w == [0, 1, 2] and is_hamiltonian_cycle(TRIANGLE, w)


def test_k0_hc_rotation():
    perm = [1, 2, 0]
    cyc = [(perm[u], perm[v]) for u, v in [(0, 1), (1, 2), (2, 0)]]
    w = k0_hc(TRIANGLE, None, None, (perm, None), (cyc, None))
    assert w == [0, 1, 2]


@pytest.mark.parametrize("perm", [[0, 0, 1], [0, 1], [0, 1, 3]])
def test_k0_hc_rejects_non_permutations(perm):
    with pytest.raises(ExtractionError):
        k0_hc(TRIANGLE, None, None, (perm, None), ([(0, 1), (1, 2), (2, 0)], None))


def test_k0_subset_examples():
    assert k0_subset((1, 2, 3), 3, ((0, 1, 1),), ((1, 0, 1),)).tolist() == [1, 1, 0]
    assert k0_subset((1, 2, 3), 3, ((0, 0, 0),), ((1, 0, 1),)).tolist() == [1, 0, 1]
    w = k0_subset((1, 2, 3), 3, ((1, 0, 1),), ((1, 0, 0),))
    assert int(np.dot(w, (1, 2, 3))) == 3
    with pytest.raises(ExtractionError):
        k0_subset((1, 2, 3), 3, ((0, 1),), ((1, 0, 1),))


# -- double-opening census ---------------------------------------------------------------


def _literal_identity_census_q2():
    """Max p_both over entry-local attacks, path on 3 vertices, identity perm, cycle 0-1-2."""
    g, spec, n = path_graph(3), FieldSpec(2), 3
    cyc = [(0, 1), (1, 2), (2, 0)]
    perm = np.arange(n)
    best = Fraction(0)
    entry_options = list(itertools.product(itertools.product(range(2), repeat=2), range(2), range(2)))
    for attack in itertools.product(entry_options, repeat=3):
        hits = 0
        for bits in itertools.product(range(2), repeat=3):
            B = np.zeros((n, n), dtype=np.int64)
            Y = np.zeros((n, n), dtype=np.int64)
            A = np.zeros((n, n), dtype=np.int64)
            opened = []
            for (u, v), (gfun, a0, a1), b in zip(cyc, attack, bits):
                B[u, v] = b
                Y[u, v] = gfun[b]
                A[u, v] = a0
                opened.append(a1)
            # off-cycle entries stay honest commitments to the adjacency matrix with A = 0
            M = np.zeros((n, n), dtype=np.int64)
            for u, v in g.edges:
                M[u, v] = M[v, u] = 1
            for u in range(n):
                for v in range(n):
                    if (u, v) not in cyc:
                        Y[u, v] = (B[u, v] * M[u, v]) % 2
            ok0 = hc_verify(g, B, Y, 0, (perm, A), spec)
            ok1 = hc_verify(g, B, Y, 1, (cyc, opened), spec)
            hits += ok0 and ok1
        best = max(best, Fraction(hits, 8))
    return best


def test_census_matches_literal_oracle_q2():
    literal = _literal_identity_census_q2()
    assert literal == Fraction(1, 2)
    cyc = [(0, 1), (1, 2), (2, 0)]
    rows = [p for perm, c, p, valid in hc_double_opening_census(path_graph(3), 2)
            if list(perm) == [0, 1, 2] and c == cyc]
    assert max(rows) == literal


@pytest.mark.parametrize("q,expected", [(2, Fraction(1, 2)), (3, Fraction(1, 3)), (5, Fraction(1, 5))])
def test_failing_adversaries_are_bounded_by_inverse_q(q, expected):
    failing = [p for _, _, p, valid in hc_double_opening_census(path_graph(3), q) if not valid]
    assert failing and max(failing) == expected
    assert all(p <= Fraction(1, q) for p in failing)


def test_census_on_hamiltonian_graph():
    rows = list(hc_double_opening_census(TRIANGLE, 2))
    # every directed spanning cycle of the triangle is Hamiltonian, so K0 never fails
    assert all(v for *_, v in rows)
    assert max(p for *_, p, _ in rows) == 1


# -- canonical classical extraction -----------------------------------------------------


def test_classical_honest_hc_always_extracts():
    g = cycle_graph(5)
    proto = HamiltonianProtocol(g, F101)
    provers = HonestHCProvers(g, [0, 1, 2, 3, 4], F101)
    for i in range(300):
        r = canonical_extract_classical(proto, provers, trial_rng(9, i))
        assert r.valid and r.accepted == (True, True)
        assert is_hamiltonian_cycle(g, r.witness)


def test_classical_one_branch_never_extracts():
    g = path_graph(4)
    proto = HamiltonianProtocol(g, F101)
    both = 0
    for i in range(200):
        r = canonical_extract_classical(proto, OneBranchHCProvers(g, F101), trial_rng(10, i))
        assert not r.valid
        both += all(r.accepted)
    # the challenge-1 branch only passes when every non-edge opening meets B = 0
    assert both <= 10


def test_classical_honest_subset_solution():
    inst = SubsetSumInstance((3, 5, 7, 11), 14, F101)
    proto = SubsetSumProtocol(inst)
    provers = HonestSubsetProvers(inst, [1, 0, 0, 1])
    for i in range(300):
        r = canonical_extract_classical(proto, provers, trial_rng(11, i))
        assert r.valid and int(np.dot(r.witness, inst.s)) % 101 == 14


# -- canonical quantum extraction -------------------------------------------------------


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("ancilla", [False, True])
def test_ledger_sums_to_one(kind, ancilla):
    spec = subset_toy_spec(kind, np.random.default_rng(4), ancilla=ancilla)
    res = canonical_extract_quantum(toy_protocol(), spec)
    assert abs(sum(b["probability"] for b in res.branch_ledger) - 1.0) < 1e-10
    assert 0.0 <= res.success_probability <= res.both_accept_probability + 1e-12


def test_honest_embedding_succeeds_with_probability_one():
    res = canonical_extract_quantum(toy_protocol(), subset_toy_spec("honest"), np.random.default_rng(0))
    assert res.success_probability == pytest.approx(1.0, abs=1e-12)
    assert res.acceptance_probability == pytest.approx(1.0, abs=1e-12)
    assert res.sampled_witness is not None


def test_one_branch_cheater():
    res = canonical_extract_quantum(toy_protocol(), subset_toy_spec("one-branch"))
    assert res.success_probability == pytest.approx(0.0, abs=1e-12)
    assert res.acceptance_probability == pytest.approx(0.5, abs=1e-12)


def test_extraction_bound_on_suite():
    for spec in acceptance_suite(77, 20):
        res = canonical_extract_quantum(toy_protocol(), spec)
        if res.acceptance_probability > 0.5:
            rhs = qpok_extraction_lower(res.acceptance_probability, 2, res.delta_ss, res.ra_max)
            assert res.bound_rhs == pytest.approx(rhs)
            assert res.success_probability >= rhs - 1e-9


def test_post_rewind_state_matches_operator_formula():
    spec = subset_toy_spec("superposed", np.random.default_rng(2), ancilla=True)
    d1, d2 = spec.dims
    rand, ch = 1, 1
    psi = apply_local(spec.state, spec.act1[rand], spec.dims, 0)
    com, wcom = next((c, w) for c, w in spec.com_family.items()
                     if np.linalg.norm(apply_local(psi, w, spec.dims, 0)) > 1e-6)
    sigma_vec = apply_local(psi, wcom, spec.dims, 0)
    sigma = np.outer(sigma_vec, sigma_vec.conj())
    sigma /= np.trace(sigma).real
    u = spec.act2[ch]
    for resp, wr in spec.resp_family[ch].items():
        # stepwise: rotate, project, rotate back
        step = apply_local(apply_local(apply_local(sigma_vec, u, spec.dims, 1), wr, spec.dims, 1),
                           u.conj().T, spec.dims, 1)
        if np.linalg.norm(step) < 1e-8:
            continue
        rho5 = np.outer(step, step.conj())
        rho5 /= np.trace(rho5).real
        big = np.kron(np.eye(d1), u.conj().T @ wr @ u)
        ref = big @ sigma @ big
        ref /= np.trace(ref).real
        assert np.allclose(rho5, ref, atol=1e-10)


def test_quantum_spec_validation():
    spec = subset_toy_spec("honest")
    with pytest.raises(QuantumConfigError):
        QuantumProverSpec(spec.state, spec.dims, spec.rand_values,
                          {0: spec.act1[0], 1: 2 * spec.act1[1]}, spec.com_family,
                          spec.challenges, spec.act2, spec.resp_family)


# -- 3-coloring ------------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(20))
def test_honest_tables_extract_a_proper_coloring(seed):
    g = cycle_graph(6)
    rng = np.random.default_rng(seed)
    l0, l1 = labels_for_coloring([0, 1, 2, 0, 1, 2], rng, permute_colors=True)
    ex = extract_3col_classical(g, table_from_labels(g, l0, l1))
    assert ex.proper and not ex.question_marked


def test_corrupted_vertex_is_question_marked():
    g = complete_graph(3)
    l0 = np.array([0, 1, 2])
    l1 = np.array([0, 0, 0])
    table = table_from_labels(g, l0, l1)
    # corrupt the label of vertex 2 in the b = 0 answer to edge (0, 2) only
    bad = table.copy()
    k = g.edges.index((0, 2))
    bad[2 * k] = 3 * (bad[2 * k] // 3) + (bad[2 * k] % 3 + 1) % 3
    ex = extract_3col_classical(g, bad)
    assert ex.question_marked == {2}
    assert ex.coloring == [0, 1, 2] and ex.proper


def test_k4_extraction_is_never_proper():
    g = complete_graph(4)
    tables = all_labeling_tables(g)
    rng = np.random.default_rng(0)
    for t in tables[rng.choice(len(tables), 300, replace=False)]:
        assert not extract_3col_classical(g, t).proper


@pytest.mark.parametrize("seed", range(4))
def test_ghz_labeling_strategy_is_consistent(seed):
    g = complete_graph(3)
    rng = np.random.default_rng(seed)
    tables = [table_from_labels(g, *labels_for_coloring([0, 1, 2], rng)) for _ in range(2)]
    spec = ghz_labeling_spec(g, tables)
    res = extract_3col_quantum(spec, rng)
    assert np.array_equal(res.table1, res.table2)
    assert res.classical.proper
    assert res.p_quantum == pytest.approx(1.0) and res.gap_ok


@pytest.mark.parametrize("seed", range(3))
def test_gap_lemma_on_entangled_strategies(seed):
    g = complete_graph(3)
    rng = np.random.default_rng(100 + seed)
    bias = table_from_labels(g, *labels_for_coloring([0, 1, 2], rng))
    spec = random_symmetric_spec(g, 2, rng, bias=bias)
    res = extract_3col_quantum(spec, rng)
    assert 0.0 <= res.p_quantum <= 1.0 + 1e-12
    assert res.gap_ok


def test_labeling_acceptance_never_exceeds_ceiling_without_witness():
    g = complete_graph(3)
    ceiling = 1 - Fraction(1, 3 * g.num_edges)
    for t in all_labeling_tables(g):
        if not extract_3col_classical(g, t).proper:
            assert acceptance_2p(g, t) <= ceiling


def test_general_answer_functions_can_beat_the_labeling_ceiling():
    """Frozen counterexamples: arbitrary tables exceed the labeling-strategy ceiling."""
    k3 = complete_graph(3)
    t3 = [0, 1, 0, 1, 0, 1]  # found by exhaustive search over 9^6 tables
    assert acceptance_2p(k3, t3) == Fraction(17, 18)
    assert not extract_3col_classical(k3, t3).proper
    assert num_questions(complete_graph(4)) == 12
