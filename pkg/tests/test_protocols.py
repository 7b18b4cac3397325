import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relzk.field import FieldSpec
from relzk.protocols.coloring import (
    HonestColoringProvers,
    acceptance_2p,
    acceptance_2p_reference,
    acceptance_3p,
    all_labeling_tables,
    best_labeling_table,
    decode_answer,
    dg_eval_evt,
    dg_eval_wdt,
    dg_pair_masses,
    dg_sample,
    dg_sample_triple,
    dg_triple_masses,
    encode_answer,
    labels_for_coloring,
    play_2p,
    play_3p,
    question_at,
    question_index,
    table_from_labels,
    threecol_2p_verify,
    threecol_3p_verify,
)
from relzk.protocols.graphs import (
    GraphFormatError,
    GraphInstance,
    complete_graph,
    cycle_graph,
    is_hamiltonian_cycle,
    is_proper_coloring,
    parse_edge_list,
    path_graph,
    star_graph,
)
from relzk.protocols.hamiltonian import (
    HamiltonianProtocol,
    HamiltonianWitness,
    RandomHCProvers,
    ShapeError,
    hc_commit_matrix,
    hc_respond,
    hc_verify,
    permuted_adjacency,
)
from relzk.protocols.subset_sum import (
    HonestSubsetProvers,
    SubsetSumInstance,
    SubsetSumProtocol,
    SubsetSumWitness,
    subset_commit,
    subset_respond,
    subset_verify,
)
from relzk.rng import trial_rng
from relzk.sigma import ACCEPT, TimingModel, run_sigma

K3, K4 = complete_graph(3), complete_graph(4)
F7, F101 = FieldSpec(7), FieldSpec(101)
THIRD = Fraction(1, 3)

# -- graphs ------------------------------------------------------------------------------


def test_parse_edge_list():
    g = parse_edge_list("0 1\n\n1 2  # comment\n2 0\n")
    assert g.n == 3 and g.num_edges == 3 and g.has_edge(0, 2)


@pytest.mark.parametrize("text", ["", "0\n", "0 x\n", "0 0\n", "0 1\n1 0\n", "-1 2\n"])
def test_parse_edge_list_errors(text):
    with pytest.raises(GraphFormatError):
        parse_edge_list(text)


def test_incident_edges_include_own_edge():
    for k, (i, j) in enumerate(K4.edges):
        assert k in K4.incident_edges(i) and k in K4.incident_edges(j)
    assert len(K4.incident_edges(0)) == 3


def test_witness_checks():
    assert is_hamiltonian_cycle(cycle_graph(5), [0, 1, 2, 3, 4])
    assert not is_hamiltonian_cycle(path_graph(4), [0, 1, 2, 3])
    assert is_proper_coloring(K3, [0, 1, 2])
    assert not is_proper_coloring(K3, [0, 1, 1])


# -- Hamiltonian cycle -------------------------------------------------------------------


def test_commit_matrix_examples():
    rng = np.random.default_rng(0)
    B = rng.integers(7, size=(3, 3))
    M = permuted_adjacency(K3, [0, 1, 2])
    assert np.array_equal(hc_commit_matrix(K3, [0, 1, 2], B, np.zeros((3, 3), int), F7), (B * M) % 7)
    A = rng.integers(7, size=(3, 3))
    assert np.array_equal(hc_commit_matrix(K3, [2, 0, 1], np.zeros((3, 3), int), A, F7), A)
    two = GraphInstance(2, ((0, 1),))
    Y = hc_commit_matrix(two, [0, 1], np.full((2, 2), 5), np.full((2, 2), 4), F7)
    assert Y[0, 1] == 2


def test_commit_matrix_shape_error():
    with pytest.raises(ShapeError):
        hc_commit_matrix(K3, [0, 1, 2], np.zeros((2, 2), int), np.zeros((3, 3), int), F7)
    with pytest.raises(ShapeError):
        hc_commit_matrix(K3, [0, 0, 2], np.zeros((3, 3), int), np.zeros((3, 3), int), F7)


def _honest_hc(graph, cycle, spec, rng):
    perm = rng.permutation(graph.n)
    A = rng.integers(spec.q, size=(graph.n, graph.n))
    B = rng.integers(spec.q, size=(graph.n, graph.n))
    w = HamiltonianWitness(tuple(cycle), perm, A)
    return w, B, hc_commit_matrix(graph, perm, B, A, spec)


def test_respond_shapes():
    w = HamiltonianWitness((0, 1, 2), np.arange(3), np.arange(9).reshape(3, 3))
    perm, A = hc_respond(0, w)
    assert list(perm) == [0, 1, 2] and A.shape == (3, 3)
    edges, opened = hc_respond(1, w)
    assert edges == [(0, 1), (1, 2), (2, 0)] and opened == [1, 5, 6]
    c4 = HamiltonianWitness((0, 1, 2, 3), np.arange(4), np.zeros((4, 4), int))
    assert len(hc_respond(1, c4)[1]) == 4


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("ch", [0, 1])
def test_hc_verify_honest_and_tampered(seed, ch):
    rng = np.random.default_rng(seed)
    g = cycle_graph(5)
    w, B, Y = _honest_hc(g, range(5), F101, rng)
    resp = hc_respond(ch, w)
    assert hc_verify(g, B, Y, ch, resp, F101)
    if ch == 1:
        edges, opened = resp
        bad = list(opened)
        bad[0] = (bad[0] + 1) % 101
        assert not hc_verify(g, B, Y, 1, (edges, bad), F101)
        repeated = [edges[0], (edges[0][1], edges[0][0])] + list(edges[2:])
        assert not hc_verify(g, B, Y, 1, (repeated, opened), F101)
    else:
        perm, A = resp
        A = A.copy()
        A[0, 0] = (A[0, 0] + 1) % 101
        assert not hc_verify(g, B, Y, 0, (perm, A), F101)


def test_hc_soundness_sanity_on_star():
    """A non-Hamiltonian graph: random provers stay under the (vacuous) bound."""
    g, q = star_graph(4), FieldSpec(2)
    proto, provers = HamiltonianProtocol(g, q), RandomHCProvers(g, q)
    n = 2000
    acc = sum(run_sigma(proto, provers, TimingModel(), trial_rng(3, i)).verdict == ACCEPT for i in range(n)) / n
    bound = 0.5 + np.sqrt(24 / (2 * 2))
    assert acc <= min(1.0, bound)


# -- subset sum --------------------------------------------------------------------------

INST = SubsetSumInstance((1, 2, 3), 3, F101)


@pytest.mark.parametrize("seed", range(10))
def test_subset_honest_both_challenges(seed):
    rng = np.random.default_rng(seed)
    v = np.array([1, 1, 0])
    z = rng.integers(2, size=3)
    c0, c1 = rng.integers(101, size=3), rng.integers(101, size=3)
    a = int(rng.integers(101))
    wit = SubsetSumWitness(v, z, c0, c1)
    com = subset_commit(INST, a, z, c0, c1)
    for ch in (0, 1):
        assert subset_verify(INST, a, com, ch, subset_respond(ch, wit, F101))
    x, cp = subset_respond(1, wit, F101)
    assert np.array_equal(x, v ^ z)
    # direct recomputation of the aggregate equation
    w0, w1 = com
    assert sum(int((w1 if x[i] else w0)[i]) for i in range(3)) % 101 == (a * 3 + cp) % 101
    assert not subset_verify(INST, a, com, 1, (x, (cp + 1) % 101))


def test_subset_protocol_completeness():
    proto, provers = SubsetSumProtocol(INST), HonestSubsetProvers(INST, [1, 1, 0])
    assert all(run_sigma(proto, provers, TimingModel(), trial_rng(2, i)).verdict == ACCEPT for i in range(500))


def test_subset_rejects_non_solution_witness():
    with pytest.raises(ValueError):
        HonestSubsetProvers(INST, [1, 0, 1])


# -- 3-coloring --------------------------------------------------------------------------


def test_answer_codec_roundtrip():
    for a in itertools.product(range(3), repeat=2):
        assert decode_answer(encode_answer(a)) == a


def test_question_index_roundtrip():
    for k in range(2 * K4.num_edges):
        assert question_index(K4, question_at(K4, k)) == k


@pytest.mark.parametrize("graph", [K3, K4, cycle_graph(5), star_graph(5), complete_graph(5)])
@pytest.mark.parametrize("eps", [Fraction(0), THIRD, Fraction(1, 2), Fraction(1)])
def test_pair_masses_sum_to_one(graph, eps):
    assert sum(dg_pair_masses(graph, eps).values()) == 1


def test_evt_mass_and_printed_formulas():
    masses = dg_pair_masses(K3, THIRD)
    for k in range(3):
        for b in (0, 1):
            assert masses[(2 * k + b, 2 * k + 1 - b)] == Fraction(1, 18)
    assert dg_eval_wdt(K3, THIRD, (0, 1), 0, (0, 2)) == Fraction(1, 36)
    assert dg_eval_evt(K3, THIRD, (0, 1), 0) == Fraction(1, 9)
    assert dg_eval_wdt(K3, 1, (0, 1), 0, (0, 2)) == 0


@pytest.mark.parametrize("graph", [K3, K4])
def test_wdt_formula_matches_sampler_off_diagonal(graph):
    masses = dg_pair_masses(graph, THIRD)
    for e, e2 in itertools.permutations(range(graph.num_edges), 2):
        for b in (0, 1):
            got = masses.get((2 * e + b, 2 * e2 + b), Fraction(0))
            assert got == dg_eval_wdt(graph, THIRD, graph.edges[e], b, graph.edges[e2])


def test_sampler_branches():
    rng = np.random.default_rng(0)
    for _ in range(200):
        (e, b), (e2, b2) = dg_sample(K3, 1, rng)
        assert e == e2 and b != b2
        (e, b), (e2, b2) = dg_sample(K3, 0, rng)
        assert b == b2 and set(e) & set(e2)


@pytest.mark.slow
def test_sampler_empirical_mass_of_edge_tests():
    rng = np.random.default_rng(1)
    n = 1_000_000
    counts = {}
    for _ in range(n):
        q, q2 = dg_sample(K3, THIRD, rng)
        key = (question_index(K3, q), question_index(K3, q2))
        counts[key] = counts.get(key, 0) + 1
    masses = dg_pair_masses(K3, THIRD)
    for key, m in masses.items():
        p = float(m)
        assert abs(counts.get(key, 0) / n - p) <= 5 * np.sqrt(p * (1 - p) / n)
    assert set(counts) == set(masses)


@pytest.mark.slow
def test_triple_marginals_and_symmetry():
    rng = np.random.default_rng(2)
    n = 1_000_000
    N = 2 * K3.num_edges
    slot = np.zeros((3, N))
    perm_counts = {}
    for _ in range(n):
        t = tuple(question_index(K3, q) for q in dg_sample_triple(K3, THIRD, rng))
        for s in range(3):
            slot[s, t[s]] += 1
        perm_counts[t] = perm_counts.get(t, 0) + 1
    marginal = np.zeros(N)
    for (x, _), m in dg_pair_masses(K3, THIRD).items():
        marginal[x] += float(m)
    for s in range(3):
        assert np.all(np.abs(slot[s] / n - marginal) <= 5 * np.sqrt(marginal * (1 - marginal) / n))
    # orbits under slot permutations have equal counts (chi-square per orbit)
    from scipy.stats import chisquare

    seen = set()
    for t in perm_counts:
        orbit = sorted(set(itertools.permutations(t)))
        if tuple(orbit) in seen or len(orbit) == 1:
            continue
        seen.add(tuple(orbit))
        obs = [perm_counts.get(o, 0) for o in orbit]
        assert chisquare(obs).pvalue > 1e-4


def test_triple_masses_exact():
    tm = dg_triple_masses(K3, THIRD)
    assert sum(tm.values()) == 1
    for t, m in tm.items():
        for p in itertools.permutations(t):
            assert tm[p] == m
    # with pure edge tests the third slot duplicates one of the others
    for t in dg_triple_masses(K3, 1):
        assert len(set(t)) == 2


@pytest.mark.parametrize("graph,coloring", [(K3, [0, 1, 2]), (cycle_graph(6), [0, 1, 0, 1, 0, 2])])
def test_honest_coloring_always_accepted(graph, coloring):
    rng = np.random.default_rng(0)
    provers = HonestColoringProvers(graph, coloring, permute_colors=True)
    for _ in range(20):
        t = provers.setup(rng)
        assert acceptance_2p(graph, t) == 1
        assert acceptance_3p(graph, t) == 1
    for q, q2 in dg_pair_masses(graph):
        l0, l1 = labels_for_coloring(coloring, rng)
        t = table_from_labels(graph, l0, l1)
        assert threecol_2p_verify(question_at(graph, q), question_at(graph, q2),
                                  decode_answer(t[q]), decode_answer(t[q2]))


def test_2p_verifier_rejections():
    e = (0, 1)
    assert not threecol_2p_verify((e, 0), (e, 1), (1, 2), (1, 0))  # sums equal: 2 == 2
    assert threecol_2p_verify((e, 0), (e, 1), (1, 2), (1, 1))
    assert not threecol_2p_verify(((0, 1), 0), ((0, 2), 0), (1, 2), (2, 0))
    assert threecol_2p_verify(((0, 1), 0), ((2, 3), 1), (0, 0), (0, 0))


def test_3p_verifier_consistency():
    q, q2 = ((0, 1), 0), ((0, 1), 1)
    assert threecol_3p_verify(q, q2, q, (0, 1), (1, 1), (0, 1))
    assert not threecol_3p_verify(q, q2, q, (0, 1), (1, 1), (0, 2))
    assert not threecol_3p_verify(q, q2, q2, (0, 1), (1, 1), (2, 1))
    assert threecol_3p_verify(((0, 1), 0), ((2, 3), 1), ((4, 5), 0), (0, 0), (1, 1), (2, 2))


@given(st.lists(st.integers(0, 8), min_size=12, max_size=12), st.lists(st.integers(0, 8), min_size=12, max_size=12))
def test_exact_acceptance_matches_reference(t1, t2):
    assert acceptance_2p(K4, t1, t2) == acceptance_2p_reference(K4, t1, t2)


def test_k4_labeling_ceiling():
    tables = all_labeling_tables(K4)
    assert len(tables) == 3**8
    _, best = best_labeling_table(K4)
    assert best == Fraction(17, 18)


def test_play_functions_follow_exact_value():
    rng = np.random.default_rng(7)
    t, p = best_labeling_table(K4)
    n = 20_000
    wins = sum(play_2p(K4, t, t, THIRD, rng)[2] for _ in range(n))
    assert abs(wins / n - float(p)) <= 5 * np.sqrt(float(p) * (1 - float(p)) / n)
    wins3 = sum(play_3p(K4, t, t, t, THIRD, rng)[2] for _ in range(n))
    p3 = float(acceptance_3p(K4, t))
    assert abs(wins3 / n - p3) <= 5 * np.sqrt(p3 * (1 - p3) / n)


@pytest.mark.parametrize("table", [[0] * 11, [0] * 13, [9] * 12, [-1] * 12])
def test_answer_table_domain_enforced(table):
    with pytest.raises(ValueError):
        acceptance_2p(K4, table)
