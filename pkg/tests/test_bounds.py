import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relzk.bounds import (
    RangeError,
    hc_soundness,
    q_for_target,
    qpok_extraction_lower,
    soundness,
    subset_soundness,
    three_col_pok_lower,
    threecol_errors,
)

HALF = Fraction(1, 2)


def ours(problem, n, Q):
    return soundness(problem, n, Q).outputs["ours"]


def previous(problem, n, Q):
    return soundness(problem, n, Q).outputs["previous"]


def test_table_examples():
    assert q_for_target("hc", 5, 5)["our_Q"] == 61440
    assert q_for_target("subset", 4, 5)["our_Q"] == 8192
    assert ours("hc", 5, 61440).value == Fraction(17, 32)
    assert previous("hc", 5, 2 ** 21 * 120).value == HALF + Fraction(1, 32)
    assert ours("subset", 4, 2**13).value == HALF + Fraction(1, 32)
    assert previous("subset", 4, 2**25).value == HALF + Fraction(1, 32)


@pytest.mark.parametrize("problem,n", [("hc", 3), ("hc", 5), ("hc", 8), ("subset", 1), ("subset", 4), ("subset", 12)])
@pytest.mark.parametrize("eta", range(1, 21))
def test_targets_reproduce_exactly(problem, n, eta):
    qs = q_for_target(problem, n, eta)
    target = HALF + Fraction(1, 2**eta)
    assert ours(problem, n, qs["our_Q"]).raw == target
    assert previous(problem, n, qs["previous_Q"]).raw == target
    assert Fraction(qs["previous_Q"], qs["our_Q"]) == 2 ** (eta + 7)


def test_vacuous_clipping():
    r = hc_soundness(5, 60).outputs["ours"]
    assert r.raw == Fraction(3, 2) and r.value == 1 and r.vacuous
    s = subset_soundness(4, 8).outputs["ours"]
    assert s.raw == Fraction(3, 2) and s.value == 1 and s.vacuous


@pytest.mark.parametrize("bad", [(2, 10), (21, 10**30), (5, 0)])
def test_hc_range_errors(bad):
    with pytest.raises(RangeError):
        hc_soundness(*bad)


def test_unknown_problem():
    with pytest.raises(ValueError):
        q_for_target("sat", 3, 1)


@pytest.mark.parametrize("problem,n", [("hc", 4), ("hc", 6), ("subset", 3), ("subset", 7)])
def test_monotone_in_q(problem, n):
    grid = [2**k for k in range(1, 60)]
    raw = [float(ours(problem, n, Q).raw) for Q in grid]
    prev = [float(previous(problem, n, Q).raw) for Q in grid]
    assert all(a > b for a, b in zip(raw, raw[1:]))
    assert all(a > b for a, b in zip(prev, prev[1:]))


@pytest.mark.parametrize("problem,n", [("hc", 4), ("hc", 7), ("subset", 3), ("subset", 9)])
def test_improvement_regime(problem, n):
    base = 2**7 * (math.factorial(n) if problem == "hc" else 2**n)
    for k in range(1, 40):
        Q = base * 2**k
        o, p = ours(problem, n, Q), previous(problem, n, Q)
        if not (o.vacuous or p.vacuous):
            assert float(o.raw) < float(p.raw)


def test_threecol_examples():
    e = threecol_errors(3, 1)
    assert e["kappa_c"] == Fraction(8, 9)
    assert e["delta_lower"] == Fraction(16, 194481)
    assert e["delta_of_p"] == 0
    assert e["delta_tilde"] == e["kappa_q"] - e["kappa_c"]
    assert e["kappa_q"] == 1 - Fraction(1, 21**4)
    with pytest.raises(RangeError):
        threecol_errors(2)


def test_extraction_bound_examples():
    assert qpok_extraction_lower(1, 2, 0, 1) == pytest.approx(1 / 512, abs=0)
    assert qpok_extraction_lower(0.5, 2, 0, 1) == 0
    assert qpok_extraction_lower(0.9, 2, 1, 1) == 0
    assert three_col_pok_lower(1, 6) == pytest.approx(1.0)
    assert three_col_pok_lower(17 / 18, 6) == 0


@given(st.floats(0.5, 1.0), st.floats(0.5, 1.0), st.integers(2, 5), st.integers(1, 8))
def test_extraction_bound_monotone_in_acceptance(p1, p2, c, ra):
    lo, hi = sorted((p1, p2))
    assert qpok_extraction_lower(lo, c, 0.1, ra) <= qpok_extraction_lower(hi, c, 0.1, ra)
    if lo > 1 / c and hi > lo:
        assert qpok_extraction_lower(lo, c, 0.1, ra) < qpok_extraction_lower(hi, c, 0.1, ra)
