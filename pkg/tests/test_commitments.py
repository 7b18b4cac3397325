import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relzk.commitments import CapacityError, CommitKey, binding_adversary_search, commit, verify_open
from relzk.field import FieldSpec


def brute_force_binding(q: int) -> Fraction:
    """Independent oracle: maximise over every commitment function w : F_q -> F_q
    and every fixed opening pair (c0, c1) the probability over a that both
    openings (0, c0) and (1, c1) verify."""
    best = 0
    for w in itertools.product(range(q), repeat=q):
        for c0 in range(q):
            for c1 in range(q):
                hits = sum(1 for a in range(q) if w[a] == c0 % q and w[a] == (a + c1) % q)
                best = max(best, hits)
    return Fraction(best, q)


# frozen oracle results
FROZEN = {2: Fraction(1, 2), 3: Fraction(1, 3), 5: Fraction(1, 5)}


@pytest.mark.parametrize("q", [2, 3, 5])
def test_brute_force_oracle_is_frozen(q):
    assert brute_force_binding(q) == FROZEN[q]


@pytest.mark.parametrize("q", [2, 3, 5])
def test_search_matches_oracle(q):
    assert binding_adversary_search(FieldSpec(q)) == FROZEN[q]


@pytest.mark.parametrize("q", [7, 11, 13, 53, 97, 101])
def test_search_is_inverse_q(q):
    assert binding_adversary_search(FieldSpec(q)) == Fraction(1, q)


def test_search_capacity():
    with pytest.raises(CapacityError):
        binding_adversary_search(FieldSpec(103))


@given(st.sampled_from([2, 3, 7, 101, 65537]), st.integers(0, 1), st.integers(), st.integers())
def test_honest_commitment_opens(q, d, a, c):
    f = FieldSpec(q)
    w = commit(f, d, a, CommitKey(f(c)))
    assert verify_open(f, w, a, d, c)
    # the same key opens the other bit exactly when the challenge is zero
    assert verify_open(f, w, a, 1 - d, c) == (a % q == 0)
    assert not verify_open(f, w, a, 2, c)


def test_commit_rejects_non_bit():
    f = FieldSpec(7)
    with pytest.raises(ValueError):
        commit(f, 2, 1, CommitKey(f(0)))


def test_hiding_distribution_uniform():
    """With uniform c the commitment is uniform whatever the bit."""
    f = FieldSpec(5)
    for d in (0, 1):
        for a in range(5):
            ws = sorted(int(commit(f, d, a, CommitKey(f(c)))) for c in range(5))
            assert ws == list(range(5))
