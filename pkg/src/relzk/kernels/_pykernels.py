"""Pure numpy implementations of the hot kernels.

These are the reference versions; the compiled module mirrors their
signatures exactly and is checked against them in the test-suite.
"""

import numpy as np


def binding_success_counts(q: int) -> np.ndarray:
    """Exhaustive fairly-binding search over the F_q commitment.

    For every deterministic opening pair ``((0, c0), (1, c1))`` of the second
    sender, count the receiver challenges ``a`` for which the best commitment
    value ``w(a)`` makes both openings verify. ``w`` may depend on ``a`` but
    the openings may not, so the maximisation over ``w`` is pointwise in ``a``.

    Returns an int64 array ``counts[c0, c1]``.
    """
    q = int(q)
    w = np.arange(q, dtype=np.int64)
    a = np.arange(q, dtype=np.int64)
    counts = np.zeros((q, q), dtype=np.int64)
    for c0 in range(q):
        # open0 verifies iff w == 0*a + c0; open1 verifies iff w == a + c1
        ok0 = w == c0                                               # (w,)
        c1 = np.arange(q, dtype=np.int64)
        ok1 = w[None, None, :] == (a[None, :, None] + c1[:, None, None]) % q  # (c1, a, w)
        both = ok1 & ok0[None, None, :]
        counts[c0] = both.any(axis=2).sum(axis=1)
    return counts


def coloring_acceptance(
    strat1: np.ndarray,
    strat2: np.ndarray,
    pair_q1: np.ndarray,
    pair_q2: np.ndarray,
    pair_weight: np.ndarray,
    accept: np.ndarray,
) -> np.ndarray:
    """Weighted acceptance of many answer-function strategies.

    ``strat1``/``strat2`` are (S, n_questions) answer codes for the two
    provers, ``pair_*`` list the support of the question distribution with
    integer weights, and ``accept[p, x, y]`` says whether answers ``x`` and
    ``y`` pass the check on pair ``p``. Returns the int64 weighted count of
    accepted pairs per strategy.
    """
    strat1 = np.asarray(strat1, dtype=np.int64)
    strat2 = np.asarray(strat2, dtype=np.int64)
    x = strat1[:, pair_q1]
    y = strat2[:, pair_q2]
    p = np.arange(len(pair_weight))[None, :]
    hits = accept[p, x, y]
    return hits.astype(np.int64) @ np.asarray(pair_weight, dtype=np.int64)
