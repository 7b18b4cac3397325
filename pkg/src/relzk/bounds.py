"""Closed-form soundness, knowledge-error and parameter-sizing formulas.

Soundness values are returned both clipped to ``[0, 1]`` and raw, with a
``vacuous`` flag when the raw value exceeds one. When the radicand is a
perfect square (or cube) the result is an exact ``Fraction``; otherwise it
is computed with mpmath at 50 digits and returned as a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from sympy import integer_nthroot

MAX_N = 20
mpmath.mp.dps = 50


class RangeError(ValueError):
    """Inputs outside the supported desk-scale range."""


def _exact_root(x: Fraction, k: int):
    """``x**(1/k)`` as a Fraction when exact, else an mpmath float."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    num, ok_n = integer_nthroot(x.numerator, k)
    den, ok_d = integer_nthroot(x.denominator, k)
    if ok_n and ok_d:
        return Fraction(int(num), int(den))
    return mpmath.root(mpmath.mpf(x.numerator) / x.denominator, k)


def _as_number(x):
    return x if isinstance(x, Fraction) else float(x)


@dataclass(frozen=True)
class SoundnessValue:
    raw: object
    value: object
    vacuous: bool

    @classmethod
    def of(cls, raw) -> SoundnessValue:
        raw = _as_number(raw)
        vacuous = raw > 1
        # the clipped value is exactly one whether or not the raw root was exact
        return cls(raw, Fraction(1) if vacuous else raw, vacuous)

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class BoundReport:
    problem: str
    inputs: dict
    outputs: dict = field(default_factory=dict)


def _check_n(n: int, low: int):
    if n < low:
        raise RangeError(f"n must be at least {low}")
    if n > MAX_N:
        raise RangeError(f"n > {MAX_N} is outside the supported range")


def hc_soundness(n: int, Q) -> BoundReport:
    """``1/2 + sqrt(n!/(2Q))`` and the earlier ``1/2 + (64 n!/Q)^(1/3)``."""
    _check_n(n, 3)
    Q = Fraction(Q)
    if Q < 1:
        raise RangeError("Q must be at least 1")
    f = math.factorial(n)
    ours = Fraction(1, 2) + _exact_root(Fraction(f) / (2 * Q), 2)
    prev = Fraction(1, 2) + _exact_root(Fraction(64 * f) / Q, 3)
    return BoundReport("hc", {"n": n, "Q": Q},
                       {"ours": SoundnessValue.of(ours), "previous": SoundnessValue.of(prev)})


def subset_soundness(n: int, Q) -> BoundReport:
    """``1/2 + sqrt(2^(n-1)/Q)`` and the earlier ``1/2 + (64 2^n/Q)^(1/3)``."""
    _check_n(n, 1)
    Q = Fraction(Q)
    if Q < 1:
        raise RangeError("Q must be at least 1")
    ours = Fraction(1, 2) + _exact_root(Fraction(2 ** (n - 1)) / Q, 2)
    prev = Fraction(1, 2) + _exact_root(Fraction(64 * 2**n) / Q, 3)
    return BoundReport("subset", {"n": n, "Q": Q},
                       {"ours": SoundnessValue.of(ours), "previous": SoundnessValue.of(prev)})


def q_for_target(problem: str, n: int, eta: int) -> dict:
    """Field sizes reaching soundness ``1/2 + 2^-eta`` under each bound."""
    if n < 1 or eta < 1:
        raise RangeError("n and eta must be positive")
    if n > MAX_N:
        raise RangeError(f"n > {MAX_N} is outside the supported range")
    if problem == "hc":
        f = math.factorial(n)
        return {"our_Q": 2 ** (2 * eta - 1) * f, "previous_Q": 2 ** (3 * eta + 6) * f}
    if problem == "subset":
        return {"our_Q": 2 ** (n + 2 * eta - 1), "previous_Q": 2 ** (n + 3 * eta + 6)}
    raise ValueError(f"unknown problem {problem!r}")


def soundness(problem: str, n: int, Q) -> BoundReport:
    if problem == "hc":
        return hc_soundness(n, Q)
    if problem == "subset":
        return subset_soundness(n, Q)
    raise ValueError(f"unknown problem {problem!r}")


def threecol_errors(num_edges: int, p_q_acc=None) -> dict:
    """Classical and quantum knowledge errors of the coloring protocols.

    ``delta_tilde = kappa_q - kappa_c`` and ``delta_lower = 16/(2401 |H|^4)``
    are reported side by side; ``delta_of_p = 16 |H| sqrt(1 - p)``.
    """
    H = int(num_edges)
    if H < 3:
        raise RangeError("at least three edges are required")
    kc = 1 - Fraction(1, 3 * H)
    kq = 1 - Fraction(1, 7 * H) ** 4
    out = {
        "kappa_c": kc,
        "kappa_q": kq,
        "delta_tilde": kq - kc,
        "delta_lower": Fraction(16, 2401 * H**4),
    }
    if p_q_acc is not None:
        p = Fraction(p_q_acc) if not isinstance(p_q_acc, float) else p_q_acc
        if not 0 <= p <= 1:
            raise ValueError("acceptance probability must lie in [0, 1]")
        out["delta_of_p"] = _as_number(16 * H * _exact_root(Fraction(1 - Fraction(p)), 2))
    return out


def qpok_extraction_lower(p_acc, c, delta_ss, ra_max) -> float:
    """``(1 - delta)/(64 |RA_max|) (p - 1/c)^3``, or 0 when ``p <= 1/c``."""
    if c < 2 or ra_max < 1:
        raise ValueError("need c >= 2 and |RA_max| >= 1")
    gap = float(p_acc) - 1.0 / c
    if gap <= 0:
        return 0.0
    return max(0.0, (1.0 - float(delta_ss)) / (64.0 * ra_max) * gap**3)


def three_col_pok_lower(p_acc, num_edges: int) -> float:
    """Classical extraction guarantee ``3|H| (p - (1 - 1/(3|H|)))``, floored at 0."""
    kc = 1 - 1 / (3 * num_edges)
    return max(0.0, 3 * num_edges * (float(p_acc) - kc))
