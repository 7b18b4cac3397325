"""The two-sender F_q bit commitment and an exhaustive binding adversary.

Sender S1 receives a random ``a`` from the receiver and answers
``w = a*d + c`` where ``c`` is randomness shared with S2. S2 later opens by
revealing ``(d, c)``. Binding rests on S1 and S2 being unable to signal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .field import FieldElement, FieldSpec

MAX_SEARCH_Q = 101


class CapacityError(ValueError):
    """Raised when an exhaustive search would exceed desk scale."""


@dataclass(frozen=True)
class CommitKey:
    c: FieldElement


@dataclass(frozen=True)
class CommitmentRecord:
    a: FieldElement
    w: FieldElement
    d: int


def _bit(d) -> int:
    d = int(d)
    if d not in (0, 1):
        raise ValueError(f"committed value must be a bit, got {d}")
    return d


def commit(spec: FieldSpec, d: int, a, key: CommitKey) -> FieldElement:
    """Commitment to bit ``d`` under receiver challenge ``a``."""
    a = a if isinstance(a, FieldElement) else spec(a)
    return a * _bit(d) + key.c


def verify_open(spec: FieldSpec, w, a, d, c) -> bool:
    """Receiver check ``w == a*d + c``; a non-bit ``d`` is rejected."""
    if int(d) not in (0, 1):
        return False
    return spec(int(w)) == spec(int(a)) * int(d) + int(c)


def binding_adversary_search(spec: FieldSpec) -> Fraction:
    """Best probability of opening one commitment to both 0 and 1.

    The search ranges over every opening pair ``((0, c0), (1, c1))`` fixed in
    advance (S2 never sees ``a``) and every commitment function ``w(a)``.
    The maximisation over randomised openings reduces to deterministic ones
    by linearity, so the returned value is the exact optimum.
    """
    q = spec.q
    if q > MAX_SEARCH_Q:
        raise CapacityError(f"exhaustive binding search limited to q <= {MAX_SEARCH_Q}")
    counts = kernels.binding_success_counts(q)
    return Fraction(int(counts.max()), q)
