"""Prime field F_q arithmetic used by the commitment scheme and protocols."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy import isprime, nextprime

# desk scale: products of two reduced elements must fit comfortably in Python ints,
# and numpy int64 vectorisation is only used below this bound
MAX_Q = 2**63
_INT64_SAFE_Q = 2**31


class FieldError(ArithmeticError):
    """Domain error in field arithmetic (e.g. inverting zero)."""


@dataclass(frozen=True)
class FieldSpec:
    """The prime field F_q."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2:
            raise ValueError(f"field modulus must be an integer >= 2, got {self.q!r}")
        if self.q >= MAX_Q:
            raise ValueError("field modulus must be below 2**63")
        if not isprime(int(self.q)):
            raise ValueError(f"field modulus {self.q} is not prime")
        object.__setattr__(self, "q", int(self.q))

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.q, self)

    @property
    def dtype(self):
        """numpy dtype able to hold products of two elements without overflow."""
        return np.int64 if self.q < _INT64_SAFE_Q else object

    def array(self, values) -> np.ndarray:
        return np.mod(np.asarray(values, dtype=self.dtype), self.q)

    def elements(self):
        return (FieldElement(v, self) for v in range(self.q))


@dataclass(frozen=True)
class FieldElement:
    value: int
    spec: FieldSpec

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.spec.q)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec.q != self.spec.q:
                raise FieldError("mixing elements of different fields")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.spec.q
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.value + o, self.spec)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.value - o, self.spec)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(o - self.value, self.spec)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.value * o, self.spec)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.spec)

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise FieldError("zero has no multiplicative inverse")
        return FieldElement(pow(self.value, -1, self.spec.q), self.spec)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * FieldElement(o, self.spec).inverse()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec.q == other.spec.q and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.spec.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.spec.q))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        return f"F{self.spec.q}({self.value})"


def make_field(q_min: int) -> FieldSpec:
    """Return the field whose modulus is the smallest prime >= ``q_min``."""
    if q_min < 2:
        raise ValueError("q_min must be >= 2")
    q = int(q_min) if isprime(int(q_min)) else int(nextprime(int(q_min)))
    return FieldSpec(q)


def field_arith(spec: FieldSpec, op: str, x, y=None) -> FieldElement:
    """Apply ``op`` in {add, sub, mul, inv} to field elements or plain ints."""
    x = x if isinstance(x, FieldElement) else spec(x)
    if x.spec != spec:
        raise FieldError("operand belongs to another field")
    if op == "inv":
        return x.inverse()
    if y is None:
        raise ValueError(f"operation {op!r} needs two operands")
    y = y if isinstance(y, FieldElement) else spec(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown field operation {op!r}")


def sample_uniform(spec: FieldSpec, rng: np.random.Generator) -> FieldElement:
    return FieldElement(int(rng.integers(spec.q)), spec)


def sample_vector(spec: FieldSpec, rng: np.random.Generator, shape) -> np.ndarray:
    """Uniform array of field elements (as integers) with the given shape."""
    if spec.dtype is object:
        flat = [int(rng.integers(spec.q)) for _ in range(int(np.prod(shape)))]
        return np.array(flat, dtype=object).reshape(shape)
    return rng.integers(spec.q, size=shape, dtype=np.int64)
