"""Two-prover subset-sum protocol over F_q.

The first prover answers the verifier's ``a`` with ``w0 = a*(s*z) + c0`` and
``w1 = a*(s*~z) + c1`` (``*`` elementwise, ``z`` a shared random bit vector).
On challenge 0 the second prover opens ``(z, c0, c1)``; on challenge 1 it
sends ``x = v xor z`` and ``c' = sum_i c_{x_i}[i]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..field import FieldSpec, make_field, sample_vector
from .hamiltonian import ShapeError


@dataclass(frozen=True)
class SubsetSumInstance:
    s: tuple
    k: int
    spec: FieldSpec

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(int(x) % self.spec.q for x in self.s))
        object.__setattr__(self, "k", int(self.k) % self.spec.q)
        if not self.s:
            raise ValueError("subset-sum instance needs at least one element")

    @property
    def n(self) -> int:
        return len(self.s)

    def is_solution(self, v) -> bool:
        v = [int(x) for x in v]
        if len(v) != self.n or any(x not in (0, 1) for x in v):
            return False
        return sum(vi * si for vi, si in zip(v, self.s)) % self.spec.q == self.k


def load_subset_instance(path) -> SubsetSumInstance:
    data = json.loads(Path(path).read_text())
    try:
        spec = make_field(int(data["q_min"]))
        return SubsetSumInstance(tuple(data["s"]), int(data["k"]), spec)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"subset-sum instance needs keys s, k, q_min: {exc}") from exc


def _bits(v, n: int) -> np.ndarray:
    arr = np.asarray(v, dtype=np.int64)
    if arr.shape != (n,) or np.any((arr != 0) & (arr != 1)):
        raise ShapeError(f"expected a binary vector of length {n}")
    return arr


def _vec(v, n: int, spec: FieldSpec) -> np.ndarray:
    arr = np.asarray(v)
    if arr.shape != (n,):
        raise ShapeError(f"expected a field vector of length {n}")
    return spec.array(arr)


def subset_commit(inst: SubsetSumInstance, a: int, z, c0, c1):
    q, n = inst.spec.q, inst.n
    s = inst.spec.array(inst.s)
    z = _bits(z, n)
    w0 = (int(a) * (s * z) + _vec(c0, n, inst.spec)) % q
    w1 = (int(a) * (s * (1 - z)) + _vec(c1, n, inst.spec)) % q
    return w0, w1


@dataclass(frozen=True)
class SubsetSumWitness:
    v: np.ndarray
    z: np.ndarray
    c0: np.ndarray
    c1: np.ndarray


def subset_respond(ch: int, witness: SubsetSumWitness, spec: FieldSpec):
    if int(ch) == 0:
        return (witness.z.copy(), witness.c0.copy(), witness.c1.copy())
    if int(ch) == 1:
        x = np.bitwise_xor(witness.v, witness.z)
        picked = np.where(x == 0, witness.c0, witness.c1)
        return (x, int(picked.sum() % spec.q))
    raise ValueError("challenge must be 0 or 1")


def subset_verify(inst: SubsetSumInstance, a: int, com, ch, resp) -> bool:
    q, n = inst.spec.q, inst.n
    w0, w1 = (_vec(w, n, inst.spec) for w in com)
    if int(ch) == 0:
        z, c0, c1 = resp
        e0, e1 = subset_commit(inst, a, z, c0, c1)
        return bool(np.array_equal(e0, w0) and np.array_equal(e1, w1))
    if int(ch) == 1:
        x, c_agg = resp
        x = _bits(x, n)
        total = int(np.where(x == 0, w0, w1).sum() % q)
        return total == (int(a) * inst.k + int(c_agg)) % q
    raise ValueError("challenge must be 0 or 1")


class SubsetSumProtocol:
    challenge_space = (0, 1)

    def __init__(self, inst: SubsetSumInstance):
        self.inst = inst

    def sample_rand(self, rng):
        return int(rng.integers(self.inst.spec.q))

    def verify(self, rand, com, ch, resp) -> bool:
        return subset_verify(self.inst, rand, com, ch, resp)


class _Committer:
    def __init__(self, inst, witness):
        self.inst, self.witness = inst, witness

    def commit(self, a):
        w = self.witness
        return subset_commit(self.inst, a, w.z, w.c0, w.c1)


class _Responder:
    def __init__(self, inst, witness):
        self.inst, self.witness = inst, witness

    def respond(self, ch):
        return subset_respond(ch, self.witness, self.inst.spec)


class HonestSubsetProvers:
    def __init__(self, inst: SubsetSumInstance, v):
        if not inst.is_solution(v):
            raise ValueError("witness does not solve the subset-sum instance")
        self.inst = inst
        self.v = np.asarray(v, dtype=np.int64)

    def setup(self, rng):
        n, spec = self.inst.n, self.inst.spec
        z = rng.integers(2, size=n).astype(np.int64)
        c0 = sample_vector(spec, rng, (n,))
        c1 = sample_vector(spec, rng, (n,))
        w = SubsetSumWitness(self.v.copy(), z, c0, c1)
        return _Committer(self.inst, w), _Responder(self.inst, w)
