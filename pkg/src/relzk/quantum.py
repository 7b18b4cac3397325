"""Dense state-vector and density-matrix primitives.

Everything here is small complex linear algebra on numpy arrays. Local
operators on multipartite vectors are applied by reshaping the vector into a
tensor with one axis per subsystem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

STRUCT_TOL = 1e-10
MAX_DIM = 512


class QuantumConfigError(ValueError):
    """An operator or family violates its structural invariants."""


class ZeroProbabilityError(ValueError):
    """A measurement branch of probability zero was requested explicitly."""


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def density(vec) -> np.ndarray:
    return projector(vec)


def is_unitary(u: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), atol=tol
    )


def check_unitary(u: np.ndarray, name: str = "operator") -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise QuantumConfigError(f"{name} is not unitary")
    return u


def check_density(rho: np.ndarray, tol: float = STRUCT_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] > MAX_DIM:
        raise QuantumConfigError("density operator must be square with dim <= 512")
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise QuantumConfigError("density operator is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise QuantumConfigError("density operator does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise QuantumConfigError("density operator is not positive semidefinite")
    return rho


@dataclass
class ProjectorFamily:
    """Pairwise orthogonal projectors ``{W^s}`` keyed by outcome label.

    With ``complete=True`` the projectors must also sum to the identity, which
    is what a full projective measurement needs.
    """

    projectors: Sequence[np.ndarray]
    labels: Sequence[Hashable] | None = None
    complete: bool = False
    validate: bool = True
    _total: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.projectors = [np.asarray(p, dtype=complex) for p in self.projectors]
        if not self.projectors:
            raise QuantumConfigError("a projector family needs at least one element")
        if self.labels is None:
            self.labels = list(range(len(self.projectors)))
        else:
            self.labels = list(self.labels)
        if len(self.labels) != len(self.projectors) or len(set(self.labels)) != len(self.labels):
            raise QuantumConfigError("labels must be distinct and match the projectors")
        self._total = sum(self.projectors)
        if self.validate:
            self.check()

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def total(self) -> np.ndarray:
        """The subspace projector ``W = sum_s W^s``."""
        return self._total

    def __len__(self):
        return len(self.projectors)

    def __getitem__(self, label) -> np.ndarray:
        return self.projectors[self.labels.index(label)]

    def items(self):
        return zip(self.labels, self.projectors)

    def check(self, tol: float = STRUCT_TOL):
        d = self.dim
        for p in self.projectors:
            if p.shape != (d, d):
                raise QuantumConfigError("projectors must share one square shape")
            if not np.allclose(p, p.conj().T, atol=tol):
                raise QuantumConfigError("projector is not Hermitian")
            if not np.allclose(p @ p, p, atol=tol):
                raise QuantumConfigError("projector is not idempotent")
        for i, p in enumerate(self.projectors):
            for r in self.projectors[i + 1:]:
                if not np.allclose(p @ r, 0, atol=tol):
                    raise QuantumConfigError("projectors are not pairwise orthogonal")
        if self.complete and not np.allclose(self._total, np.eye(d), atol=tol):
            raise QuantumConfigError("complete family must sum to the identity")


def basis_family(dim: int, labels=None) -> ProjectorFamily:
    return ProjectorFamily([projector(ket(i, dim)) for i in range(dim)], labels, complete=True)


def measure_projective(state: np.ndarray, family: ProjectorFamily, outcome=None, rng=None):
    """Born-rule measurement of a vector or density operator.

    Returns ``(label, post_state, probability)``. With ``outcome`` given the
    corresponding branch is returned; otherwise one is sampled with ``rng``.
    """
    state = np.asarray(state, dtype=complex)
    is_vec = state.ndim == 1
    probs = []
    for p in family.projectors:
        if is_vec:
            probs.append(float(np.vdot(state, p @ state).real))
        else:
            probs.append(float(np.trace(p @ state).real))
    probs = np.clip(np.array(probs), 0.0, None)
    if outcome is None:
        if rng is None:
            raise ValueError("sampling a measurement outcome needs an rng")
        idx = int(rng.choice(len(probs), p=probs / probs.sum()))
    else:
        idx = family.labels.index(outcome)
        if probs[idx] <= 0.0:
            raise ZeroProbabilityError(f"outcome {outcome!r} has probability zero")
    p = family.projectors[idx]
    if is_vec:
        post = p @ state
        post = post / np.sqrt(probs[idx])
    else:
        post = p @ state @ p / probs[idx]
    return family.labels[idx], post, probs[idx]


def outcome_probabilities(state: np.ndarray, family: ProjectorFamily) -> dict:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return {s: float(np.vdot(state, p @ state).real) for s, p in family.items()}
    return {s: float(np.trace(p @ state).real) for s, p in family.items()}


def trace_norm_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Schatten-1 norm of ``rho - sigma`` (no factor one half)."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError("operands must have equal shape")
    diff = rho - sigma
    diff = (diff + diff.conj().T) / 2
    return float(np.abs(np.linalg.eigvalsh(diff)).sum())


def apply_local(state: np.ndarray, op: np.ndarray, dims: Sequence[int], which: int) -> np.ndarray:
    """Apply ``op`` to subsystem ``which`` of a multipartite state vector."""
    dims = list(dims)
    tensor = np.asarray(state, dtype=complex).reshape(dims)
    tensor = np.tensordot(op, tensor, axes=([1], [which]))
    tensor = np.moveaxis(tensor, 0, which)
    return tensor.reshape(-1)


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced density operator on subsystems ``keep`` (kept in order)."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(keep)
    rho = np.asarray(rho, dtype=complex).reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for count, ax in enumerate(traced):
        a = ax - count
        rho = np.trace(rho, axis1=a, axis2=a + (n - count))
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return rho.reshape(dk, dk)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    from scipy.stats import unitary_group

    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=complex)
    return unitary_group.rvs(dim, random_state=rng)


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_projector_family(
    dim: int,
    n_outcomes: int,
    rng: np.random.Generator,
    complete: bool = False,
) -> ProjectorFamily:
    """Haar-rotated coordinate projectors on disjoint blocks of coordinates.

    Block sizes are random (each outcome gets at least one coordinate); when
    ``complete`` is false a random number of trailing coordinates is left out
    so the family spans a proper subspace.
    """
    if n_outcomes > dim:
        raise ValueError("more outcomes than dimensions")
    used = dim if complete else int(rng.integers(n_outcomes, dim + 1))
    cuts = np.sort(rng.choice(np.arange(1, used), size=n_outcomes - 1, replace=False)) if n_outcomes > 1 else []
    bounds = [0, *map(int, cuts), used]
    u = haar_unitary(dim, rng)
    fams = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        cols = u[:, lo:hi]
        p = cols @ cols.conj().T
        fams.append((p + p.conj().T) / 2)
    return ProjectorFamily(fams, complete=complete)
