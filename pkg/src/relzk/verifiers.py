"""Numerical checkers for the measurement inequalities behind the soundness analysis.

Each ``check_*`` function evaluates both sides of one inequality on a concrete
instance and reports whether it holds at the bound tolerance. ``run_suite``
draws seeded random instances and returns report rows with the fixed
columns in ``SUITE_COLUMNS``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .quantum import (
    ProjectorFamily,
    QuantumConfigError,
    check_density,
    haar_unitary,
    partial_trace,
    projector,
    random_density,
    random_projector_family,
    random_state,
    trace_norm_distance,
)
from .rng import trial_rng

BOUND_TOL = 1e-9
SUITE_COLUMNS = ("theorem", "instance_id", "seed", "F1", "F2_or_Ft", "rhs", "margin", "holds")
THEOREMS = ("two_meas", "cha", "don", "gentle", "claim20", "coupling")


def _tr(m: np.ndarray) -> float:
    return float(np.real(np.trace(m)))


def _validate(families: Sequence[ProjectorFamily], strict: bool):
    if not strict:
        return
    dim = families[0].dim
    for fam in families:
        if fam.dim != dim:
            raise QuantumConfigError("projector families act on different dimensions")
        fam.check()


def _sandwich_weight(outer: np.ndarray, inner: np.ndarray, sigma: np.ndarray) -> float:
    """Tr[outer · inner σ inner] for Hermitian ``inner``."""
    return _tr(outer @ inner @ sigma @ inner)


# -- Two consecutive measurements (the tightened bound) ---------------------------------


def check_two_meas_bound(fam1: ProjectorFamily, fam2: ProjectorFamily, sigma: np.ndarray,
                         strict: bool = True) -> dict:
    """F2 >= (2 / max|S_i|)(F1 - 1/2)^2 for two families of orthogonal projectors.

    ``strict=False`` skips the family invariant check; it exists only so the
    detector can be exercised on deliberately broken input.
    """
    _validate([fam1, fam2], strict)
    if strict:
        check_density(sigma)
    w1, w2 = fam1.total, fam2.total
    f1 = 0.5 * (_tr(w1 @ sigma) + _tr(w2 @ sigma))
    f2 = 0.5 * (sum(_sandwich_weight(w2, p, sigma) for p in fam1.projectors)
                + sum(_sandwich_weight(w1, p, sigma) for p in fam2.projectors))
    s_max = max(len(fam1), len(fam2))
    applicable = f1 > 0.5
    rhs = 2.0 / s_max * (f1 - 0.5) ** 2 if applicable else 0.0
    holds = (f2 >= rhs - BOUND_TOL) if applicable else True
    return {"F1": f1, "F2": f2, "rhs": rhs, "applicable": applicable, "holds": bool(holds)}


# -- c consecutive families (the earlier cubic bound) -----------------------------------


def check_cha_bound(families: Sequence[ProjectorFamily], sigma: np.ndarray, strict: bool = True) -> dict:
    """F2 >= (1 / 64|S|)(F1 - 1/c)^3 for c families of orthogonal projectors.

    F1 averages Tr[W_i σ] over the c families. F2 averages, over ordered pairs
    i != j, the weight of W_j after the outcome-resolved measurement of family i.
    |S| is the largest family size.
    """
    c = len(families)
    if c < 2:
        raise ValueError("need at least two projector families")
    _validate(families, strict)
    if strict:
        check_density(sigma)
    totals = [fam.total for fam in families]
    f1 = sum(_tr(w @ sigma) for w in totals) / c
    f2 = 0.0
    for i, j in itertools.permutations(range(c), 2):
        f2 += sum(_sandwich_weight(totals[j], p, sigma) for p in families[i].projectors)
    f2 /= c * (c - 1)
    s_max = max(len(fam) for fam in families)
    applicable = f1 >= 1.0 / c
    rhs = (f1 - 1.0 / c) ** 3 / (64 * s_max) if applicable else 0.0
    holds = (f2 >= rhs - BOUND_TOL) if applicable else True
    return {"F1": f1, "F2": f2, "rhs": rhs, "applicable": applicable, "holds": bool(holds)}


# -- t-fold consecutive projections ------------------------------------------------------


def check_don_bound(projectors: Sequence[np.ndarray], psi: np.ndarray, t: int) -> dict:
    """F_t >= F_1^(2t-1), with F_t the average over all length-t projector words."""
    if t < 1:
        raise ValueError("t must be at least 1")
    mats = [np.asarray(p, dtype=complex) for p in projectors]
    c = len(mats)
    psi = np.asarray(psi, dtype=complex)
    f1 = float(sum(np.vdot(psi, w @ psi).real for w in mats)) / c
    layer = [psi]
    for _ in range(t):
        layer = [w @ v for v in layer for w in mats]
    ft = float(sum(np.vdot(v, v).real for v in layer)) / c**t
    rhs = f1 ** (2 * t - 1)
    return {"F1": f1, "Ft": ft, "rhs": rhs, "holds": bool(ft >= rhs - BOUND_TOL)}


# -- Gentle measurement ------------------------------------------------------------------


def _psd_sqrt(x: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((x + x.conj().T) / 2)
    vals = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * vals) @ vecs.conj().T


def check_gentle(sigma: np.ndarray, x: np.ndarray) -> dict:
    """||σ - √X σ √X||_1 <= 2 √(1 - Tr[Xσ]) for 0 <= X <= Id."""
    vals = np.linalg.eigvalsh((x + x.conj().T) / 2)
    if vals.min() < -1e-10 or vals.max() > 1 + 1e-10:
        raise QuantumConfigError("X must satisfy 0 <= X <= Id")
    root = _psd_sqrt(x)
    p = _tr(x @ sigma)
    lhs = trace_norm_distance(sigma, root @ sigma @ root)
    rhs = 2.0 * np.sqrt(max(0.0, 1.0 - p))
    return {"p": p, "lhs": lhs, "rhs": float(rhs), "holds": bool(lhs <= rhs + BOUND_TOL)}


# -- Dephasing a symmetric tripartite state ---------------------------------------------


def check_claim20(psi: np.ndarray, family: ProjectorFamily, dims: Sequence[int]) -> dict:
    """Disturbance of ρ12 by dephasing prover 1 in ``family``.

    lhs = ||ρ12 - Σ_o (W^o ⊗ Id) ρ12 (W^o ⊗ Id)||_1 and the main bound is
    6 √(1 - π2) with π2 = Σ_o Tr[(W^o ⊗ W^o) ρ12]. The tightened variant uses
    4 √(1 - π1) with π1 = Σ_o Tr[(W^o ⊗ Id ⊗ W^o) ρ123].
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or max(dims) > 4:
        raise QuantumConfigError("expected three subsystems of dimension at most 4")
    if len(set(dims)) != 1 or family.dim != dims[0]:
        raise QuantumConfigError("the family must act on one (equal-sized) prover register")
    d = dims[0]
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    rho = np.outer(psi, psi.conj())
    rho12 = partial_trace(rho, dims, keep=(0, 1))
    eye = np.eye(d)
    dephased = sum(np.kron(w, eye) @ rho12 @ np.kron(w, eye) for w in family.projectors)
    lhs = trace_norm_distance(rho12, dephased)
    pi2 = sum(_tr(np.kron(w, w) @ rho12) for w in family.projectors)
    pi1 = sum(_tr(np.kron(np.kron(w, eye), w) @ rho) for w in family.projectors)
    rhs = 6.0 * np.sqrt(max(0.0, 1.0 - pi2))
    rhs_tight = 4.0 * np.sqrt(max(0.0, 1.0 - pi1))
    return {
        "pi2": pi2, "pi1": pi1, "lhs": lhs, "rhs": float(rhs), "rhs_tight": float(rhs_tight),
        "holds": bool(lhs <= rhs + BOUND_TOL), "holds_tight": bool(lhs <= rhs_tight + BOUND_TOL),
    }


# -- Coupling games ----------------------------------------------------------------------


@dataclass
class GameSpec:
    """Two-party game where Bob gets one of two questions, with a fixed strategy.

    ``predicate[x, y, a, b]`` is the 0/1 verification table. ``alice[x]`` and
    ``bob[y]`` are complete projective measurements on the two halves of
    ``state`` (a vector of dimension ``dim_a * dim_b``). Questions are uniform.
    """

    predicate: np.ndarray
    state: np.ndarray
    dim_a: int
    dim_b: int
    alice: Sequence[ProjectorFamily]
    bob: Sequence[ProjectorFamily]

    def __post_init__(self):
        self.predicate = np.asarray(self.predicate, dtype=bool)
        nx, ny, na, nb = self.predicate.shape
        if ny != 2:
            raise QuantumConfigError("Bob's question set must be binary")
        if len(self.alice) != nx or len(self.bob) != 2:
            raise QuantumConfigError("one measurement per question is required")
        for fam, n_out, d in [(f, na, self.dim_a) for f in self.alice] + [(f, nb, self.dim_b) for f in self.bob]:
            if len(fam) != n_out or fam.dim != d:
                raise QuantumConfigError("measurement shape does not match the game")
            if not np.allclose(fam.total, np.eye(d), atol=1e-10):
                raise QuantumConfigError("per-question measurements must be complete")
        self.state = np.asarray(self.state, dtype=complex).reshape(-1)
        if self.state.size != self.dim_a * self.dim_b:
            raise QuantumConfigError("state dimension does not match the registers")

    @property
    def s_max(self) -> int:
        return int(self.predicate.sum(axis=3).max())


def coupling_game_eval(spec: GameSpec) -> dict:
    """Winning probability of the game and of its coupling variant under one strategy.

    In the coupling variant Bob measures question y and then the other question
    on the post-measurement state; both answers must win against Alice's answer.
    """
    nx, _, na, nb = spec.predicate.shape
    psi = spec.state
    eye_b = np.eye(spec.dim_b)
    omega = 0.0
    omega_coup = 0.0
    for x in range(nx):
        for a, pa in enumerate(spec.alice[x].projectors):
            alice_side = np.kron(pa, eye_b) @ psi
            for y in (0, 1):
                win_y = spec.predicate[x, y, a]
                win_other = spec.predicate[x, 1 - y, a]
                other_total = sum(spec.bob[1 - y].projectors[b] for b in range(nb) if win_other[b])
                for b in range(nb):
                    if not win_y[b]:
                        continue
                    v = np.kron(np.eye(spec.dim_a), spec.bob[y].projectors[b]) @ alice_side
                    omega += np.vdot(v, v).real
                    if isinstance(other_total, np.ndarray):
                        w = np.kron(np.eye(spec.dim_a), other_total) @ v
                        omega_coup += np.vdot(w, w).real
    omega /= 2 * nx
    omega_coup /= 2 * nx
    applicable = omega > 0.5
    rhs = 2.0 / spec.s_max * (omega - 0.5) ** 2 if applicable and spec.s_max > 0 else 0.0
    holds = (omega_coup >= rhs - BOUND_TOL) if applicable else True
    return {"omega": float(omega), "omega_coup": float(omega_coup), "rhs": rhs,
            "applicable": applicable, "holds": bool(holds)}


# -- Random instances --------------------------------------------------------------------


def _biased_density(dim: int, targets: Sequence[np.ndarray], rng: np.random.Generator) -> np.ndarray:
    """Random density pulled towards the ranges of ``targets`` so acceptance is high."""
    rank = int(rng.integers(1, dim + 1))
    cols = []
    for _ in range(rank):
        v = random_state(dim, rng)
        w = targets[int(rng.integers(len(targets)))]
        mix = rng.uniform(0.0, 1.0)
        v = mix * (w @ v) + (1 - mix) * v
        n = np.linalg.norm(v)
        cols.append(v / n if n > 1e-12 else random_state(dim, rng))
    weights = rng.dirichlet(np.ones(rank))
    rho = sum(p * projector(v) for p, v in zip(weights, cols))
    return (rho + rho.conj().T) / 2


def _random_families(count: int, rng: np.random.Generator):
    dim = int(rng.integers(2, 9))
    fams = [random_projector_family(dim, int(rng.integers(1, min(4, dim) + 1)), rng) for _ in range(count)]
    return dim, fams


def random_two_meas_instance(rng: np.random.Generator, min_f1: float = 0.5, tries: int = 200):
    """(fam1, fam2, σ) with F1 > ``min_f1``, or the last draw if none qualifies."""
    for _ in range(tries):
        dim, fams = _random_families(2, rng)
        sigma = _biased_density(dim, [f.total for f in fams], rng)
        if 0.5 * sum(_tr(f.total @ sigma) for f in fams) > min_f1:
            break
    return fams[0], fams[1], sigma


def random_cha_instance(rng: np.random.Generator):
    c = int(rng.integers(2, 5))
    dim, fams = _random_families(c, rng)
    sigma = _biased_density(dim, [f.total for f in fams], rng)
    return fams, sigma


def random_don_instance(rng: np.random.Generator):
    dim = int(rng.integers(2, 9))
    c = int(rng.integers(2, 5))
    mats = [random_projector_family(dim, 1, rng).total for _ in range(c)]
    psi = random_state(dim, rng)
    if rng.uniform() < 0.5:
        psi = mats[0] @ psi + 0.3 * psi
        psi /= np.linalg.norm(psi)
    t = int(rng.integers(1, 5))
    return mats, psi, t


def random_gentle_instance(rng: np.random.Generator):
    dim = int(rng.integers(2, 9))
    sigma = random_density(dim, rng, rank=int(rng.integers(1, dim + 1)))
    vals = rng.uniform(0.0, 1.0, size=dim)
    if rng.uniform() < 0.3:
        vals = np.round(vals)
    u = haar_unitary(dim, rng)
    x = (u * vals) @ u.conj().T
    return sigma, (x + x.conj().T) / 2


_PERMS3 = list(itertools.permutations(range(3)))


def symmetrize_tripartite(vec: np.ndarray, d: int) -> np.ndarray:
    """Projection of ``vec`` onto the permutation-symmetric subspace, normalized."""
    t = np.asarray(vec, dtype=complex).reshape(d, d, d)
    s = sum(np.transpose(t, perm) for perm in _PERMS3).reshape(-1)
    return s / np.linalg.norm(s)


def random_claim20_instance(rng: np.random.Generator, d: int = 3):
    fam = random_projector_family(d, int(rng.integers(2, d + 1)), rng, complete=True)
    v = random_state(d**3, rng)
    if rng.uniform() < 0.5:
        # lean towards correlated answers so the bound is not trivially loose
        basis = np.linalg.eigh(sum(i * p for i, p in enumerate(fam.projectors)))[1]
        ghz = sum(np.kron(np.kron(basis[:, i], basis[:, i]), basis[:, i]) for i in range(d))
        v = ghz + rng.uniform(0.0, 1.0) * v
    return symmetrize_tripartite(v, d), fam


def random_coupling_instance(rng: np.random.Generator, tries: int = 200) -> GameSpec:
    """Random game and strategy with winning probability above 1/2."""
    spec = None
    for _ in range(tries):
        nx = int(rng.integers(1, 4))
        na, nb = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        da, db = int(rng.integers(na, 4)), int(rng.integers(nb, 4))
        predicate = rng.uniform(size=(nx, 2, na, nb)) < rng.uniform(0.4, 0.9)
        alice = [random_projector_family(da, na, rng, complete=True) for _ in range(nx)]
        bob = [random_projector_family(db, nb, rng, complete=True) for _ in range(2)]
        state = random_state(da * db, rng)
        spec = GameSpec(predicate, state, da, db, alice, bob)
        if spec.s_max > 0 and coupling_game_eval(spec)["omega"] > 0.5:
            return spec
    return spec


# -- Suites ------------------------------------------------------------------------------

_THEOREM_CODES = {name: i for i, name in enumerate(THEOREMS)}


def _row(theorem, instance_id, seed, f1, f2, rhs, margin, holds):
    return {"theorem": theorem, "instance_id": instance_id, "seed": seed, "F1": float(f1),
            "F2_or_Ft": float(f2), "rhs": float(rhs), "margin": float(margin), "holds": bool(holds)}


def _one(theorem: str, rng: np.random.Generator):
    if theorem == "two_meas":
        r = check_two_meas_bound(*random_two_meas_instance(rng))
        return r["F1"], r["F2"], r["rhs"], r["F2"] - r["rhs"], r["holds"]
    if theorem == "cha":
        r = check_cha_bound(*random_cha_instance(rng))
        return r["F1"], r["F2"], r["rhs"], r["F2"] - r["rhs"], r["holds"]
    if theorem == "don":
        r = check_don_bound(*random_don_instance(rng))
        return r["F1"], r["Ft"], r["rhs"], r["Ft"] - r["rhs"], r["holds"]
    if theorem == "gentle":
        r = check_gentle(*random_gentle_instance(rng))
        return r["p"], r["lhs"], r["rhs"], r["rhs"] - r["lhs"], r["holds"]
    if theorem == "claim20":
        psi, fam = random_claim20_instance(rng)
        r = check_claim20(psi, fam, (fam.dim,) * 3)
        return r["pi2"], r["lhs"], r["rhs"], r["rhs"] - r["lhs"], r["holds"]
    if theorem == "coupling":
        r = coupling_game_eval(random_coupling_instance(rng))
        return r["omega"], r["omega_coup"], r["rhs"], r["omega_coup"] - r["rhs"], r["holds"]
    raise ValueError(f"unknown theorem {theorem!r}")


def run_suite(theorem: str, instances: int, seed: int) -> list[dict]:
    """Seeded random suite; instance i draws from its own counter-based stream."""
    code = _THEOREM_CODES[theorem]
    rows = []
    for i in range(instances):
        rng = trial_rng(seed, i, code)
        rows.append(_row(theorem, i, seed, *_one(theorem, rng)))
    return rows


def corrupted_instance_row(seed: int) -> dict:
    """Negative control: a family with a repeated projector breaks the two-measurement bound.

    {|0><0|, |0><0|} is not pairwise orthogonal, so the bound's hypothesis fails
    and the checker must report a violation.
    """
    zero = np.diag([1.0, 0.0]).astype(complex)
    one = np.diag([0.0, 1.0]).astype(complex)
    fam1 = ProjectorFamily([zero, zero], validate=False)
    fam2 = ProjectorFamily([one])
    # F1 = (Tr[2|0><0| σ] + 0)/2 = 1, F2 = 0, rhs = 2/2 * 1/4
    r = check_two_meas_bound(fam1, fam2, zero, strict=False)
    return _row("two_meas_corrupted", -1, seed, r["F1"], r["F2"], r["rhs"], r["F2"] - r["rhs"], r["holds"])


def dominance_log(rows_two: list[dict], seed: int, margin: float = 0.1) -> list[int]:
    """Instances with F1 > 1/2 + ``margin`` where the cubic bound beats the tightened one.

    Returned for logging only; pointwise dominance is not part of any claim.
    """
    out = []
    for row in rows_two:
        if row["F1"] <= 0.5 + margin:
            continue
        rng = trial_rng(seed, row["instance_id"], _THEOREM_CODES["two_meas"])
        fam1, fam2, _ = random_two_meas_instance(rng)
        s = max(len(fam1), len(fam2))
        cubic = (row["F1"] - 0.5) ** 3 / (64 * s)
        if cubic > row["rhs"]:
            out.append(row["instance_id"])
    return out


SUITE_RUNNERS: dict[str, Callable[[int, int], list[dict]]] = {
    name: (lambda n, s, _name=name: run_suite(_name, n, s)) for name in THEOREMS
}
