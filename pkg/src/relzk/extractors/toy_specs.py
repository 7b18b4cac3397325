"""Small quantum prover families for the one-element subset-sum instance.

The instance is ``s = (1,)``, ``k = 1`` over F_2, whose only solution is
``v = (1,)``. The shared randomness ``(z, c0, c1)`` has eight values, so each
prover holds an 8-dimensional register (16 with an extra qubit for the
second prover). Basis index of ``(z, c0, c1)`` is ``4z + 2c0 + c1``.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..field import FieldSpec
from ..protocols.subset_sum import SubsetSumInstance, SubsetSumProtocol
from ..quantum import ProjectorFamily, haar_unitary, ket, random_state
from .canonical import QuantumProverSpec

KINDS = ("honest", "one-branch", "partial", "superposed", "guesser")
_TRIPLES = list(itertools.product((0, 1), repeat=3))


def toy_instance() -> SubsetSumInstance:
    return SubsetSumInstance((1,), 1, FieldSpec(2))


def toy_protocol() -> SubsetSumProtocol:
    return SubsetSumProtocol(toy_instance())


def _perm_unitary(mapping: dict, dim: int) -> np.ndarray:
    u = np.zeros((dim, dim), dtype=complex)
    for src, dst in mapping.items():
        u[dst, src] = 1.0
    return u


def _commit_unitary(a: int) -> np.ndarray:
    # (z, c0, c1) -> (w0, w1, z): a bijection for fixed a
    mapping = {}
    for z, c0, c1 in _TRIPLES:
        w0 = (a * z + c0) % 2
        w1 = (a * (1 - z) + c1) % 2
        mapping[4 * z + 2 * c0 + c1] = 4 * w0 + 2 * w1 + z
    return _perm_unitary(mapping, 8)


def _reveal_unitary(v: int, corrupt=lambda z: False) -> np.ndarray:
    # (z, c0, c1) -> (x, c', other c); corrupt(z) flips c' to force rejection
    mapping = {}
    for z, c0, c1 in _TRIPLES:
        x = v ^ z
        cp, other = (c0, c1) if x == 0 else (c1, c0)
        if corrupt(z):
            cp ^= 1
        mapping[4 * z + 2 * c0 + c1] = 4 * x + 2 * cp + other
    return _perm_unitary(mapping, 8)


def _com_family() -> ProjectorFamily:
    projs, labels = [], []
    for w0, w1 in itertools.product((0, 1), repeat=2):
        p = np.zeros((8, 8), dtype=complex)
        for g in (0, 1):
            p[4 * w0 + 2 * w1 + g, 4 * w0 + 2 * w1 + g] = 1
        projs.append(p)
        labels.append(((w0,), (w1,)))
    return ProjectorFamily(projs, labels, complete=True)


def _resp_families(anc: int) -> dict:
    eye = np.eye(anc)
    ch0 = []
    for z, c0, c1 in _TRIPLES:
        p = np.zeros((8, 8), dtype=complex)
        p[4 * z + 2 * c0 + c1, 4 * z + 2 * c0 + c1] = 1
        ch0.append(np.kron(p, eye))
    lab0 = [((z,), (c0,), (c1,)) for z, c0, c1 in _TRIPLES]
    ch1, lab1 = [], []
    for x, cp in itertools.product((0, 1), repeat=2):
        p = np.zeros((8, 8), dtype=complex)
        for g in (0, 1):
            p[4 * x + 2 * cp + g, 4 * x + 2 * cp + g] = 1
        ch1.append(np.kron(p, eye))
        lab1.append(((x,), cp))
    return {
        0: ProjectorFamily(ch0, lab0, complete=True),
        1: ProjectorFamily(ch1, lab1, complete=True),
    }


def _c_prime_rotation(theta: float) -> np.ndarray:
    """Rotate the ``c'`` bit (middle qubit of the response register)."""
    r = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]], dtype=complex)
    return np.kron(np.kron(np.eye(2), r), np.eye(2))


def subset_toy_spec(kind: str = "honest", rng: np.random.Generator | None = None, ancilla: bool = False,
                    theta: float | None = None) -> QuantumProverSpec:
    """A quantum prover pair of the requested ``kind``.

    honest: maximally correlated shared randomness (random phases if ``rng``).
    one-branch: challenge 1 always answered wrongly, acceptance exactly 1/2.
    partial: challenge 1 answered wrongly when ``z = 1``; random weights.
    superposed: the ``c'`` bit is rotated by ``theta`` before measurement.
    guesser: behaves honestly for the non-solution ``v = 0``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown prover kind {kind!r}")
    anc = 2 if ancilla else 1
    amps = np.full(8, 1 / np.sqrt(8), dtype=complex)
    if rng is not None:
        amps = amps * np.exp(2j * np.pi * rng.random(8))
        if kind == "partial":
            mags = rng.random(8) + 0.05
            amps = amps / np.abs(amps) * np.sqrt(mags / mags.sum())
    anc_state = random_state(anc, rng) if (ancilla and rng is not None) else ket(0, anc)
    state = np.zeros(8 * 8 * anc, dtype=complex)
    for idx in range(8):
        state += amps[idx] * np.kron(ket(idx, 8), np.kron(ket(idx, 8), anc_state))
    state /= np.linalg.norm(state)

    v = 0 if kind == "guesser" else 1
    if kind == "one-branch":
        reveal = _reveal_unitary(v, corrupt=lambda z: True)
    elif kind == "partial":
        reveal = _reveal_unitary(v, corrupt=lambda z: z == 1)
    else:
        reveal = _reveal_unitary(v)
    act2_1 = np.kron(reveal, np.eye(anc))
    if kind == "superposed":
        th = theta if theta is not None else (float(rng.uniform(0, np.pi / 3)) if rng is not None else np.pi / 6)
        if ancilla:
            # rotation controlled by the ancilla: only the |1> branch is disturbed
            ctrl = np.kron(np.eye(8), np.diag([1, 0])) + np.kron(_c_prime_rotation(th), np.diag([0, 1]))
            act2_1 = ctrl @ act2_1
        else:
            act2_1 = np.kron(_c_prime_rotation(th), np.eye(anc)) @ act2_1
    act2_0 = np.eye(8 * anc, dtype=complex)
    if ancilla and rng is not None:
        # a local unitary on the ancilla alone changes nothing observable
        act2_0 = np.kron(np.eye(8), haar_unitary(2, rng))
        act2_1 = act2_1 @ np.kron(np.eye(8), haar_unitary(2, rng))
    return QuantumProverSpec(
        state=state,
        dims=(8, 8 * anc),
        rand_values=(0, 1),
        act1={a: _commit_unitary(a) for a in (0, 1)},
        com_family=_com_family(),
        challenges=(0, 1),
        act2={0: act2_0, 1: act2_1},
        resp_family=_resp_families(anc),
        name=kind + ("+ancilla" if ancilla else ""),
    )


def acceptance_suite(seed: int, count: int = 50):
    """``count`` specs mixing every kind, both register sizes, random parameters."""
    from ..rng import trial_rng

    out = []
    kinds = [k for k in KINDS if k != "one-branch"]
    for i in range(count):
        rng = trial_rng(seed, i)
        kind = kinds[i % len(kinds)]
        out.append(subset_toy_spec(kind, rng, ancilla=bool((i // len(kinds)) % 2)))
    return out
