"""The canonical rewinding extractor, classical and quantum.

Run the commit phase once, challenge the second prover, rewind it, challenge
it again with a different value, and hand both conversations to the special
extractor. The quantum variant enumerates every measurement branch exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from ..bounds import qpok_extraction_lower
from ..protocols.graphs import is_hamiltonian_cycle
from ..protocols.hamiltonian import HamiltonianProtocol
from ..protocols.subset_sum import SubsetSumProtocol
from ..quantum import ProjectorFamily, QuantumConfigError, apply_local, check_unitary
from ..sigma import ClassicalRewinder, _verdict, ACCEPT
from .special import ExtractionError, k0_hc, k0_subset


def special_extractor_for(protocol) -> tuple[Callable, Callable]:
    """``(k0, is_witness)`` for the protocols shipped with the package."""
    if isinstance(protocol, HamiltonianProtocol):
        g = protocol.graph
        return (
            lambda rand, com, r0, r1: k0_hc(g, rand, com, r0, r1),
            lambda w: w is not None and is_hamiltonian_cycle(g, w),
        )
    if isinstance(protocol, SubsetSumProtocol):
        inst = protocol.inst
        return (
            lambda rand, com, r0, r1: k0_subset(inst.s, inst.k, r0, r1),
            lambda w: w is not None and inst.is_solution(w),
        )
    raise TypeError(f"no special extractor registered for {type(protocol).__name__}")


def _ordered(ch, resp, ch2, resp2):
    return (resp, resp2) if ch < ch2 else (resp2, resp)


@dataclass
class ClassicalExtraction:
    witness: Any
    valid: bool
    conversations: tuple
    accepted: tuple


def canonical_extract_classical(protocol, provers, rng: np.random.Generator) -> ClassicalExtraction:
    """One extraction attempt against classical, rewindable provers."""
    k0, is_witness = special_extractor_for(protocol)
    p1, p2 = provers.setup(rng)
    rand = protocol.sample_rand(rng)
    com = p1.commit(rand)
    space = list(protocol.challenge_space)
    ch = space[int(rng.integers(len(space)))]
    others = [c for c in space if c != ch]
    ch2 = others[int(rng.integers(len(others)))]
    rew = ClassicalRewinder(p2, "P2")
    resp, handle = rew.activate("respond", ch)
    rew.rewind(handle)
    resp2, _ = rew.activate("respond", ch2)
    ok1 = _verdict(protocol, rand, com, ch, resp)[0] == ACCEPT
    ok2 = _verdict(protocol, rand, com, ch2, resp2)[0] == ACCEPT
    convs = ((rand, com, ch, resp), (rand, com, ch2, resp2))
    if not (ok1 and ok2):
        return ClassicalExtraction(None, False, convs, (ok1, ok2))
    r0, r1 = _ordered(ch, resp, ch2, resp2)
    try:
        w = k0(rand, com, r0, r1)
    except ExtractionError:
        return ClassicalExtraction(None, False, convs, (ok1, ok2))
    return ClassicalExtraction(w, bool(is_witness(w)), convs, (ok1, ok2))


# ---------------------------------------------------------------------------
# quantum


@dataclass
class QuantumProverSpec:
    """Two provers sharing ``state`` on ``C^{d1} (x) C^{d2}``.

    ``act1[rand]`` is the first prover's unitary, after which ``com_family``
    (on the first register) yields the commitment. ``act2[ch]`` is the second
    prover's unitary, after which ``resp_family[ch]`` yields the response.
    """

    state: np.ndarray
    dims: tuple
    rand_values: tuple
    act1: dict
    com_family: ProjectorFamily
    challenges: tuple
    act2: dict
    resp_family: dict
    name: str = ""

    def __post_init__(self):
        d1, d2 = self.dims
        if d1 > 64 or d2 > 64:
            raise QuantumConfigError("each prover register is limited to dimension 64")
        self.state = np.asarray(self.state, dtype=complex)
        if self.state.shape != (d1 * d2,) or not math.isclose(np.linalg.norm(self.state), 1.0, abs_tol=1e-10):
            raise QuantumConfigError("state must be a unit vector of dimension d1*d2")
        for r in self.rand_values:
            u = check_unitary(self.act1[r], f"first prover unitary for {r!r}")
            if u.shape[0] != d1:
                raise QuantumConfigError("first prover unitary has the wrong dimension")
        for c in self.challenges:
            u = check_unitary(self.act2[c], f"second prover unitary for {c!r}")
            if u.shape[0] != d2:
                raise QuantumConfigError("second prover unitary has the wrong dimension")
        for fam, d, who in [(self.com_family, d1, "commitment")] + [
            (self.resp_family[c], d2, "response") for c in self.challenges
        ]:
            fam.complete = True
            fam.check()
            if fam.dim != d:
                raise QuantumConfigError(f"{who} measurement has the wrong dimension")


@dataclass
class QuantumExtraction:
    success_probability: float
    acceptance_probability: float
    both_accept_probability: float
    ra_max: int
    delta_ss: float
    bound_rhs: float
    branch_ledger: list = field(repr=False)
    sampled_witness: Any = None

    def to_dict(self) -> dict:
        return {
            "witness": None if self.sampled_witness is None else [int(x) for x in self.sampled_witness],
            "success_probability": self.success_probability,
            "acceptance_probability": self.acceptance_probability,
            "bound_rhs": self.bound_rhs,
            "branch_ledger": [
                {k: (v if not isinstance(v, np.ndarray) else v.tolist()) for k, v in b.items()}
                for b in self.branch_ledger
            ],
        }


def _accepts(protocol, rand, com, ch, resp) -> bool:
    return _verdict(protocol, rand, com, ch, resp)[0] == ACCEPT


def _measure_branch(psi, proj, dims, which):
    out = apply_local(psi, proj, dims, which)
    return out, float(np.vdot(out, out).real)


def canonical_extract_quantum(protocol, spec: QuantumProverSpec, rng=None, field_size=None):
    """Exact branch-by-branch simulation of the rewinding extractor.

    Every ``(rand, com, ch, ch', resp, resp')`` with non-zero weight gets a
    ledger entry; the weights sum to one. Success and acceptance are exact
    sums over branches. When ``rng`` is given one branch is also sampled and
    its extracted witness reported.
    """
    k0, is_witness = special_extractor_for(protocol)
    dims = list(spec.dims)
    n_r, c = len(spec.rand_values), len(spec.challenges)
    if c < 2:
        raise QuantumConfigError("need at least two challenges to rewind")
    ledger = []
    success = accept = both = 0.0
    ra_max = 0
    for rand in spec.rand_values:
        psi1 = apply_local(spec.state, spec.act1[rand], dims, 0)
        for com, wcom in spec.com_family.items():
            sigma, p_com = _measure_branch(psi1, wcom, dims, 0)
            if p_com <= 1e-15:
                continue
            for ch in spec.challenges:
                u = spec.act2[ch]
                n_acc = sum(_accepts(protocol, rand, com, ch, r) for r in spec.resp_family[ch].labels)
                ra_max = max(ra_max, n_acc)
                phi = apply_local(sigma, u, dims, 1)
                for resp, wr in spec.resp_family[ch].items():
                    phi_r, p_r = _measure_branch(phi, wr, dims, 1)
                    if p_r <= 1e-15:
                        continue
                    ok1 = _accepts(protocol, rand, com, ch, resp)
                    if ok1:
                        accept += p_r / (n_r * c)
                    back = apply_local(phi_r, u.conj().T, dims, 1)
                    for ch2 in spec.challenges:
                        if ch2 == ch:
                            continue
                        phi2 = apply_local(back, spec.act2[ch2], dims, 1)
                        for resp2, wr2 in spec.resp_family[ch2].items():
                            _, p2 = _measure_branch(phi2, wr2, dims, 1)
                            if p2 <= 1e-15:
                                continue
                            weight = p2 / (n_r * c * (c - 1))
                            ok2 = _accepts(protocol, rand, com, ch2, resp2)
                            valid = False
                            if ok1 and ok2:
                                both += weight
                                r0, r1 = _ordered(ch, resp, ch2, resp2)
                                try:
                                    valid = bool(is_witness(k0(rand, com, r0, r1)))
                                except ExtractionError:
                                    valid = False
                            if valid:
                                success += weight
                            ledger.append(
                                dict(rand=rand, com=com, ch=ch, ch2=ch2, resp=resp, resp2=resp2,
                                     probability=weight, accepted=(ok1, ok2), valid=valid)
                            )
    q = field_size if field_size is not None else _field_size(protocol)
    delta = 1.0 if both <= 0 else min(1.0, 1.0 / (q * both))
    rhs = qpok_extraction_lower(accept, c, delta, max(ra_max, 1))
    sampled = None
    if rng is not None and ledger:
        probs = np.array([b["probability"] for b in ledger])
        pick = ledger[int(rng.choice(len(ledger), p=probs / probs.sum()))]
        if pick["valid"]:
            r0, r1 = _ordered(pick["ch"], pick["resp"], pick["ch2"], pick["resp2"])
            sampled = k0(pick["rand"], pick["com"], r0, r1)
    return QuantumExtraction(success, accept, both, ra_max, delta, rhs, ledger, sampled)


def _field_size(protocol) -> int:
    if isinstance(protocol, SubsetSumProtocol):
        return protocol.inst.spec.q
    if isinstance(protocol, HamiltonianProtocol):
        return protocol.spec.q
    raise TypeError("cannot infer the field size of this protocol")
