"""Execution engine for two-prover relativistic sigma protocols.

A protocol run has four messages: the verifier sends ``rand`` to the first
prover and ``ch`` to the second at the same instant ``t1``; the commitment
comes back at ``t2`` and the response at ``t3``. The run aborts when either
round trip reaches ``dist / light_speed``. Simulated times are exact
``Fraction`` values so the inclusive boundary is tested without rounding.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Protocol

import numpy as np

from .quantum import apply_local, check_unitary

ACCEPT, REJECT, ABORT = "accept", "reject", "abort"
MESSAGES = ("rand", "com", "ch", "resp")


class ProtocolError(RuntimeError):
    """Misuse of the engine (e.g. rewinding past the initial state)."""


class ConfigurationError(ValueError):
    """A machine configuration breaks the no-communication structure."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # shortest decimal repr, so 0.1 becomes 1/10 rather than its binary image
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class TimingModel:
    dist: Fraction = Fraction(1)
    light_speed: Fraction = Fraction(1)
    latency: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "dist", _frac(self.dist))
        object.__setattr__(self, "light_speed", _frac(self.light_speed))
        lat = {m: _frac(self.latency.get(m, 0)) for m in MESSAGES}
        unknown = set(self.latency) - set(MESSAGES)
        if unknown:
            raise ValueError(f"unknown messages in latency map: {sorted(unknown)}")
        if self.dist <= 0 or self.light_speed <= 0:
            raise ValueError("dist and light_speed must be positive")
        if any(v < 0 for v in lat.values()):
            raise ValueError("latencies must be non-negative")
        object.__setattr__(self, "latency", lat)

    @classmethod
    def uniform(cls, dist=1, light_speed=1, latency=0) -> TimingModel:
        """Same delay on each of the four messages."""
        return cls(dist, light_speed, {m: latency for m in MESSAGES})

    @property
    def limit(self) -> Fraction:
        return self.dist / self.light_speed


def timing_check(t1, t2, t3, timing: TimingModel) -> str:
    """``"pass"`` or ``"abort"``; the boundary ``== dist/c`` aborts."""
    t1, t2, t3 = _frac(t1), _frac(t2), _frac(t3)
    if t2 < t1 or t3 < t1:
        raise ValueError("replies cannot arrive before the questions were sent")
    limit = timing.limit
    if (t3 - t1) >= limit or (t2 - t1) >= limit:
        return "abort"
    return "pass"


def jsonable(obj):
    """Convert numpy arrays, Fractions and tuples into JSON-ready values."""
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "value") and hasattr(obj, "spec"):
        return int(obj.value)
    return obj


@dataclass
class Transcript:
    rand: Any
    com: Any
    ch: Any
    resp: Any
    t1: Fraction
    t2: Fraction
    t3: Fraction
    verdict: str
    tag: str = ""

    def to_dict(self) -> dict:
        return {
            "rand": jsonable(self.rand),
            "com": jsonable(self.com),
            "ch": jsonable(self.ch),
            "resp": jsonable(self.resp),
            "t1": jsonable(self.t1),
            "t2": jsonable(self.t2),
            "t3": jsonable(self.t3),
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


class SigmaProtocol(Protocol):
    """What the engine needs from a concrete protocol."""

    challenge_space: tuple

    def sample_rand(self, rng: np.random.Generator) -> Any: ...

    def verify(self, rand, com, ch, resp) -> bool: ...


class ProverPair(Protocol):
    """Factory for two non-communicating provers sharing pre-agreed data."""

    def setup(self, rng: np.random.Generator) -> tuple: ...


def _sample_challenge(protocol, rng):
    space = protocol.challenge_space
    return space[int(rng.integers(len(space)))]


def _verdict(protocol, rand, com, ch, resp) -> tuple[str, str]:
    try:
        ok = bool(protocol.verify(rand, com, ch, resp))
    except (ValueError, TypeError, IndexError, KeyError) as exc:
        return REJECT, f"malformed: {type(exc).__name__}: {exc}"
    return (ACCEPT, "") if ok else (REJECT, "check failed")


def run_sigma(protocol, provers, timing: TimingModel, rng: np.random.Generator) -> Transcript:
    """One complete protocol run with simulated timestamps."""
    p1, p2 = provers.setup(rng)
    rand = protocol.sample_rand(rng)
    ch = _sample_challenge(protocol, rng)
    t1 = Fraction(0)
    com = p1.commit(rand)
    resp = p2.respond(ch)
    lat = timing.latency
    t2 = t1 + lat["rand"] + lat["com"]
    t3 = t1 + lat["ch"] + lat["resp"]
    if timing_check(t1, t2, t3, timing) == "abort":
        return Transcript(rand, com, ch, resp, t1, t2, t3, ABORT, "timing")
    verdict, tag = _verdict(protocol, rand, com, ch, resp)
    return Transcript(rand, com, ch, resp, t1, t2, t3, verdict, tag)


# ---------------------------------------------------------------------------
# three-machine round model

VERIFIER_REGS = frozenset({"S0", "N1", "N2"})
PROVER_REGS = {1: frozenset({"S1", "N1"}), 2: frozenset({"S2", "N2"})}


@dataclass(frozen=True)
class Action:
    """A machine step reading the declared registers and returning updates."""

    fn: Callable[[dict], dict]
    reads: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "reads", frozenset(self.reads))


@dataclass
class MachineConfig:
    """Per-round actions of the verifier M0 and the provers M1, M2.

    Prover actions may only declare reads of their own message register and
    local state; anything else is rejected here, before a run starts.
    """

    m0: list
    m1: list
    m2: list

    def __post_init__(self):
        if not (len(self.m0) == len(self.m1) == len(self.m2)):
            raise ConfigurationError("every machine needs one action per round")
        for j, act in enumerate(self.m0):
            if not act.reads <= VERIFIER_REGS:
                raise ConfigurationError(f"verifier round {j} reads {sorted(act.reads - VERIFIER_REGS)}")
        for who, acts in ((1, self.m1), (2, self.m2)):
            for j, act in enumerate(acts):
                bad = act.reads - PROVER_REGS[who]
                if bad:
                    raise ConfigurationError(f"prover M{who} round {j} reads foreign registers {sorted(bad)}")

    @property
    def rounds(self) -> int:
        return len(self.m0)


def _run_action(act: Action, regs: dict, writable: frozenset, who: str) -> dict:
    view = {k: copy.deepcopy(regs.get(k)) for k in act.reads}
    updates = act.fn(view) or {}
    bad = set(updates) - writable
    if bad:
        raise ProtocolError(f"{who} wrote to foreign registers {sorted(bad)}")
    return updates


def run_rounds(machines: MachineConfig, rounds: int, shared_state: Mapping | None = None) -> dict:
    """Run ``rounds`` rounds: M0 first, then M1 and M2 side by side.

    Registers are S0, N1, N2, S1, S2. Prover steps in one round see the
    registers as M0 left them, so neither can observe the other's output
    before the next round. Returns the final register contents.
    """
    if rounds < 1:
        raise ValueError("at least one round is required")
    if rounds > machines.rounds:
        raise ConfigurationError("more rounds requested than actions configured")
    regs = {k: None for k in ("S0", "N1", "N2", "S1", "S2")}
    regs.update(copy.deepcopy(dict(shared_state or {})))
    for j in range(rounds):
        regs.update(_run_action(machines.m0[j], regs, VERIFIER_REGS, "M0"))
        u1 = _run_action(machines.m1[j], regs, PROVER_REGS[1], "M1")
        u2 = _run_action(machines.m2[j], regs, PROVER_REGS[2], "M2")
        regs.update(u1)
        regs.update(u2)
    return regs


def run_sigma_rounds(protocol, provers, rng: np.random.Generator) -> Transcript:
    """The same run as :func:`run_sigma` written in the explicit round model.

    Round one: M0 loads ``rand`` and ``ch``; each prover answers from its own
    register. Round two: M0 reads both answers and decides. Timing is not
    modelled here because non-communication is enforced structurally.
    """
    p1, p2 = provers.setup(rng)
    rand = protocol.sample_rand(rng)
    ch = _sample_challenge(protocol, rng)
    out = {}

    def v_send(view):
        return {"N1": rand, "N2": ch}

    def v_decide(view):
        out["com"], out["resp"] = view["N1"], view["N2"]
        return {"S0": _verdict(protocol, rand, view["N1"], ch, view["N2"])}

    cfg = MachineConfig(
        m0=[Action(v_send), Action(v_decide, {"N1", "N2"})],
        m1=[Action(lambda v: {"N1": p1.commit(v["N1"])}, {"N1"}), Action(lambda v: {})],
        m2=[Action(lambda v: {"N2": p2.respond(v["N2"])}, {"N2"}), Action(lambda v: {})],
    )
    regs = run_rounds(cfg, 2)
    verdict, tag = regs["S0"]
    zero = Fraction(0)
    return Transcript(rand, out["com"], ch, out["resp"], zero, zero, zero, verdict, tag)


# ---------------------------------------------------------------------------
# rewinding


@dataclass(frozen=True)
class RewindableHandle:
    prover_id: str
    depth: int


class ClassicalRewinder:
    """Wrap a classical prover so each activation can be undone exactly."""

    def __init__(self, prover, prover_id: str = "P"):
        self.prover = prover
        self.prover_id = prover_id
        self._snapshots: list = []

    def activate(self, method: str, *args, **kwargs):
        self._snapshots.append(copy.deepcopy(self.prover.__dict__))
        result = getattr(self.prover, method)(*args, **kwargs)
        return result, RewindableHandle(self.prover_id, len(self._snapshots))

    def rewind(self, handle: RewindableHandle | None = None):
        if not self._snapshots:
            raise ProtocolError("cannot rewind past the initial state")
        if handle is not None and handle.depth != len(self._snapshots):
            raise ProtocolError("handle does not refer to the latest activation")
        self.prover.__dict__ = self._snapshots.pop()
        return self.prover


class QuantumRewinder:
    """A register of a shared pure state whose activations are unitaries.

    ``activate`` applies a unitary to subsystem ``which``; ``measure`` applies
    a projective measurement there (not undoable); ``rewind`` applies the
    adjoint of the latest activation unitary.
    """

    def __init__(self, state: np.ndarray, dims, which: int, prover_id: str = "P"):
        self.state = np.asarray(state, dtype=complex)
        self.dims = list(dims)
        self.which = which
        self.prover_id = prover_id
        self._history: list = []

    def activate(self, unitary: np.ndarray) -> RewindableHandle:
        u = check_unitary(unitary, "activation")
        if u.shape[0] != self.dims[self.which]:
            raise ConfigurationError("activation unitary has the wrong dimension")
        self.state = apply_local(self.state, u, self.dims, self.which)
        self._history.append(u)
        return RewindableHandle(self.prover_id, len(self._history))

    def apply_projector(self, proj: np.ndarray) -> float:
        """Collapse onto ``proj`` (on this register); return the branch weight."""
        self.state = apply_local(self.state, proj, self.dims, self.which)
        weight = float(np.vdot(self.state, self.state).real)
        if weight > 0:
            self.state = self.state / np.sqrt(weight)
        return weight

    def rewind(self, handle: RewindableHandle | None = None) -> np.ndarray:
        if not self._history:
            raise ProtocolError("cannot rewind past the initial state")
        if handle is not None and handle.depth != len(self._history):
            raise ProtocolError("handle does not refer to the latest activation")
        u = self._history.pop()
        self.state = apply_local(self.state, u.conj().T, self.dims, self.which)
        return self.state


def rewind(rewinder, handle: RewindableHandle | None = None):
    """Undo the latest activation recorded by ``rewinder``."""
    return rewinder.rewind(handle)
