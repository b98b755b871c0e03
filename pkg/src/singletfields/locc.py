"""Two-party LOCC harness with a locality-enforcing simulator and transcripts.

The joint state lives in one :class:`Lab`; Alice and Bob only get
:class:`PartyHandle` objects that refuse to touch qubits they do not own. All
gates, measurements and classical messages are appended to a
:class:`Transcript`, which can be audited and serialized one event per line::

    PAIR 0 1 psi-
    STEP 0 Bob GATE ZX q3
    STEP 1 Alice GATE CNOT q0,q2
    STEP 2 Alice MEASURE z q2=1
    STEP 3 Alice SEND Bob 1 rcnot-a
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .fields import FieldScenario, apply_fields_instantaneous
from .protocol import Strategy, TrialRecord, expected_verdict, skew_hadamard, record, verdict_from_bits
from .qcore import StateVector


class Party(enum.Enum):
    ALICE = "Alice"
    BOB = "Bob"

    @property
    def other(self) -> Party:
        return Party.BOB if self is Party.ALICE else Party.ALICE


OWNERSHIP = {Party.ALICE: frozenset({0, 2}), Party.BOB: frozenset({1, 3})}

# local gate converting a shared singlet psi- into phi+ when applied to Bob's half
SINGLET_TO_PHI_PLUS = qcore.Z @ qcore.X


class LocalityFault(RuntimeError):
    """A party tried to act on a qubit it does not own."""


class ProtocolFault(RuntimeError):
    """Resources or messages were not in the state the protocol expects."""


@dataclass(frozen=True)
class LocalOp:
    party: Party
    gate: str
    targets: tuple[int, ...]

    def payload(self) -> str:
        return f"{self.gate} " + ",".join(f"q{q}" for q in self.targets)


@dataclass(frozen=True)
class Measurement:
    party: Party
    basis: str
    qubit: int
    bit: int

    def payload(self) -> str:
        return f"{self.basis} q{self.qubit}={self.bit}"


@dataclass(frozen=True)
class ClassicalMessage:
    sender: Party
    receiver: Party
    bit: int
    step_label: str

    def __post_init__(self):
        if self.sender is self.receiver:
            raise ValueError("a message needs two distinct parties")
        if self.bit not in (0, 1):
            raise ValueError(f"classical bit must be 0 or 1, got {self.bit}")

    @property
    def party(self) -> Party:
        return self.sender

    def payload(self) -> str:
        return f"{self.receiver.value} {self.bit} {self.step_label}"


_KINDS = {LocalOp: "GATE", Measurement: "MEASURE", ClassicalMessage: "SEND"}


@dataclass
class Transcript:
    pairs: list[tuple[int, int, str]] = field(default_factory=list)
    events: list = field(default_factory=list)

    def messages(self, prefix: str = "") -> list[ClassicalMessage]:
        return [e for e in self.events
                if isinstance(e, ClassicalMessage) and e.step_label.startswith(prefix)]

    @property
    def classical_bits(self) -> int:
        return len(self.messages())

    @property
    def pairs_consumed(self) -> int:
        return len(self.pairs)

    def touched(self, event) -> tuple[int, ...]:
        if isinstance(event, LocalOp):
            return event.targets
        if isinstance(event, Measurement):
            return (event.qubit,)
        return ()

    def audit(self) -> list[str]:
        """Return a description of every locality violation (empty when clean)."""
        problems = []
        for i, event in enumerate(self.events):
            foreign = set(self.touched(event)) - OWNERSHIP[event.party]
            if foreign:
                problems.append(f"step {i}: {event.party.value} touched {sorted(foreign)}")
        return problems

    def lines(self) -> list[str]:
        out = [f"PAIR {a} {b} {kind}" for a, b, kind in self.pairs]
        for i, event in enumerate(self.events):
            out.append(f"STEP {i} {event.party.value} {_KINDS[type(event)]} {event.payload()}")
        return out

    def serialize(self) -> str:
        return "\n".join(self.lines()) + "\n"


class Lab:
    """Holds the joint state and the classical channel for one run."""

    def __init__(self, state: StateVector, transcript: Transcript | None = None,
                 rng=None, forced: dict[str, int] | None = None):
        self.state = state
        self.transcript = transcript if transcript is not None else Transcript()
        self.rng = rng
        self.forced = dict(forced or {})
        self._queues = {Party.ALICE: deque(), Party.BOB: deque()}

    def handle(self, party: Party) -> PartyHandle:
        return PartyHandle(self, party)

    def share_pair(self, a: int, b: int, kind: str = "psi-"):
        """Register a pre-shared pair (a: Alice's qubit, b: Bob's qubit)."""
        if a not in OWNERSHIP[Party.ALICE] or b not in OWNERSHIP[Party.BOB]:
            raise LocalityFault(f"pair ({a}, {b}) must be split Alice/Bob")
        self.transcript.pairs.append((a, b, kind))


class PartyHandle:
    """Capability object: a party's only access to the joint state."""

    def __init__(self, lab: Lab, party: Party):
        self._lab = lab
        self.party = party

    def _check(self, qubits):
        foreign = set(qubits) - OWNERSHIP[self.party]
        if foreign:
            raise LocalityFault(f"{self.party.value} cannot act on qubits {sorted(foreign)}")

    def gate(self, name: str, op, targets):
        targets = tuple(targets)
        self._check(targets)
        self._lab.state = qcore.apply(op, self._lab.state, targets)
        self._lab.transcript.events.append(LocalOp(self.party, name, targets))

    def measure(self, qubit: int, label: str, basis: str = "z") -> int:
        self._check([qubit])
        lab = self._lab
        if basis == "x":
            lab.state = qcore.apply(qcore.HADAMARD, lab.state, [qubit])
        elif basis != "z":
            raise ValueError(f"unknown basis {basis!r}")
        forced = lab.forced.get(label)
        bits, lab.state, _ = qcore.measure_computational(
            lab.state, [qubit], lab.rng, outcome=None if forced is None else (forced,)
        )
        lab.transcript.events.append(Measurement(self.party, basis, qubit, bits[0]))
        return bits[0]

    def send(self, bit: int, label: str):
        msg = ClassicalMessage(self.party, self.party.other, int(bit), label)
        self._lab._queues[msg.receiver].append(msg)
        self._lab.transcript.events.append(msg)

    def recv(self, label: str) -> int:
        queue = self._lab._queues[self.party]
        if not queue:
            # single-threaded run: an empty inbox means the recipient would block forever
            raise ProtocolFault(f"{self.party.value} waits for {label!r} but nothing was sent")
        msg = queue.popleft()
        if msg.step_label != label:
            raise ProtocolFault(f"{self.party.value} expected {label!r}, got {msg.step_label!r}")
        return msg.bit


def _check_bell_pair(state: StateVector, a: int, b: int, kind: str, tol: float = 1e-9):
    rho = qcore.reduced_density(state, [a, b])
    target = qcore.bell_state(kind).amplitudes
    f = float(np.real(target.conj() @ rho @ target))
    if f < 1 - tol:
        raise ProtocolFault(f"qubits ({a}, {b}) are not in {kind} (fidelity {f:.6f})")


def remote_cnot(joint: StateVector, control: int, target: int, ebit: tuple[int, int],
                rng=None, transcript: Transcript | None = None,
                forced: dict[str, int] | None = None, ebit_kind: str = "psi-") -> StateVector:
    """CNOT from Alice's ``control`` onto Bob's ``target`` using one shared pair.

    The pair ``ebit = (alice_half, bob_half)`` must hold ``ebit_kind`` (psi- or
    phi+); a singlet is first turned into phi+ by a local gate on Bob's half.
    Costs two classical bits. ``forced`` pins the measurement branches by label
    (``"rcnot-a"``, ``"rcnot-b"``) for exhaustive checks.
    """
    lab = Lab(joint, transcript, rng, forced)
    run_remote_cnot(lab, control, target, ebit, ebit_kind)
    return lab.state


def run_remote_cnot(lab: Lab, control: int, target: int, ebit: tuple[int, int],
                    ebit_kind: str = "psi-"):
    ea, eb = ebit
    if len({control, target, ea, eb}) != 4:
        raise ValueError("control, target and ebit qubits must be distinct")
    if ebit_kind not in ("psi-", "phi+"):
        raise ProtocolFault(f"unsupported ebit resource {ebit_kind!r}")
    _check_bell_pair(lab.state, ea, eb, ebit_kind)
    alice, bob = lab.handle(Party.ALICE), lab.handle(Party.BOB)

    if ebit_kind == "psi-":
        bob.gate("ZX", SINGLET_TO_PHI_PLUS, [eb])
    alice.gate("CNOT", qcore.CNOT, [control, ea])
    a = alice.measure(ea, "rcnot-a")
    alice.send(a, "rcnot-a")

    if bob.recv("rcnot-a"):
        bob.gate("X", qcore.X, [eb])
    bob.gate("CNOT", qcore.CNOT, [eb, target])
    b = bob.measure(eb, "rcnot-b", basis="x")
    bob.send(b, "rcnot-b")

    if alice.recv("rcnot-b"):
        alice.gate("Z", qcore.Z, [control])


SHIELDED_PAIR = (2, 3)


def run_locc(scenario: FieldScenario, rng, seed: int | None = None,
             forced: dict[str, int] | None = None, hadamard=None) -> tuple[TrialRecord, Transcript]:
    """Whole LOCC discrimination: two singlets, fields on the first, remote CNOT
    spending the second, local Hadamard and measurements, one verdict bit."""
    expected_verdict(scenario)
    joint = qcore.tensor(qcore.singlet(), qcore.singlet())
    lab = Lab(joint, rng=rng, forced=forced)
    lab.share_pair(0, 1)
    lab.share_pair(*SHIELDED_PAIR)

    # Eve acts only on the exposed pair
    lab.state = apply_fields_instantaneous(scenario, lab.state)

    run_remote_cnot(lab, 0, 1, SHIELDED_PAIR)
    alice, bob = lab.handle(Party.ALICE), lab.handle(Party.BOB)
    alice.gate("H'", skew_hadamard() if hadamard is None else hadamard, [0])
    bit_a = alice.measure(0, "final-a")
    bit_b = bob.measure(1, "final-b")
    alice.send(bit_a, "verdict")
    verdict = verdict_from_bits((bob.recv("verdict"), bit_b))
    return record(scenario, verdict, Strategy.LOCC, seed), lab.transcript
