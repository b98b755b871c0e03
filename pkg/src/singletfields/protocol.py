"""Alice and Bob's discrimination strategies for the parallel/orthogonal promise."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qcore
from .fields import FieldScenario, PromiseKind, apply_fields_instantaneous
from .qcore import StateVector


class Verdict(enum.Enum):
    PARALLEL = "parallel"
    ORTHOGONAL = "orthogonal"


class Strategy(enum.Enum):
    QCOMM = "qcomm"
    LOCC = "locc"


_EXPECTED = {
    PromiseKind.PARALLEL: Verdict.PARALLEL,
    PromiseKind.ORTHOGONAL: Verdict.ORTHOGONAL,
}


class UnsupportedPromise(ValueError):
    pass


def expected_verdict(scenario: FieldScenario) -> Verdict:
    try:
        return _EXPECTED[scenario.promise.kind]
    except KeyError:
        raise UnsupportedPromise(
            f"only parallel/orthogonal promises have a faultless verdict, got {scenario.promise}"
        ) from None


@dataclass(frozen=True)
class TrialRecord:
    scenario: FieldScenario
    verdict: Verdict
    correct: bool
    strategy: Strategy
    seed: int | None = None


def record(scenario, verdict, strategy, seed=None) -> TrialRecord:
    return TrialRecord(scenario, verdict, verdict is expected_verdict(scenario), strategy, seed)


def singlet_projection_probability(state: StateVector) -> float:
    return qcore.fidelity(qcore.singlet(), state)


def run_with_qcomm(scenario: FieldScenario, rng, seed: int | None = None) -> TrialRecord:
    """Alice ships her qubit to Bob, who projects the pair onto the singlet."""
    expected_verdict(scenario)
    state = apply_fields_instantaneous(scenario, qcore.singlet())
    p = singlet_projection_probability(state)
    verdict = Verdict.PARALLEL if rng.random() < p else Verdict.ORTHOGONAL
    return record(scenario, verdict, Strategy.QCOMM, seed)


def skew_hadamard() -> np.ndarray:
    """Gate with ``|0> -> (|0> - |1>)/sqrt2`` and ``|1> -> (|0> + |1>)/sqrt2``."""
    return np.array([[1, 1], [-1, 1]], dtype=complex) / np.sqrt(2)


def discrimination_unitary(hadamard=None) -> np.ndarray:
    """CNOT (qubit 0 controls) followed by the Hadamard on qubit 0, as one 4x4 map."""
    h = skew_hadamard() if hadamard is None else hadamard
    return np.kron(h, qcore.I2) @ qcore.CNOT


def bell_discriminate(state2q: StateVector, rng=None, hadamard=None, outcome=None):
    """Map the Bell basis to product states and measure both qubits.

    Returns ``(bits, post_state)``. Bell inputs give deterministic outcomes:
    phi+ -> 00, phi- -> 10, psi+ -> 01, psi- -> 11.
    """
    if state2q.num_qubits != 2:
        raise qcore.DimensionError("Bell discrimination needs a two-qubit state")
    mapped = qcore.apply(discrimination_unitary(hadamard), state2q, [0, 1])
    if rng is None and outcome is None:
        # deterministic for Bell inputs; pick the only supported branch
        probs = np.abs(mapped.amplitudes) ** 2
        if probs.max() < 1 - 1e-9:
            raise ValueError("input is not a Bell state; pass rng to sample an outcome")
        outcome = format(int(np.argmax(probs)), "02b")
    bits, post, _ = qcore.measure_computational(mapped, [0, 1], rng, outcome=outcome)
    return bits, post


def outcome_probabilities(state2q: StateVector, hadamard=None) -> dict[tuple[int, int], float]:
    mapped = qcore.apply(discrimination_unitary(hadamard), state2q, [0, 1])
    probs = np.abs(mapped.amplitudes) ** 2
    return {(i >> 1, i & 1): float(probs[i]) for i in range(4)}


def verdict_from_bits(bits) -> Verdict:
    bits = tuple(int(b) for b in bits)
    if bits not in {(0, 0), (0, 1), (1, 0), (1, 1)}:
        raise ValueError(f"bits must be a pair in {{0,1}}, got {bits}")
    return Verdict.PARALLEL if bits == (1, 1) else Verdict.ORTHOGONAL
