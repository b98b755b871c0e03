"""Property suite run by ``singletfields verify``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import qcore
from .fields import ORTHOGONAL, PARALLEL, apply_fields_instantaneous
from .locc import remote_cnot
from .protocol import Strategy, outcome_probabilities, skew_hadamard
from .runs import draw_scenario, run_trials, trial_rng

BELL_OUTCOMES = {"phi+": (0, 0), "phi-": (1, 0), "psi+": (0, 1), "psi-": (1, 1)}

FAULTS = {
    # sign moved to the other off-diagonal entry: still unitary, wrong mapping
    "hadamard-sign": lambda: skew_hadamard().T,
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class Settings:
    seed: int = 0
    trials: int = 2000
    tol: float = qcore.TOL
    hadamard: np.ndarray | None = None


def _algebra(s: Settings):
    rng = trial_rng(s.seed, 0)
    worst = 0.0
    for _ in range(min(s.trials, 10_000)):
        n = qcore.random_direction(rng)
        p = qcore.pauli_dot(n)
        worst = max(worst,
                    np.max(np.abs(p @ p - qcore.I2)),
                    np.max(np.abs(qcore.rotation(n, np.pi) + 1j * p)),
                    abs(np.trace(p)))
    return worst < s.tol, f"max residual {worst:.3e}"


def _norm_and_bell_roundtrip(s: Settings):
    rng = trial_rng(s.seed, 1)
    worst = 0.0
    for _ in range(min(s.trials, 10_000)):
        psi = qcore.random_state(2, rng)
        u = np.kron(qcore.random_unitary(rng), qcore.random_unitary(rng))
        worst = max(worst, abs(qcore.apply(u, psi, [0, 1]).norm() - 1),
                    qcore.distance(qcore.bell_coefficients(psi).reconstruct(), psi))
    return worst < s.tol, f"max residual {worst:.3e}"


def _field_check(promise, measure):
    def check(s: Settings):
        worst = 0.0
        for i in range(s.trials):
            scenario, _ = draw_scenario(s.seed, i, promise)
            worst = max(worst, measure(apply_fields_instantaneous(scenario, qcore.singlet())))
        return worst < s.tol, f"max residual {worst:.3e} over {s.trials} scenarios"
    return check


_invariance = _field_check(PARALLEL, lambda out: abs(1 - qcore.fidelity(qcore.singlet(), out)))
_orthogonality = _field_check(ORTHOGONAL, lambda out: abs(qcore.inner(qcore.singlet(), out)))


def _bell_mapping(s: Settings):
    worst = 0.0
    for kind, bits in BELL_OUTCOMES.items():
        probs = outcome_probabilities(qcore.bell_state(kind), s.hadamard)
        worst = max(worst, abs(1 - probs[bits]))
    return worst < s.tol, f"max |1 - p(expected)| = {worst:.3e}"


def _qcomm(s: Settings):
    summary = run_trials(Strategy.QCOMM, s.trials, s.seed)
    return summary.errors == 0, f"{summary.errors} errors in {summary.trials} trials"


def _locc(s: Settings):
    summary = run_trials(Strategy.LOCC, s.trials, s.seed, hadamard=s.hadamard)
    ok = (summary.errors == 0 and summary.classical_bits == {3}
          and summary.pairs_consumed == {2} and summary.locality_violations == 0)
    return ok, (f"{summary.errors} errors in {summary.trials} trials, bits/run "
                f"{sorted(summary.classical_bits)}, pairs/run {sorted(summary.pairs_consumed)}, "
                f"locality violations {summary.locality_violations}")


def _remote_cnot(s: Settings):
    rng = trial_rng(s.seed, 2)
    worst = 0.0
    for _ in range(min(s.trials, 1000)):
        psi = qcore.random_state(2, rng)
        direct = qcore.apply(qcore.CNOT, psi, [0, 1]).amplitudes
        joint = qcore.tensor(psi, qcore.singlet())
        for a in (0, 1):
            for b in (0, 1):
                out = remote_cnot(joint, 0, 1, (2, 3), forced={"rcnot-a": a, "rcnot-b": b})
                rho = qcore.reduced_density(out, [0, 1])
                worst = max(worst, abs(1 - np.real(direct.conj() @ rho @ direct)))
    return worst < s.tol, f"max branch infidelity {worst:.3e}"


CHECKS: list[tuple[str, Callable[[Settings], tuple[bool, str]]]] = [
    ("pauli-algebra", _algebra),
    ("norm-and-bell-roundtrip", _norm_and_bell_roundtrip),
    ("singlet-invariance", _invariance),
    ("orthogonality", _orthogonality),
    ("bell-mapping", _bell_mapping),
    ("remote-cnot-oracle", _remote_cnot),
    ("qcomm-zero-error", _qcomm),
    ("locc-zero-error-and-audit", _locc),
]


def run_checks(settings: Settings) -> list[CheckResult]:
    return [CheckResult(name, *check(settings)) for name, check in CHECKS]
