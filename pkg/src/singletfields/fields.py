"""Eve's side: draw promised field pairs and let them act on the exposed qubits.

A field is only ever visible through its unitary action on qubits 0 (Alice)
and 1 (Bob); the directions are never handed to the parties.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qcore
from .qcore import StateVector, UnitDirection

ALICE_EXPOSED = 0
BOB_EXPOSED = 1


class PromiseKind(enum.Enum):
    PARALLEL = "parallel"
    ORTHOGONAL = "orthogonal"
    ANTIPARALLEL = "antiparallel"
    ANGLE = "angle"


_COSINES = {
    PromiseKind.PARALLEL: 1.0,
    PromiseKind.ORTHOGONAL: 0.0,
    PromiseKind.ANTIPARALLEL: -1.0,
}


@dataclass(frozen=True)
class Promise:
    kind: PromiseKind
    alpha: float | None = None

    def __post_init__(self):
        if self.kind is PromiseKind.ANGLE:
            if self.alpha is None or not 0.0 <= self.alpha <= np.pi:
                raise ValueError(f"angle promise needs alpha in [0, pi], got {self.alpha}")
        elif self.alpha is not None:
            raise ValueError(f"{self.kind.value} promise takes no angle")

    @classmethod
    def angle(cls, alpha: float) -> Promise:
        return cls(PromiseKind.ANGLE, float(alpha))

    @classmethod
    def parse(cls, text: str) -> Promise:
        """``parallel``, ``orthogonal``, ``antiparallel`` or ``angle:<radians>``."""
        text = text.strip().lower()
        if text.startswith("angle:"):
            return cls.angle(float(text.split(":", 1)[1]))
        try:
            return cls(PromiseKind(text))
        except ValueError:
            raise ValueError(f"unknown promise {text!r}") from None

    @property
    def cosine(self) -> float:
        """Promised value of n.m."""
        if self.kind is PromiseKind.ANGLE:
            return float(np.cos(self.alpha))
        return _COSINES[self.kind]

    def __str__(self):
        if self.kind is PromiseKind.ANGLE:
            return f"angle({self.alpha!r})"
        return self.kind.value


PARALLEL = Promise(PromiseKind.PARALLEL)
ORTHOGONAL = Promise(PromiseKind.ORTHOGONAL)
ANTIPARALLEL = Promise(PromiseKind.ANTIPARALLEL)


@dataclass(frozen=True)
class FieldScenario:
    """Promise plus the concrete directions: ``n`` on Alice's side, ``m`` on Bob's."""

    promise: Promise
    n: UnitDirection
    m: UnitDirection

    def __post_init__(self):
        if abs(self.n.dot(self.m) - self.promise.cosine) > 1e-12:
            raise ValueError(
                f"directions with n.m = {self.n.dot(self.m)} break the {self.promise} promise"
            )


def eve_choose(promise: Promise, rng) -> FieldScenario:
    n = qcore.random_direction(rng)
    kind = promise.kind
    if kind is PromiseKind.PARALLEL:
        m = n
    elif kind is PromiseKind.ANTIPARALLEL:
        m = -n
    elif kind is PromiseKind.ORTHOGONAL:
        m = qcore.orthogonal_direction(n, rng.uniform(0.0, 2 * np.pi))
    else:
        # rotate n by alpha towards a uniformly random orthogonal direction
        u = qcore.orthogonal_direction(n, rng.uniform(0.0, 2 * np.pi))
        a = promise.alpha
        m = UnitDirection.from_vector(np.cos(a) * n.vec + np.sin(a) * u.vec, normalize=True)
    return FieldScenario(promise, n, m)


def apply_fields_instantaneous(scenario: FieldScenario, state: StateVector) -> StateVector:
    """Kick the exposed pair with ``(sigma.n) x (sigma.m)``."""
    op = qcore.tensor(qcore.pauli_dot(scenario.n), qcore.pauli_dot(scenario.m))
    return qcore.apply(op, state, [ALICE_EXPOSED, BOB_EXPOSED])


def apply_fields_evolution(scenario: FieldScenario, theta: float, state: StateVector) -> StateVector:
    """Let the fields act for a time corresponding to precession angle ``theta``."""
    op = qcore.tensor(qcore.rotation(scenario.n, theta), qcore.rotation(scenario.m, theta))
    return qcore.apply(op, state, [ALICE_EXPOSED, BOB_EXPOSED])
