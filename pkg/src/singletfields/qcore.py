"""Dense statevector engine for 1-4 qubits.

Conventions:
- qubit 0 is the most significant bit of the amplitude index (big-endian),
  so ``|01>`` means qubit 0 in ``|0>`` and qubit 1 in ``|1>``;
- in the protocol layout qubit 0 is Alice's exposed qubit, 1 is Bob's exposed
  qubit, 2 and 3 are the shielded pair (Alice's, Bob's).

Operators are plain complex ``numpy`` arrays. States are wrapped in
:class:`StateVector` so that kets and operators can be told apart.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

TOL = 1e-12
MAX_QUBITS = 4

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (X, Y, Z)

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


class NormalizationError(ValueError):
    """A direction or state failed its unit-norm check."""


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class UnitDirection:
    """Real unit 3-vector, e.g. a field direction."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = np.sqrt(self.x**2 + self.y**2 + self.z**2)
        if not np.isfinite(norm) or abs(norm - 1.0) > 1e-9:
            raise NormalizationError(f"direction has norm {norm}, expected 1")

    @classmethod
    def from_vector(cls, v, normalize: bool = False) -> UnitDirection:
        v = np.asarray(v, dtype=float)
        if normalize:
            norm = np.linalg.norm(v)
            if norm == 0:
                raise NormalizationError("cannot normalize the zero vector")
            v = v / norm
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: UnitDirection) -> float:
        return float(self.vec @ other.vec)

    def __neg__(self) -> UnitDirection:
        return UnitDirection(-self.x, -self.y, -self.z)


class StateVector:
    """Normalized pure state on ``num_qubits`` qubits.

    The amplitude array is copied and marked read-only; every operation returns
    a new instance.
    """

    __slots__ = ("_amps",)

    def __init__(self, amplitudes, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size < 2 or 1 << n != amps.size or n > MAX_QUBITS:
            raise DimensionError(
                f"amplitude length {amps.size} is not 2**k for k in 1..{MAX_QUBITS}"
            )
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise NormalizationError("zero vector")
            amps = amps / norm
        elif abs(norm - 1.0) > 1e-10:
            raise NormalizationError(f"state has norm {norm}")
        amps.setflags(write=False)
        self._amps = amps

    @classmethod
    def basis(cls, bits: str | Sequence[int]) -> StateVector:
        """Computational basis state, e.g. ``basis("01")``."""
        bits = [int(b) for b in bits]
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[int("".join(map(str, bits)), 2)] = 1.0
        return cls(amps)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def num_qubits(self) -> int:
        return self._amps.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self._amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self._amps))

    def __repr__(self):
        return f"StateVector({np.array2string(self._amps, precision=4)})"


def _check_direction(n) -> UnitDirection:
    if isinstance(n, UnitDirection):
        return n
    v = np.asarray(n, dtype=float)
    if v.shape != (3,):
        raise DimensionError("direction must be a 3-vector")
    return UnitDirection.from_vector(v)


def pauli_dot(n) -> np.ndarray:
    """``n_x X + n_y Y + n_z Z``; Hermitian, unitary and traceless."""
    v = _check_direction(n).vec
    return v[0] * X + v[1] * Y + v[2] * Z


def rotation(n, theta: float) -> np.ndarray:
    """``exp(-i theta (sigma.n) / 2)``, the evolution generated by a field along n."""
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * pauli_dot(n)


def tensor(a, b):
    """Kronecker product; the left operand owns the high-order index."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, StateVector) or isinstance(b, StateVector):
        raise TypeError("tensor needs two states or two operators")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise TypeError("operators must be 2-d arrays")
    return np.kron(a, b)


def _check_targets(targets, n: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise ValueError(f"targets {targets} out of range for {n} qubits")
    return targets


def apply(op, state: StateVector, targets: Sequence[int]) -> StateVector:
    """Apply ``op`` to the listed qubits (first target = high-order index of op).

    ``op`` must be unitary; a norm change is reported as NormalizationError.
    """
    return StateVector(_apply_raw(op, state, targets))


def inner(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """Phase-insensitive overlap ``|<a|b>|^2``."""
    return abs(inner(a, b)) ** 2


def distance(a: StateVector, b: StateVector) -> float:
    """Elementwise (phase-sensitive) distance ``max |a_i - b_i|``."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    return float(np.max(np.abs(a.amplitudes - b.amplitudes)))


def expectation(op, state: StateVector, targets: Sequence[int] | None = None) -> complex:
    if targets is None:
        targets = range(state.num_qubits)
    unnormalized = _apply_raw(op, state, targets)
    return complex(np.vdot(state.amplitudes, unnormalized))


def _apply_raw(op, state: StateVector, targets) -> np.ndarray:
    n = state.num_qubits
    targets = _check_targets(targets, n)
    k = len(targets)
    op = np.asarray(op, dtype=complex)
    if op.shape != (1 << k, 1 << k):
        raise DimensionError(f"operator shape {op.shape} does not act on {k} qubit(s)")
    rest = [q for q in range(n) if q not in targets]
    order = targets + tuple(rest)
    psi = np.transpose(state.amplitudes.reshape([2] * n), order).reshape(1 << k, -1)
    psi = (op @ psi).reshape([2] * n)
    return np.transpose(psi, np.argsort(order)).reshape(-1)


# Bell basis, ordered psi+, psi-, phi+, phi- as in the expansion c1..c4.
BELL_KINDS = ("psi+", "psi-", "phi+", "phi-")
_S = 1 / np.sqrt(2)
_BELL = {
    "psi+": np.array([0, _S, _S, 0], dtype=complex),
    "psi-": np.array([0, _S, -_S, 0], dtype=complex),
    "phi+": np.array([_S, 0, 0, _S], dtype=complex),
    "phi-": np.array([_S, 0, 0, -_S], dtype=complex),
}
BELL_MATRIX = np.array([_BELL[k] for k in BELL_KINDS])


def bell_state(kind: str) -> StateVector:
    try:
        return StateVector(_BELL[kind])
    except KeyError:
        raise ValueError(f"unknown Bell state {kind!r}; expected one of {BELL_KINDS}") from None


def singlet() -> StateVector:
    return bell_state("psi-")


@dataclass(frozen=True)
class BellCoefficients:
    """Bell-basis expansion ``c1 psi+ + c2 psi- + c3 phi+ + c4 phi-``."""

    c1: complex
    c2: complex
    c3: complex
    c4: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3, self.c4], dtype=complex)

    def reconstruct(self) -> StateVector:
        return StateVector(self.as_array() @ BELL_MATRIX)

    @property
    def singlet_weight(self) -> float:
        return abs(self.c2) ** 2


def bell_coefficients(state: StateVector) -> BellCoefficients:
    if state.num_qubits != 2:
        raise DimensionError("Bell expansion needs a two-qubit state")
    c = BELL_MATRIX.conj() @ state.amplitudes
    return BellCoefficients(*(complex(v) for v in c))


def measure_computational(state: StateVector, targets: Sequence[int], rng=None,
                          outcome: Sequence[int] | None = None):
    """Projective Z-basis measurement of ``targets``.

    Returns ``(bits, post_state, probability)``. The outcome is drawn by the
    Born rule from ``rng``, unless ``outcome`` forces a particular branch (which
    must have nonzero probability).
    """
    n = state.num_qubits
    targets = _check_targets(targets, n)
    k = len(targets)
    rest = tuple(q for q in range(n) if q not in targets)
    order = targets + rest
    psi = np.transpose(state.amplitudes.reshape([2] * n), order).reshape(1 << k, -1)
    probs = np.sum(np.abs(psi) ** 2, axis=1)
    if outcome is None:
        if rng is None:
            raise ValueError("a seeded random generator is required")
        probs = probs / probs.sum()
        index = int(rng.choice(1 << k, p=probs))
    else:
        index = int("".join(str(int(b)) for b in outcome), 2)
    p = float(probs[index])
    if p < TOL:
        raise ValueError(f"measurement branch {index:0{k}b} has zero probability")
    projected = np.zeros_like(psi)
    projected[index] = psi[index] / np.sqrt(p)
    post = np.transpose(projected.reshape([2] * n), np.argsort(order)).reshape(-1)
    bits = tuple(int(b) for b in format(index, f"0{k}b"))
    return bits, StateVector(post, normalize=True), p


def random_direction(rng) -> UnitDirection:
    """Uniform point on the unit sphere (normalized Gaussian)."""
    while True:
        v = rng.standard_normal(3)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return UnitDirection.from_vector(v / norm)


def orthonormal_frame(n) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors spanning the plane orthogonal to ``n``.

    Built from the cross product with the coordinate axis least aligned with n.
    """
    v = _check_direction(n).vec
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(v)))] = 1.0
    e1 = np.cross(v, axis)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(v, e1)
    return e1, e2


def orthogonal_direction(n, phi: float) -> UnitDirection:
    e1, e2 = orthonormal_frame(n)
    return UnitDirection.from_vector(np.cos(phi) * e1 + np.sin(phi) * e2, normalize=True)


def random_unitary(rng) -> np.ndarray:
    """Haar-random 2x2 unitary via QR of a complex Gaussian matrix."""
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(num_qubits: int, rng) -> StateVector:
    v = rng.standard_normal(1 << num_qubits) + 1j * rng.standard_normal(1 << num_qubits)
    return StateVector(v, normalize=True)


def bloch_vector(state: StateVector) -> np.ndarray:
    if state.num_qubits != 1:
        raise DimensionError("Bloch vector needs a single-qubit state")
    return np.array([expectation(p, state).real for p in PAULIS])


def reduced_density(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Partial trace onto the qubits in ``keep`` (in the given order)."""
    n = state.num_qubits
    keep = _check_targets(keep, n)
    rest = tuple(q for q in range(n) if q not in keep)
    psi = np.transpose(state.amplitudes.reshape([2] * n), keep + rest)
    psi = psi.reshape(1 << len(keep), -1)
    return psi @ psi.conj().T


def is_unitary(op, tol: float = TOL) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op.conj().T @ op - np.eye(op.shape[0]))) < tol)


def is_hermitian(op, tol: float = TOL) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op - op.conj().T)) < tol)
