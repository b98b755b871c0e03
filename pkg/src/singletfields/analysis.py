"""Numerical checks of the claims around the singlet-assisted comparison task.

Covers the uniqueness condition on the shared state, the failure of
unentangled single-qubit probes, the angle generalization and the
anti-parallel variant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qcore
from .fields import (
    ANTIPARALLEL,
    PARALLEL,
    FieldScenario,
    Promise,
    apply_fields_evolution,
    apply_fields_instantaneous,
    eve_choose,
)
from .qcore import BellCoefficients, StateVector, UnitDirection

# Maximally entangled states with singlet fidelity <= 0.999 violate the
# uniqueness condition by at least 0.0448 on the stratified grid alone
# (adversarial minimum over the rotation axis at the fidelity boundary; the
# violation grows with distance from the singlet). Recomputed in
# tests/test_calibration.py. The floor keeps a factor 2 margin.
UNIQUENESS_FIDELITY_CUTOFF = 0.999
UNIQUENESS_VIOLATION_FLOOR = 0.02

PHASES = 2 * np.pi * np.arange(8) / 8


class PreconditionError(ValueError):
    pass


def icosahedron_vertices() -> np.ndarray:
    g = (1 + np.sqrt(5)) / 2
    verts = []
    for a in (-1, 1):
        for b in (-g, g):
            verts += [(0, a, b), (a, b, 0), (b, 0, a)]
    verts = np.array(verts, dtype=float)
    return verts / np.linalg.norm(verts, axis=1, keepdims=True)


def _sigma(v: np.ndarray) -> np.ndarray:
    """sigma.v for arbitrary (not necessarily unit) real vectors, batched on axis 0."""
    v = np.asarray(v, dtype=float)
    return np.einsum("...k,kij->...ij", v, np.array(qcore.PAULIS))


@dataclass(frozen=True)
class ConditionSample:
    """Direction triple for the uniqueness condition.

    ``n`` is the parallel-field direction, ``nprime`` the orthogonal-case
    direction on Alice's side, and ``phi_perp`` picks Bob's direction on the
    circle orthogonal to ``nprime``.
    """

    n: UnitDirection
    nprime: UnitDirection
    phi_perp: float
    value: complex | None = None

    @property
    def nprime_perp(self) -> UnitDirection:
        return qcore.orthogonal_direction(self.nprime, self.phi_perp)

    def with_value(self, value: complex) -> ConditionSample:
        return ConditionSample(self.n, self.nprime, self.phi_perp, complex(value))


@dataclass(frozen=True)
class ViolationReport:
    state_descriptor: BellCoefficients
    worst_violation: float
    argmax_sample: ConditionSample
    samples_used: int

    @property
    def c2sq(self) -> float:
        return self.state_descriptor.singlet_weight


class SampleSet:
    """Batched direction triples, stored as arrays for vectorized evaluation."""

    def __init__(self, n, nprime, phi_perp):
        self.n = np.asarray(n, dtype=float).reshape(-1, 3)
        self.nprime = np.asarray(nprime, dtype=float).reshape(-1, 3)
        self.phi_perp = np.asarray(phi_perp, dtype=float).reshape(-1)
        frames = [qcore.orthonormal_frame(v) for v in self.nprime]
        e1 = np.array([f[0] for f in frames])
        e2 = np.array([f[1] for f in frames])
        c, s = np.cos(self.phi_perp)[:, None], np.sin(self.phi_perp)[:, None]
        self.nprime_perp = c * e1 + s * e2

    def __len__(self):
        return len(self.phi_perp)

    def sample(self, i: int) -> ConditionSample:
        return ConditionSample(
            UnitDirection.from_vector(self.n[i], normalize=True),
            UnitDirection.from_vector(self.nprime[i], normalize=True),
            float(self.phi_perp[i]),
        )

    @classmethod
    def grid(cls) -> SampleSet:
        """Icosahedral vertices for n and n', times 8 phases for phi_perp."""
        ico = icosahedron_vertices()
        ii, jj, kk = np.meshgrid(range(len(ico)), range(len(ico)), range(len(PHASES)), indexing="ij")
        return cls(ico[ii.ravel()], ico[jj.ravel()], PHASES[kk.ravel()])

    @classmethod
    def random(cls, count: int, rng) -> SampleSet:
        n = [qcore.random_direction(rng).vec for _ in range(count)]
        nprime = [qcore.random_direction(rng).vec for _ in range(count)]
        return cls(n, nprime, rng.uniform(0.0, 2 * np.pi, count))

    @classmethod
    def concat(cls, *sets: SampleSet) -> SampleSet:
        return cls(
            np.concatenate([s.n for s in sets]),
            np.concatenate([s.nprime for s in sets]),
            np.concatenate([s.phi_perp for s in sets]),
        )


def condition_values(state: StateVector, samples: SampleSet) -> np.ndarray:
    """Direct matrix evaluation of the uniqueness condition for every sample.

    Uses ``(A x B)|psi> = vec(A M B^T)`` with M the 2x2 amplitude matrix.
    """
    if state.num_qubits != 2:
        raise qcore.DimensionError("the uniqueness condition is defined on two qubits")
    sn, snp, snpp = _sigma(samples.n), _sigma(samples.nprime), _sigma(samples.nprime_perp)
    a = sn @ snp
    b = sn @ snpp
    m = state.amplitudes.reshape(2, 2)
    out = np.einsum("kij,jl,kml->kim", a, m, b)
    return np.einsum("im,kim->k", m.conj(), out)


def condition_eq10(state: StateVector, sample: ConditionSample) -> complex:
    """``<psi| (s.n x s.n)(s.n' x s.n'perp) |psi>`` by explicit 4x4 matrices."""
    if state.num_qubits != 2:
        raise qcore.DimensionError("the uniqueness condition is defined on two qubits")
    pn = qcore.pauli_dot(sample.n)
    op = np.kron(pn, pn) @ np.kron(qcore.pauli_dot(sample.nprime), qcore.pauli_dot(sample.nprime_perp))
    return qcore.expectation(op, state)


def correlation_matrix(state: StateVector) -> np.ndarray:
    """``T[i, j] = <sigma_i x sigma_j>``."""
    return np.array([[qcore.expectation(np.kron(p, q), state).real for q in qcore.PAULIS]
                     for p in qcore.PAULIS])


def condition_eq12(state: StateVector, sample: ConditionSample, tol: float = 1e-10) -> complex:
    """Closed form of the uniqueness condition for maximally entangled states:
    ``(n.n')(n.n'perp) - <sigma.(n x n') x sigma.(n x n'perp)>``."""
    ok, witness = is_maximally_entangled(state, tol)
    if not ok:
        raise PreconditionError(f"state is not maximally entangled (local residual {witness:.3g})")
    n, npr, npp = sample.n.vec, sample.nprime.vec, sample.nprime_perp.vec
    a, b = np.cross(n, npr), np.cross(n, npp)
    return complex((n @ npr) * (n @ npp) - a @ correlation_matrix(state) @ b)


def bob_bloch_residuals(state: StateVector) -> np.ndarray:
    return np.array([abs(qcore.expectation(p, state, [1])) for p in qcore.PAULIS])


def is_maximally_entangled(state: StateVector, tol: float = 1e-10) -> tuple[bool, float]:
    """Check that every ``<I x sigma_k>`` vanishes; returns (verdict, largest residual)."""
    if state.num_qubits != 2:
        raise qcore.DimensionError("needs a two-qubit state")
    witness = float(bob_bloch_residuals(state).max())
    return witness < tol, witness


def reduced_purities(state: StateVector) -> tuple[float, float]:
    pa = qcore.reduced_density(state, [0])
    pb = qcore.reduced_density(state, [1])
    return float(np.trace(pa @ pa).real), float(np.trace(pb @ pb).real)


def is_maximally_entangled_by_purity(state: StateVector, tol: float = 1e-10) -> tuple[bool, float]:
    """Same test via reduced purities (both 1/2 for maximal entanglement)."""
    residual = max(abs(p - 0.5) for p in reduced_purities(state))
    return residual < tol, residual


def maximally_entangled_state(u) -> StateVector:
    """``(I x U)|phi+>``; every maximally entangled two-qubit state has this form."""
    return qcore.apply(u, qcore.bell_state("phi+"), [1])


# (I x U)|phi+> = |psi->
SINGLET_UNITARY = np.array([[0, -1], [1, 0]], dtype=complex)


def worst_violation(state: StateVector, samples: SampleSet) -> ViolationReport:
    values = condition_values(state, samples)
    k = int(np.argmax(np.abs(values)))
    return ViolationReport(
        qcore.bell_coefficients(state),
        float(abs(values[k])),
        samples.sample(k).with_value(values[k]),
        len(samples),
    )


def uniqueness_scan(num_states: int, num_samples: int, rng,
                    unitaries: Sequence[np.ndarray] | None = None) -> list[ViolationReport]:
    """Worst-case uniqueness violation over maximally entangled states.

    States are ``(I x U)|phi+>``: the singlet itself plus ``num_states - 1``
    Haar-random ``U`` (or the given ``unitaries``). Directions combine the
    stratified grid with ``num_samples`` uniform random triples. Reports are
    sorted by ascending worst violation.
    """
    samples = SampleSet.grid()
    if num_samples:
        samples = SampleSet.concat(samples, SampleSet.random(num_samples, rng))
    if unitaries is None:
        unitaries = [SINGLET_UNITARY] + [qcore.random_unitary(rng) for _ in range(num_states - 1)]
    reports = [worst_violation(maximally_entangled_state(u), samples) for u in unitaries]
    return sorted(reports, key=lambda r: r.worst_violation)


def disentangled_overlap(bob_state: StateVector, n, phi: float) -> complex:
    """``<psi|(s.n)(s.m)|psi>`` with m the orthogonal direction selected by ``phi``.

    Equals ``i b.(n x m)`` for Bloch vector b; its modulus is the overlap of
    Bob's two possible post-field states.
    """
    if bob_state.num_qubits != 1:
        raise qcore.DimensionError("Bob's probe is a single qubit")
    m = qcore.orthogonal_direction(n, phi)
    return qcore.expectation(qcore.pauli_dot(n) @ qcore.pauli_dot(m), bob_state)


def helstrom_error_from_overlap(overlap: float) -> float:
    return 0.5 * (1.0 - np.sqrt(max(0.0, 1.0 - overlap**2)))


def helstrom_error(s1: StateVector, s2: StateVector) -> float:
    """Minimum error for telling apart two equiprobable pure states."""
    return helstrom_error_from_overlap(min(1.0, abs(qcore.inner(s1, s2))))


def direction_grid() -> tuple[np.ndarray, np.ndarray]:
    """Axes and icosahedral vertices for n, 8 phases for the orthogonal partner."""
    axes = np.vstack([np.eye(3), -np.eye(3)])
    ns = np.vstack([axes, icosahedron_vertices()])
    n_idx, p_idx = np.meshgrid(range(len(ns)), range(len(PHASES)), indexing="ij")
    return ns[n_idx.ravel()], PHASES[p_idx.ravel()]


def finite_strategy_worst_error(bob_states: Sequence[StateVector], num_direction_samples: int,
                                rng, include_grid: bool = True) -> float:
    """Worst case over field directions of the best Helstrom error a finite
    ensemble of unentangled probes can reach.

    For each direction pair Bob uses whichever probe separates ``s.n|psi>``
    from ``s.m|psi>`` best; the returned value is the max over directions.
    """
    if not bob_states:
        raise ValueError("need at least one probe state")
    blochs = np.array([qcore.bloch_vector(s) for s in bob_states])
    ns, phis = direction_grid() if include_grid else (np.empty((0, 3)), np.empty(0))
    rand_n = np.array([qcore.random_direction(rng).vec for _ in range(num_direction_samples)])
    rand_phi = rng.uniform(0.0, 2 * np.pi, num_direction_samples)
    ns = np.vstack([ns, rand_n.reshape(-1, 3)])
    phis = np.concatenate([phis, rand_phi])
    worst = 0.0
    for n, phi in zip(ns, phis):
        m = qcore.orthogonal_direction(n, phi).vec
        # |<psi|(s.n)(s.m)|psi>| = |b.(n x m)|, largest overlap -> worst probe
        best_overlap = np.min(np.abs(blochs @ np.cross(n, m)))
        worst = max(worst, helstrom_error_from_overlap(min(1.0, best_overlap)))
    return worst


def pauli_eigenstates() -> list[StateVector]:
    s = 1 / np.sqrt(2)
    return [
        StateVector([1, 0]), StateVector([0, 1]),
        StateVector([s, s]), StateVector([s, -s]),
        StateVector([s, 1j * s]), StateVector([s, -1j * s]),
    ]


def nested_ensembles(sizes: Sequence[int], rng) -> list[list[StateVector]]:
    """Growing probe ensembles, each a prefix of the next: |0>, then the six
    Pauli eigenstates, then Haar-random pure states."""
    pool = pauli_eigenstates()
    while len(pool) < max(sizes):
        pool.append(qcore.random_state(1, rng))
    return [pool[:k] for k in sizes]


@dataclass(frozen=True)
class AngleSweepRow:
    alpha: float
    mean_survival: float
    max_dev: float


def singlet_survival(scenario: FieldScenario) -> float:
    return qcore.fidelity(qcore.singlet(), apply_fields_instantaneous(scenario, qcore.singlet()))


def angle_sweep(alphas: Sequence[float], trials_per_alpha: int, rng) -> list[AngleSweepRow]:
    """Singlet survival probability for fields at angle alpha, over random frames.

    ``max_dev`` is the largest departure of any single frame from the mean.
    """
    rows = []
    for alpha in alphas:
        probs = np.array([singlet_survival(eve_choose(Promise.angle(alpha), rng))
                          for _ in range(trials_per_alpha)])
        mean = float(probs.mean())
        rows.append(AngleSweepRow(float(alpha), mean, float(np.max(np.abs(probs - mean)))))
    return rows


@dataclass(frozen=True)
class AntiParallelRow:
    theta: float
    singlet_fidelity: float
    triplet_fidelity: float
    parallel_singlet_fidelity: float


def n_basis_triplet(n) -> StateVector:
    """``(|up,down> + |down,up>)/sqrt2`` in the eigenbasis of ``s.n``."""
    _, vecs = np.linalg.eigh(qcore.pauli_dot(n))
    down, up = vecs[:, 0], vecs[:, 1]
    return StateVector((np.kron(up, down) + np.kron(down, up)) / np.sqrt(2), normalize=True)


def antiparallel_check(theta_grid: Sequence[float], rng) -> list[AntiParallelRow]:
    """Evolve the singlet under anti-parallel and parallel fields along a random n."""
    anti = eve_choose(ANTIPARALLEL, rng)
    par = FieldScenario(PARALLEL, anti.n, anti.n)
    psi = qcore.singlet()
    triplet = n_basis_triplet(anti.n)
    rows = []
    for theta in theta_grid:
        out = apply_fields_evolution(anti, theta, psi)
        rows.append(AntiParallelRow(
            float(theta),
            qcore.fidelity(psi, out),
            qcore.fidelity(triplet, out),
            qcore.fidelity(psi, apply_fields_evolution(par, theta, psi)),
        ))
    return rows
