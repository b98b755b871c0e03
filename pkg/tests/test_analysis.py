import numpy as np
import pytest
from hypothesis import given, settings
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from singletfields import analysis as an
from singletfields import qcore
from singletfields.qcore import StateVector, UnitDirection

from conftest import angles, directions, states

S = 1 / np.sqrt(2)
Z_AXIS = UnitDirection(0, 0, 1)

# regression values, fixed by the brute-force grid pass in test_pauli_ensemble_grid_oracle
PAULI6_WORST_ERROR_SEED2024 = 0.0903433060544101
PAULI6_GRID_ORACLE = 0.09053099228749062
PAULI6_SUPREMUM = (1 - np.sqrt(2 / 3)) / 2


def sample_with_perp(n, nprime, nprime_perp) -> an.ConditionSample:
    """Build a ConditionSample whose orthogonal direction equals ``nprime_perp``."""
    e1, e2 = qcore.orthonormal_frame(nprime)
    v = np.asarray(nprime_perp, dtype=float)
    phi = float(np.arctan2(v @ e2, v @ e1))
    sample = an.ConditionSample(UnitDirection.from_vector(n, normalize=True),
                                UnitDirection.from_vector(nprime, normalize=True), phi)
    assert np.allclose(sample.nprime_perp.vec, v, atol=1e-14)
    return sample


def explicit_condition(psi: StateVector, n, np_, npp) -> complex:
    """4x4 oracle written out from raw direction vectors."""
    sig = lambda v: v[0] * qcore.X + v[1] * qcore.Y + v[2] * qcore.Z  # noqa: E731
    op = np.kron(sig(n), sig(n)) @ np.kron(sig(np_), sig(npp))
    return complex(np.vdot(psi.amplitudes, op @ psi.amplitudes))


PSI_PLUS_SAMPLE = ((0, 0, 1), np.array([1, 0, 1]) * S, np.array([1, 0, -1]) * S)


class TestConditionEq10:
    def test_singlet_vanishes(self, rng):
        ss = an.SampleSet.random(2000, rng)
        assert np.max(np.abs(an.condition_values(qcore.singlet(), ss))) < 1e-12
        for i in range(50):
            assert abs(an.condition_eq10(qcore.singlet(), ss.sample(i))) < 1e-12

    def test_psi_plus_example(self):
        sample = sample_with_perp(*PSI_PLUS_SAMPLE)
        psi = qcore.bell_state("psi+")
        assert abs(explicit_condition(psi, *PSI_PLUS_SAMPLE) - (-1)) < 1e-12
        assert abs(an.condition_eq10(psi, sample) - (-1)) < 1e-12

    def test_same_directions_reduce_to_local_expectation(self, rng):
        for _ in range(200):
            psi = qcore.random_state(2, rng)
            n = qcore.random_direction(rng)
            sample = an.ConditionSample(n, n, rng.uniform(0, 2 * np.pi))
            cross = np.cross(n.vec, sample.nprime_perp.vec)
            local = qcore.expectation(an._sigma(cross), psi, [1])
            assert abs(an.condition_eq10(psi, sample) - 1j * local) < 1e-12

    def test_batched_matches_explicit(self, rng):
        ss = an.SampleSet.random(300, rng)
        psi = qcore.random_state(2, rng)
        batched = an.condition_values(psi, ss)
        for i in range(len(ss)):
            oracle = explicit_condition(psi, ss.n[i], ss.nprime[i], ss.nprime_perp[i])
            assert abs(batched[i] - oracle) < 1e-12

    def test_grid_geometry(self):
        grid = an.SampleSet.grid()
        assert len(grid) == 12 * 12 * 8
        assert np.max(np.abs(np.einsum("ij,ij->i", grid.nprime, grid.nprime_perp))) < 1e-12

    def test_dimension(self):
        with pytest.raises(qcore.DimensionError):
            an.condition_eq10(StateVector.basis("0"), sample_with_perp(*PSI_PLUS_SAMPLE))


class TestConditionEq12:
    def test_singlet_and_psi_plus(self):
        sample = sample_with_perp(*PSI_PLUS_SAMPLE)
        assert abs(an.condition_eq12(qcore.singlet(), sample)) < 1e-12
        assert abs(an.condition_eq12(qcore.bell_state("psi+"), sample) - (-1)) < 1e-12

    def test_correlation_matrices(self):
        assert np.allclose(an.correlation_matrix(qcore.singlet()), -np.eye(3), atol=1e-15)
        assert np.allclose(an.correlation_matrix(qcore.bell_state("psi+")), np.diag([1, 1, -1]), atol=1e-15)

    def test_agrees_with_direct_evaluation(self, rng):
        for _ in range(2000):
            psi = an.maximally_entangled_state(qcore.random_unitary(rng))
            ss = an.SampleSet.random(1, rng)
            s = ss.sample(0)
            assert abs(an.condition_eq12(psi, s) - an.condition_eq10(psi, s)) < 1e-12

    def test_refuses_non_maximal(self):
        with pytest.raises(an.PreconditionError):
            an.condition_eq12(StateVector.basis("00"), sample_with_perp(*PSI_PLUS_SAMPLE))


class TestMaximalEntanglement:
    @pytest.mark.parametrize("kind", qcore.BELL_KINDS)
    def test_bell_states(self, kind):
        ok, witness = an.is_maximally_entangled(qcore.bell_state(kind))
        assert ok and witness < 1e-15

    def test_product_state(self):
        ok, witness = an.is_maximally_entangled(StateVector.basis("00"))
        assert not ok and witness == 1

    def test_psi_plus_phi_plus_mix_is_product(self):
        state = StateVector(qcore.bell_state("psi+").amplitudes + qcore.bell_state("phi+").amplitudes,
                            normalize=True)
        ok, witness = an.is_maximally_entangled(state)
        # (|00> + |01> + |10> + |11>)/2 = |+>|+>, so <I x X> = 1
        assert not ok and abs(witness - 1) < 1e-12

    def test_formulations_agree(self, rng):
        for i in range(2000):
            psi = an.maximally_entangled_state(qcore.random_unitary(rng)) if i % 2 else qcore.random_state(2, rng)
            b = np.array([qcore.expectation(p, psi, [1]).real for p in qcore.PAULIS])
            _, pb = an.reduced_purities(psi)
            assert abs(b @ b - (2 * pb - 1)) < 1e-10
            assert an.is_maximally_entangled(psi)[0] == an.is_maximally_entangled_by_purity(psi)[0]


class TestUniquenessScan:
    def test_singlet_passes_and_order(self, rng):
        reports = an.uniqueness_scan(40, 200, rng)
        assert len(reports) == 40
        assert reports[0].worst_violation < 1e-12
        assert abs(reports[0].c2sq - 1) < 1e-12
        values = [r.worst_violation for r in reports]
        assert values == sorted(values)
        assert reports[0].samples_used == 1152 + 200

    def test_singlet_unitary(self):
        assert qcore.fidelity(an.maximally_entangled_state(an.SINGLET_UNITARY), qcore.singlet()) > 1 - 1e-15

    def test_far_states_violate(self, rng):
        for r in an.uniqueness_scan(100, 200, rng)[1:]:
            if r.c2sq < 0.99:
                assert r.worst_violation > 0.01

    def test_argmax_sample_reproduces_value(self, rng):
        r = an.uniqueness_scan(5, 50, rng)[-1]
        psi = r.state_descriptor.reconstruct()
        assert abs(abs(an.condition_eq10(psi, r.argmax_sample)) - r.worst_violation) < 1e-12
        assert abs(r.argmax_sample.value - an.condition_eq10(psi, r.argmax_sample)) < 1e-12

    def test_violation_shrinks_toward_singlet(self, rng):
        grid = an.SampleSet.grid()
        for _ in range(5):
            k = qcore.random_direction(rng)
            floors = []
            for t in np.linspace(1.0, 0.0, 11):
                u = an.SINGLET_UNITARY @ expm(-0.5j * t * qcore.pauli_dot(k))
                floors.append(an.worst_violation(an.maximally_entangled_state(u), grid).worst_violation)
            assert all(b <= a + 1e-12 for a, b in zip(floors, floors[1:]))
            assert floors[-1] < 1e-12

    def test_non_singlet_never_below_floor(self, rng):
        for r in an.uniqueness_scan(200, 500, rng)[1:]:
            f = qcore.fidelity(qcore.singlet(), r.state_descriptor.reconstruct())
            if f < an.UNIQUENESS_FIDELITY_CUTOFF:
                assert r.worst_violation >= an.UNIQUENESS_VIOLATION_FLOOR


class TestDisentangled:
    def test_eigenstate_is_blind(self):
        for phi in np.linspace(0, 2 * np.pi, 9):
            assert abs(an.disentangled_overlap(StateVector([1, 0]), Z_AXIS, phi)) < 1e-15

    def test_worst_case_x_then_y(self):
        n = UnitDirection(1, 0, 0)
        e1, e2 = qcore.orthonormal_frame(n)
        phi = float(np.arctan2(e2[1], e1[1]))  # selects m = +y
        assert np.allclose(qcore.orthogonal_direction(n, phi).vec, [0, 1, 0], atol=1e-15)
        assert abs(an.disentangled_overlap(StateVector([1, 0]), n, phi) - 1j) < 1e-15

    @given(states(1), directions, angles)
    def test_bloch_identity(self, psi, n, phi):
        m = qcore.orthogonal_direction(n, phi).vec
        b = qcore.bloch_vector(psi)
        direct = np.vdot(psi.amplitudes, qcore.pauli_dot(n) @ qcore.pauli_dot(m) @ psi.amplitudes)
        got = an.disentangled_overlap(psi, n, phi)
        assert abs(got - direct) < 1e-12
        assert abs(got - 1j * b @ np.cross(n.vec, m)) < 1e-12


def helstrom_by_search(s1: StateVector, s2: StateVector) -> float:
    """Oracle: minimize the error of projective measurements in the span of s1, s2."""
    # rephasing s2 and the second basis vector puts both states in a real plane
    c = abs(np.vdot(s1.amplitudes, s2.amplitudes))
    v1 = np.array([1.0, 0.0])
    v2 = np.array([c, np.sqrt(max(0.0, 1 - c**2))])

    def err(t):
        p1 = np.array([np.cos(t), np.sin(t)])
        p2 = np.array([-np.sin(t), np.cos(t)])
        return 0.5 * ((p2 @ v1) ** 2 + (p1 @ v2) ** 2)

    return minimize_scalar(err, bounds=(-np.pi, np.pi), method="bounded",
                           options={"xatol": 1e-12}).fun


class TestHelstrom:
    def test_limits(self, rng):
        assert an.helstrom_error(StateVector([1, 0]), StateVector([0, 1])) == 0
        psi = qcore.random_state(2, rng)
        assert abs(an.helstrom_error(psi, psi) - 0.5) < 1e-12

    def test_overlap_one_over_root_two(self):
        s1, s2 = StateVector([1, 0]), StateVector([S, S])
        expected = (1 - S) / 2
        assert abs(an.helstrom_error(s1, s2) - expected) < 1e-12
        assert abs(helstrom_by_search(s1, s2) - expected) < 1e-9
        assert abs(expected - 0.14645) < 1e-5

    @settings(max_examples=50)
    @given(states(1), states(1))
    def test_matches_search_and_symmetric(self, s1, s2):
        e = an.helstrom_error(s1, s2)
        assert abs(e - an.helstrom_error(s2, s1)) < 1e-15
        assert 0 <= e <= 0.5
        assert abs(e - helstrom_by_search(s1, s2)) < 1e-7

    def test_monotone_in_overlap(self):
        overlaps = np.linspace(0, 1, 101)
        errs = [an.helstrom_error_from_overlap(o) for o in overlaps]
        assert all(b >= a for a, b in zip(errs, errs[1:]))


class TestFiniteStrategy:
    def test_single_ground_state_fails_completely(self, rng):
        assert an.finite_strategy_worst_error([StateVector([1, 0])], 200, rng) == 0.5

    def test_pauli_ensemble_regression(self):
        e = an.finite_strategy_worst_error(an.pauli_eigenstates(), 20000, np.random.default_rng(2024))
        assert abs(e - PAULI6_WORST_ERROR_SEED2024) < 1e-12
        assert 0 < e <= PAULI6_SUPREMUM
        assert abs(e - PAULI6_GRID_ORACLE) < 3e-3

    def test_pauli_ensemble_grid_oracle(self):
        th = np.linspace(0, np.pi, 61)
        ph = np.linspace(0, 2 * np.pi, 120, endpoint=False)
        t, p = np.meshgrid(th, ph, indexing="ij")
        ns = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], -1).reshape(-1, 3)
        probes = np.array([s.amplitudes for s in an.pauli_eigenstates()])
        paulis = np.array(qcore.PAULIS)
        worst = 0.0
        for n in ns:
            a = np.cross(n, [1, 0, 0]) if abs(n[0]) < 0.9 else np.cross(n, [0, 1, 0])
            a /= np.linalg.norm(a)
            b = np.cross(n, a)
            sn = np.einsum("k,kij->ij", n, paulis)
            for psi in np.linspace(0, 2 * np.pi, 60, endpoint=False):
                sm = np.einsum("k,kij->ij", np.cos(psi) * a + np.sin(psi) * b, paulis)
                ov = np.abs(np.sum((probes @ sn.T).conj() * (probes @ sm.T), axis=1))
                worst = max(worst, (0.5 * (1 - np.sqrt(np.clip(1 - ov**2, 0, None)))).min())
        assert abs(worst - PAULI6_GRID_ORACLE) < 1e-12
        assert worst <= PAULI6_SUPREMUM

    def test_nested_ensembles_improve_but_stay_positive(self, rng):
        sizes = [1, 6, 24, 96]
        ensembles = an.nested_ensembles(sizes, rng)
        for small, big in zip(ensembles, ensembles[1:]):
            assert all(a is b for a, b in zip(small, big))
        errors = [an.finite_strategy_worst_error(e, 3000, np.random.default_rng(8)) for e in ensembles]
        assert errors[0] == 0.5
        assert all(e > 0 for e in errors)
        assert all(b <= a for a, b in zip(errors, errors[1:]))

    def test_empty(self, rng):
        with pytest.raises(ValueError):
            an.finite_strategy_worst_error([], 10, rng)


class TestAngleSweep:
    def test_landmarks(self, rng):
        rows = an.angle_sweep([0, np.pi / 4, np.pi / 2], 50, rng)
        for row, expected in zip(rows, [1, 0.5, 0]):
            assert abs(row.mean_survival - expected) < 1e-12
            assert row.max_dev < 1e-9

    def test_cos_squared_law(self, rng):
        alphas = np.arange(13) * np.pi / 12
        for row in an.angle_sweep(alphas, 100, rng):
            assert abs(row.mean_survival - np.cos(row.alpha) ** 2) < 1e-9
            assert row.max_dev < 1e-9


class TestAntiParallel:
    def test_rows(self, rng):
        grid = np.linspace(0, np.pi, 17)
        rows = an.antiparallel_check(grid, rng)
        assert abs(rows[0].singlet_fidelity - 1) < 1e-12
        for r in rows:
            assert abs(r.singlet_fidelity - np.cos(r.theta) ** 2) < 1e-12
            assert abs(r.parallel_singlet_fidelity - 1) < 1e-12
        quarter = an.antiparallel_check([np.pi / 2], rng)[0]
        assert quarter.singlet_fidelity < 1e-12
        assert quarter.triplet_fidelity > 1 - 1e-12

    def test_triplet_basis_for_z_is_psi_plus(self):
        assert qcore.fidelity(an.n_basis_triplet(Z_AXIS), qcore.bell_state("psi+")) > 1 - 1e-15
