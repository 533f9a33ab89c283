"""
Tests for the eigendecomposition, eigenvalue classes, the quantum walk
snapshots and the quantum mixing times.
"""

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from conftest import make, spectral
from src.graphs.graph_models import lazy
from src.markov.distances import matrix_tv_distance, max_pairwise_column_distance
from src.models.spectrum import EigenvalueClasses
from src.spectral.eigen import eigendecompose, group_eigenvalues
from src.spectral.orbits import enumerate_orbits, orbit_key, torus_orbit_classes
from src.spectral.quantum_mixing import (
    CesaroDistance,
    alpha_and_threshold,
    amplification_rounds,
    cesaro_distance,
    pair_envelope_constant,
    quantum_mixing_time,
)
from src.spectral.walk import cesaro_finite, cesaro_infinite, measurement_matrix, propagator
from src.utils.errors import InseparableEigenvalues, InvariantViolation, PostconditionFailed

PI_FLOOR_GRAPHS = [
    ("cycle", {"n": 9}),
    ("torus", {"p": 5, "d": 2}),
    ("hypercube", {"n": 4}),
    ("complete", {"size": 8, "with_self_loops": True}),
]


def brute_force_cesaro(spectrum, T, nodes=10001):
    """Simpson quadrature of P_t over [0, T] straight from the eigenpairs."""
    phi = spectrum.eigenvectors
    times = np.linspace(0.0, T, nodes)
    phases = np.exp(-1j * np.outer(times, spectrum.eigenvalues))
    unitaries = np.einsum('yk,tk,xk->tyx', phi, phases, phi)
    return simpson(np.abs(unitaries) ** 2, x=times, axis=0) / T


class TestEigendecomposition:
    def test_complete_graph(self, complete8):
        spectrum = eigendecompose(complete8)
        np.testing.assert_allclose(spectrum.eigenvalues, [1] + [0] * 7, atol=1e-12)

    def test_hypercube(self):
        spectrum = eigendecompose(make("hypercube", n=3))
        expected = [1, 1 / 3, 1 / 3, 1 / 3, -1 / 3, -1 / 3, -1 / 3, -1]
        np.testing.assert_allclose(spectrum.eigenvalues, expected, atol=1e-12)

    def test_cycle_eigenvalues_are_cosines(self):
        spectrum = eigendecompose(make("torus", p=7, d=1))
        expected = np.sort(np.cos(2 * np.pi * np.arange(7) / 7))[::-1]
        np.testing.assert_allclose(spectrum.eigenvalues, expected, atol=1e-12)

    @pytest.mark.parametrize("family,params", PI_FLOOR_GRAPHS)
    def test_residuals(self, family, params):
        spectrum = eigendecompose(make(family, **params))
        phi = spectrum.eigenvectors
        assert np.abs(phi.T @ phi - np.eye(spectrum.n_states)).max() <= 1e-10
        assert spectrum.orthonormality_residual <= 1e-10
        assert spectrum.reconstruction_residual <= 1e-9

    def test_output_is_deterministic(self, torus52):
        first = eigendecompose(torus52)
        second = eigendecompose(torus52)
        assert np.array_equal(first.eigenvalues, second.eigenvalues)
        assert np.array_equal(first.eigenvectors, second.eigenvectors)


class TestEigenvalueClasses:
    def test_hypercube_class_sizes(self):
        _, classes = spectral(make("hypercube", n=4))
        assert classes.sizes == [1, 4, 6, 4, 1]
        np.testing.assert_allclose(classes.class_values, [1, .5, 0, -.5, -1], atol=1e-12)

    def test_complete_graph_has_two_classes(self, complete8):
        _, classes = spectral(complete8)
        assert classes.sizes == [1, 7]

    def test_ambiguous_gap_is_rejected(self):
        spectrum = eigendecompose(make("hypercube", n=3))
        with pytest.raises(InseparableEigenvalues):
            group_eigenvalues(spectrum, tol=0.3)

    def test_chained_class_wider_than_tolerance_is_rejected(self):
        spectrum = eigendecompose(make("hypercube", n=3))
        with pytest.raises(InvariantViolation, match="class-span"):
            group_eigenvalues(spectrum, tol=0.7)

    def test_nonpositive_tolerance(self, cycle4):
        with pytest.raises(InvariantViolation, match="class-tolerance"):
            group_eigenvalues(eigendecompose(cycle4), tol=0.0)


class TestWalkSnapshots:
    def test_propagator_at_zero_is_identity(self, torus52):
        spectrum = eigendecompose(torus52)
        np.testing.assert_allclose(propagator(spectrum, 0.0), np.eye(25), atol=1e-12)

    @pytest.mark.parametrize("t", [0.3, 3.7, 41.0])
    def test_propagator_is_unitary(self, torus52, t):
        unitary = propagator(eigendecompose(torus52), t)
        np.testing.assert_allclose(unitary.conj().T @ unitary, np.eye(25), atol=1e-10)

    def test_propagator_rejects_infinite_time(self, cycle4):
        with pytest.raises(InvariantViolation, match="finite-time"):
            propagator(eigendecompose(cycle4), math.inf)

    def test_measurement_matrix_is_doubly_stochastic(self, torus52):
        snapshot = measurement_matrix(eigendecompose(torus52), 2.5)
        np.testing.assert_allclose(snapshot.entries.sum(axis=0), 1.0, atol=1e-10)
        np.testing.assert_allclose(snapshot.entries, snapshot.entries.T, atol=1e-10)
        assert snapshot.parameter == 2.5

    @pytest.mark.parametrize("T", [1.0, 10.0, 50.0])
    def test_cesaro_matches_quadrature(self, T):
        spectrum, classes = spectral(make("torus", p=5, d=1))
        closed_form = cesaro_finite(spectrum, classes, T).entries
        assert np.abs(closed_form - brute_force_cesaro(spectrum, T)).max() <= 1e-6

    def test_cesaro_rejects_nonpositive_horizon(self, cycle4):
        spectrum, classes = spectral(cycle4)
        with pytest.raises(InvariantViolation, match="positive-horizon"):
            cesaro_finite(spectrum, classes, 0.0)

    def test_limit_of_complete_graph(self, complete8):
        limit = cesaro_infinite(*spectral(complete8)).entries
        diagonal = 1 / 64 + (7 / 8) ** 2
        expected = np.full((8, 8), 2 / 64)
        np.fill_diagonal(expected, diagonal)
        np.testing.assert_allclose(limit, expected, atol=1e-12)

    @pytest.mark.parametrize("family,params", PI_FLOOR_GRAPHS)
    def test_limit_entry_floor(self, family, params):
        matrix = make(family, **params)
        limit = cesaro_infinite(*spectral(matrix)).entries
        assert limit.min() >= 1 / matrix.n_states ** 2 - 1e-12

    @pytest.mark.parametrize("family,params", PI_FLOOR_GRAPHS)
    def test_limit_is_positive_semidefinite(self, family, params):
        limit = cesaro_infinite(*spectral(make(family, **params))).entries
        assert np.linalg.eigvalsh(limit).min() >= -1e-9

    def test_uniform_is_fixed_by_every_snapshot(self, torus52):
        spectrum, classes = spectral(torus52)
        uniform = np.full(25, 1 / 25)
        for snapshot in (
            measurement_matrix(spectrum, 1.7),
            cesaro_finite(spectrum, classes, 6.0),
            cesaro_infinite(spectrum, classes),
        ):
            np.testing.assert_allclose(snapshot.entries @ uniform, uniform, atol=1e-12)

    def test_limit_below_entry_floor_is_rejected(self):
        spectrum = eigendecompose(make("hypercube", n=3))
        merged = EigenvalueClasses(classes=[tuple(range(8))], class_values=[0.0], tolerance=1.0)
        with pytest.raises(PostconditionFailed, match="pi-entry-floor"):
            cesaro_infinite(spectrum, merged)
        unchecked = cesaro_infinite(spectrum, merged, enforce_floor=False)
        np.testing.assert_allclose(unchecked.entries, np.eye(8), atol=1e-12)

    def test_long_horizon_approaches_limit(self, torus52):
        spectrum, classes = spectral(torus52)
        limit = cesaro_infinite(spectrum, classes)
        far = cesaro_finite(spectrum, classes, 1e6)
        assert matrix_tv_distance(far, limit) <= 1e-4


class TestQuantumMixing:
    @pytest.mark.parametrize("family,params", [("torus", {"p": 5, "d": 1}), ("hypercube", {"n": 3})])
    def test_distance_is_below_envelope(self, family, params):
        spectrum, classes = spectral(make(family, **params))
        distance = CesaroDistance(spectrum, classes)
        envelope = pair_envelope_constant(spectrum, classes)
        assert envelope == pytest.approx(distance.envelope_constant)
        assert envelope > 0
        for T in np.geomspace(0.5, 500.0, 40):
            assert distance(T) <= envelope / T + 1e-12

    def test_closed_form_distance_matches_matrices(self, torus52):
        spectrum, classes = spectral(torus52)
        limit = cesaro_infinite(spectrum, classes)
        for T in (0.7, 4.0, 33.0):
            expected = matrix_tv_distance(cesaro_finite(spectrum, classes, T), limit)
            assert cesaro_distance(spectrum, classes, T) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("eps", [0.1, 0.05])
    def test_mixing_time_holds_above_it(self, eps):
        spectrum, classes = spectral(make("torus", p=5, d=1))
        distance = CesaroDistance(spectrum, classes)
        tau = quantum_mixing_time(spectrum, classes, eps, distance=distance)

        assert 0 < tau <= distance.envelope_constant / eps
        for T in np.linspace(tau, 4 * tau, 400):
            assert distance(T) <= eps + 1e-3

    def test_mixing_time_is_monotone_in_eps(self, torus52):
        spectrum, classes = spectral(torus52)
        assert quantum_mixing_time(spectrum, classes, 0.05) >= quantum_mixing_time(spectrum, classes, 0.2)

    def test_mixing_time_rejects_eps_below_floor(self, torus52):
        with pytest.raises(InvariantViolation, match="epsilon-floor"):
            quantum_mixing_time(*spectral(torus52), 1e-12)

    def test_hypercube_threshold(self):
        threshold = alpha_and_threshold(*spectral(make("hypercube", n=3)))
        assert threshold.alpha == pytest.approx(0.5, abs=1e-12)
        assert threshold.eps0 == pytest.approx((1 - threshold.alpha) / 4)
        assert threshold.amplification_available
        assert threshold.tau_prime_mix <= 2 * math.pi * 3

    def test_alpha_matches_limit_columns(self, torus52):
        spectrum, classes = spectral(torus52)
        threshold = alpha_and_threshold(spectrum, classes)
        assert threshold.alpha == pytest.approx(max_pairwise_column_distance(cesaro_infinite(spectrum, classes)))

    def test_amplification_rounds(self):
        assert amplification_rounds(0.5, 0.01) == 17
        assert amplification_rounds(0.0, 0.5) == 1

    def test_amplification_rounds_rejects_alpha_one(self):
        with pytest.raises(ValueError):
            amplification_rounds(1.0, 0.1)

    def test_lazy_chain_is_supported(self):
        threshold = alpha_and_threshold(*spectral(lazy(make("cycle", n=5))))
        assert 0 <= threshold.alpha < 1


class TestTorusOrbits:
    def test_orbit_key_folds_and_sorts(self):
        assert orbit_key((4, 1), 5) == (1, 1)
        assert orbit_key((0, 3), 7) == (0, 3)
        assert orbit_key((5, 0), 7) == (0, 2)

    def test_cycle_orbits(self):
        orbits = enumerate_orbits(7, 1)
        assert [orbit.size for orbit in orbits] == [1, 2, 2, 2]
        eigenvalues = [orbit.eigenvalue for orbit in orbits]
        assert eigenvalues == sorted(eigenvalues, reverse=True)

    def test_two_dimensional_orbit_sizes(self):
        orbits = enumerate_orbits(7, 2)
        assert {orbit.size for orbit in orbits} == {1, 4, 8}
        assert sum(orbit.size for orbit in orbits) == 49

    def test_orbit_classes_match_numerical_partition(self, torus52):
        spectrum, numerical = spectral(torus52)
        symbolic = torus_orbit_classes(spectrum, 5, 2)
        assert symbolic.symbolic
        assert symbolic.classes == numerical.classes
        np.testing.assert_allclose(symbolic.class_values, numerical.class_values, atol=1e-12)

    def test_non_prime_side_is_rejected(self):
        spectrum = eigendecompose(make("torus", p=4, d=2))
        with pytest.raises(InvariantViolation, match="prime-modulus"):
            torus_orbit_classes(spectrum, 4, 2)

    def test_dimension_mismatch(self, torus52):
        with pytest.raises(InvariantViolation, match="orbit-dimension"):
            torus_orbit_classes(eigendecompose(torus52), 5, 3)
