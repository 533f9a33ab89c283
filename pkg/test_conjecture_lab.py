"""
Tests for the conjecture lab checks and suites.
"""

import math

import numpy as np
import pytest

from conftest import make
from src.lab.checks import (
    cancellation_count,
    centered_residue,
    complete_graph_negative_result,
    diameter_bound_report,
    analytic_floor,
    multiplicity_class_check,
    periodicity_check,
    pi_floor_report,
    torus_amplification_report,
)
from src.lab.golden import GoldenTables
from src.lab.suite import ConjectureLab, run_suite
from src.spectral.eigen import eigendecompose
from src.utils.errors import InvariantViolation


class TestPiFloor:
    @pytest.mark.parametrize("family,params", [
        ("cycle", {"n": 9}),
        ("torus", {"p": 5, "d": 2}),
        ("hypercube", {"n": 4}),
    ])
    def test_floor_holds(self, family, params, settings):
        matrix = make(family, **params)
        result = pi_floor_report(matrix, settings)
        assert result.passes
        assert result.scaled_min_entry == pytest.approx(matrix.n_states * result.min_entry)

    def test_complete_graph_closed_form(self, complete8, settings):
        result = pi_floor_report(complete8, settings)
        assert result.min_entry == pytest.approx(2 / 64, abs=1e-12)


class TestTorusAmplification:
    def test_cycle_rows_match_closed_form(self, settings):
        floor = GoldenTables(settings.storage.golden_dir).torus_floor(1)
        rows = torus_amplification_report([5, 7, 11, 13], 1, floor, settings)
        for row in rows:
            assert row['n_min_entry'] == pytest.approx((row['p'] - 1) / row['p'], abs=1e-10)
            assert row['max_class_size'] <= row['class_size_bound'] == 2
            assert row['alpha'] <= row['entry_floor_alpha_bound'] + 1e-10
            assert row['passes']

    def test_two_dimensional_rows_reach_golden_floor(self, settings):
        floor = GoldenTables(settings.storage.golden_dir).torus_floor(2)
        rows = torus_amplification_report([5, 7, 11, 13], 2, floor, settings)
        assert [row['N'] for row in rows] == [25, 49, 121, 169]
        for row in rows:
            assert row['n_min_entry'] >= floor
            assert row['max_class_size'] <= row['class_size_bound'] == 8
            assert row['alpha'] < 1
            assert row['passes']

    def test_composite_side_is_rejected(self, settings):
        with pytest.raises(InvariantViolation, match="prime-modulus"):
            torus_amplification_report([9], 1, 0.5, settings)

    def test_analytic_floor(self):
        assert analytic_floor(5, 1) == pytest.approx(0.0625)
        assert analytic_floor(13, 2) < 1e-3


class TestMultiplicity:
    @pytest.mark.parametrize("p,d", [(5, 1), (13, 1), (7, 2), (11, 2), (13, 2)])
    def test_classes_are_orbits(self, p, d, settings):
        result = multiplicity_class_check(p, d, settings)
        assert result.matches
        assert result.mismatch is None
        assert sum(result.orbit_sizes) == p ** d

    def test_composite_side_is_rejected(self, settings):
        with pytest.raises(InvariantViolation):
            multiplicity_class_check(6, 1, settings)


class TestCancellations:
    def test_centered_residue(self):
        assert centered_residue(np.array([0, 3, 4, 7, -1]), 7).tolist() == [0, 3, -3, 0, -1]

    def test_zero_vector_keeps_every_x(self):
        assert cancellation_count(10007, 2, [0, 0]) == 10007

    def test_unit_vector(self):
        assert cancellation_count(10007, 2, [1, 0]) == 1251

    def test_random_vectors_exceed_floor(self):
        rng = np.random.default_rng(7)
        floor = 10007 / 16 ** 2
        for y in rng.integers(0, 10007, size=(100, 2)):
            assert cancellation_count(10007, 2, y) >= floor

    def test_invalid_arguments(self):
        with pytest.raises(InvariantViolation, match="cancellation-modulus"):
            cancellation_count(1, 1, [0])
        with pytest.raises(InvariantViolation, match="cancellation-dimension"):
            cancellation_count(11, 2, [1, 2, 3])


class TestPeriodicity:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_hypercube_returns_after_full_turn(self, n):
        result = periodicity_check(eigendecompose(make("hypercube", n=n)), 2 * math.pi * n)
        assert result.deviation <= 1e-9

    def test_complete_graph_returns_at_two_pi(self, complete8):
        assert periodicity_check(eigendecompose(complete8), 2 * math.pi).deviation <= 1e-9

    def test_odd_cycle_has_no_period_at_two_pi(self, settings):
        case = GoldenTables(settings.storage.golden_dir).periodicity_cases()["torus(5,1)"]
        result = periodicity_check(eigendecompose(make("torus", p=5, d=1)), case['T'])
        assert result.deviation >= case['min_residual']

    def test_horizon_must_be_positive(self, cycle4):
        with pytest.raises(InvariantViolation, match="positive-horizon"):
            periodicity_check(eigendecompose(cycle4), 0.0)


class TestCompleteGraph:
    def test_amplification_degrades(self, settings):
        report = complete_graph_negative_result(16, (0.7, 2.3, 5.0), settings)
        assert report.passes
        assert report.amplification_degenerate
        assert report.alpha == pytest.approx(1 - 2 / 16, abs=1e-9)
        for row in report.rows:
            assert row['closed_form_deviation'] <= 1e-10
            assert row['max_off_diagonal_probability'] <= 4 / 256 + 1e-12

    def test_two_states_is_not_degenerate(self, settings):
        report = complete_graph_negative_result(2, (0.7,), settings)
        assert report.alpha == pytest.approx(0.0, abs=1e-12)
        assert not report.amplification_degenerate


class TestDiameterReport:
    def test_cycle_row(self, settings):
        row = diameter_bound_report(make("cycle", n=9), settings)
        assert row['graph'] == "cycle(9)"
        assert row['diameter'] == 4
        assert row['ratio_to_diameter'] == pytest.approx(row['tau_prime_mix'] / 4)
        assert row['gap_scale'] > 0


class TestSuites:
    def test_complete_suite_passes(self, settings):
        report = run_suite("complete", settings)
        assert report.passed, report.failed_checks()
        names = [check.name for check in report.checks]
        assert names[:3] == [
            "pi_floor[complete(8,self_loops)]",
            "complete_graph_amplification_failure",
            "complete_graph_two_states",
        ]

    def test_evidence_only_checks_do_not_decide(self, settings):
        report = run_suite("complete", settings)
        evidence = [check for check in report.checks if not check.asserted]
        assert {check.name for check in evidence} == {"complete_graph_two_states", "diameter_scaling[complete]"}

    def test_torus_suite_passes(self, settings):
        report = run_suite("torus", settings)
        assert report.passed, report.failed_checks()
        asserted = {check.name for check in report.checks if check.asserted}
        assert {"torus_amplification[d=1]", "torus_amplification[d=2]",
                "multiplicity_classes[d=1]", "multiplicity_classes[d=2]"} <= asserted

    def test_hypercube_suite_passes(self, settings):
        report = run_suite("hypercube", settings)
        assert report.passed, report.failed_checks()
        periodic = [check for check in report.checks if check.name.startswith("periodicity")]
        assert [check.name for check in periodic] == [f"periodicity[hypercube({n})]" for n in (3, 4, 5)]
        for check in periodic:
            assert check.passed
            assert check.evidence[0]['cesaro_distance'] <= 1e-9

    def test_unknown_suite(self, settings):
        with pytest.raises(InvariantViolation, match="lab-suite"):
            ConjectureLab(settings).checks_for("spheres")

    def test_suite_sizes(self, settings):
        lab = ConjectureLab(settings)
        sizes = {suite: len(lab.checks_for(suite)) for suite in ("torus", "hypercube", "complete")}
        assert len(lab.checks_for("all")) == sum(sizes.values())


class TestGoldenTables:
    def test_floors(self, settings):
        golden = GoldenTables(settings.storage.golden_dir)
        assert golden.torus_floors() == {1: 0.79, 2: 0.55}

    def test_unknown_dimension(self, settings):
        with pytest.raises(KeyError):
            GoldenTables(settings.storage.golden_dir).torus_floor(3)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            GoldenTables(tmp_path).torus_floors()
