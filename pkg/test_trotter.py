"""
Tests for the edge-coloring decomposition and the Lie product error sweep.
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import make
from src.models.hamiltonian import HamiltonianParts
from src.spectral.eigen import eigendecompose
from src.spectral.walk import propagator
from src.trotter.decomposition import direction_colors, edge_color_decompose
from src.trotter.product_formula import (
    commutator_report,
    lie_product,
    matching_exponential,
    trotter_bound,
    trotter_sweep,
)
from src.utils.errors import InvariantViolation


class TestDecomposition:
    @pytest.mark.parametrize("p,colors", [(2, 1), (4, 2), (6, 2), (5, 3), (7, 3)])
    def test_direction_colors(self, p, colors):
        assert direction_colors(p) == colors

    def test_cycle4_has_two_matchings(self, cycle4):
        parts = edge_color_decompose(cycle4)
        assert parts.r == 2
        assert parts.matchings() == [[(0, 1), (2, 3)], [(0, 3), (1, 2)]]
        for part in parts.parts:
            assert set(np.unique(part)) == {0.0, 0.5}

    def test_odd_cycle_needs_three_colors(self):
        parts = edge_color_decompose(make("cycle", n=5))
        assert parts.r == 3
        assert [len(edges) for edges in parts.matchings()] == [2, 2, 1]

    def test_hypercube_has_one_part_per_direction(self):
        parts = edge_color_decompose(make("hypercube", n=3))
        assert parts.r == 3
        for part in parts.parts:
            np.testing.assert_allclose(part.sum(axis=0), 1 / 3)

    def test_parts_reassemble_torus(self, torus52):
        parts = edge_color_decompose(torus52)
        assert parts.r == 6
        assert np.abs(parts.total() - torus52.entries).max() <= 1e-12

    def test_lazy_walk_is_rejected(self, lazy_cycle4):
        with pytest.raises(InvariantViolation, match="decomposition-family"):
            edge_color_decompose(lazy_cycle4)

    def test_complete_graph_is_rejected(self, complete8):
        with pytest.raises(InvariantViolation, match="decomposition-family"):
            edge_color_decompose(complete8)

    def test_part_must_be_a_matching(self):
        path = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
        with pytest.raises(ValueError, match="part-matching"):
            HamiltonianParts(parts=[path], coloring={})


class TestProductFormula:
    def test_matching_exponential_matches_expm(self):
        part = np.zeros((5, 5))
        part[0, 3] = part[3, 0] = 0.4
        part[1, 2] = part[2, 1] = 0.25
        part[np.diag_indices(5)] = [0.1, 0.0, 0.3, -0.2, 0.7]
        np.testing.assert_allclose(matching_exponential(part, 1.3), expm(-1.3j * part), atol=1e-12)

    def test_single_part_is_exact(self):
        matrix = make("hypercube", n=1)
        parts = edge_color_decompose(matrix)
        exact = propagator(eigendecompose(matrix), 0.9)
        np.testing.assert_allclose(lie_product(parts, 0.9, 1), exact, atol=1e-12)

    @pytest.mark.parametrize("j", [1, 3, 8])
    def test_commuting_parts_are_exact_for_every_j(self, j):
        matrix = make("hypercube", n=3)
        parts = edge_color_decompose(matrix)
        exact = propagator(eigendecompose(matrix), 2.0)
        np.testing.assert_allclose(lie_product(parts, 2.0, j), exact, atol=1e-10)

    def test_step_count_must_be_positive(self, cycle4):
        with pytest.raises(InvariantViolation, match="trotter-steps"):
            lie_product(edge_color_decompose(cycle4), 1.0, 0)

    def test_trotter_bound(self):
        assert trotter_bound(3, 0.5, 1.0, 4) == pytest.approx(0.1875)
        assert trotter_bound(1, 0.0, 5.0, 1) == 0.0


class TestCommutators:
    def test_single_part_has_no_pairs(self):
        report = commutator_report(edge_color_decompose(make("hypercube", n=1)))
        assert report.max_norm == 0.0
        assert report.table == {}

    def test_cycle4_matchings_commute(self, cycle4):
        assert commutator_report(edge_color_decompose(cycle4)).max_norm <= 1e-12

    def test_cycle6_matchings_do_not_commute(self):
        report = commutator_report(edge_color_decompose(make("cycle", n=6)))
        assert report.max_norm == pytest.approx(math.sqrt(3) / 4, abs=1e-12)

    def test_directions_of_a_torus_commute(self, torus52):
        report = commutator_report(edge_color_decompose(torus52))
        for (k, l), norm in report.table.items():
            if k // 3 != l // 3:
                assert norm <= 1e-12
        assert report.max_norm > 0


class TestSweep:
    def test_torus_error_is_first_order(self, torus52):
        parts = edge_color_decompose(torus52)
        rows = trotter_sweep(parts, eigendecompose(torus52), 1.0, [4, 8, 16, 32])
        errors = [row.error_2norm for row in rows]

        assert [row.j for row in rows] == [4, 8, 16, 32]
        assert all(earlier > later for earlier, later in zip(errors, errors[1:]))
        for earlier, later in zip(errors, errors[1:]):
            assert 1.5 <= earlier / later <= 2.5
        assert all(row.within_bound for row in rows)
        assert all(row.error_max_entry <= row.error_2norm + 1e-15 for row in rows)
