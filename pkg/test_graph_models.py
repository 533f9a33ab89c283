"""
Tests for transition matrix construction.
"""

from itertools import permutations

import numpy as np
import pytest

from conftest import make, spec
from src.graphs.graph_models import (
    build_transition,
    graph_diameter,
    lazy,
    torus_digits,
    vertex_transitive_rows,
)
from src.models.graph import GraphFamily, GraphSpec, TransitionMatrix
from src.storage.artifact_store import ArtifactStore
from src.utils.errors import InvariantViolation

FAMILY_GRID = [
    ("cycle", {"n": 3}),
    ("cycle", {"n": 9}),
    ("torus", {"p": 2, "d": 3}),
    ("torus", {"p": 5, "d": 2}),
    ("torus", {"p": 4, "d": 2}),
    ("hypercube", {"n": 1}),
    ("hypercube", {"n": 4}),
    ("complete", {"size": 2}),
    ("complete", {"size": 8, "with_self_loops": True}),
]


def test_cycle4_is_standard_walk(cycle4):
    expected = np.array([
        [0, .5, 0, .5],
        [.5, 0, .5, 0],
        [0, .5, 0, .5],
        [.5, 0, .5, 0],
    ])
    np.testing.assert_array_equal(cycle4.entries, expected)
    assert cycle4.degree == 2


def test_complete_with_self_loops_is_uniform(complete8):
    np.testing.assert_allclose(complete8.entries, np.full((8, 8), 1 / 8), atol=1e-15)
    eigenvalues = np.sort(np.linalg.eigvalsh(complete8.entries))[::-1]
    np.testing.assert_allclose(eigenvalues, [1] + [0] * 7, atol=1e-12)


def test_complete_without_self_loops():
    matrix = make("complete", size=4)
    np.testing.assert_allclose(matrix.entries, (np.ones((4, 4)) - np.eye(4)) / 3)


def test_hypercube2_is_cycle4_up_to_relabeling(cycle4):
    cube = make("hypercube", n=2).entries
    matches = [
        perm for perm in permutations(range(4))
        if np.array_equal(cube[np.ix_(perm, perm)], cycle4.entries)
    ]
    assert matches


@pytest.mark.parametrize("family,params", FAMILY_GRID)
def test_every_family_satisfies_transition_invariants(family, params):
    matrix = make(family, **params)
    entries = matrix.entries
    assert np.abs(entries - entries.T).max() <= 1e-12
    assert np.abs(entries.sum(axis=0) - 1).max() <= 1e-12
    assert entries.min() >= 0 and entries.max() <= 1
    assert not entries.flags.writeable
    assert vertex_transitive_rows(matrix)


@pytest.mark.parametrize("p", [3, 5, 8])
def test_torus_dimension_one_equals_cycle(p):
    np.testing.assert_array_equal(make("torus", p=p, d=1).entries, make("cycle", n=p).entries)


def test_torus_order_is_little_endian():
    digits = torus_digits(3, 2)
    assert digits[1].tolist() == [1, 0]
    assert digits[3].tolist() == [0, 1]


def test_lazy_cycle4(lazy_cycle4):
    assert lazy_cycle4.lazy
    np.testing.assert_allclose(np.diag(lazy_cycle4.entries), 0.5)
    assert lazy_cycle4.entries[0, 1] == pytest.approx(0.25)
    assert lazy_cycle4.entries[0, 2] == 0
    eigenvalues = np.sort(np.linalg.eigvalsh(lazy_cycle4.entries))[::-1]
    np.testing.assert_allclose(eigenvalues, [1, .5, .5, 0], atol=1e-12)
    assert lazy_cycle4.label == "lazy(cycle(4))"


def test_lazy_complete2_without_self_loops():
    np.testing.assert_allclose(lazy(make("complete", size=2)).entries, np.full((2, 2), 0.5))


def test_lazy_spectrum_is_nonnegative():
    eigenvalues = np.linalg.eigvalsh(lazy(make("cycle", n=7)).entries)
    assert eigenvalues.min() >= -1e-12


def test_aperiodicity_is_reported_not_enforced(cycle4, lazy_cycle4):
    assert not cycle4.aperiodic
    assert lazy_cycle4.aperiodic


@pytest.mark.parametrize("family,params", [
    ("cycle", {"n": 2}),
    ("torus", {"p": 1, "d": 2}),
    ("torus", {"p": 5}),
    ("hypercube", {"n": 0}),
    ("complete", {"size": 1}),
    ("custom", {"adjacency": [[0, 1], [2, 0]]}),
    ("custom", {"adjacency": [[0, 1, 0], [1, 0]]}),
    ("custom", {"adjacency": [[0, -1], [-1, 0]]}),
])
def test_invalid_specs_are_rejected(family, params):
    with pytest.raises(ValueError):
        spec(family, **params)


def test_disconnected_custom_graph_is_rejected():
    adjacency = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    with pytest.raises(InvariantViolation, match="irreducible"):
        build_transition(spec("custom", adjacency=adjacency))


def test_irregular_custom_graph_uses_max_degree_walk():
    path = [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    matrix = build_transition(spec("custom", adjacency=path))
    expected = np.array([[.5, .5, 0], [.5, 0, .5], [0, .5, .5]])
    np.testing.assert_allclose(matrix.entries, expected)
    assert not matrix.is_regular


def test_regular_custom_graph_is_standard_walk(cycle4):
    adjacency = (cycle4.entries * 2).tolist()
    matrix = build_transition(spec("custom", adjacency=adjacency))
    np.testing.assert_array_equal(matrix.entries, cycle4.entries)
    assert matrix.degree == 2


def test_non_stochastic_matrix_is_rejected(cycle4):
    with pytest.raises(ValueError, match="column-sums"):
        TransitionMatrix(n_states=4, entries=cycle4.entries * 1.01, spec=cycle4.spec)


@pytest.mark.parametrize("family,params,diameter", [
    ("cycle", {"n": 9}, 4),
    ("torus", {"p": 5, "d": 2}, 4),
    ("hypercube", {"n": 3}, 3),
    ("complete", {"size": 6}, 1),
    ("custom", {"adjacency": [[0, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0]]}, 3),
])
def test_graph_diameter(family, params, diameter):
    assert graph_diameter(make(family, **params)) == diameter


def test_matrix_json_round_trip_is_bit_exact(tmp_path, torus52):
    store = ArtifactStore(tmp_path)
    path = store.save_matrix(tmp_path / "torus.json", torus52)
    loaded = store.load_matrix(path)

    assert np.array_equal(loaded.entries, torus52.entries)
    assert loaded.spec == torus52.spec
    assert loaded.spec.family is GraphFamily.TORUS


def test_lazy_round_trip_keeps_flag(tmp_path, lazy_cycle4):
    store = ArtifactStore(tmp_path)
    loaded = store.load_matrix(store.save_matrix(tmp_path / "m.json", lazy_cycle4))
    assert loaded.lazy
    assert loaded.label == "lazy(cycle(4))"


def test_spec_label_and_size():
    torus = GraphSpec(family=GraphFamily.TORUS, p=5, d=2)
    assert torus.label == "torus(5,2)"
    assert torus.n_states == 25
