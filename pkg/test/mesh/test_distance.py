import itertools

import numpy as np
import pytest

from warpcap.errors import UnreachableVertex
from warpcap.geometry.metric import euclidean_metric
from warpcap.mesh.distance import (
    boundary_distance_field,
    edge_lengths,
    geodesic_distance_field,
)
from warpcap.mesh.mesh import Mesh

from test.util import disk, hyperbolic_warp, interval


def test_distance_to_itself_is_zero():
    mesh = disk(0.2)
    d = geodesic_distance_field(mesh, euclidean_metric(2), 5)
    assert d.values[5] == 0.0


def test_distance_from_center_to_boundary():
    mesh = disk(0.05)
    d = geodesic_distance_field(mesh, euclidean_metric(2), 0).values[mesh.boundary_vertices]
    # every ring has a vertex at angle 0, so that boundary vertex is reached straight
    assert d.min() == pytest.approx(1.0, abs=1e-12)
    assert d.max() < 1.1


def test_triangle_inequality():
    mesh = disk(0.25)
    metric = hyperbolic_warp()
    rng = np.random.default_rng(1)
    picks = rng.choice(mesh.n_vertices, 6, replace=False)
    table = {int(v): geodesic_distance_field(mesh, metric, int(v)).values for v in picks}
    for a, b, c in itertools.permutations(picks.tolist(), 3):
        assert table[a][c] <= table[a][b] + table[b][c] + 1e-12


def test_lipschitz_along_edges():
    mesh = disk(0.2)
    metric = hyperbolic_warp()
    d = geodesic_distance_field(mesh, metric, 0).values
    e = mesh.edges
    assert np.all(np.abs(d[e[:, 0]] - d[e[:, 1]]) <= edge_lengths(mesh, metric) + 1e-12)


def test_boundary_distance_vanishes_on_boundary():
    mesh = disk(0.2)
    d = boundary_distance_field(mesh, euclidean_metric(2)).values
    assert np.all(d[mesh.boundary_vertices] == 0.0)
    assert np.all(d >= 0)


def test_boundary_distance_on_interval():
    mesh = interval(4)
    d = boundary_distance_field(mesh, euclidean_metric(1)).values
    assert d[2] == pytest.approx(0.5)


def test_boundary_distance_on_refined_disk():
    mesh = disk(0.05)
    d = boundary_distance_field(mesh, euclidean_metric(2)).values
    assert abs(d.max() - 1.0) < 0.03


def test_disconnected_mesh():
    mesh = Mesh(
        vertices=np.array([[0.0], [1.0], [2.0], [3.0]]),
        cells=np.array([[0, 1], [2, 3]]),
        boundary_facets=np.array([[0], [1], [2], [3]]),
        boundary_tags=np.array([1, 2, 1, 2]),
    )
    with pytest.raises(UnreachableVertex):
        geodesic_distance_field(mesh, euclidean_metric(1), 0)
