import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpcap.errors import DegenerateStencil, InvalidInput
from warpcap.geometry.curvature import (
    curvature_from_jet,
    mean_curvature_at_vertex,
    mean_curvature_field,
    mean_curvature_strong,
    recover_derivatives,
)
from warpcap.geometry.metric import euclidean_metric
from warpcap.mesh.mesh import Mesh, ScalarField

from test.util import disk, exponential_warp, hyperbolic_warp, interval


def flat_mean_curvature(g: np.ndarray, H: np.ndarray) -> float:
    W = np.sqrt(1 + g @ g)
    return (np.trace(H) * (1 + g @ g) - g @ H @ g) / W**3


@settings(max_examples=100, deadline=None)
@given(
    g=st.lists(st.floats(min_value=-5, max_value=5), min_size=2, max_size=2),
    h=st.lists(st.floats(min_value=-5, max_value=5), min_size=3, max_size=3),
)
def test_euclidean_preset_reduces_to_flat_operator(g, h):
    g = np.array(g)
    H = np.array([[h[0], h[1]], [h[1], h[2]]])
    value = curvature_from_jet(euclidean_metric(2), np.array([0.2, -0.1]), g, H)
    assert value == pytest.approx(flat_mean_curvature(g, H), abs=1e-10)


def test_constant_graph_is_minimal():
    mesh = disk(0.2)
    u = ScalarField(mesh, np.full(mesh.n_vertices, 0.7))
    values, _ = mean_curvature_field(hyperbolic_warp(), u)
    values = values[np.isfinite(values)]
    assert len(values) > 0
    assert np.max(np.abs(values)) < 1e-9


def test_paraboloid_at_center():
    mesh = disk(0.1)
    x = mesh.vertices
    u = ScalarField(mesh, (x**2).sum(axis=1))
    assert mean_curvature_strong(euclidean_metric(2), u, (0.0, 0.0)) == pytest.approx(4.0, abs=1e-8)
    assert mean_curvature_at_vertex(euclidean_metric(2), u, 0) == pytest.approx(4.0, abs=1e-8)


def test_quadratic_is_recovered_exactly():
    mesh = disk(0.2)
    x = mesh.vertices
    u = ScalarField(mesh, 1 + 2 * x[:, 0] - x[:, 1] + 0.5 * x[:, 0] * x[:, 1] + x[:, 1] ** 2)
    v = int(np.argmin(np.abs(x - [0.3, 0.2]).sum(axis=1)))
    gradient, hessian = recover_derivatives(u, v)
    px, py = x[v]
    assert gradient == pytest.approx([2 + 0.5 * py, -1 + 0.5 * px + 2 * py], abs=1e-9)
    assert hessian == pytest.approx(np.array([[0.0, 0.5], [0.5, 2.0]]), abs=1e-8)


def test_translation_leaves_curvature_unchanged():
    mesh = disk(0.2)
    x = mesh.vertices
    u = ScalarField(mesh, np.sin(x[:, 0]) * np.cos(x[:, 1]))
    metric = hyperbolic_warp()
    base, _ = mean_curvature_field(metric, u)
    moved, _ = mean_curvature_field(metric, u.translate(3.0))
    assert np.allclose(base, moved, atol=1e-8, equal_nan=True)


def test_spherical_cap_curvature():
    mesh = disk(0.05)
    x = mesh.vertices
    u = ScalarField(mesh, np.sqrt(4 - (x**2).sum(axis=1)))
    central = np.flatnonzero((x**2).sum(axis=1) < 0.25)
    values, skipped = mean_curvature_field(euclidean_metric(2), u, central)
    assert skipped == 0
    assert np.max(np.abs(values + 1.0)) < 0.05


def test_exponential_warp_against_closed_form():
    mesh = interval(32)
    x = mesh.vertices[:, 0]
    u = ScalarField(mesh, x)
    values, _ = mean_curvature_field(exponential_warp(), u)
    inner = x[~mesh.is_boundary_vertex]
    q = np.exp(2 * inner)
    expected = -q * (1 + q) ** -1.5 - (1 + q) ** -0.5
    assert np.allclose(values, expected, rtol=1e-6, atol=1e-8)


def test_isolated_vertex_patch_is_degenerate():
    mesh = Mesh(
        vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        cells=np.array([[0, 1, 2]]),
        boundary_facets=np.array([[0, 1], [1, 2], [2, 0]]),
        boundary_tags=np.array([1, 1, 1]),
    )
    with pytest.raises(DegenerateStencil):
        recover_derivatives(ScalarField.zeros(mesh), 0)


@pytest.mark.parametrize("point", [(0.13, -0.41), (-0.52, 0.07), (0.33, 0.33)])
def test_quadratic_graph_between_vertices(point):
    mesh = disk(0.2)
    x = mesh.vertices
    u = ScalarField(mesh, 0.5 * x[:, 0] ** 2 - 0.3 * x[:, 0] * x[:, 1] + 0.2 * x[:, 1] ** 2 + x[:, 0])
    px, py = point
    g = np.array([px - 0.3 * py + 1, -0.3 * px + 0.4 * py])
    H = np.array([[1.0, -0.3], [-0.3, 0.4]])
    expected = flat_mean_curvature(g, H)
    assert mean_curvature_strong(euclidean_metric(2), u, point) == pytest.approx(expected, abs=1e-6)


def test_point_at_a_vertex_matches_the_vertex():
    mesh = disk(0.2)
    metric = hyperbolic_warp()
    u = ScalarField(mesh, np.sin(mesh.vertices[:, 0]) * np.cos(mesh.vertices[:, 1]))
    v = int(np.argmin(np.abs(mesh.vertices - [0.4, -0.2]).sum(axis=1)))
    assert mean_curvature_strong(metric, u, mesh.vertices[v]) == pytest.approx(
        mean_curvature_at_vertex(metric, u, v), abs=1e-12
    )


def test_point_on_an_interval():
    mesh = interval(32)
    x = mesh.vertices[:, 0]
    u = ScalarField(mesh, x**2)
    g, H = np.array([2 * 0.37]), np.array([[2.0]])
    expected = curvature_from_jet(euclidean_metric(1), np.array([0.37]), g, H)
    assert mean_curvature_strong(euclidean_metric(1), u, 0.37) == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize("point", [(1.5, 0.0), (0.8, 0.8)])
def test_point_outside_the_disk(point):
    mesh = disk(0.2)
    with pytest.raises(InvalidInput):
        mean_curvature_strong(euclidean_metric(2), ScalarField.zeros(mesh), point)
