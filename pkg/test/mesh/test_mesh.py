import numpy as np
import pytest

from warpcap.errors import InvalidInput
from warpcap.geometry.metric import euclidean_metric
from warpcap.mesh.generate import generate_annulus_mesh
from warpcap.mesh.mesh import Mesh, ScalarField

from test.util import disk, hyperbolic_warp, interval


def square_mesh(flip: bool = False) -> Mesh:
    cells = np.array([[0, 1, 2], [0, 2, 3]])
    if flip:
        cells = cells[:, ::-1]
    return Mesh(
        vertices=np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
        cells=cells,
        boundary_facets=np.array([[0, 1], [1, 2], [2, 3], [3, 0]]),
        boundary_tags=np.ones(4),
    )


def test_orientation_is_fixed():
    mesh = square_mesh(flip=True)
    assert np.all(mesh.cell_volumes > 0)
    assert mesh.area(euclidean_metric(2)) == pytest.approx(1.0)


def test_mesh_is_immutable():
    mesh = square_mesh()
    with pytest.raises(ValueError):
        mesh.vertices[0, 0] = 5.0


def test_missing_boundary_facet_is_rejected():
    with pytest.raises(InvalidInput):
        Mesh(
            vertices=np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
            cells=np.array([[0, 1, 2], [0, 2, 3]]),
            boundary_facets=np.array([[0, 1], [1, 2], [2, 3]]),
            boundary_tags=np.ones(3),
        )


def test_degenerate_cell_is_rejected():
    with pytest.raises(InvalidInput):
        Mesh(
            vertices=np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]),
            cells=np.array([[0, 1, 2]]),
            boundary_facets=np.array([[0, 1], [1, 2], [2, 0]]),
            boundary_tags=np.ones(3),
        )


def test_every_interior_facet_is_shared_twice():
    mesh = disk(0.2)
    facets = np.sort(
        np.concatenate([mesh.cells[:, [0, 1]], mesh.cells[:, [1, 2]], mesh.cells[:, [0, 2]]]), axis=1
    )
    _, counts = np.unique(facets, axis=0, return_counts=True)
    assert set(counts.tolist()) <= {1, 2}
    assert (counts == 1).sum() == len(mesh.boundary_facets)


@pytest.mark.parametrize("metric", [euclidean_metric(2), hyperbolic_warp()])
def test_conormals_are_unit_and_inward(metric):
    for mesh in (disk(0.2), generate_annulus_mesh(0.4, 1.0, 0.2)):
        points, _, _ = mesh.facet_points()
        nu = mesh.conormals(metric, points)
        length = np.einsum("fqi,fqij,fqj->fq", nu, metric.sigma(points), nu)
        assert np.allclose(length, 1.0, atol=1e-10)
        inside = points + 1e-6 * nu
        r = np.linalg.norm(inside, axis=-1)
        outer = (mesh.boundary_tags == 1)[:, None]
        assert np.all(np.where(outer, r < np.linalg.norm(points, axis=-1), True))
        assert np.all(np.where(~outer, r > np.linalg.norm(points, axis=-1), True))


def test_lumped_areas_sum_to_area():
    mesh = disk(0.1)
    metric = hyperbolic_warp()
    assert mesh.lumped_areas(metric).sum() == pytest.approx(mesh.area(metric), rel=1e-12)


def test_patch_starts_with_vertex():
    mesh = disk(0.2)
    patch = mesh.patch(0, 1)
    assert patch[0] == 0
    assert len(patch) == 1 + mesh.adjacency[0].nnz
    assert set(mesh.patch(0, 2).tolist()) >= set(patch.tolist())


def test_linear_field_gradients_are_exact():
    mesh = disk(0.2)
    x = mesh.vertices
    u = ScalarField(mesh, 2 * x[:, 0] - 3 * x[:, 1] + 1)
    assert np.allclose(u.cell_gradients(), [2, -3])
    assert np.allclose(u.vertex_gradients(), [2, -3])


def test_field_validation():
    mesh = interval(4)
    with pytest.raises(InvalidInput):
        ScalarField(mesh, np.zeros(3))
    with pytest.raises(InvalidInput):
        ScalarField(mesh, [0, 1, np.inf, 0, 0])


def test_translate():
    mesh = interval(4)
    u = ScalarField(mesh, np.arange(5.0)).translate(2.0)
    assert u.values == pytest.approx(np.arange(5.0) + 2)


def test_mesh_size():
    assert interval(10).h == pytest.approx(0.1)
