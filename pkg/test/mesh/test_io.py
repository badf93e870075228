import meshio
import numpy as np
import pytest

from warpcap.errors import ConfigError, InvalidInput, MeshFormatError
from warpcap.mesh.io import (
    read_mesh,
    read_solution_csv,
    write_mesh,
    write_solution_csv,
    to_meshio,
    write_vtk,
)

from test.util import disk, interval


@pytest.mark.parametrize("mesh", [disk(0.3), interval(8)], ids=["disk", "interval"])
def test_mesh_file_keeps_the_mesh(tmp_path, mesh):
    path = tmp_path / "mesh.txt"
    write_mesh(mesh, path)
    again = read_mesh(path)
    assert np.array_equal(again.vertices, mesh.vertices)
    assert np.array_equal(again.cells, mesh.cells)
    assert np.array_equal(again.boundary_facets, mesh.boundary_facets)
    assert np.array_equal(again.boundary_tags, mesh.boundary_tags)
    assert again.shape == mesh.shape


def test_solution_csv_reads_back_exactly(tmp_path):
    mesh = disk(0.3)
    rng = np.random.default_rng(3)
    u, W, d = rng.normal(size=(3, mesh.n_vertices))
    path = tmp_path / "solution.csv"
    write_solution_csv(path, mesh, u, W, d)
    table = read_solution_csv(path)
    assert np.array_equal(table.u, u)
    assert np.array_equal(table.W, W)
    assert np.array_equal(table.x, mesh.vertices)
    assert path.read_text().splitlines()[0] == "vertex_id,x1,x2,u,W,d_gamma_boundary"


@pytest.mark.parametrize(
    "mesh, block", [(disk(0.3), "triangle"), (interval(8), "line")], ids=["disk", "interval"]
)
def test_vtk_reads_back(tmp_path, mesh, block):
    path = tmp_path / "solution.vtk"
    u = np.linspace(-1.0, 1.0, mesh.n_vertices)
    write_vtk(path, mesh, {"u": u, "W": np.ones(mesh.n_vertices)})
    assert path.read_text().startswith("# vtk DataFile")
    again = meshio.read(path)
    np.testing.assert_allclose(again.points[:, : mesh.dim], mesh.vertices, rtol=0, atol=1e-14)
    assert np.all(again.points[:, mesh.dim :] == 0.0)
    assert np.array_equal(again.cells_dict[block], mesh.cells)
    np.testing.assert_allclose(np.ravel(again.point_data["u"]), u, rtol=1e-14, atol=1e-14)
    np.testing.assert_allclose(np.ravel(again.point_data["W"]), 1.0)


def test_vtk_rejects_misshapen_fields():
    mesh = disk(0.3)
    with pytest.raises(InvalidInput):
        to_meshio(mesh, {"u": np.zeros(mesh.n_vertices + 1)})


@pytest.mark.parametrize(
    "text",
    [
        "CELLS\n0 1\nBOUNDARY\n0 1\n",
        "0 1\nVERTICES\n0\n",
        "VERTICES\n0\n1\nCELLS\n0 1 2\nBOUNDARY\n0 1\n1 2\n",
        "VERTICES\n0\nx\nCELLS\n0 1\nBOUNDARY\n0 1\n1 2\n",
    ],
)
def test_malformed_mesh_files(tmp_path, text):
    path = tmp_path / "mesh.txt"
    path.write_text(text)
    with pytest.raises(MeshFormatError):
        read_mesh(path)


def test_mesh_format_error_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        read_mesh(tmp_path / "missing.txt")
