"""
Mesh, solution and visualization files.

Mesh text format (indices 0-based, one record per line, `#` starts a comment):

    SHAPE                 optional, e.g. `disk 1.0`
    VERTICES              one vertex per line: x1 [x2]
    CELLS                 one cell per line: vertex ids
    BOUNDARY              one facet per line: vertex ids then the boundary tag
"""
import csv
from pathlib import Path
from typing import Dict, List, NamedTuple, Union

import meshio
import numpy as np

from warpcap.errors import InvalidInput, MeshFormatError
from warpcap.mesh.mesh import Mesh

SECTIONS = ("SHAPE", "VERTICES", "CELLS", "BOUNDARY")


def _number(x: float) -> str:
    return repr(float(x))


def write_mesh(mesh: Mesh, path: Union[str, Path]) -> None:
    lines = []
    if mesh.shape[0] != "file":
        lines += ["SHAPE", " ".join([mesh.shape[0]] + [_number(v) for v in mesh.shape[1:]])]
    lines.append("VERTICES")
    lines += [" ".join(_number(c) for c in v) for v in mesh.vertices]
    lines.append("CELLS")
    lines += [" ".join(str(i) for i in c) for c in mesh.cells]
    lines.append("BOUNDARY")
    lines += [
        " ".join(str(i) for i in f) + f" {t}"
        for f, t in zip(mesh.boundary_facets, mesh.boundary_tags)
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_mesh(path: Union[str, Path]) -> Mesh:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise MeshFormatError(f"cannot read mesh file {path}: {e}") from e
    records: Dict[str, List[List[str]]] = {}
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in SECTIONS:
            if line in records:
                raise MeshFormatError(f"{path}:{number}: section {line} appears twice")
            section = line
            records[section] = []
            continue
        if section is None:
            raise MeshFormatError(f"{path}:{number}: record before the first section header")
        records[section].append(line.split())
    for name in ("VERTICES", "CELLS", "BOUNDARY"):
        if name not in records:
            raise MeshFormatError(f"{path}: missing section {name}")
    try:
        vertices = np.array(records["VERTICES"], dtype=float)
        dim = vertices.shape[1]
        cells = np.array(records["CELLS"], dtype=np.int64)
        boundary = np.array(records["BOUNDARY"], dtype=np.int64)
    except ValueError as e:
        raise MeshFormatError(f"{path}: malformed record: {e}") from e
    if cells.ndim != 2 or cells.shape[1] != dim + 1:
        raise MeshFormatError(f"{path}: cells of a {dim}-dimensional mesh need {dim + 1} vertices")
    if boundary.ndim != 2 or boundary.shape[1] != dim + 1:
        raise MeshFormatError(f"{path}: boundary records need {dim} vertex ids and a tag")
    shape = ("file",)
    if "SHAPE" in records and records["SHAPE"]:
        kind, *params = records["SHAPE"][0]
        shape = (kind, *(float(p) for p in params))
    return Mesh(vertices, cells, boundary[:, :-1], boundary[:, -1], shape=shape)


class SolutionTable(NamedTuple):
    vertex_id: np.ndarray
    x: np.ndarray
    u: np.ndarray
    W: np.ndarray
    d_gamma_boundary: np.ndarray


def solution_header(dim: int) -> List[str]:
    return ["vertex_id"] + [f"x{i + 1}" for i in range(dim)] + ["u", "W", "d_gamma_boundary"]


def write_solution_csv(
    path: Union[str, Path],
    mesh: Mesh,
    u: np.ndarray,
    W: np.ndarray,
    d_gamma_boundary: np.ndarray,
) -> None:
    """
    One row per vertex; floats are written with repr so they read back exactly.
    """
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(solution_header(mesh.dim))
        for i in range(mesh.n_vertices):
            writer.writerow(
                [str(i)]
                + [_number(c) for c in mesh.vertices[i]]
                + [_number(u[i]), _number(W[i]), _number(d_gamma_boundary[i])]
            )


def read_solution_csv(path: Union[str, Path]) -> SolutionTable:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise MeshFormatError(f"{path}: empty solution file")
    header = rows[0]
    dim = len(header) - 4
    if dim not in (1, 2) or header != solution_header(dim):
        raise MeshFormatError(f"{path}: unexpected header {','.join(header)}")
    try:
        table = np.array(rows[1:], dtype=float).reshape(-1, len(header))
    except ValueError as e:
        raise MeshFormatError(f"{path}: malformed row: {e}") from e
    return SolutionTable(
        vertex_id=table[:, 0].astype(np.int64),
        x=table[:, 1 : 1 + dim],
        u=table[:, 1 + dim],
        W=table[:, 2 + dim],
        d_gamma_boundary=table[:, 3 + dim],
    )


CELL_BLOCKS = {1: "line", 2: "triangle"}


def to_meshio(mesh: Mesh, fields: Dict[str, np.ndarray]) -> meshio.Mesh:
    """The mesh with chart coordinates padded to 3D and one point-data array per field."""
    points = np.zeros((mesh.n_vertices, 3))
    points[:, : mesh.dim] = mesh.vertices
    point_data = {}
    for name, values in fields.items():
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (mesh.n_vertices,):
            raise InvalidInput(f"field '{name}' has shape {values.shape}, expected ({mesh.n_vertices},)")
        point_data[name] = values
    return meshio.Mesh(
        points=points,
        cells=[(CELL_BLOCKS[mesh.dim], np.asarray(mesh.cells, dtype=np.int64))],
        point_data=point_data,
    )


def write_vtk(path: Union[str, Path], mesh: Mesh, fields: Dict[str, np.ndarray]) -> None:
    """
    Legacy ASCII VTK unstructured grid with one scalar point-data array per field.
    """
    meshio.write(str(path), to_meshio(mesh, fields), file_format="vtk", binary=False)
