from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, List, Tuple

import numpy as np
import scipy.sparse

from warpcap.errors import InvalidInput
from warpcap.mesh.quadrature import cell_rule, facet_rule

if TYPE_CHECKING:
    from warpcap.geometry.metric import MetricField


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _signed_volumes(vertices: np.ndarray, cells: np.ndarray) -> np.ndarray:
    p = vertices[cells]
    if vertices.shape[1] == 1:
        return p[:, 1, 0] - p[:, 0, 0]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Simplicial discretization of a domain in a single chart of the leaf.

    Cells are segments (dim 1) or triangles (dim 2) oriented with positive
    coordinate volume. Boundary facets carry a tag naming the boundary
    component they belong to. Immutable once built.
    """

    vertices: np.ndarray
    cells: np.ndarray
    boundary_facets: np.ndarray
    boundary_tags: np.ndarray
    # ("disk", R), ("annulus", inner, outer), ("interval", a, b) or ("file",)
    shape: Tuple = ("file",)

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float)
        if vertices.ndim == 1:
            vertices = vertices[:, None]
        dim = vertices.shape[1]
        if dim not in (1, 2):
            raise InvalidInput(f"leaf dimension must be 1 or 2, got {dim}")
        cells = np.array(self.cells, dtype=np.int64).reshape(-1, dim + 1)
        facets = np.array(self.boundary_facets, dtype=np.int64).reshape(-1, dim)
        tags = np.array(self.boundary_tags, dtype=np.int64).reshape(-1)
        if len(tags) != len(facets):
            raise InvalidInput("every boundary facet needs exactly one tag")
        if cells.size and (cells.min() < 0 or cells.max() >= len(vertices)):
            raise InvalidInput("cell refers to a vertex that does not exist")
        if not np.all(np.isfinite(vertices)):
            raise InvalidInput("vertex coordinates must be finite")

        volumes = _signed_volumes(vertices, cells)
        if np.any(np.abs(volumes) <= 1e-14 * max(1.0, np.abs(volumes).max())):
            raise InvalidInput("mesh contains degenerate cells")
        flip = volumes < 0
        if dim == 1:
            cells[flip] = cells[flip][:, ::-1]
        else:
            cells[flip] = cells[flip][:, [0, 2, 1]]

        object.__setattr__(self, "vertices", _frozen(vertices, float))
        object.__setattr__(self, "cells", _frozen(cells, np.int64))
        object.__setattr__(self, "boundary_facets", _frozen(facets, np.int64))
        object.__setattr__(self, "boundary_tags", _frozen(tags, np.int64))
        object.__setattr__(self, "shape", tuple(self.shape))
        self._check_conforming()

    def _all_facets(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Sorted facets of every cell, and the local index of the opposite vertex.
        """
        local = [[i for i in range(self.dim + 1) if i != j] for j in range(self.dim + 1)]
        facets = np.concatenate([self.cells[:, l] for l in local])
        opposite = np.repeat(np.arange(self.dim + 1), len(self.cells))
        return np.sort(facets, axis=1), opposite

    def _check_conforming(self):
        facets, _ = self._all_facets()
        unique, counts = np.unique(facets, axis=0, return_counts=True)
        if np.any(counts > 2):
            raise InvalidInput("non-conforming mesh: a facet is shared by more than two cells")
        exposed = {tuple(f) for f in unique[counts == 1]}
        declared = {tuple(f) for f in np.sort(self.boundary_facets, axis=1)}
        if exposed != declared:
            raise InvalidInput(
                "declared boundary facets do not match the facets owned by a single cell"
            )

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def cell_volumes(self) -> np.ndarray:
        """Coordinate (not metric) volumes."""
        return _signed_volumes(self.vertices, self.cells)

    @cached_property
    def cell_gradients(self) -> np.ndarray:
        """
        Coordinate gradients of the barycentric basis, shape (cells, dim + 1, dim).
        """
        p = self.vertices[self.cells]
        edges = p[:, 1:] - p[:, :1]  # (nc, dim, dim), rows are edge vectors
        inv = np.linalg.inv(edges)  # columns give gradients of λ_1..λ_dim
        grads = np.empty((len(self.cells), self.dim + 1, self.dim))
        grads[:, 1:, :] = np.transpose(inv, (0, 2, 1))
        grads[:, 0, :] = -grads[:, 1:, :].sum(axis=1)
        return grads

    @cached_property
    def edges(self) -> np.ndarray:
        if self.dim == 1:
            return np.sort(self.cells, axis=1)
        pairs = np.concatenate([self.cells[:, [0, 1]], self.cells[:, [1, 2]], self.cells[:, [0, 2]]])
        return np.unique(np.sort(pairs, axis=1), axis=0)

    @cached_property
    def h(self) -> float:
        d = self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]
        return float(np.sqrt((d**2).sum(axis=1)).max())

    @cached_property
    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_facets)

    @cached_property
    def is_boundary_vertex(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.boundary_vertices] = True
        return mask

    @cached_property
    def facet_cells(self) -> np.ndarray:
        """Index of the single cell owning each boundary facet."""
        facets, _ = self._all_facets()
        owners = np.tile(np.arange(len(self.cells)), self.dim + 1)
        lookup = {tuple(f): c for f, c in zip(facets, owners)}
        return np.array([lookup[tuple(f)] for f in np.sort(self.boundary_facets, axis=1)], dtype=np.int64)

    @cached_property
    def facet_normals(self) -> np.ndarray:
        """
        Inward coordinate unit normal covector of every boundary facet.
        """
        p = self.vertices[self.boundary_facets]
        cells = self.cells[self.facet_cells]
        opposite = np.array(
            [
                [v for v in cell if v not in facet][0]
                for cell, facet in zip(cells, self.boundary_facets)
            ],
            dtype=np.int64,
        )
        towards = self.vertices[opposite] - p[:, 0]
        if self.dim == 1:
            normals = np.sign(towards)
        else:
            t = p[:, 1] - p[:, 0]
            normals = np.stack([t[:, 1], -t[:, 0]], axis=1)
            normals /= np.linalg.norm(normals, axis=1)[:, None]
            normals[(normals * towards).sum(axis=1) < 0] *= -1
        return normals

    @cached_property
    def vertex_cells(self) -> List[np.ndarray]:
        order = np.argsort(self.cells.ravel(), kind="stable")
        cell_of = order // (self.dim + 1)
        counts = np.bincount(self.cells.ravel(), minlength=self.n_vertices)
        return np.split(cell_of, np.cumsum(counts)[:-1])

    @cached_property
    def adjacency(self) -> scipy.sparse.csr_matrix:
        e = self.edges
        n = self.n_vertices
        a = scipy.sparse.coo_matrix(
            (np.ones(2 * len(e)), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
            shape=(n, n),
        )
        return a.tocsr()

    def patch(self, vertex: int, rings: int = 1) -> np.ndarray:
        """Vertex ids within `rings` edge steps of `vertex`, the vertex first."""
        adjacency = self.adjacency
        seen = [vertex]
        frontier = {vertex}
        members = {vertex}
        for _ in range(rings):
            nxt = set()
            for v in frontier:
                nxt.update(adjacency.indices[adjacency.indptr[v] : adjacency.indptr[v + 1]].tolist())
            nxt -= members
            members |= nxt
            seen.extend(sorted(nxt))
            frontier = nxt
        return np.array(seen, dtype=np.int64)

    def cell_points(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Quadrature points (cells, q, dim), barycentric coordinates (q, dim + 1)
        and weights (q,) of the cell rule.
        """
        bary, weights = cell_rule(self.dim)
        points = np.einsum("qi,cid->cqd", bary, self.vertices[self.cells])
        return points, bary, weights

    def facet_points(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        bary, weights = facet_rule(self.dim)
        points = np.einsum("qi,fid->fqd", bary, self.vertices[self.boundary_facets])
        return points, bary, weights

    def cell_measure(self, metric: "MetricField") -> np.ndarray:
        """
        dσ weights at cell quadrature points: rule weight * coordinate volume * sqrt(det σ).
        """
        points, _, weights = self.cell_points()
        return weights[None, :] * self.cell_volumes[:, None] * metric.sqrt_det_sigma(points)

    def facet_measure(self, metric: "MetricField") -> np.ndarray:
        """dℓ weights at facet quadrature points, lengths taken in σ."""
        points, _, weights = self.facet_points()
        if self.dim == 1:
            return np.ones(points.shape[:2])
        p = self.vertices[self.boundary_facets]
        t = p[:, 1] - p[:, 0]
        sigma = metric.sigma(points)
        length = np.sqrt(np.einsum("fi,fqij,fj->fq", t, sigma, t))
        return weights[None, :] * length

    def conormals(self, metric: "MetricField", points: np.ndarray = None) -> np.ndarray:
        """
        Inward σ-unit conormal ν at facet quadrature points (or at `points`,
        shape (facets, q, dim)).
        """
        if points is None:
            points, _, _ = self.facet_points()
        n = np.broadcast_to(self.facet_normals[:, None, :], points.shape)
        sigma_inv = metric.sigma_inv(points)
        raised = np.einsum("fqij,fqj->fqi", sigma_inv, n)
        return raised / np.sqrt((raised * n).sum(axis=-1))[..., None]

    def area(self, metric: "MetricField") -> float:
        return float(self.cell_measure(metric).sum())

    def lumped_areas(self, metric: "MetricField") -> np.ndarray:
        """∫ φ_a dσ for every vertex basis function."""
        _, bary, _ = self.cell_points()
        local = self.cell_measure(metric) @ bary
        return np.bincount(self.cells.ravel(), weights=local.ravel(), minlength=self.n_vertices)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """
    Piecewise-linear field given by its vertex values.
    """

    mesh: Mesh
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if len(values) != self.mesh.n_vertices:
            raise InvalidInput(
                f"{len(values)} values given for a mesh with {self.mesh.n_vertices} vertices"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInput("field values must be finite")
        object.__setattr__(self, "values", _frozen(values, float))

    @classmethod
    def zeros(cls, mesh: Mesh) -> "ScalarField":
        return cls(mesh, np.zeros(mesh.n_vertices))

    def translate(self, c: float) -> "ScalarField":
        return ScalarField(self.mesh, self.values + c)

    def cell_gradients(self) -> np.ndarray:
        """Coordinate gradient ∂u on each cell, shape (cells, dim)."""
        return np.einsum("ci,cid->cd", self.values[self.mesh.cells], self.mesh.cell_gradients)

    def vertex_gradients(self) -> np.ndarray:
        """Volume-weighted average of the gradients of the cells around each vertex."""
        mesh = self.mesh
        g = self.cell_gradients() * mesh.cell_volumes[:, None]
        out = np.zeros((mesh.n_vertices, mesh.dim))
        for d in range(mesh.dim):
            out[:, d] = np.bincount(
                mesh.cells.ravel(), weights=np.repeat(g[:, d], mesh.dim + 1), minlength=mesh.n_vertices
            )
        weight = np.bincount(
            mesh.cells.ravel(), weights=np.repeat(mesh.cell_volumes, mesh.dim + 1), minlength=mesh.n_vertices
        )
        return out / weight[:, None]

    def at_cell_points(self, bary: np.ndarray) -> np.ndarray:
        return self.values[self.mesh.cells] @ bary.T

    def at_facet_points(self, bary: np.ndarray) -> np.ndarray:
        return self.values[self.mesh.boundary_facets] @ bary.T
