from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import dijkstra

from warpcap.errors import InvalidInput, UnreachableVertex
from warpcap.mesh.mesh import Mesh, ScalarField

if TYPE_CHECKING:
    from warpcap.geometry.metric import MetricField


def edge_lengths(mesh: Mesh, metric: "MetricField") -> np.ndarray:
    """
    σ-length of every mesh edge, with σ frozen at the edge midpoint.
    """
    a = mesh.vertices[mesh.edges[:, 0]]
    b = mesh.vertices[mesh.edges[:, 1]]
    t = b - a
    sigma = metric.sigma(0.5 * (a + b))
    return np.sqrt(np.einsum("ei,eij,ej->e", t, sigma, t))


def _edge_graph(mesh: Mesh, metric: "MetricField") -> scipy.sparse.csr_matrix:
    e = mesh.edges
    w = edge_lengths(mesh, metric)
    n = mesh.n_vertices
    return scipy.sparse.coo_matrix((w, (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()


def geodesic_distance_field(mesh: Mesh, metric: "MetricField", x0: int) -> ScalarField:
    """
    Shortest-path distance from vertex `x0` along mesh edges measured in σ.
    """
    if not 0 <= int(x0) < mesh.n_vertices:
        raise InvalidInput(f"vertex {x0} is not a vertex of the mesh")
    d = dijkstra(_edge_graph(mesh, metric), directed=False, indices=int(x0))
    if not np.all(np.isfinite(d)):
        missing = int(np.flatnonzero(~np.isfinite(d))[0])
        raise UnreachableVertex(f"vertex {missing} cannot be reached from vertex {x0}")
    return ScalarField(mesh, d)


def boundary_distance_field(mesh: Mesh, metric: "MetricField") -> ScalarField:
    """
    Graph distance of every vertex to the nearest boundary vertex; exactly 0 on Γ.
    """
    sources = mesh.boundary_vertices
    if len(sources) == 0:
        raise InvalidInput("mesh has no boundary")
    d = dijkstra(_edge_graph(mesh, metric), directed=False, indices=sources, min_only=True)
    d[sources] = 0.0
    return ScalarField(mesh, d)
