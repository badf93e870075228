"""
Piecewise-linear discretization of the capillary functional

    E[u] = ∫_Ω γ^{-1/2} W dσ + ∫_Ω γ^{-1/2} ∫_0^u τΨ(x, s) ds dσ
           − ∫_Γ γ^{-1/2} ∫_0^u τΦ(x, s) ds dℓ

and of its first and second variations. All integrals use the cell and facet
rules of `warpcap.mesh.quadrature`; contributions are reduced with bincount or
a COO→CSR conversion so the summation order is fixed.
"""
import functools
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.sparse
from scipy.integrate import quad_vec

from warpcap.errors import InvalidInput
from warpcap.geometry.metric import MetricField
from warpcap.mesh.mesh import Mesh, ScalarField
from warpcap.problem.capillary import CapillaryProblem

INNER_INTEGRAL_TOL = 1e-12

FieldLike = Union[ScalarField, np.ndarray]


@dataclass(frozen=True, eq=False)
class QuadratureGeometry:
    """Metric data frozen at the quadrature points of a mesh."""

    cell_points: np.ndarray
    cell_bary: np.ndarray
    # dσ weights divided by √γ
    cell_weights: np.ndarray
    gamma: np.ndarray
    sigma_inv: np.ndarray
    facet_points: np.ndarray
    facet_bary: np.ndarray
    # dℓ weights divided by √γ
    facet_weights: np.ndarray


@functools.lru_cache(maxsize=16)
def quadrature_geometry(mesh: Mesh, metric: MetricField) -> QuadratureGeometry:
    if mesh.dim != metric.dim:
        raise InvalidInput(
            f"mesh is {mesh.dim}-dimensional but the metric is {metric.dim}-dimensional"
        )
    points, bary, _ = mesh.cell_points()
    gamma = metric.gamma(points)
    fpoints, fbary, _ = mesh.facet_points()
    return QuadratureGeometry(
        cell_points=points,
        cell_bary=bary,
        cell_weights=mesh.cell_measure(metric) / np.sqrt(gamma),
        gamma=gamma,
        sigma_inv=metric.sigma_inv(points),
        facet_points=fpoints,
        facet_bary=fbary,
        facet_weights=mesh.facet_measure(metric) / np.sqrt(metric.gamma(fpoints)),
    )


def _values(u: FieldLike, mesh: Mesh) -> np.ndarray:
    if isinstance(u, ScalarField):
        if u.mesh is not mesh:
            raise InvalidInput("field lives on a different mesh")
        return u.values
    values = np.asarray(u, dtype=float).reshape(-1)
    if len(values) != mesh.n_vertices:
        raise InvalidInput(f"{len(values)} values given for {mesh.n_vertices} vertices")
    if not np.all(np.isfinite(values)):
        raise InvalidInput("field values must be finite")
    return values


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not 0.0 <= tau <= 1.0:
        raise InvalidInput(f"homotopy parameter must lie in [0, 1], got {tau}")
    return tau


def _slope(geo: QuadratureGeometry, mesh: Mesh, values: np.ndarray):
    g = np.einsum("ci,cid->cd", values[mesh.cells], mesh.cell_gradients)
    raised = np.einsum("cqij,cj->cqi", geo.sigma_inv, g)
    W = np.sqrt(geo.gamma + np.einsum("cqi,ci->cq", raised, g))
    return raised, W


def _gather(index: np.ndarray, local: np.ndarray, n: int) -> np.ndarray:
    return np.bincount(index.ravel(), weights=local.ravel(), minlength=n)


def residual(
    u: FieldLike, tau: float, problem: CapillaryProblem, metric: MetricField, mesh: Mesh
) -> np.ndarray:
    """
    R_a = ∫ γ^{-1/2}[⟨∇u, ∇φ_a⟩_σ/W + τΨ(x,u)φ_a] dσ − ∫_Γ γ^{-1/2} τΦ(x,u) φ_a dℓ.
    """
    tau = _check_tau(tau)
    values = _values(u, mesh)
    geo = quadrature_geometry(mesh, metric)
    raised, W = _slope(geo, mesh, values)
    local = np.einsum("cq,cqd,cad->ca", geo.cell_weights / W, raised, mesh.cell_gradients)
    out = _gather(mesh.cells, local, mesh.n_vertices)
    if tau == 0.0:
        return out
    uq = values[mesh.cells] @ geo.cell_bary.T
    psi = problem.psi_at(geo.cell_points, uq)
    out += tau * _gather(mesh.cells, (geo.cell_weights * psi) @ geo.cell_bary, mesh.n_vertices)
    uf = values[mesh.boundary_facets] @ geo.facet_bary.T
    phi = problem.phi_at(geo.facet_points, uf)
    out -= tau * _gather(
        mesh.boundary_facets, (geo.facet_weights * phi) @ geo.facet_bary, mesh.n_vertices
    )
    return out


def jacobian(
    u: FieldLike, tau: float, problem: CapillaryProblem, metric: MetricField, mesh: Mesh
) -> scipy.sparse.csr_matrix:
    """
    Derivative of `residual` in the nodal values; symmetric, with the pattern
    of the vertex adjacency graph.
    """
    tau = _check_tau(tau)
    values = _values(u, mesh)
    geo = quadrature_geometry(mesh, metric)
    raised, W = _slope(geo, mesh, values)
    D = (
        geo.sigma_inv - raised[..., :, None] * raised[..., None, :] / (W**2)[..., None, None]
    ) / W[..., None, None]
    G = mesh.cell_gradients
    local = np.einsum("cq,cqij,caj,cbi->cab", geo.cell_weights, D, G, G)
    n = mesh.n_vertices
    rows = [np.broadcast_to(mesh.cells[:, :, None], local.shape).ravel()]
    cols = [np.broadcast_to(mesh.cells[:, None, :], local.shape).ravel()]
    data = [local.ravel()]
    if tau != 0.0:
        B = geo.cell_bary
        uq = values[mesh.cells] @ B.T
        dpsi = problem.dpsi_at(geo.cell_points, uq)
        mass = tau * np.einsum("cq,qa,qb->cab", geo.cell_weights * dpsi, B, B)
        rows.append(np.broadcast_to(mesh.cells[:, :, None], mass.shape).ravel())
        cols.append(np.broadcast_to(mesh.cells[:, None, :], mass.shape).ravel())
        data.append(mass.ravel())
        if problem.phi_depends_on_s:
            F = geo.facet_bary
            uf = values[mesh.boundary_facets] @ F.T
            dphi = problem.dphi_at(geo.facet_points, uf)
            wall = -tau * np.einsum("fq,qa,qb->fab", geo.facet_weights * dphi, F, F)
            facets = mesh.boundary_facets
            rows.append(np.broadcast_to(facets[:, :, None], wall.shape).ravel())
            cols.append(np.broadcast_to(facets[:, None, :], wall.shape).ravel())
            data.append(wall.ravel())
    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return matrix.tocsr()


def _primitive(f, x: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """∫_0^upper f(x, s) ds pointwise, by adaptive vector quadrature."""
    shape = upper.shape

    def integrand(t):
        return (upper * f(x, t * upper)).ravel()

    value, _ = quad_vec(integrand, 0.0, 1.0, epsabs=INNER_INTEGRAL_TOL, epsrel=INNER_INTEGRAL_TOL)
    return np.asarray(value).reshape(shape)


def energy(
    u: FieldLike, tau: float, problem: CapillaryProblem, metric: MetricField, mesh: Mesh
) -> float:
    tau = _check_tau(tau)
    values = _values(u, mesh)
    geo = quadrature_geometry(mesh, metric)
    _, W = _slope(geo, mesh, values)
    total = float((geo.cell_weights * W).sum())
    if tau == 0.0:
        return total
    uq = values[mesh.cells] @ geo.cell_bary.T
    total += tau * float((geo.cell_weights * _primitive(problem.psi_at, geo.cell_points, uq)).sum())
    uf = values[mesh.boundary_facets] @ geo.facet_bary.T
    if problem.phi_depends_on_s:
        wetting = _primitive(problem.phi_at, geo.facet_points, uf)
    else:
        wetting = problem.phi_at(geo.facet_points, 0.0) * uf
    total -= tau * float((geo.facet_weights * wetting).sum())
    return total


@dataclass(frozen=True)
class AssembledSystem:
    residual: np.ndarray
    jacobian: scipy.sparse.csr_matrix
    energy: float
    tau: float


def assemble(
    u: FieldLike,
    tau: float,
    problem: CapillaryProblem,
    metric: MetricField,
    mesh: Mesh,
    with_energy: bool = True,
) -> AssembledSystem:
    return AssembledSystem(
        residual=residual(u, tau, problem, metric, mesh),
        jacobian=jacobian(u, tau, problem, metric, mesh),
        energy=energy(u, tau, problem, metric, mesh) if with_energy else float("nan"),
        tau=float(tau),
    )
