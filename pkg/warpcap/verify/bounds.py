"""
Height and gradient certificates for a converged solution.
"""
import numpy as np

from warpcap.errors import PreconditionError
from warpcap.geometry.frame import slope_from
from warpcap.geometry.metric import MetricField
from warpcap.mesh.distance import boundary_distance_field, geodesic_distance_field
from warpcap.mesh.mesh import Mesh, ScalarField
from warpcap.problem.capillary import CapillaryProblem
from warpcap.problem.validation import ValidationReport, height_bound
from warpcap.verify.certificates import BOUND, STABILITY, Certificate, certificate, single_resolution

HEIGHT_TOLERANCE_FACTOR = 10.0


def vertex_slopes(u: ScalarField, metric: MetricField) -> np.ndarray:
    """W at every vertex from the volume-averaged vertex gradients."""
    x = u.mesh.vertices
    return slope_from(metric.gamma(x), metric.sigma_inv(x), u.vertex_gradients())


def cell_slopes(u: ScalarField, metric: MetricField) -> np.ndarray:
    """W at every cell quadrature point; exact for the piecewise-linear field."""
    points, _, _ = u.mesh.cell_points()
    g = np.broadcast_to(u.cell_gradients()[:, None, :], points.shape)
    return slope_from(metric.gamma(points), metric.sigma_inv(points), g)


def check_height(
    u: ScalarField,
    problem: CapillaryProblem,
    metric: MetricField,
    mesh: Mesh,
    report: ValidationReport = None,
) -> Certificate:
    """
    max |u| against the a-priori height bound, with a 10 h² allowance.
    Not applicable when μ < 0 or β ≤ 0.
    """
    observed = float(np.max(np.abs(u.values)))
    tolerance = HEIGHT_TOLERANCE_FACTOR * mesh.h**2
    try:
        hb = height_bound(problem, metric, mesh, report)
    except PreconditionError as e:
        return certificate(
            "height", BOUND, np.nan, observed, tolerance, h=mesh.h, margin=np.nan,
            applicable=False, reason=str(e),
        )
    return certificate(
        "height",
        BOUND,
        hb.bound,
        observed,
        tolerance,
        h=mesh.h,
        applicable=hb.mu >= 0,
        mu=hb.mu,
        beta=hb.beta,
        ratio=hb.ratio,
    )


def interior_gradient_certificate(
    u: ScalarField, metric: MetricField, mesh: Mesh, x0: int, R: float
) -> Certificate:
    """
    Q = max over vertices with d(z) < R of W(z)(R² − d(z)²)/R², d the
    geodesic distance to x0. The interior estimate claims Q stays bounded, so
    the certificate tracks its stability under refinement.
    """
    if not R > 0:
        raise PreconditionError(f"ball radius must be positive, got {R}")
    d = geodesic_distance_field(mesh, metric, x0).values
    touching = mesh.boundary_vertices[d[mesh.boundary_vertices] < R]
    if len(touching):
        raise PreconditionError(
            f"ball of radius {R} around vertex {x0} reaches the boundary at vertex {touching[0]}"
        )
    inside = d < R
    W = vertex_slopes(u, metric)
    Q = float(np.max(W[inside] * (R**2 - d[inside] ** 2) / R**2))
    return single_resolution(
        "interior_gradient", STABILITY, Q, mesh.h, center=int(x0), radius=float(R),
        vertices=int(inside.sum()),
    )


def boundary_gradient_certificate(u: ScalarField, metric: MetricField, mesh: Mesh) -> Certificate:
    """
    sup W over the closed domain, with the d_Γ·W profile maximum alongside.
    """
    sup_W = float(np.max(cell_slopes(u, metric)))
    d_gamma = boundary_distance_field(mesh, metric).values
    profile = float(np.max(d_gamma * vertex_slopes(u, metric)))
    return single_resolution(
        "boundary_gradient", STABILITY, sup_W, mesh.h, distance_weighted_slope=profile
    )


def interior_ball(mesh: Mesh, metric: MetricField, fraction: float = 0.5):
    """
    Default ball for the interior certificate: the vertex farthest from Γ
    and a radius of `fraction` times its distance to Γ.
    """
    d_gamma = boundary_distance_field(mesh, metric).values
    x0 = int(np.argmax(d_gamma))
    return x0, fraction * float(d_gamma[x0])
