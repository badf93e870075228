import numpy as np

from warpcap.geometry.curvature import mean_curvature_field
from warpcap.geometry.frame import contact_angle
from warpcap.geometry.metric import MetricField
from warpcap.mesh.mesh import Mesh, ScalarField
from warpcap.problem.capillary import CapillaryProblem
from warpcap.verify.certificates import DECAY, Certificate, single_resolution


def contact_angle_defect(
    u: ScalarField, tau: float, problem: CapillaryProblem, metric: MetricField, mesh: Mesh
) -> np.ndarray:
    """
    ⟨N, ν⟩ − τΦ at every facet quadrature point, shape (facets, q). The
    gradient is that of the cell owning the facet.
    """
    points, bary, _ = mesh.facet_points()
    g = u.cell_gradients()[mesh.facet_cells]
    g = np.broadcast_to(g[:, None, :], points.shape)
    nu = mesh.conormals(metric, points)
    angle = contact_angle(metric, points, g, nu)
    return angle - tau * problem.phi_at(points, u.at_facet_points(bary))


def contact_angle_residual(
    u: ScalarField, tau: float, problem: CapillaryProblem, metric: MetricField, mesh: Mesh
) -> Certificate:
    observed = float(np.max(np.abs(contact_angle_defect(u, tau, problem, metric, mesh))))
    return single_resolution("contact_angle", DECAY, observed, mesh.h, tau=float(tau))


def strong_form_residual(
    u: ScalarField, tau: float, problem: CapillaryProblem, metric: MetricField, mesh: Mesh
) -> Certificate:
    """
    max over interior vertices of |nH(u) − τΨ(x, u)| with patch-recovered
    derivatives; vertices with degenerate stencils are skipped and counted.
    """
    interior = np.flatnonzero(~mesh.is_boundary_vertex)
    curvature, skipped = mean_curvature_field(metric, u, interior)
    usable = np.isfinite(curvature)
    x = mesh.vertices[interior[usable]]
    defect = curvature[usable] - tau * problem.psi_at(x, u.values[interior[usable]])
    observed = float(np.max(np.abs(defect))) if len(defect) else 0.0
    return single_resolution(
        "strong_form", DECAY, observed, mesh.h, tau=float(tau), skipped=int(skipped),
        checked=int(usable.sum()),
    )
