"""
Manufactured solutions: data (Ψ, Φ) for which a chosen u_exact solves the
capillary problem at τ = 1.
"""
import logging
from typing import Union

import numpy as np
import sympy as sp

from warpcap.cli.expression import S, X1, X2, Expression, parse_expression
from warpcap.errors import InvalidInput, ManufacturedProblemInvalid
from warpcap.geometry.metric import MetricField
from warpcap.mesh.mesh import Mesh, ScalarField
from warpcap.problem.capillary import CapillaryProblem
from warpcap.problem.validation import boundary_samples
from warpcap.utils.records import record

_logger = logging.getLogger(__name__)

DEFAULT_KAPPA0 = 1.0


def inward_normal_extension(mesh: Mesh) -> sp.Matrix:
    """
    A coordinate covector field that equals the inward unit normal of the
    domain on Γ, as a sympy column in x1 (and x2).
    """
    kind, *params = mesh.shape
    r = sp.sqrt(X1**2 + X2**2)
    if kind == "interval":
        a, b = params
        return sp.Matrix([(a + b - 2 * X1) / (b - a)])
    if kind == "disk":
        (radius,) = params
        return sp.Matrix([-X1 / radius, -X2 / radius])
    if kind == "annulus":
        inner, outer = params
        # −x/r on the outer circle, +x/r on the inner one
        factor = -(2 * r - inner - outer) / ((outer - inner) * r)
        return sp.Matrix([factor * X1, factor * X2])
    raise ManufacturedProblemInvalid(
        f"manufactured angle data need a generated mesh shape, got '{kind}'"
    )


def symbolic_mean_curvature(metric: MetricField, u: sp.Expr) -> sp.Expr:
    """nH = (√γ/√det σ) ∂_i(√det σ γ^{-1/2} σ^{ij} ∂_j u / W) in closed form."""
    gamma, sigma = metric.symbolic()
    coords = [X1, X2][: metric.dim]
    grad = sp.Matrix([sp.diff(u, c) for c in coords])
    sigma_inv = sigma.inv()
    raised = sigma_inv * grad
    W = sp.sqrt(gamma + (grad.T * raised)[0, 0])
    sqrt_det = sp.sqrt(sigma.det())
    weight = sqrt_det / sp.sqrt(gamma)
    divergence = sum(sp.diff(weight * raised[i] / W, c) for i, c in enumerate(coords))
    return sp.sqrt(gamma) / sqrt_det * divergence


def symbolic_contact_angle(metric: MetricField, u: sp.Expr, normal: sp.Matrix) -> sp.Expr:
    """⟨N, ν⟩ = −∂u·σ^{-1}n / (W sqrt(n·σ^{-1}n)) for the covector field n."""
    gamma, sigma = metric.symbolic()
    coords = [X1, X2][: metric.dim]
    grad = sp.Matrix([sp.diff(u, c) for c in coords])
    sigma_inv = sigma.inv()
    W = sp.sqrt(gamma + (grad.T * sigma_inv * grad)[0, 0])
    raised_normal = sigma_inv * normal
    length = sp.sqrt((normal.T * raised_normal)[0, 0])
    return -(grad.T * raised_normal)[0, 0] / (W * length)


def mms_manufacture(
    metric: MetricField,
    mesh: Mesh,
    u_exact: Union[Expression, str],
    kappa0: float = DEFAULT_KAPPA0,
) -> CapillaryProblem:
    """
    Ψ(x, s) = nH[u_exact](x) + κ₀(s − u_exact(x)) and Φ = ⟨N, ν⟩ of u_exact
    on Γ, so that u_exact solves the problem at τ = 1.
    """
    if not kappa0 > 0:
        raise ManufacturedProblemInvalid(f"kappa0 must be positive, got {kappa0}")
    if isinstance(u_exact, str):
        u_exact = parse_expression(u_exact)
    if u_exact.depends_on("s"):
        raise ManufacturedProblemInvalid("u_exact must be a function of x only")
    u = u_exact.explicit()
    if metric.dim == 1:
        u = u.subs(X2, 0)
    curvature = symbolic_mean_curvature(metric, u)
    psi = Expression(
        curvature + sp.nsimplify(kappa0) * (S - u),
        text=f"nH[{u_exact.text}] + {kappa0!r}*(s - ({u_exact.text}))",
        guards=u_exact.guards,
    )
    phi = Expression(
        symbolic_contact_angle(metric, u, inward_normal_extension(mesh)),
        text=f"<N,nu>[{u_exact.text}]",
        guards=u_exact.guards,
    )
    points = boundary_samples(mesh)
    try:
        values = phi.evaluate(points)
    except InvalidInput as e:
        raise ManufacturedProblemInvalid(f"angle data cannot be evaluated on Γ: {e}") from e
    worst = float(np.max(np.abs(values)))
    if worst >= 1:
        raise ManufacturedProblemInvalid(f"manufactured |Φ| reaches {worst} on Γ, must stay below 1")
    _logger.info(record("mms_manufactured", u_exact=u_exact.text, max_abs_phi=worst, kappa0=kappa0))
    return CapillaryProblem(psi, phi, dpsi_ds=Expression.constant(kappa0), name="mms")


def interpolate(mesh: Mesh, expression: Union[Expression, str]) -> ScalarField:
    if isinstance(expression, str):
        expression = parse_expression(expression)
    return ScalarField(mesh, expression.evaluate(mesh.vertices))


def max_error(u: ScalarField, u_exact: Union[Expression, str]) -> float:
    """Nodal L∞ error against the exact solution."""
    return float(np.max(np.abs(u.values - interpolate(u.mesh, u_exact).values)))
