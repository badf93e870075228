"""
Finite-difference check of the first-order variation of the vertical
separation under a normal perturbation of the graph:

    ∂s/∂τ at τ = 0 equals ⟨ζN, N⟩ W = ζW.

Graph points (u(x), x) move to (u + τζγ/W, x − τζσ^{-1}∂u/W); the displaced
surface is re-read as a function over the original vertices and the
separation s(x, τ) is compared with τζW.
"""
import math
from typing import Sequence

import numpy as np

from warpcap.errors import InvalidInput, PreconditionError
from warpcap.geometry.frame import slope_from
from warpcap.geometry.metric import MetricField
from warpcap.mesh.mesh import Mesh, ScalarField
from warpcap.verify.certificates import ORDER, Certificate, certificate

ORDER_TOLERANCE = 0.2
BARYCENTRIC_SLACK = 1e-12
EXACT = 1e-10


def bump_field(mesh: Mesh, center, radius: float) -> ScalarField:
    """
    ζ = (1 − |x − c|²/R²)² inside the ball, zero outside and on every vertex
    whose patch touches Γ.
    """
    if not radius > 0:
        raise InvalidInput(f"bump radius must be positive, got {radius}")
    center = np.asarray(center, dtype=float).reshape(mesh.dim)
    rho2 = ((mesh.vertices - center) ** 2).sum(axis=1) / radius**2
    zeta = np.where(rho2 < 1, (1 - rho2) ** 2, 0.0)
    zeta[_near_boundary(mesh)] = 0.0
    return ScalarField(mesh, zeta)


def _near_boundary(mesh: Mesh) -> np.ndarray:
    near = mesh.is_boundary_vertex.copy()
    a = mesh.adjacency
    near |= (a @ mesh.is_boundary_vertex.astype(float)) > 0
    return near


def _barycentric(corners: np.ndarray, point: np.ndarray) -> np.ndarray:
    if corners.shape[1] == 1:
        t = (point[0] - corners[0, 0]) / (corners[1, 0] - corners[0, 0])
        return np.array([1 - t, t])
    T = (corners[1:] - corners[0]).T
    lam = np.linalg.solve(T, point - corners[0])
    return np.concatenate([[1 - lam.sum()], lam])


def _orientation(corners: np.ndarray) -> float:
    if corners.shape[1] == 1:
        return corners[1, 0] - corners[0, 0]
    e1, e2 = corners[1] - corners[0], corners[2] - corners[0]
    return e1[0] * e2[1] - e1[1] * e2[0]


def displaced_separation(
    u: ScalarField, metric: MetricField, zeta: ScalarField, tau: float
) -> np.ndarray:
    """
    s(x_v, τ) at every vertex: the displaced surface evaluated over the
    original vertex minus u(x_v).
    """
    mesh = u.mesh
    x = mesh.vertices
    gamma = metric.gamma(x)
    sigma_inv = metric.sigma_inv(x)
    g = u.vertex_gradients()
    W = slope_from(gamma, sigma_inv, g)
    z = zeta.values
    heights = u.values + tau * z * gamma / W
    moved = x - (tau * z / W)[:, None] * np.einsum("vij,vj->vi", sigma_inv, g)

    separation = np.zeros(mesh.n_vertices)
    active = np.flatnonzero(np.abs(moved - x).max(axis=1) + np.abs(heights - u.values) > 0)
    for v in active:
        found = False
        for rings in (1, 2):
            neighbourhood = set(mesh.patch(v, rings - 1).tolist())
            cells = np.unique(np.concatenate([mesh.vertex_cells[w] for w in neighbourhood]))
            for c in cells:
                corners = moved[mesh.cells[c]]
                if _orientation(corners) <= 0:
                    raise PreconditionError(
                        f"displaced cell {c} folds at tau={tau}; use a smaller tau"
                    )
                lam = _barycentric(corners, x[v])
                if lam.min() >= -BARYCENTRIC_SLACK:
                    separation[v] = lam @ heights[mesh.cells[c]] - u.values[v]
                    found = True
                    break
            if found:
                break
        if not found:
            raise PreconditionError(
                f"vertex {v} left the displaced surface at tau={tau}; use a smaller tau"
            )
    return separation


def lemma1i_check(
    u: ScalarField,
    metric: MetricField,
    mesh: Mesh,
    zeta: ScalarField,
    taus: Sequence[float] = (1e-2, 5e-3, 2.5e-3),
    floor_tolerance: float = None,
) -> Certificate:
    """
    Observed order in τ of s(·, τ)/τ → ζW from three geometric τ values.

    The order is log(‖q₁ − q₂‖/‖q₂ − q₃‖)/log(τ₁/τ₂) with q = s/τ, which is
    blind to the τ-independent discretization floor ‖q₃ − ζW‖∞; the floor is
    checked separately against `floor_tolerance` (10 h max(1, ‖ζW‖∞) by default).
    """
    taus = sorted((float(t) for t in taus), reverse=True)
    if len(taus) != 3 or taus[-1] <= 0:
        raise InvalidInput("lemma check needs three positive tau values")
    if np.any(zeta.values[_near_boundary(mesh)] != 0):
        raise PreconditionError("ζ must vanish on every vertex whose patch touches Γ")
    x = mesh.vertices
    W = slope_from(metric.gamma(x), metric.sigma_inv(x), u.vertex_gradients())
    target = zeta.values * W
    scale = max(1.0, float(np.max(np.abs(target))))
    if floor_tolerance is None:
        floor_tolerance = 10 * mesh.h * scale
    q = [displaced_separation(u, metric, zeta, t) / t for t in taus]
    errors = [float(np.max(np.abs(qk - target))) for qk in q]
    first = float(np.max(np.abs(q[0] - q[1])))
    second = float(np.max(np.abs(q[1] - q[2])))
    floor = errors[-1]
    details = dict(taus=taus, errors=errors, floor=floor, floor_tolerance=floor_tolerance)
    if first <= EXACT * scale and second <= EXACT * scale:
        return certificate(
            "lemma1i", ORDER, 1.0, 1.0, ORDER_TOLERANCE, h=mesh.h, margin=0.0,
            exact=True, floor_ok=floor <= floor_tolerance, **details,
        )
    order = math.log(first / second) / math.log(taus[0] / taus[1]) if second > 0 else math.inf
    margin = -abs(order - 1.0)
    if floor > floor_tolerance:
        margin = -math.inf
    return certificate(
        "lemma1i", ORDER, 1.0, order, ORDER_TOLERANCE, h=mesh.h, margin=margin,
        exact=False, floor_ok=floor <= floor_tolerance, **details,
    )
