"""
Strong-form mean curvature of a discrete graph.

Gradients and Hessians at a vertex come from a quadratic least-squares fit
over its vertex patch; the divergence is then taken pointwise:

    nH = (√γ/√det σ) ∂_i(√det σ γ^{-1/2} σ^{ij} ∂_j u / W)
"""
import logging
from typing import Iterable, Tuple

import numpy as np

from warpcap.errors import DegenerateStencil, InvalidInput
from warpcap.geometry.frame import slope_from
from warpcap.geometry.metric import MetricField
from warpcap.mesh.mesh import Mesh, ScalarField

_logger = logging.getLogger(__name__)

# fewest patch points accepted before widening to the next ring
MIN_PATCH = {1: 3, 2: 8}
MAX_CONDITION = 1e10
LOCATE_SLACK = 1e-12


def _design(offsets: np.ndarray) -> np.ndarray:
    if offsets.shape[1] == 1:
        d = offsets[:, 0]
        return np.stack([np.ones_like(d), d, 0.5 * d**2], axis=1)
    dx, dy = offsets[:, 0], offsets[:, 1]
    return np.stack([np.ones_like(dx), dx, dy, 0.5 * dx**2, dx * dy, 0.5 * dy**2], axis=1)


def recover_derivatives(u: ScalarField, vertex: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gradient and Hessian of u at `vertex` from a local quadratic fit.
    """
    mesh = u.mesh
    dim = mesh.dim
    patch = mesh.patch(vertex, 1)
    if len(patch) < MIN_PATCH[dim]:
        patch = mesh.patch(vertex, 2)
    offsets = mesh.vertices[patch] - mesh.vertices[vertex]
    scale = np.abs(offsets).max()
    if scale == 0:
        raise DegenerateStencil(f"vertex {vertex} has an empty patch")
    A = _design(offsets / scale)
    unknowns = A.shape[1]
    if len(patch) < unknowns or np.linalg.matrix_rank(A) < unknowns:
        raise DegenerateStencil(f"patch of vertex {vertex} cannot determine a quadratic")
    if np.linalg.cond(A) > MAX_CONDITION:
        raise DegenerateStencil(f"patch of vertex {vertex} is ill conditioned")
    c, *_ = np.linalg.lstsq(A, u.values[patch], rcond=None)
    if dim == 1:
        return np.array([c[1]]) / scale, np.array([[c[2]]]) / scale**2
    gradient = c[1:3] / scale
    hessian = np.array([[c[3], c[4]], [c[4], c[5]]]) / scale**2
    return gradient, hessian


def weighted_flux(metric: MetricField, x: np.ndarray, grad_u: np.ndarray) -> np.ndarray:
    """F = √det σ γ^{-1/2} σ^{-1} ∂u / W."""
    gamma = metric.gamma(x)
    sigma_inv = metric.sigma_inv(x)
    W = slope_from(gamma, sigma_inv, grad_u)
    raised = np.einsum("...ij,...j->...i", sigma_inv, grad_u)
    return (metric.sqrt_det_sigma(x) / np.sqrt(gamma) / W)[..., None] * raised


def flux_sensitivity(metric: MetricField, x: np.ndarray, grad_u: np.ndarray) -> np.ndarray:
    """
    D = (σ^{-1} − (σ^{-1}∂u)(σ^{-1}∂u)ᵀ/W²)/W, the derivative of σ^{-1}∂u/W in ∂u.
    """
    gamma = metric.gamma(x)
    sigma_inv = metric.sigma_inv(x)
    W = slope_from(gamma, sigma_inv, grad_u)
    raised = np.einsum("...ij,...j->...i", sigma_inv, grad_u)
    outer = raised[..., :, None] * raised[..., None, :]
    return (sigma_inv - outer / (W**2)[..., None, None]) / W[..., None, None]


def curvature_from_jet(
    metric: MetricField, x: np.ndarray, grad_u: np.ndarray, hessian: np.ndarray, step: float = 1e-6
) -> float:
    """
    nH at x for a graph with the given gradient and Hessian there.
    """
    x = np.asarray(x, dtype=float)
    grad_u = np.asarray(grad_u, dtype=float)
    dim = len(x)
    weight = metric.sqrt_det_sigma(x) / np.sqrt(metric.gamma(x))
    explicit = 0.0
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = step * max(1.0, abs(x[i]))
        plus = weighted_flux(metric, x + e, grad_u)[i]
        minus = weighted_flux(metric, x - e, grad_u)[i]
        explicit += (plus - minus) / (2 * e[i])
    implicit = weight * np.trace(flux_sensitivity(metric, x, grad_u) @ hessian)
    return float((explicit + implicit) / weight)


def mean_curvature_at_vertex(metric: MetricField, u: ScalarField, vertex: int) -> float:
    """
    Left-hand side of the capillary equation at a mesh vertex, from the
    patch-recovered jet of u. Raises DegenerateStencil for unusable patches.
    """
    gradient, hessian = recover_derivatives(u, vertex)
    return curvature_from_jet(metric, u.mesh.vertices[vertex], gradient, hessian)


def _containing_cell(mesh: Mesh, x: np.ndarray) -> int:
    corners = mesh.vertices[mesh.cells]
    if mesh.dim == 1:
        low = corners[:, :, 0].min(axis=1)
        high = corners[:, :, 0].max(axis=1)
        inside = (low - LOCATE_SLACK <= x[0]) & (x[0] <= high + LOCATE_SLACK)
    else:
        T = np.stack([corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]], axis=2)
        lam = np.linalg.solve(T, (x - corners[:, 0])[..., None])[..., 0]
        bary = np.concatenate([1 - lam.sum(axis=1, keepdims=True), lam], axis=1)
        inside = bary.min(axis=1) >= -LOCATE_SLACK
    cells = np.flatnonzero(inside)
    if len(cells) == 0:
        raise InvalidInput(f"point {x.tolist()} lies outside the mesh")
    return int(cells[0])


def mean_curvature_strong(metric: MetricField, u: ScalarField, x) -> float:
    """
    Left-hand side of the capillary equation at a point of Ω. The quadratic
    recovered around the closest corner of the cell holding x is
    evaluated at x itself.
    """
    mesh = u.mesh
    x = np.asarray(x, dtype=float).reshape(mesh.dim)
    corners = mesh.cells[_containing_cell(mesh, x)]
    vertex = int(corners[np.argmin(np.linalg.norm(mesh.vertices[corners] - x, axis=1))])
    gradient, hessian = recover_derivatives(u, vertex)
    gradient = gradient + hessian @ (x - mesh.vertices[vertex])
    return curvature_from_jet(metric, x, gradient, hessian)


def mean_curvature_field(
    metric: MetricField, u: ScalarField, vertices: Iterable[int] = None
) -> Tuple[np.ndarray, int]:
    """
    nH at each requested vertex (all interior vertices by default). Vertices
    with degenerate stencils come back as nan; the second value counts them.
    """
    mesh = u.mesh
    if vertices is None:
        vertices = np.flatnonzero(~mesh.is_boundary_vertex)
    vertices = np.asarray(list(vertices), dtype=np.int64)
    out = np.full(len(vertices), np.nan)
    skipped = 0
    for k, v in enumerate(vertices):
        try:
            out[k] = mean_curvature_at_vertex(metric, u, int(v))
        except DegenerateStencil as e:
            _logger.debug("skipping vertex %d: %s", v, e)
            skipped += 1
    return out, skipped
