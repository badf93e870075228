from dataclasses import dataclass

import numpy as np

from warpcap.errors import InvalidInput
from warpcap.geometry.metric import MetricField


def _finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise InvalidInput("point and gradient must be finite")


def slope_from(gamma: np.ndarray, sigma_inv: np.ndarray, grad_u: np.ndarray) -> np.ndarray:
    """W = sqrt(γ + σ^{ij} ∂_i u ∂_j u) from already evaluated metric data."""
    norm_sq = np.einsum("...i,...ij,...j->...", grad_u, sigma_inv, grad_u)
    return np.sqrt(gamma + norm_sq)


def slope_factor(metric: MetricField, x, grad_u) -> np.ndarray:
    """
    Slope factor W of the Killing graph; W ≥ √γ with equality iff ∂u = 0.
    """
    x = np.asarray(x, dtype=float)
    grad_u = np.asarray(grad_u, dtype=float)
    _finite(x, grad_u)
    return slope_from(metric.gamma(x), metric.sigma_inv(x), grad_u)


@dataclass(frozen=True)
class GraphPointFrame:
    """
    Unit normal of the graph at one point, in the (s, x) chart.

    `normal` holds (N^s, N^1[, N^2]) with N = (γ ∂_s − σ^{ij} ∂_j u ∂_i)/W.
    """

    x: np.ndarray
    grad_u: np.ndarray
    W: float
    gamma: float
    sigma: np.ndarray
    normal: np.ndarray

    def norm(self) -> float:
        """Ambient norm of N for the metric σ + (1/γ) ds²."""
        ns, nx = self.normal[0], self.normal[1:]
        return float(np.sqrt(ns**2 / self.gamma + nx @ self.sigma @ nx))

    def inner_killing(self) -> float:
        """⟨N, Y⟩ with Y = ∂_s; equals 1/W."""
        return float(self.normal[0] / self.gamma)

    def angle_with(self, nu) -> float:
        """⟨N, ν⟩ for a horizontal σ-unit vector ν."""
        nu = np.asarray(nu, dtype=float)
        value = float(self.normal[1:] @ self.sigma @ nu)
        return min(1.0, max(-1.0, value))


def graph_normal(metric: MetricField, x, grad_u) -> GraphPointFrame:
    x = np.asarray(x, dtype=float).reshape(metric.dim)
    grad_u = np.asarray(grad_u, dtype=float).reshape(metric.dim)
    _finite(x, grad_u)
    gamma = float(metric.gamma(x))
    sigma = metric.sigma(x)
    sigma_inv = metric.sigma_inv(x)
    W = float(slope_from(gamma, sigma_inv, grad_u))
    normal = np.concatenate([[gamma / W], -(sigma_inv @ grad_u) / W])
    return GraphPointFrame(x, grad_u, W, gamma, sigma, normal)


def contact_angle(metric: MetricField, x, grad_u, nu, tol: float = 1e-10) -> np.ndarray:
    """
    ⟨N, ν⟩ = −⟨∇u, ν⟩_σ / W at boundary points, ν the inward σ-unit conormal.

    Shapes broadcast: x, grad_u and nu are (..., dim).
    """
    x = np.asarray(x, dtype=float)
    grad_u = np.asarray(grad_u, dtype=float)
    nu = np.asarray(nu, dtype=float)
    _finite(x, grad_u, nu)
    sigma = metric.sigma(x)
    length = np.einsum("...i,...ij,...j->...", nu, sigma, nu)
    if np.any(np.abs(length - 1.0) > tol):
        raise InvalidInput("conormal is not σ-unit")
    W = slope_from(metric.gamma(x), metric.sigma_inv(x), grad_u)
    return -(grad_u * nu).sum(axis=-1) / W
