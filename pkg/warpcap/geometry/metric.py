"""
Leaf metric σ and warping γ = 1/|Y|² of the warped product P ×_{1/√γ} ℝ.

The ambient metric in the (s, x) chart is σ(x) + (1/γ(x)) ds². Neither σ nor
γ may depend on s.
"""
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import sympy as sp

from warpcap.cli.expression import X1, X2, Expression, parse_expression
from warpcap.errors import InvalidInput

PRESETS = ("euclidean", "product", "radial-warp", "custom-expression")

ExpressionLike = Union[Expression, str, float, int]


def as_expression(value: ExpressionLike) -> Expression:
    if isinstance(value, Expression):
        return value
    if isinstance(value, str):
        return parse_expression(value)
    return Expression.constant(float(value))


@dataclass(frozen=True, eq=False)
class MetricField:
    """
    Geometry of the warped product on a single chart of the leaf.

    `sigma` holds the independent components of σ: (σ11,) for dim 1 and
    (σ11, σ12, σ22) for dim 2. `gamma_gradient`, if given, replaces the
    symbolic derivative of γ and is checked by `check_metric`.
    """

    dim: int
    gamma_expression: Expression
    sigma_expressions: Tuple[Expression, ...]
    preset: str = "custom-expression"
    gamma_gradient: Optional[Tuple[Expression, ...]] = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InvalidInput(f"leaf dimension must be 1 or 2, got {self.dim}")
        if self.preset not in PRESETS:
            raise InvalidInput(f"unknown metric preset '{self.preset}', expected one of {PRESETS}")
        expected = 1 if self.dim == 1 else 3
        if len(self.sigma_expressions) != expected:
            raise InvalidInput(f"a {self.dim}-dimensional σ needs {expected} components")
        for e in (self.gamma_expression, *self.sigma_expressions):
            if e.depends_on("s"):
                raise InvalidInput(f"metric data '{e.text}' must not depend on s")
            if self.dim == 1 and X2 in e.tree.free_symbols:
                raise InvalidInput(f"metric data '{e.text}' uses x2 on a 1-dimensional leaf")
        gradient = self.gamma_gradient
        if gradient is None:
            gradient = tuple(
                self.gamma_expression.derivative(v) for v in ("x1", "x2")[: self.dim]
            )
        elif len(gradient) != self.dim:
            raise InvalidInput(f"γ gradient needs {self.dim} components")
        object.__setattr__(self, "_gradient", tuple(gradient))

    @property
    def is_euclidean(self) -> bool:
        return self.preset == "euclidean"

    def sigma(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            return self.sigma_expressions[0](x)[..., None, None]
        s11, s12, s22 = (e(x) for e in self.sigma_expressions)
        return np.stack([np.stack([s11, s12], -1), np.stack([s12, s22], -1)], -2)

    def sigma_inv(self, x) -> np.ndarray:
        sigma = self.sigma(x)
        if self.dim == 1:
            return 1.0 / sigma
        det = sigma[..., 0, 0] * sigma[..., 1, 1] - sigma[..., 0, 1] ** 2
        inv = np.empty_like(sigma)
        inv[..., 0, 0] = sigma[..., 1, 1] / det
        inv[..., 1, 1] = sigma[..., 0, 0] / det
        inv[..., 0, 1] = inv[..., 1, 0] = -sigma[..., 0, 1] / det
        return inv

    def det_sigma(self, x) -> np.ndarray:
        sigma = self.sigma(x)
        if self.dim == 1:
            return sigma[..., 0, 0]
        return sigma[..., 0, 0] * sigma[..., 1, 1] - sigma[..., 0, 1] ** 2

    def sqrt_det_sigma(self, x) -> np.ndarray:
        det = self.det_sigma(x)
        if np.any(det <= 0):
            raise InvalidInput("σ is not positive definite")
        return np.sqrt(det)

    def gamma(self, x) -> np.ndarray:
        return self.gamma_expression(np.asarray(x, dtype=float))

    def grad_gamma(self, x) -> np.ndarray:
        """
        Coordinate gradient of γ, shape (..., dim). Points where the symbolic
        derivative is not finite (r = 0 for radial data) fall back to central
        differences.
        """
        x = np.asarray(x, dtype=float)
        out = np.stack([g.evaluate(x, check=False) for g in self._gradient], axis=-1)
        bad = ~np.all(np.isfinite(out), axis=-1)
        if np.any(bad):
            out[bad] = central_gradient(self.gamma, x[bad])
        return out

    def symbolic(self) -> Tuple[sp.Expr, sp.Matrix]:
        """
        γ and σ as sympy expressions in x1 (and x2), r eliminated.
        """
        gamma = self.gamma_expression.explicit()
        if self.dim == 1:
            sigma = sp.Matrix([[self.sigma_expressions[0].explicit()]])
            return gamma.subs(X2, 0), sigma.subs(X2, 0)
        s11, s12, s22 = (e.explicit() for e in self.sigma_expressions)
        return gamma, sp.Matrix([[s11, s12], [s12, s22]])


def central_gradient(f, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar point function."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape)
    scale = np.maximum(1.0, np.abs(x))
    for i in range(x.shape[-1]):
        e = np.zeros(x.shape)
        e[..., i] = step * scale[..., i]
        out[..., i] = (f(x + e) - f(x - e)) / (2 * e[..., i])
    return out


def euclidean_metric(dim: int = 2) -> MetricField:
    one, zero = Expression.constant(1.0), Expression.constant(0.0)
    sigma = (one,) if dim == 1 else (one, zero, one)
    return MetricField(dim, one, sigma, preset="euclidean")


def product_metric(sigma: Tuple[ExpressionLike, ...], dim: int = 2) -> MetricField:
    """P × ℝ with leaf metric σ and γ ≡ 1."""
    return MetricField(
        dim,
        Expression.constant(1.0),
        tuple(as_expression(e) for e in sigma),
        preset="product",
    )


def radial_warp_metric(conformal: ExpressionLike, gamma: ExpressionLike, dim: int = 2) -> MetricField:
    """
    σ = λ(r)² times the identity and γ given as an expression, typically in r.
    """
    lam = as_expression(conformal)
    square = Expression(lam.tree**2, text=f"({lam.text})^2", guards=lam.guards)
    zero = Expression.constant(0.0)
    sigma = (square,) if dim == 1 else (square, zero, square)
    return MetricField(dim, as_expression(gamma), sigma, preset="radial-warp")


def custom_metric(
    gamma: ExpressionLike,
    sigma: Tuple[ExpressionLike, ...] = None,
    dim: int = 2,
    gamma_gradient: Tuple[ExpressionLike, ...] = None,
) -> MetricField:
    if sigma is None:
        sigma = (1.0,) if dim == 1 else (1.0, 0.0, 1.0)
    return MetricField(
        dim,
        as_expression(gamma),
        tuple(as_expression(e) for e in sigma),
        preset="custom-expression",
        gamma_gradient=(
            None if gamma_gradient is None else tuple(as_expression(e) for e in gamma_gradient)
        ),
    )


def check_metric(metric: MetricField, points: np.ndarray, rel_tol: float = 1e-6) -> None:
    """
    Raise InvalidInput unless σ is positive definite, γ is positive and
    grad_gamma agrees with central differences of γ at every point.
    """
    points = np.asarray(points, dtype=float).reshape(-1, metric.dim)
    eigenvalues = np.linalg.eigvalsh(metric.sigma(points))
    if not np.all(eigenvalues > 0):
        worst = int(np.argmin(eigenvalues.min(axis=-1)))
        raise InvalidInput(f"σ is not positive definite at {points[worst].tolist()}")
    gamma = metric.gamma(points)
    if not np.all(gamma > 0):
        worst = int(np.argmin(gamma))
        raise InvalidInput(f"γ = {gamma[worst]} is not positive at {points[worst].tolist()}")
    # r = 0 is where the radial presets hand over to finite differences anyway
    away = np.linalg.norm(points, axis=1) > 1e-4
    if not np.any(away):
        return
    analytic = metric.grad_gamma(points[away])
    numeric = central_gradient(metric.gamma, points[away])
    scale = np.maximum(np.abs(gamma[away]), 1.0)[:, None]
    error = np.abs(analytic - numeric) / scale
    if np.any(error > rel_tol):
        worst = int(np.argmax(error.max(axis=1)))
        raise InvalidInput(
            f"γ gradient disagrees with finite differences at {points[away][worst].tolist()}"
        )


def arc_length_height(u: np.ndarray, metric: MetricField, x: np.ndarray) -> np.ndarray:
    """
    Height of the graph point (u, x) above the leaf measured by arc length
    along the flow line of Y, which is u/√γ.
    """
    return np.asarray(u, dtype=float) / np.sqrt(metric.gamma(x))
