import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from warpcap.errors import InvalidInput, PreconditionError
from warpcap.geometry.metric import MetricField, central_gradient
from warpcap.mesh.mesh import Mesh
from warpcap.problem.capillary import CapillaryProblem
from warpcap.utils.records import record

_logger = logging.getLogger(__name__)

S_SAMPLES = 41
DERIVATIVE_TOLERANCE = 1e-6
SIGN_TOLERANCE = 1e-14


@dataclass(frozen=True)
class ConditionCheck:
    condition: str
    description: str
    passed: bool
    value: float
    margin: float


@dataclass(frozen=True)
class ValidationReport:
    checks: Tuple[ConditionCheck, ...]
    beta: float
    mu: float
    beta_prime: float
    C_psi: float
    C_phi: float
    s_range: Tuple[float, float]
    warnings: Tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> List[ConditionCheck]:
        return [c for c in self.checks if not c.passed]

    def check(self, condition: str) -> ConditionCheck:
        return next(c for c in self.checks if c.condition == condition)


def interior_samples(mesh: Mesh) -> np.ndarray:
    points, _, _ = mesh.cell_points()
    return np.concatenate([points.reshape(-1, mesh.dim), mesh.vertices])


def boundary_samples(mesh: Mesh) -> np.ndarray:
    points, _, _ = mesh.facet_points()
    return np.concatenate(
        [points.reshape(-1, mesh.dim), mesh.vertices[mesh.boundary_vertices]]
    )


def s_grid(s_range: Tuple[float, float], n: int = S_SAMPLES) -> np.ndarray:
    lo, hi = float(s_range[0]), float(s_range[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
        raise InvalidInput(f"s range must be a finite interval, got {s_range}")
    return np.unique(np.concatenate([np.linspace(lo, hi, n), [0.0] if lo <= 0 <= hi else []]))


def _ambient_gradient_norm(f, metric: MetricField, x: np.ndarray, s: float, df_ds: np.ndarray):
    """|∇̄f| for the metric σ + (1/γ) ds²: sqrt(σ^{ij} ∂_i f ∂_j f + γ (∂_s f)²)."""
    grad = central_gradient(lambda y: f(y, s), x, step=1e-5)
    horizontal = np.einsum("...i,...ij,...j->...", grad, metric.sigma_inv(x), grad)
    return np.sqrt(horizontal + metric.gamma(x) * df_ds**2)


def _c2_size(f, x: np.ndarray, s: float, step: float = 1e-4) -> np.ndarray:
    """max(|f|, |first derivatives|, |second derivatives|) in (x, s) by central differences."""
    dim = x.shape[-1]
    y = np.concatenate([x, np.full(x.shape[:-1] + (1,), s)], axis=-1)

    def g(z):
        return f(z[..., :dim], z[..., dim])

    size = np.abs(g(y))
    for i in range(dim + 1):
        ei = np.zeros(dim + 1)
        ei[i] = step
        size = np.maximum(size, np.abs((g(y + ei) - g(y - ei)) / (2 * step)))
        for j in range(i, dim + 1):
            ej = np.zeros(dim + 1)
            ej[j] = step
            second = (g(y + ei + ej) - g(y + ei - ej) - g(y - ei + ej) + g(y - ei - ej)) / (
                4 * step**2
            )
            size = np.maximum(size, np.abs(second))
    return size


def _check_s_derivative(name, f, df, x: np.ndarray, grid: np.ndarray) -> Optional[str]:
    step = 1e-5
    worst = 0.0
    for s in grid:
        analytic = df(x, s)
        numeric = (f(x, s + step) - f(x, s - step)) / (2 * step)
        scale = np.maximum(1.0, np.abs(analytic))
        worst = max(worst, float(np.max(np.abs(analytic - numeric) / scale)))
    if worst > DERIVATIVE_TOLERANCE:
        return f"{name} disagrees with finite differences of its s-derivative source (relative error {worst:.3g})"
    return None


def validate_conditions(
    problem: CapillaryProblem,
    mesh: Mesh,
    metric: MetricField,
    s_range: Tuple[float, float],
    n_s: int = S_SAMPLES,
) -> ValidationReport:
    """
    Sample the structural conditions (i)-(v) on quadrature points, vertices
    and an s-grid covering `s_range`. Never raises for violated conditions;
    the report marks them.
    """
    grid = s_grid(s_range, n_s)
    inner = interior_samples(mesh)
    outer = boundary_samples(mesh)
    warnings = []

    dpsi = np.stack([problem.dpsi_at(inner, s) for s in grid])
    sampled_beta = float(dpsi.min())
    sampled_mu = float(problem.psi_at(inner, 0.0).max())
    size_psi = max(
        float(
            np.max(
                np.abs(problem.psi_at(inner, s))
                + _ambient_gradient_norm(problem.psi_at, metric, inner, s, dpsi[k])
            )
        )
        for k, s in enumerate(grid)
    )
    phi = np.stack([problem.phi_at(outer, s) for s in grid])
    dphi = np.stack([problem.dphi_at(outer, s) for s in grid])
    sampled_beta_prime = float((1 - phi**2).min())
    size_phi = max(float(np.max(_c2_size(problem.phi_at, outer, s))) for s in grid)

    for message in (
        _check_s_derivative("dpsi_ds", problem.psi_at, problem.dpsi_at, inner, grid),
        _check_s_derivative("dphi_ds", problem.phi_at, problem.dphi_at, outer, grid),
    ):
        if message:
            warnings.append(message)

    beta = sampled_beta if problem.beta is None else min(problem.beta, sampled_beta)
    mu = sampled_mu if problem.mu is None else max(problem.mu, sampled_mu)
    beta_prime = (
        sampled_beta_prime
        if problem.beta_prime is None
        else min(problem.beta_prime, sampled_beta_prime)
    )
    C_psi = size_psi if problem.C_psi is None else max(problem.C_psi, size_psi)
    C_phi = size_phi if problem.C_phi is None else max(problem.C_phi, size_phi)
    for declared, sampled, name in (
        (problem.beta, sampled_beta, "beta"),
        (problem.beta_prime, sampled_beta_prime, "beta_prime"),
    ):
        if declared is not None and declared > sampled:
            warnings.append(f"declared {name}={declared} exceeds the sampled value {sampled}")
    for declared, sampled, name in (
        (problem.mu, sampled_mu, "mu"),
        (problem.C_psi, size_psi, "C_psi"),
        (problem.C_phi, size_phi, "C_phi"),
    ):
        if declared is not None and declared < sampled:
            warnings.append(f"declared {name}={declared} is below the sampled value {sampled}")

    def bounded(condition, description, sampled, declared):
        if declared is None:
            return ConditionCheck(condition, description, bool(np.isfinite(sampled)), sampled, np.inf)
        return ConditionCheck(condition, description, sampled <= declared, sampled, declared - sampled)

    max_dphi = float(dphi.max())
    checks = (
        bounded("i", "|Ψ| + |∇̄Ψ| ≤ C_Ψ", size_psi, problem.C_psi),
        ConditionCheck("ii", "∂Ψ/∂s ≥ β > 0", beta > 0, beta, beta),
        ConditionCheck("iii", "∂Φ/∂s ≤ 0", max_dphi <= SIGN_TOLERANCE, max_dphi, -max_dphi),
        ConditionCheck("iv", "1 − Φ² ≥ β′ > 0", beta_prime > 0, beta_prime, beta_prime),
        bounded("v", "|Φ|_2 ≤ C_Φ", size_phi, problem.C_phi),
    )
    report = ValidationReport(
        checks=checks,
        beta=beta,
        mu=mu,
        beta_prime=beta_prime,
        C_psi=C_psi,
        C_phi=C_phi,
        s_range=(float(grid[0]), float(grid[-1])),
        warnings=tuple(warnings),
    )
    _logger.info(
        record(
            "validation",
            problem=problem.name,
            passed=report.passed,
            failed=[c.condition for c in report.failed()],
            beta=beta,
            mu=mu,
            beta_prime=beta_prime,
        )
    )
    for message in warnings:
        _logger.warning(record("validation_warning", message=message))
    return report


@dataclass(frozen=True)
class HeightBound:
    bound: float
    ratio: float
    mu: float
    beta: float
    # the displayed bound is the literal inequality only for μ ≥ 0
    one_sided: bool

    def __float__(self):
        return self.bound


def height_bound(
    problem: CapillaryProblem,
    metric: MetricField,
    mesh: Mesh,
    report: ValidationReport = None,
) -> HeightBound:
    """
    B = (sup γ^{-1/2} / inf γ^{-1/2}) · max(0, μ) / β over quadrature points
    and vertices.
    """
    if report is None:
        report = validate_conditions(problem, mesh, metric, (-1.0, 1.0))
    if not report.beta > 0:
        raise PreconditionError(f"the height bound needs β > 0, sampled β = {report.beta}")
    killing_length = 1.0 / np.sqrt(metric.gamma(interior_samples(mesh)))
    ratio = float(killing_length.max() / killing_length.min())
    one_sided = report.mu <= 0
    if one_sided:
        _logger.warning(
            record("height_bound_degenerate", mu=report.mu, message="μ ≤ 0, bound clipped at 0")
        )
    bound = ratio * max(0.0, report.mu) / report.beta
    return HeightBound(bound, ratio, report.mu, report.beta, one_sided)
