"""
Independent dense-grid solver for one-dimensional leaves.

Conservative central differences for

    (γ^{-1/2} σ^{-1/2} u′/W)′ = τ γ^{-1/2} σ^{1/2} Ψ(x, u)   on (a, b),
    flux = −τγ^{-1/2}Φ at a,   flux = +τγ^{-1/2}Φ at b,

with W = sqrt(γ + u′²/σ). Boundary nodes own half cells. Solved by full
Newton on the tridiagonal system, stepping τ up from 0.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from warpcap.errors import InvalidInput, OracleFailed
from warpcap.geometry.metric import MetricField
from warpcap.problem.capillary import CapillaryProblem
from warpcap.utils.records import record

_logger = logging.getLogger(__name__)

TAU_STEPS = 10
MAX_HALVINGS = 30
STEP_TOL = 1e-14


@dataclass(frozen=True)
class DenseSolution:
    x: np.ndarray
    u: np.ndarray
    tau: float

    def at(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1)
        return np.interp(points, self.x, self.u)


class _Grid:
    def __init__(self, metric: MetricField, a: float, b: float, m: int):
        self.x = a + (b - a) * np.arange(m + 1) / m
        self.x[-1] = b
        self.h = (b - a) / m
        mid = 0.5 * (self.x[1:] + self.x[:-1])
        self.mid_gamma = metric.gamma(mid[:, None])
        self.mid_sigma = metric.sigma(mid[:, None])[:, 0, 0]
        gamma = metric.gamma(self.x[:, None])
        sigma = metric.sigma(self.x[:, None])[:, 0, 0]
        # control volume of every node times γ^{-1/2} σ^{1/2}
        volume = np.full(m + 1, self.h)
        volume[[0, -1]] = self.h / 2
        self.source_weight = volume * np.sqrt(sigma / gamma)
        self.wall_weight = 1 / np.sqrt(gamma[[0, -1]])

    def flux(self, u: np.ndarray):
        p = np.diff(u) / self.h
        g, s = self.mid_gamma, self.mid_sigma
        W = np.sqrt(g + p**2 / s)
        c = 1 / np.sqrt(g * s)
        return c * p / W, c * g / W**3


def _system(grid: _Grid, u: np.ndarray, tau: float, problem: CapillaryProblem):
    x = grid.x[:, None]
    F, dF = grid.flux(u)
    G = np.zeros_like(u)
    G[:-1] += F
    G[1:] -= F
    G -= tau * grid.source_weight * problem.psi_at(x, u)
    ends = x[[0, -1]]
    phi = problem.phi_at(ends, u[[0, -1]])
    G[0] += tau * grid.wall_weight[0] * phi[0]
    G[-1] += tau * grid.wall_weight[1] * phi[1]

    # banded Jacobian: rows are super-, main and sub-diagonal
    bands = np.zeros((3, len(u)))
    k = dF / grid.h
    bands[0, 1:] = k
    bands[2, :-1] = k
    bands[1, :-1] -= k
    bands[1, 1:] -= k
    bands[1] -= tau * grid.source_weight * problem.dpsi_at(x, u)
    dphi = problem.dphi_at(ends, u[[0, -1]])
    bands[1, 0] += tau * grid.wall_weight[0] * dphi[0]
    bands[1, -1] += tau * grid.wall_weight[1] * dphi[1]
    return G, bands


def _newton(grid, u, tau, problem, tol, max_iter):
    G, bands = _system(grid, u, tau, problem)
    norm = np.max(np.abs(G))
    for _ in range(max_iter):
        if norm <= tol:
            return u
        try:
            delta = scipy.linalg.solve_banded((1, 1), bands, -G)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise OracleFailed(f"oracle linear solve failed at tau={tau}: {e}", u=u) from e
        if np.max(np.abs(delta)) <= STEP_TOL * max(1.0, np.max(np.abs(u))):
            return u + delta
        alpha = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = u + alpha * delta
            try:
                G_trial, bands_trial = _system(grid, trial, tau, problem)
            except InvalidInput:
                G_trial = None
            if G_trial is not None and np.max(np.abs(G_trial)) < norm:
                break
            alpha /= 2
        else:
            raise OracleFailed(f"oracle line search failed at tau={tau}", u=u)
        u, G, bands = trial, G_trial, bands_trial
        norm = np.max(np.abs(G))
    if norm <= tol:
        return u
    raise OracleFailed(f"oracle Newton did not converge at tau={tau} (residual {norm:.3g})", u=u)


def oracle_1d_solve(
    problem: CapillaryProblem,
    metric: MetricField,
    a: float,
    b: float,
    m_dense: int,
    tau: float = 1.0,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> DenseSolution:
    if metric.dim != 1:
        raise InvalidInput("the dense oracle handles one-dimensional leaves only")
    if not a < b or m_dense < 2:
        raise InvalidInput(f"oracle needs a < b and at least 2 cells, got ({a}, {b}, {m_dense})")
    grid = _Grid(metric, float(a), float(b), int(m_dense))
    u = np.zeros(len(grid.x))
    for step in range(1, TAU_STEPS + 1):
        u = _newton(grid, u, tau * step / TAU_STEPS, problem, tol, max_iter)
    _logger.info(record("oracle_solved", m_dense=int(m_dense), tau=tau, max_abs_u=float(np.max(np.abs(u)))))
    return DenseSolution(grid.x, u, float(tau))
