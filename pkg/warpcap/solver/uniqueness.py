import itertools
import logging
from dataclasses import dataclass, replace
from typing import List

import numpy as np

from warpcap.errors import InvalidInput, SolverError
from warpcap.geometry.metric import MetricField
from warpcap.mesh.mesh import Mesh
from warpcap.problem.capillary import CapillaryProblem
from warpcap.problem.validation import height_bound
from warpcap.solver.continuation import (
    DEFAULT_CONFIG,
    ContinuationConfig,
    ContinuationState,
    continuation_solve,
)
from warpcap.solver.newton import newton_solve
from warpcap.utils.records import record

_logger = logging.getLogger(__name__)

MIN_AMPLITUDE = 0.1
# rough starts get a larger Newton budget than continuation steps
RESTART_BUDGET = 4


def perturbed_restarts(
    state: ContinuationState,
    problem: CapillaryProblem,
    metric: MetricField,
    mesh: Mesh,
    cfg: ContinuationConfig,
    trials: int,
    amplitude: float,
) -> List[np.ndarray]:
    """
    Newton solves at τ = 1 from u* plus uniform noise; failed trials are
    logged and left out.
    """
    rng = np.random.default_rng(cfg.seed)
    solutions = []
    for trial in range(trials):
        start = state.u.values + rng.uniform(-amplitude, amplitude, mesh.n_vertices)
        try:
            u, report = newton_solve(
                start, 1.0, problem, metric, mesh, cfg.tol, RESTART_BUDGET * cfg.max_newton
            )
        except SolverError as e:
            _logger.warning(record("uniqueness_trial_failed", trial=trial, reason=str(e)))
            continue
        _logger.info(record("uniqueness_trial", trial=trial, iterations=report.iterations))
        solutions.append(u.values)
    return solutions


@dataclass(frozen=True)
class UniquenessStudy:
    spread: float
    converged: int
    trials: int

    @property
    def complete(self) -> bool:
        """At least two restarts converged, or the only one requested did."""
        return self.converged >= min(self.trials, 2)


def uniqueness_study(
    problem: CapillaryProblem,
    metric: MetricField,
    mesh: Mesh,
    cfg: ContinuationConfig = DEFAULT_CONFIG,
    trials: int = None,
    state: ContinuationState = None,
) -> UniquenessStudy:
    """
    Perturbed restarts around the continuation solution. The perturbation
    amplitude is the height bound, at least 0.1. An incomplete study has an
    infinite spread.
    """
    trials = cfg.trials if trials is None else trials
    if trials < 1:
        raise InvalidInput(f"trials must be at least 1, got {trials}")
    if state is None:
        state = continuation_solve(problem, metric, mesh, cfg)
    amplitude = max(height_bound(problem, metric, mesh, state.validation).bound, MIN_AMPLITUDE)
    solutions = perturbed_restarts(state, problem, metric, mesh, cfg, trials, amplitude)
    spread = max(
        (float(np.max(np.abs(a - b))) for a, b in itertools.combinations(solutions, 2)),
        default=0.0,
    )
    study = UniquenessStudy(spread=spread, converged=len(solutions), trials=trials)
    if not study.complete:
        _logger.warning(
            record("uniqueness_incomplete", converged=len(solutions), trials=trials)
        )
        study = replace(study, spread=float("inf"))
    _logger.info(record("uniqueness_probe", trials=trials, converged=len(solutions), spread=study.spread))
    return study


def uniqueness_probe(
    problem: CapillaryProblem,
    metric: MetricField,
    mesh: Mesh,
    cfg: ContinuationConfig = DEFAULT_CONFIG,
    trials: int = None,
    state: ContinuationState = None,
) -> float:
    """
    Largest max-norm distance between solutions reached from `trials`
    perturbed starts; infinite when too few of them converged.
    """
    return uniqueness_study(problem, metric, mesh, cfg, trials, state).spread


def comparison_probe(
    problem_low: CapillaryProblem,
    problem_high: CapillaryProblem,
    metric: MetricField,
    mesh: Mesh,
    cfg: ContinuationConfig = DEFAULT_CONFIG,
) -> float:
    """
    min(u_high − u_low) over the vertices, for two problems whose angle data
    satisfy Φ_low ≤ Φ_high. Nonnegative up to the solver tolerance when the
    discrete comparison principle holds.
    """
    points, _, _ = mesh.facet_points()
    gap = problem_high.phi_at(points, 0.0) - problem_low.phi_at(points, 0.0)
    if np.any(gap < 0):
        raise InvalidInput("comparison needs Φ_low ≤ Φ_high on the boundary")
    low = continuation_solve(problem_low, metric, mesh, cfg).u.values
    high = continuation_solve(problem_high, metric, mesh, cfg).u.values
    margin = float(np.min(high - low))
    _logger.info(record("comparison_probe", margin=margin))
    return margin
