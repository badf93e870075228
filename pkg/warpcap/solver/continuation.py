"""
Continuity method: solve the family N_τ, whose data are τΨ and τΦ, from the
trivial solution u = 0 at τ = 0 up to τ = 1.
"""
import logging
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

from warpcap.errors import (
    ContinuationStalled,
    InvalidInput,
    PreconditionError,
    SolverError,
)
from warpcap.geometry.metric import MetricField
from warpcap.mesh.mesh import Mesh, ScalarField
from warpcap.problem.capillary import CapillaryProblem
from warpcap.problem.validation import ValidationReport, height_bound, validate_conditions
from warpcap.solver.newton import newton_solve
from warpcap.utils.records import record

_logger = logging.getLogger(__name__)

ADVANCING = "advancing"
CONVERGED = "converged"
STALLED = "stalled"


@dataclass(frozen=True)
class ContinuationConfig:
    tol: float = 1e-10
    max_newton: int = 50
    dtau: float = 0.1
    dtau_min: float = 1e-4
    dtau_max: float = 0.25
    # a step is easy when Newton needs at most this many iterations
    easy_iterations: int = 4
    easy_steps: int = 3
    trials: int = 5
    unsafe: bool = False
    seed: int = 0

    def __post_init__(self):
        checks = [
            (0 < self.tol <= 1e-2, f"tol must lie in (0, 1e-2], got {self.tol}"),
            (1 <= self.max_newton <= 1000, f"max_newton must lie in [1, 1000], got {self.max_newton}"),
            (0 < self.dtau <= 1, f"dtau must lie in (0, 1], got {self.dtau}"),
            (0 < self.dtau_min <= self.dtau, f"dtau_min must lie in (0, dtau], got {self.dtau_min}"),
            (self.dtau <= self.dtau_max <= 1, f"dtau_max must lie in [dtau, 1], got {self.dtau_max}"),
            (self.easy_iterations >= 0, "easy_iterations must be nonnegative"),
            (self.easy_steps >= 1, "easy_steps must be at least 1"),
            (self.trials >= 1, f"trials must be at least 1, got {self.trials}"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidInput(message)


DEFAULT_CONFIG = ContinuationConfig()


class HistoryEntry(NamedTuple):
    tau: float
    newton_iterations: int
    residual_norm: float


@dataclass
class ContinuationState:
    tau: float
    u: ScalarField
    dtau: float
    history: List[HistoryEntry] = field(default_factory=list)
    status: str = ADVANCING
    validation: Optional[ValidationReport] = None
    failed_steps: int = 0


def prevalidate(problem: CapillaryProblem, metric: MetricField, mesh: Mesh) -> ValidationReport:
    """
    Validate on an s-range of twice the height bound (at least ±2).
    """
    report = validate_conditions(problem, mesh, metric, (-1.0, 1.0))
    if not report.beta > 0:
        return report
    extent = 2 * max(1.0, height_bound(problem, metric, mesh, report).bound)
    return validate_conditions(problem, mesh, metric, (-extent, extent))


def continuation_solve(
    problem: CapillaryProblem,
    metric: MetricField,
    mesh: Mesh,
    cfg: ContinuationConfig = DEFAULT_CONFIG,
    validation: ValidationReport = None,
) -> ContinuationState:
    if validation is None:
        validation = prevalidate(problem, metric, mesh)
    if not validation.passed:
        failed = ", ".join(c.condition for c in validation.failed())
        if not cfg.unsafe:
            raise PreconditionError(f"structural conditions ({failed}) fail; rerun in unsafe mode to proceed")
        _logger.warning(record("unsafe_mode", failed=failed))

    u, report = newton_solve(
        ScalarField.zeros(mesh), 0.0, problem, metric, mesh, cfg.tol, cfg.max_newton
    )
    state = ContinuationState(tau=0.0, u=u, dtau=cfg.dtau, validation=validation)
    state.history.append(HistoryEntry(0.0, report.iterations, report.residual_norm))
    previous = None
    easy = 0
    while state.tau < 1.0:
        step = min(state.dtau, 1.0 - state.tau)
        target = 1.0 if state.tau + step >= 1.0 - 1e-12 else state.tau + step
        predictor = state.u.values
        if previous is not None:
            tau_prev, u_prev = previous
            slope = (state.u.values - u_prev) / (state.tau - tau_prev)
            predictor = predictor + (target - state.tau) * slope
        try:
            u, report = newton_solve(
                predictor, target, problem, metric, mesh, cfg.tol, cfg.max_newton
            )
        except (SolverError, InvalidInput) as e:
            state.failed_steps += 1
            state.dtau = step / 2
            easy = 0
            _logger.info(
                record("continuation_retry", tau=state.tau, target=target, dtau=state.dtau, reason=str(e))
            )
            if state.dtau < cfg.dtau_min:
                state.status = STALLED
                _logger.warning(record("continuation_stalled", tau=state.tau, dtau=state.dtau))
                raise ContinuationStalled(
                    f"continuation stalled at tau={state.tau} (dtau {state.dtau:.3g} below {cfg.dtau_min})",
                    state,
                ) from e
            continue
        previous = (state.tau, state.u.values)
        state.tau, state.u = target, u
        state.history.append(HistoryEntry(target, report.iterations, report.residual_norm))
        easy = easy + 1 if report.iterations <= cfg.easy_iterations else 0
        if easy >= cfg.easy_steps:
            state.dtau = min(2 * state.dtau, cfg.dtau_max)
            easy = 0
        _logger.info(
            record(
                "continuation_step",
                tau=target,
                iterations=report.iterations,
                residual=report.residual_norm,
                dtau=state.dtau,
            )
        )
    state.status = CONVERGED
    _logger.info(record("continuation_converged", steps=len(state.history) - 1, failed=state.failed_steps))
    return state


def history_records(state: ContinuationState) -> List[dict]:
    return [
        {"tau": h.tau, "newton_iterations": h.newton_iterations, "residual_norm": h.residual_norm}
        for h in state.history
    ]
