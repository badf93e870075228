import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Tuple, Union

import numpy as np
import scipy.sparse.linalg

from warpcap.assembly.forms import jacobian, residual
from warpcap.errors import (
    InvalidInput,
    LineSearchFailed,
    MaxIterationsExceeded,
    SingularJacobian,
)
from warpcap.geometry.metric import MetricField
from warpcap.mesh.mesh import Mesh, ScalarField
from warpcap.problem.capillary import CapillaryProblem
from warpcap.utils.records import record

_logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MAX_HALVINGS = 30
SOLVE_TARGET = 1e-12
SOLVE_LIMIT = 1e-8
REFINEMENTS = 3


@dataclass
class NewtonReport:
    iterations: int = 0
    residual_norm: float = float("inf")
    residual_history: List[float] = field(default_factory=list)
    damping: List[float] = field(default_factory=list)
    converged: bool = False


def residual_norm(r: np.ndarray) -> float:
    return float(np.max(np.abs(r))) if len(r) else 0.0


def solve_linear(J: scipy.sparse.csr_matrix, rhs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """
    Direct sparse solve followed by iterative refinement. Raises
    SingularJacobian when the solve breaks down or stays inaccurate.
    """
    A = J.tocsc()
    scale = np.linalg.norm(rhs)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.sparse.linalg.MatrixRankWarning)
            x = scipy.sparse.linalg.spsolve(A, rhs)
            for _ in range(REFINEMENTS):
                defect = rhs - A @ x
                if not np.all(np.isfinite(x)) or np.linalg.norm(defect) <= SOLVE_TARGET * scale:
                    break
                x = x + scipy.sparse.linalg.spsolve(A, defect)
    except (RuntimeError, scipy.sparse.linalg.MatrixRankWarning) as e:
        raise SingularJacobian(f"linear solve failed: {e}", u=u) from e
    if not np.all(np.isfinite(x)):
        raise SingularJacobian("linear solve produced non-finite values", u=u)
    relative = np.linalg.norm(rhs - A @ x) / scale if scale > 0 else 0.0
    if relative > SOLVE_LIMIT:
        raise SingularJacobian(f"linear solve relative residual {relative:.3g}", u=u)
    return x


def newton_solve(
    u0: Union[ScalarField, np.ndarray],
    tau: float,
    problem: CapillaryProblem,
    metric: MetricField,
    mesh: Mesh,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> Tuple[ScalarField, NewtonReport]:
    """
    Damped Newton iteration for residual(u, τ) = 0 in the max norm.

    Steps are halved until the Armijo condition
    ‖R(u + αδ)‖ ≤ (1 − 1e-4 α)‖R(u)‖ holds, at most 30 times.
    """
    assert tol > 0, "Newton tolerance must be positive"
    u = np.array(u0.values if isinstance(u0, ScalarField) else u0, dtype=float)
    if not np.all(np.isfinite(u)):
        raise InvalidInput("initial iterate must be finite")
    r = residual(u, tau, problem, metric, mesh)
    norm = residual_norm(r)
    report = NewtonReport(residual_norm=norm, residual_history=[norm])
    while norm > tol:
        if report.iterations >= max_iter:
            raise MaxIterationsExceeded(
                f"no convergence in {max_iter} Newton iterations at tau={tau} (residual {norm:.3g})",
                u=u,
            )
        delta = solve_linear(jacobian(u, tau, problem, metric, mesh), -r, u)
        alpha = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = u + alpha * delta
            try:
                r_trial = residual(trial, tau, problem, metric, mesh)
            except InvalidInput:
                r_trial = None
            if r_trial is not None and residual_norm(r_trial) <= (1 - ARMIJO * alpha) * norm:
                break
            alpha /= 2
        else:
            raise LineSearchFailed(
                f"no acceptable step after {MAX_HALVINGS} halvings at tau={tau} (residual {norm:.3g})",
                u=u,
            )
        u, r = trial, r_trial
        norm = residual_norm(r)
        report.iterations += 1
        report.residual_history.append(norm)
        report.damping.append(alpha)
        report.residual_norm = norm
        _logger.debug(
            record("newton_iteration", tau=tau, iteration=report.iterations, residual=norm, damping=alpha)
        )
    report.converged = True
    return ScalarField(mesh, u), report
