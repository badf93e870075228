import logging

import fire

from warpcap.cli.runs import gate, load_solution, prepare
from warpcap.errors import PreconditionError
from warpcap.solver.continuation import CONVERGED, ContinuationState, prevalidate
from warpcap.solver.uniqueness import UniquenessStudy, uniqueness_study
from warpcap.utils.paths import VERIFY_REPORT_FILE, get_output_path
from warpcap.utils.records import configure_logging, record
from warpcap.verify.bounds import (
    boundary_gradient_certificate,
    check_height,
    interior_ball,
    interior_gradient_certificate,
)
from warpcap.verify.certificates import BOUND, ORDER, certificate
from warpcap.verify.lemma import bump_field, lemma1i_check
from warpcap.verify.residuals import contact_angle_residual, strong_form_residual

_logger = logging.getLogger(__name__)

UNIQUENESS_SPREAD = 1e-7
# strong_form is reported but never gated
GATED = (
    "height",
    "contact_angle",
    "interior_gradient",
    "boundary_gradient",
    "lemma1i",
    "uniqueness",
)


def _lemma(u, metric, mesh, x0, radius, taus):
    zeta = bump_field(mesh, mesh.vertices[x0], radius)
    try:
        return lemma1i_check(u, metric, mesh, zeta, taus)
    except PreconditionError as e:
        return certificate(
            "lemma1i", ORDER, 1.0, float("nan"), h=mesh.h, margin=float("nan"),
            applicable=False, reason=str(e),
        )


def uniqueness_certificate(study: UniquenessStudy, h: float):
    """Fails whenever too few restarts converged to compare."""
    return certificate(
        "uniqueness",
        BOUND,
        UNIQUENESS_SPREAD,
        study.spread,
        h=h,
        margin=UNIQUENESS_SPREAD - study.spread if study.complete else float("-inf"),
        trials=study.trials,
        converged=study.converged,
    )


def main(config: str = None, seed: int = None, threads: int = None, output_dir: str = None):
    """
    Run every certificate on the solution stored by `solve`.
    """
    run = prepare(config, seed, threads, output_dir)
    u = load_solution(run)
    mesh, metric, problem = u.mesh, run.metric, run.problem
    validation = prevalidate(problem, metric, mesh)
    x0, radius = interior_ball(mesh, metric, run.cfg.verify.ball_fraction)

    certificates = [
        check_height(u, problem, metric, mesh, validation),
        contact_angle_residual(u, 1.0, problem, metric, mesh),
        strong_form_residual(u, 1.0, problem, metric, mesh),
        interior_gradient_certificate(u, metric, mesh, x0, radius),
        boundary_gradient_certificate(u, metric, mesh),
        _lemma(u, metric, mesh, x0, radius, run.cfg.verify.lemma_taus),
    ]
    if run.cfg.verify.uniqueness:
        state = ContinuationState(tau=1.0, u=u, dtau=0.0, status=CONVERGED, validation=validation)
        study = uniqueness_study(problem, metric, mesh, run.solver, state=state)
        certificates.append(uniqueness_certificate(study, mesh.h))
    _logger.info(record("verified", certificates=len(certificates)))
    gate(get_output_path(run.output_dir, VERIFY_REPORT_FILE), certificates, GATED)


if __name__ == "__main__":
    configure_logging()
    fire.Fire(main)
