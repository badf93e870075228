import logging

import fire

from warpcap.cli.runs import gate, parallel_map, prepare, show_table
from warpcap.errors import ConfigError
from warpcap.solver.continuation import continuation_solve
from warpcap.utils.paths import MMS_REPORT_FILE, get_output_path
from warpcap.utils.records import configure_logging, record
from warpcap.verify.certificates import DECAY, refinement_trace, single_resolution
from warpcap.verify.mms import max_error, mms_manufacture
from warpcap.verify.residuals import contact_angle_residual

_logger = logging.getLogger(__name__)


def main(config: str = None, seed: int = None, threads: int = None, output_dir: str = None):
    """
    Manufacture data for `[mms] u_exact`, solve at every `[mms] h` and report
    the nodal L∞ error and the contact-angle residual with observed orders.
    """
    run = prepare(config, seed, threads, output_dir)
    mms = run.cfg.mms
    if run.cfg.domain.shape == "mesh-file":
        raise ConfigError("[domain] shape: mms refines generated meshes only")
    if len(mms.h) < 2:
        raise ConfigError("[mms] h: at least two resolutions are needed for an order")

    def study(h):
        mesh = run.mesh(h)
        problem = mms_manufacture(run.metric, mesh, mms.u_exact, mms.kappa0)
        state = continuation_solve(problem, run.metric, mesh, run.solver)
        error = max_error(state.u, mms.u_exact)
        _logger.info(record("mms_resolution", h=mesh.h, vertices=mesh.n_vertices, error=error))
        return (
            single_resolution("mms_error", DECAY, error, mesh.h, vertices=mesh.n_vertices),
            contact_angle_residual(state.u, 1.0, problem, run.metric, mesh),
        )

    results = parallel_map(study, sorted(mms.h, reverse=True), run.threads)
    error = refinement_trace([r[0] for r in results], min_order=mms.min_order)
    angle = refinement_trace([r[1] for r in results], min_order=mms.angle_min_order)

    orders = [None] + error.details["orders"]
    angle_orders = [None] + angle.details["orders"]
    rows = [
        (h, e, o, a, ao)
        for (h, e), o, (_, a), ao in zip(error.trace, orders, angle.trace, angle_orders)
    ]
    show_table(("h", "error", "order", "angle", "order"), rows)
    gate(get_output_path(run.output_dir, MMS_REPORT_FILE), [error, angle])


if __name__ == "__main__":
    configure_logging()
    fire.Fire(main)
