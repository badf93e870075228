import logging
from collections import defaultdict

import fire

from warpcap.cli.runs import gate, parallel_map, prepare, show_table
from warpcap.errors import ConfigError
from warpcap.solver.continuation import continuation_solve
from warpcap.utils.paths import CONVERGENCE_REPORT_FILE, get_output_path
from warpcap.utils.records import configure_logging, record
from warpcap.verify.bounds import (
    boundary_gradient_certificate,
    interior_ball,
    interior_gradient_certificate,
)
from warpcap.verify.certificates import DECAY, refinement_trace
from warpcap.verify.residuals import contact_angle_residual, strong_form_residual

_logger = logging.getLogger(__name__)

MIN_RESOLUTIONS = 3
GATED = ("contact_angle", "interior_gradient", "boundary_gradient")


def main(config: str = None, seed: int = None, threads: int = None, output_dir: str = None):
    """
    Solve at every `[verify] h` and print the observed orders of the
    residuals and the refinement spread of the gradient surrogates.
    """
    run = prepare(config, seed, threads, output_dir)
    hs = sorted(run.cfg.verify.h, reverse=True)
    if len(hs) < MIN_RESOLUTIONS:
        raise ConfigError(f"[verify] h: convergence needs at least {MIN_RESOLUTIONS} resolutions")
    if run.cfg.domain.shape == "mesh-file":
        raise ConfigError("[domain] shape: convergence refines generated meshes only")

    def study(h):
        mesh = run.mesh(h)
        state = continuation_solve(run.problem, run.metric, mesh, run.solver)
        u = state.u
        x0, radius = interior_ball(mesh, run.metric, run.cfg.verify.ball_fraction)
        _logger.info(record("convergence_resolution", h=mesh.h, vertices=mesh.n_vertices))
        return [
            contact_angle_residual(u, 1.0, run.problem, run.metric, mesh),
            strong_form_residual(u, 1.0, run.problem, run.metric, mesh),
            interior_gradient_certificate(u, run.metric, mesh, x0, radius),
            boundary_gradient_certificate(u, run.metric, mesh),
        ]

    groups = defaultdict(list)
    for certificates in parallel_map(study, hs, run.threads):
        for c in certificates:
            groups[c.name].append(c)
    merged = [refinement_trace(group, min_order=run.cfg.verify.min_order) for group in groups.values()]

    rows = []
    for c in merged:
        if c.kind == DECAY:
            summary = " ".join(f"{o:.3g}" for o in c.details["orders"])
        else:
            summary = f"spread {c.details['relative_spread']:.3g}"
        rows.append((c.name, c.trace[-1][1], summary))
    show_table(("quantity", "finest", "orders"), rows)
    gate(get_output_path(run.output_dir, CONVERGENCE_REPORT_FILE), merged, GATED)


if __name__ == "__main__":
    configure_logging()
    fire.Fire(main)
