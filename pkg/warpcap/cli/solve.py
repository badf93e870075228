import logging

import fire

from warpcap.cli.runs import gate, prepare, save_solution, solution_fields, write_jsonl
from warpcap.errors import ContinuationStalled
from warpcap.mesh.io import write_mesh, write_vtk
from warpcap.solver.continuation import continuation_solve, history_records
from warpcap.utils.paths import VTK_FILE, get_output_path
from warpcap.utils.records import configure_logging, record
from warpcap.verify.bounds import boundary_gradient_certificate, check_height
from warpcap.verify.residuals import contact_angle_residual

_logger = logging.getLogger(__name__)

# reported only; `verify` is the gate
GATED = ()


def main(config: str = None, seed: int = None, threads: int = None, output_dir: str = None):
    """
    Continue from τ = 0 to τ = 1 and store mesh, solution, history and the
    single-resolution certificates in the output directory.
    """
    run = prepare(config, seed, threads, output_dir)
    mesh = run.mesh()
    mesh_path, solution_path, report_path, history_path = run.paths
    try:
        state = continuation_solve(run.problem, run.metric, mesh, run.solver)
    except ContinuationStalled as e:
        write_jsonl(history_path, history_records(e.state))
        raise
    write_jsonl(history_path, history_records(state))
    write_mesh(mesh, mesh_path)
    save_solution(solution_path, state.u, run.metric)
    if "vtk" in run.cfg.output.formats:
        write_vtk(get_output_path(run.output_dir, VTK_FILE), mesh, solution_fields(state.u, run.metric))

    certificates = [
        check_height(state.u, run.problem, run.metric, mesh, state.validation),
        contact_angle_residual(state.u, 1.0, run.problem, run.metric, mesh),
        boundary_gradient_certificate(state.u, run.metric, mesh),
    ]
    _logger.info(
        record(
            "solved",
            vertices=mesh.n_vertices,
            steps=len(state.history) - 1,
            max_abs_u=float(abs(state.u.values).max()),
        )
    )
    print(f"Solution written to {solution_path}")
    gate(report_path, certificates, GATED)


if __name__ == "__main__":
    configure_logging()
    fire.Fire(main)
