import fire

from warpcap.cli.runs import load_solution, prepare, solution_fields
from warpcap.mesh.io import write_solution_csv, write_vtk
from warpcap.utils.paths import EXPORT_CSV_FILE, VTK_FILE, get_output_path
from warpcap.utils.records import configure_logging


def main(config: str = None, seed: int = None, threads: int = None, output_dir: str = None):
    """
    Write the stored solution with u, W, d_Γ and u/√γ in every `[output] formats`.
    """
    run = prepare(config, seed, threads, output_dir)
    u = load_solution(run)
    fields = solution_fields(u, run.metric)
    if "vtk" in run.cfg.output.formats:
        path = get_output_path(run.output_dir, VTK_FILE)
        write_vtk(path, u.mesh, fields)
        print(f"VTK written to {path}")
    if "csv" in run.cfg.output.formats:
        path = get_output_path(run.output_dir, EXPORT_CSV_FILE)
        write_solution_csv(path, u.mesh, fields["u"], fields["W"], fields["d_gamma_boundary"])
        print(f"CSV written to {path}")


if __name__ == "__main__":
    configure_logging()
    fire.Fire(main)
