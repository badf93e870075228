from pathlib import Path
from typing import Union

MESH_FILE = "mesh.txt"
SOLUTION_FILE = "solution.csv"
REPORT_FILE = "report.jsonl"
HISTORY_FILE = "history.jsonl"
VERIFY_REPORT_FILE = "verify_report.jsonl"
MMS_REPORT_FILE = "mms_report.jsonl"
CONVERGENCE_REPORT_FILE = "convergence_report.jsonl"
ORACLE_REPORT_FILE = "oracle_report.jsonl"
VTK_FILE = "solution.vtk"
EXPORT_CSV_FILE = "export.csv"


def get_run_paths(output_dir: Union[str, Path]):
    """
    Creates the output directory if needed and returns the paths of the
    mesh, solution, report and history files of a run.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    mesh_path = output_dir.joinpath(MESH_FILE)
    solution_path = output_dir.joinpath(SOLUTION_FILE)
    report_path = output_dir.joinpath(REPORT_FILE)
    history_path = output_dir.joinpath(HISTORY_FILE)
    return mesh_path, solution_path, report_path, history_path


def get_output_path(output_dir: Union[str, Path], name: str) -> Path:
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    return output_dir.joinpath(name)
