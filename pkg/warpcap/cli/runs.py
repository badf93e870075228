"""
Shared plumbing of the command scripts: building a run from its
configuration, writing result files and gating on certificates.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, List, Sequence

import numpy as np

from warpcap.cli.config import (
    RunConfig,
    build_metric,
    build_problem,
    continuation_config,
    load_config,
    resolution_mesh,
)
from warpcap.errors import CertificateFailed, ConfigError
from warpcap.geometry.metric import MetricField, arc_length_height
from warpcap.mesh.distance import boundary_distance_field
from warpcap.mesh.io import read_mesh, read_solution_csv, write_solution_csv
from warpcap.mesh.mesh import Mesh, ScalarField
from warpcap.problem.capillary import CapillaryProblem
from warpcap.solver.continuation import ContinuationConfig
from warpcap.utils.paths import get_run_paths
from warpcap.utils.records import record
from warpcap.verify.bounds import vertex_slopes
from warpcap.verify.certificates import Certificate, write_report

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Run:
    cfg: RunConfig
    metric: MetricField
    problem: CapillaryProblem
    solver: ContinuationConfig
    output_dir: Path

    @property
    def threads(self) -> int:
        return self.cfg.run.threads

    def mesh(self, h: float = None) -> Mesh:
        return resolution_mesh(self.cfg, h)

    @property
    def paths(self):
        return get_run_paths(self.output_dir)


def prepare(config=None, seed=None, threads=None, output_dir=None, dim: int = None) -> Run:
    cfg = load_config(config, seed=seed, threads=threads, output_dir=output_dir)
    run = Run(
        cfg=cfg,
        metric=build_metric(cfg, dim),
        problem=build_problem(cfg),
        solver=continuation_config(cfg),
        output_dir=Path(cfg.output.directory),
    )
    _logger.info(
        record(
            "run_prepared",
            config=None if config is None else str(config),
            seed=cfg.run.seed,
            threads=cfg.run.threads,
            output_dir=str(run.output_dir),
            preset=run.metric.preset,
            shape=cfg.domain.shape,
        )
    )
    return run


def parallel_map(fn: Callable, items: Sequence, threads: int) -> List:
    """fn over items on at most `threads` workers, results in input order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def solution_fields(u: ScalarField, metric: MetricField) -> dict:
    mesh = u.mesh
    return {
        "u": u.values,
        "W": vertex_slopes(u, metric),
        "d_gamma_boundary": boundary_distance_field(mesh, metric).values,
        "arc_length_height": arc_length_height(u.values, metric, mesh.vertices),
    }


def save_solution(path: Path, u: ScalarField, metric: MetricField) -> None:
    fields = solution_fields(u, metric)
    write_solution_csv(path, u.mesh, u.values, fields["W"], fields["d_gamma_boundary"])


def load_solution(run: Run) -> ScalarField:
    """The mesh and solution a previous `solve` left in the output directory."""
    mesh_path, solution_path, _, _ = run.paths
    if not mesh_path.exists() or not solution_path.exists():
        raise ConfigError(f"no stored solution in {run.output_dir}; run solve first")
    mesh = read_mesh(mesh_path)
    table = read_solution_csv(solution_path)
    if len(table.u) != mesh.n_vertices or not np.array_equal(
        table.vertex_id, np.arange(mesh.n_vertices)
    ):
        raise ConfigError(f"{solution_path} does not match {mesh_path}")
    if mesh.dim != run.metric.dim:
        raise ConfigError(f"stored mesh is {mesh.dim}-dimensional, the metric {run.metric.dim}-dimensional")
    return ScalarField(mesh, table.u)


def write_jsonl(path: Path, rows: Iterable[dict]) -> None:
    Path(path).write_text("".join(json.dumps(r) + "\n" for r in rows))


def show_certificates(certificates: Sequence[Certificate]) -> None:
    for c in certificates:
        status = "PASS" if c.passed else "FAIL"
        if not c.applicable:
            status = "n/a"
        elif c.provisional:
            status += " (provisional)"
        print(f"{c.name:<20} {c.kind:<10} observed={c.observed:.6g} bound={c.bound:.6g} {status}")


def gate(
    path: Path, certificates: Sequence[Certificate], gated: Iterable[str] = None
) -> None:
    """
    Write the report and raise CertificateFailed if any applicable
    certificate among `gated` (all by default) failed.
    """
    write_report(path, certificates)
    show_certificates(certificates)
    print(f"Report written to {path}")
    gated = None if gated is None else set(gated)
    failed = [
        c.name
        for c in certificates
        if c.applicable and not c.passed and (gated is None or c.name in gated)
    ]
    if failed:
        raise CertificateFailed(failed)


def show_table(header: Sequence[str], rows: Sequence[Sequence]) -> None:
    def cell(v):
        if isinstance(v, float):
            return f"{v:.6g}"
        return "-" if v is None else str(v)

    print("  ".join(f"{h:>12}" for h in header))
    for row in rows:
        print("  ".join(f"{cell(v):>12}" for v in row))
