import logging

import fire
import numpy as np

from warpcap.cli.runs import gate, prepare
from warpcap.errors import ConfigError
from warpcap.solver.continuation import continuation_solve
from warpcap.utils.paths import ORACLE_REPORT_FILE, get_output_path
from warpcap.utils.records import configure_logging, record
from warpcap.verify.certificates import BOUND, certificate
from warpcap.verify.oracle1d import oracle_1d_solve

_logger = logging.getLogger(__name__)

AGREEMENT_FACTOR = 5.0


def agreement_bound(h: float, m_dense: int) -> float:
    return AGREEMENT_FACTOR * (h**2 + 1.0 / m_dense**2)


def main(config: str = None, seed: int = None, threads: int = None, output_dir: str = None):
    """
    Cross-check the finite element solution on an interval against the
    dense finite-volume oracle.
    """
    run = prepare(config, seed, threads, output_dir)
    domain, oracle = run.cfg.domain, run.cfg.oracle
    if domain.shape != "interval":
        raise ConfigError(f"[domain] shape: oracle1d needs an interval, got '{domain.shape}'")
    mesh = run.mesh()
    state = continuation_solve(run.problem, run.metric, mesh, run.solver)
    dense = oracle_1d_solve(run.problem, run.metric, domain.a, domain.b, oracle.m_dense, tol=oracle.tol)
    difference = float(np.max(np.abs(state.u.values - dense.at(mesh.vertices[:, 0]))))
    _logger.info(record("oracle_compared", h=mesh.h, m_dense=oracle.m_dense, difference=difference))
    cert = certificate(
        "oracle_agreement",
        BOUND,
        agreement_bound(mesh.h, oracle.m_dense),
        difference,
        h=mesh.h,
        m_dense=oracle.m_dense,
    )
    gate(get_output_path(run.output_dir, ORACLE_REPORT_FILE), [cert])


if __name__ == "__main__":
    configure_logging()
    fire.Fire(main)
