"""
Umbrella command line: `warpcap <subcommand> [--config FILE] [--seed N]
[--threads N] [--output-dir DIR]`.

Exit codes: 0 success, 1 solver failure or failed certificate, 2 invalid
configuration or usage.
"""
import logging
import sys
from typing import Sequence

import fire
import fire.core

from warpcap.cli import convergence, export, mms, oracle1d, solve, verify
from warpcap.errors import (
    ConfigError,
    InvalidInput,
    ManufacturedProblemInvalid,
    MeshBudgetExceeded,
    PreconditionError,
    WarpcapError,
)
from warpcap.utils.records import configure_logging, record

_logger = logging.getLogger(__name__)

COMMANDS = {
    "solve": solve.main,
    "verify": verify.main,
    "mms": mms.main,
    "convergence": convergence.main,
    "oracle1d": oracle1d.main,
    "export": export.main,
}

USAGE_ERRORS = (
    ConfigError,
    InvalidInput,
    PreconditionError,
    ManufacturedProblemInvalid,
    MeshBudgetExceeded,
)


def run_command(argv: Sequence[str] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    configure_logging()
    if not argv or argv[0] not in COMMANDS:
        _logger.error(
            record("usage_error", argv=argv, message=f"expected one of {sorted(COMMANDS)}")
        )
        return 2
    try:
        fire.Fire(COMMANDS, command=argv, name="warpcap")
    except fire.core.FireExit as e:
        return 0 if e.code == 0 else 2
    except USAGE_ERRORS as e:
        _logger.error(record("config_error", command=argv[0], error=type(e).__name__, message=str(e)))
        return 2
    except WarpcapError as e:
        _logger.error(record("run_failed", command=argv[0], error=type(e).__name__, message=str(e)))
        return 1
    return 0


def entry_point():
    sys.exit(run_command())


if __name__ == "__main__":
    entry_point()
