import json
import logging

import numpy as np


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def record(event: str, **fields) -> str:
    """
    One line of JSON describing an event; the unit of all progress logging.
    """
    return json.dumps({"event": event, **_plain(fields)}, sort_keys=False)


def configure_logging(level: int = logging.INFO) -> None:
    logging.basicConfig(level=level, format="%(message)s", force=True)
