"""
Certificates: a claimed bound, the observed value, and whether the observation
respects the claim up to a declared tolerance.

Kinds:
  bound      observed must not exceed bound; margin = bound − observed
  stability  a quantity without a known constant; across resolutions
             max/min must stay below 1/(1 − 0.25); bound = min/0.75, observed = max
  decay      a residual expected to shrink with h at least at a minimum order;
             bound = coarsest value scaled by (h_fine/h_coarse)^order, observed = finest value
  order      an observed convergence order compared with the expected one;
             margin = −|observed − bound|

In every kind, passed ⇔ margin ≥ −tolerance.
"""
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from warpcap.utils.records import record

_logger = logging.getLogger(__name__)

BOUND = "bound"
STABILITY = "stability"
DECAY = "decay"
ORDER = "order"

STABILITY_SPREAD = 0.25
MIN_RESOLUTIONS = 3
# residuals below this are treated as exact and exempt from decay checks
EXACT_FLOOR = 1e-12


@dataclass(frozen=True)
class Certificate:
    name: str
    kind: str
    bound: float
    observed: float
    margin: float
    passed: bool
    tolerance: float = 0.0
    # (h, observed) per mesh resolution, coarsest first
    trace: Tuple[Tuple[float, float], ...] = ()
    provisional: bool = True
    applicable: bool = True
    details: Dict = field(default_factory=dict)

    def to_record(self) -> dict:
        out = asdict(self)
        out["trace"] = [list(t) for t in self.trace]
        return out


def certificate(
    name: str,
    kind: str,
    bound: float,
    observed: float,
    tolerance: float = 0.0,
    h: float = None,
    margin: float = None,
    applicable: bool = True,
    **details,
) -> Certificate:
    bound, observed = float(bound), float(observed)
    if margin is None:
        margin = bound - observed
    passed = (margin >= -tolerance) if applicable else True
    trace = () if h is None else ((float(h), observed),)
    cert = Certificate(
        name=name,
        kind=kind,
        bound=bound,
        observed=observed,
        margin=float(margin),
        passed=bool(passed),
        tolerance=float(tolerance),
        trace=trace,
        provisional=len(trace) < MIN_RESOLUTIONS,
        applicable=applicable,
        details=details,
    )
    _logger.info(
        record(
            "certificate",
            name=name,
            observed=observed,
            bound=bound,
            margin=cert.margin,
            passed=cert.passed,
            applicable=applicable,
        )
    )
    return cert


def single_resolution(name: str, kind: str, observed: float, h: float, **details) -> Certificate:
    """
    A stability or decay certificate seen at one resolution: nothing is
    claimed yet, so bound = observed.
    """
    return certificate(name, kind, observed, observed, h=h, **details)


def observed_orders(hs: Sequence[float], errors: Sequence[float]) -> List[float]:
    """log(e_i/e_{i+1}) / log(h_i/h_{i+1}) for consecutive resolutions."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log(errors[:-1] / errors[1:]) / np.log(hs[:-1] / hs[1:])
    return [float(o) for o in orders]


def _merge_details(certificates: Sequence[Certificate]) -> dict:
    return {
        "per_resolution": [
            {"h": c.trace[0][0] if c.trace else None, **c.details} for c in certificates
        ]
    }


def refinement_trace(
    certificates: Iterable[Certificate], min_order: float = 1.0, tolerance: float = 0.0
) -> Certificate:
    """
    Merge single-resolution certificates of one quantity into a
    refinement-traced certificate. `min_order` and `tolerance` apply to the
    decay kind.
    """
    certificates = sorted(certificates, key=lambda c: -c.trace[0][0])
    assert certificates, "nothing to merge"
    name, kind = certificates[0].name, certificates[0].kind
    assert all(c.name == name and c.kind == kind for c in certificates), "mixed certificates"
    trace = tuple(c.trace[0] for c in certificates)
    hs = [t[0] for t in trace]
    values = [t[1] for t in trace]
    applicable = all(c.applicable for c in certificates)
    details = _merge_details(certificates)

    if kind == BOUND or kind == ORDER:
        worst = min(certificates, key=lambda c: c.margin + c.tolerance)
        merged = replace(worst, trace=trace, details=details, applicable=applicable)
        merged = replace(merged, passed=(merged.margin >= -merged.tolerance) if applicable else True)
    elif kind == STABILITY:
        low, high = min(values), max(values)
        bound = low / (1 - STABILITY_SPREAD)
        details["relative_spread"] = (high - low) / high if high > 0 else 0.0
        merged = Certificate(
            name=name,
            kind=kind,
            bound=bound,
            observed=high,
            margin=bound - high,
            passed=bound - high >= 0 or not applicable,
            trace=trace,
            applicable=applicable,
            details=details,
        )
    elif kind == DECAY:
        details["orders"] = observed_orders(hs, values)
        details["min_order"] = min_order
        if values[0] <= EXACT_FLOOR:
            bound = EXACT_FLOOR
        else:
            bound = values[0] * (hs[-1] / hs[0]) ** min_order
        margin = bound - values[-1]
        merged = Certificate(
            name=name,
            kind=kind,
            bound=bound,
            observed=values[-1],
            margin=margin,
            passed=margin >= -tolerance or not applicable,
            tolerance=tolerance,
            trace=trace,
            applicable=applicable,
            details=details,
        )
    else:
        raise ValueError(f"unknown certificate kind {kind}")
    merged = replace(merged, provisional=len(trace) < MIN_RESOLUTIONS)
    _logger.info(
        record(
            "refinement_trace",
            name=name,
            trace=[list(t) for t in trace],
            passed=merged.passed,
            provisional=merged.provisional,
        )
    )
    return merged


def write_report(path: Union[str, Path], certificates: Iterable[Certificate]) -> None:
    """One JSON object per line, keys in a fixed order."""
    lines = [json.dumps(_plain_record(c.to_record())) for c in certificates]
    Path(path).write_text("".join(line + "\n" for line in lines))


def _plain_record(value):
    if isinstance(value, dict):
        return {k: _plain_record(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain_record(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def read_report(path: Union[str, Path]) -> List[Certificate]:
    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        data = json.loads(line)
        data["trace"] = tuple(tuple(t) for t in data["trace"])
        data["bound"] = float("nan") if data["bound"] is None else data["bound"]
        data["observed"] = float("nan") if data["observed"] is None else data["observed"]
        data["margin"] = float("nan") if data["margin"] is None else data["margin"]
        out.append(Certificate(**data))
    return out
