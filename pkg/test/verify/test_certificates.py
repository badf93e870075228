import math

import pytest

from warpcap.verify.certificates import (
    BOUND,
    DECAY,
    ORDER,
    STABILITY,
    certificate,
    observed_orders,
    read_report,
    refinement_trace,
    single_resolution,
    write_report,
)


def test_bound_respects_tolerance():
    assert certificate("height", BOUND, 1.0, 1.05, tolerance=0.1).passed
    assert not certificate("height", BOUND, 1.0, 1.2, tolerance=0.1).passed


def test_inapplicable_certificate_passes():
    cert = certificate("height", BOUND, 0.0, 5.0, applicable=False)
    assert cert.passed
    assert not cert.applicable


def test_single_resolution_is_provisional():
    cert = single_resolution("boundary_gradient", STABILITY, 1.3, 0.1)
    assert cert.provisional
    assert cert.trace == ((0.1, 1.3),)


def test_stable_quantity_passes():
    merged = refinement_trace(
        single_resolution("interior_gradient", STABILITY, v, h) for h, v in ((0.2, 1.2), (0.1, 1.1), (0.05, 1.0))
    )
    assert merged.passed
    assert not merged.provisional
    assert merged.bound == pytest.approx(1.0 / 0.75)
    assert [t[0] for t in merged.trace] == [0.2, 0.1, 0.05]


def test_drifting_quantity_fails():
    merged = refinement_trace(
        single_resolution("interior_gradient", STABILITY, v, h) for h, v in ((0.2, 1.0), (0.1, 2.0), (0.05, 3.0))
    )
    assert not merged.passed


def test_second_order_decay():
    merged = refinement_trace(
        [single_resolution("mms_error", DECAY, 0.1 * (h / 0.2) ** 2, h) for h in (0.05, 0.2, 0.1)],
        min_order=1.8,
    )
    assert merged.passed
    assert merged.details["orders"] == pytest.approx([2.0, 2.0])
    assert merged.observed == pytest.approx(0.00625)


def test_first_order_decay_fails_a_second_order_claim():
    merged = refinement_trace(
        [single_resolution("mms_error", DECAY, 0.1 * h / 0.2, h) for h in (0.2, 0.1, 0.05)],
        min_order=1.8,
    )
    assert not merged.passed


def test_bound_merge_keeps_the_worst():
    merged = refinement_trace(
        [
            certificate("height", BOUND, 1.0, 0.5, h=0.2),
            certificate("height", BOUND, 1.0, 1.5, h=0.1),
            certificate("height", BOUND, 1.0, 0.9, h=0.05),
        ]
    )
    assert merged.observed == 1.5
    assert not merged.passed
    assert len(merged.trace) == 3


def test_observed_orders():
    assert observed_orders([0.2, 0.1], [4.0, 1.0]) == pytest.approx([2.0])
    assert math.isnan(observed_orders([0.2, 0.1], [0.0, 0.0])[0])


def test_report_file(tmp_path):
    certificates = [
        certificate("lemma1i", ORDER, 1.0, 1.02, 0.2, h=0.05, margin=-0.02, taus=[0.01, 0.005]),
        certificate("height", BOUND, float("nan"), 0.3, h=0.1, margin=float("nan"), applicable=False),
    ]
    path = tmp_path / "report.jsonl"
    write_report(path, certificates)
    again = read_report(path)
    assert [c.name for c in again] == ["lemma1i", "height"]
    assert again[0] == certificates[0]
    assert math.isnan(again[1].bound)
    assert len(path.read_text().splitlines()) == 2
