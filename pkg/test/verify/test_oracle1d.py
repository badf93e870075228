import numpy as np
import pytest

from warpcap.cli.expression import parse_expression
from warpcap.cli.oracle1d import agreement_bound
from warpcap.errors import InvalidInput
from warpcap.geometry.metric import product_metric
from warpcap.problem.capillary import CapillaryProblem
from warpcap.solver.continuation import continuation_solve
from warpcap.verify.mms import mms_manufacture
from warpcap.verify.oracle1d import oracle_1d_solve

from test.util import DEFAULT_CONFIG, euclid, exponential_warp, interval

M_DENSE = 4096

SUITE = {
    "gravity": (CapillaryProblem.from_strings("1 + s", "0.2"), euclid(1)),
    "tilted": (CapillaryProblem.from_strings("0.5 + x1 + s", "0"), euclid(1)),
    "nonlinear": (CapillaryProblem.from_strings("0.5 + s + 0.2*s^3", "0.1 - 0.1*s"), euclid(1)),
    "exponential": (CapillaryProblem.from_strings("1 + s", "0.2"), exponential_warp()),
    "stretched": (CapillaryProblem.from_strings("1 + s", "0.1"), product_metric(("(1 + x1)^2",), dim=1)),
}


def test_zero_data_give_zero():
    dense = oracle_1d_solve(CapillaryProblem.from_strings("s"), euclid(1), 0.0, 1.0, 256)
    assert np.all(dense.u == 0)
    assert len(dense.x) == 257


@pytest.mark.parametrize("name", sorted(SUITE))
def test_finite_elements_agree_with_oracle(name):
    problem, metric = SUITE[name]
    mesh = interval(DEFAULT_CONFIG.cells)
    u = continuation_solve(problem, metric, mesh).u
    dense = oracle_1d_solve(problem, metric, DEFAULT_CONFIG.a, DEFAULT_CONFIG.b, M_DENSE)
    difference = np.max(np.abs(u.values - dense.at(mesh.vertices[:, 0])))
    assert np.max(np.abs(dense.u)) > 1e-3
    assert difference <= agreement_bound(mesh.h, M_DENSE)


def test_oracle_is_second_order_in_grid_size():
    problem, metric = SUITE["exponential"]
    fine = oracle_1d_solve(problem, metric, 0.0, 1.0, 2048)
    errors = [
        np.max(np.abs(oracle_1d_solve(problem, metric, 0.0, 1.0, m).u - fine.at(np.linspace(0, 1, m + 1))))
        for m in (32, 64)
    ]
    assert errors[1] < errors[0] / 3


def test_oracle_needs_an_interval():
    with pytest.raises(InvalidInput):
        oracle_1d_solve(CapillaryProblem.from_strings("s"), euclid(2), 0.0, 1.0, 64)
    with pytest.raises(InvalidInput):
        oracle_1d_solve(CapillaryProblem.from_strings("s"), euclid(1), 1.0, 0.0, 64)


@pytest.mark.parametrize("u_exact", ["0.3*x1^2 - 0.1*x1", "0.2*cos(2*x1) + 0.05*sin(3*x1)"])
def test_oracle_recovers_manufactured_solution(u_exact):
    metric = exponential_warp()
    problem = mms_manufacture(metric, interval(), u_exact)
    exact = parse_expression(u_exact)
    errors = []
    for m in (64, 128):
        dense = oracle_1d_solve(problem, metric, DEFAULT_CONFIG.a, DEFAULT_CONFIG.b, m)
        errors.append(float(np.max(np.abs(dense.u - exact.evaluate(dense.x[:, None])))))
    assert errors[0] < 1e-2
    assert errors[0] / errors[1] >= 3.5
