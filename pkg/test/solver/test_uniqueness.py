import pytest

from warpcap.errors import InvalidInput, MaxIterationsExceeded
from warpcap.problem.capillary import CapillaryProblem
from warpcap.solver import uniqueness
from warpcap.solver.continuation import ContinuationConfig, continuation_solve
from warpcap.solver.uniqueness import comparison_probe, uniqueness_probe, uniqueness_study

from test.util import disk, euclid, interval

CFG = ContinuationConfig(tol=1e-12)


def test_disk_case_is_unique():
    mesh = disk(0.2)
    spread = uniqueness_probe(CapillaryProblem.from_strings("1 + s", "0.3"), euclid(), mesh, CFG, trials=5)
    assert spread < 1e-7


def test_zero_solution_is_unique():
    mesh = interval(32)
    assert uniqueness_probe(CapillaryProblem.from_strings("s"), euclid(1), mesh, CFG) < 1e-8


def test_single_trial_has_no_spread():
    mesh = interval(16)
    assert uniqueness_probe(CapillaryProblem.from_strings("1 + s"), euclid(1), mesh, CFG, trials=1) == 0.0


def test_trials_must_be_positive():
    with pytest.raises(InvalidInput):
        uniqueness_probe(CapillaryProblem.from_strings("s"), euclid(1), interval(8), CFG, trials=0)


def test_more_wetting_raises_the_surface():
    mesh = disk(0.2)
    low = CapillaryProblem.from_strings("1 + s", "0.1")
    high = CapillaryProblem.from_strings("1 + s", "0.4")
    assert comparison_probe(low, high, euclid(), mesh, CFG) >= -1e-9


def test_comparison_needs_ordered_angles():
    mesh = disk(0.3)
    low = CapillaryProblem.from_strings("1 + s", "0.4")
    high = CapillaryProblem.from_strings("1 + s", "0.1")
    with pytest.raises(InvalidInput):
        comparison_probe(low, high, euclid(), mesh, CFG)


def _diverging_newton(start, *args, **kwargs):
    raise MaxIterationsExceeded("no convergence", u=start)


def test_no_converged_restart_is_incomplete(monkeypatch):
    mesh = disk(0.2)
    problem = CapillaryProblem.from_strings("1 + s", "0.3")
    state = continuation_solve(problem, euclid(), mesh, CFG)
    monkeypatch.setattr(uniqueness, "newton_solve", _diverging_newton)
    study = uniqueness_study(problem, euclid(), mesh, CFG, trials=5, state=state)
    assert study.converged == 0
    assert not study.complete
    assert study.spread == float("inf")
    assert uniqueness_probe(problem, euclid(), mesh, CFG, trials=5, state=state) == float("inf")


def test_converged_restarts_are_counted():
    mesh = interval(16)
    study = uniqueness_study(CapillaryProblem.from_strings("1 + s"), euclid(1), mesh, CFG, trials=3)
    assert study.converged == 3
    assert study.complete
    assert study.spread < 1e-8
