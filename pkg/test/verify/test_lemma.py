import numpy as np
import pytest

from warpcap.errors import InvalidInput, PreconditionError
from warpcap.mesh.mesh import ScalarField
from warpcap.problem.capillary import CapillaryProblem
from warpcap.solver.continuation import continuation_solve
from warpcap.verify.lemma import bump_field, displaced_separation, lemma1i_check
from warpcap.verify.mms import interpolate

from test.util import disk, euclid

H = 0.05
TAUS = (1e-2, 5e-3, 2.5e-3)


@pytest.fixture(scope="module")
def mesh():
    return disk(H)


@pytest.fixture(scope="module")
def zeta(mesh):
    return bump_field(mesh, (0.0, 0.0), 0.5)


def test_bump_vanishes_near_the_boundary(mesh, zeta):
    assert zeta.values[0] == pytest.approx(1.0)
    assert np.all(zeta.values[mesh.is_boundary_vertex] == 0)
    assert np.all(zeta.values[np.linalg.norm(mesh.vertices, axis=1) >= 0.5] == 0)
    assert np.all(zeta.values >= 0)


def test_bump_radius_must_be_positive(mesh):
    with pytest.raises(InvalidInput):
        bump_field(mesh, (0.0, 0.0), 0.0)


def test_constant_graph_moves_straight_up(mesh, zeta):
    u = ScalarField(mesh, np.full(mesh.n_vertices, 0.4))
    s = displaced_separation(u, euclid(), zeta, 1e-2)
    assert np.allclose(s, 1e-2 * zeta.values, atol=1e-15)
    cert = lemma1i_check(u, euclid(), mesh, zeta, TAUS)
    assert cert.passed
    assert cert.details["exact"]


def test_linear_graph(mesh, zeta):
    u = interpolate(mesh, "0.3*x1 - 0.2*x2")
    cert = lemma1i_check(u, euclid(), mesh, zeta, TAUS)
    assert cert.passed, cert
    if not cert.details["exact"]:
        assert 0.8 <= cert.observed <= 1.2


@pytest.fixture(scope="module")
def capillary(mesh):
    return continuation_solve(CapillaryProblem.from_strings("1 + s", "0.3"), euclid(), mesh).u


def test_converged_capillary_graph(mesh, zeta, capillary):
    cert = lemma1i_check(capillary, euclid(), mesh, zeta, TAUS)
    assert cert.passed, cert
    assert 0.8 <= cert.observed <= 1.2
    assert cert.details["floor_ok"]
    assert 0 < cert.details["floor"] <= cert.details["floor_tolerance"]


def test_floor_above_its_tolerance_fails(mesh, zeta, capillary):
    floor = lemma1i_check(capillary, euclid(), mesh, zeta, TAUS).details["floor"]
    cert = lemma1i_check(capillary, euclid(), mesh, zeta, TAUS, floor_tolerance=floor / 2)
    assert not cert.passed
    assert not cert.details["floor_ok"]


def test_support_must_avoid_the_boundary(mesh):
    u = ScalarField.zeros(mesh)
    with pytest.raises(PreconditionError):
        lemma1i_check(u, euclid(), mesh, ScalarField(mesh, np.ones(mesh.n_vertices)), TAUS)


def test_three_step_sizes_are_needed(mesh, zeta):
    with pytest.raises(InvalidInput):
        lemma1i_check(ScalarField.zeros(mesh), euclid(), mesh, zeta, (1e-2, 5e-3))
