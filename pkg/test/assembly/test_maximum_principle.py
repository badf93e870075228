import numpy as np
import pytest

from warpcap.mesh.mesh import Mesh
from warpcap.problem.capillary import CapillaryProblem
from warpcap.problem.validation import height_bound
from warpcap.solver.continuation import continuation_solve

from test.util import disk, euclid, hyperbolic_warp

H = 0.1


def strict_interior_maxima(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    a = mesh.adjacency
    out = []
    for v in np.flatnonzero(~mesh.is_boundary_vertex):
        neighbours = a.indices[a.indptr[v] : a.indptr[v + 1]]
        if np.all(u[v] > u[neighbours]):
            out.append(v)
    return np.array(out, dtype=np.int64)


def solve(psi: str, metric, mesh):
    problem = CapillaryProblem.from_strings(psi, "0")
    state = continuation_solve(problem, metric, mesh)
    return state.u.values, height_bound(problem, metric, mesh, state.validation).bound


def test_interior_maximum_stays_below_the_height_bound():
    # linearizes to Δu − u = r² − 1/2 with zero Neumann data: radially decreasing
    mesh = disk(H)
    u, bound = solve("r^2 - 0.5 + s", euclid(), mesh)
    maxima = strict_interior_maxima(mesh, u)
    assert int(np.argmax(u)) in maxima
    assert np.all(u[maxima] <= bound)
    assert np.max(np.abs(u)) <= bound + 10 * H**2


@pytest.mark.parametrize(
    "psi, metric",
    [
        ("0.5 + 0.3*x1 + s + 0.2*s^3", euclid()),
        ("1 - 0.5*r^2 + 2*s", hyperbolic_warp()),
    ],
    ids=["cubic", "hyperbolic"],
)
def test_no_interior_maximum_above_the_height_bound(psi, metric):
    mesh = disk(H)
    u, bound = solve(psi, metric, mesh)
    maxima = strict_interior_maxima(mesh, u)
    assert np.all(u[maxima] <= bound)
    assert np.max(np.abs(u)) <= bound + 10 * H**2
