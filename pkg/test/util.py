import dataclasses
from pathlib import Path

import numpy as np

from warpcap.geometry.metric import custom_metric, euclidean_metric, radial_warp_metric
from warpcap.mesh.generate import generate_disk_mesh, generate_interval_mesh
from warpcap.mesh.mesh import Mesh, ScalarField


@dataclasses.dataclass()
class SuiteConfig:
    radius: float = 1.0
    h: float = 0.1
    a: float = 0.0
    b: float = 1.0
    cells: int = 64
    tol: float = 1e-10
    seed: int = 0


DEFAULT_CONFIG = SuiteConfig()


def disk(h: float = DEFAULT_CONFIG.h, radius: float = DEFAULT_CONFIG.radius) -> Mesh:
    return generate_disk_mesh(radius, h)


def interval(m: int = DEFAULT_CONFIG.cells, a: float = DEFAULT_CONFIG.a, b: float = DEFAULT_CONFIG.b) -> Mesh:
    return generate_interval_mesh(a, b, m)


def euclid(dim: int = 2):
    return euclidean_metric(dim)


def exponential_warp():
    """One-dimensional leaf with γ = e^{2x}."""
    return custom_metric("exp(2*x1)", ("1",), dim=1)


def hyperbolic_warp():
    """Radial warp of the unit disk with γ = cosh(r)^2 and σ = (1 + r²/4)² I."""
    return radial_warp_metric("1 + r^2/4", "cosh(r)^2")


def random_field(mesh: Mesh, seed: int = 0, amplitude: float = 0.3) -> ScalarField:
    rng = np.random.default_rng(seed)
    return ScalarField(mesh, amplitude * rng.uniform(-1, 1, mesh.n_vertices))


def smooth_field(mesh: Mesh, seed: int = 0, amplitude: float = 0.3) -> ScalarField:
    """A random low-frequency trigonometric field, so gradients stay moderate."""
    rng = np.random.default_rng(seed)
    k = rng.uniform(0.5, 2.0, mesh.dim)
    phase = rng.uniform(0, 2 * np.pi)
    return ScalarField(mesh, amplitude * np.sin(mesh.vertices @ k + phase))


def write_config(directory: Path, text: str, name: str = "run.ini") -> Path:
    path = Path(directory).joinpath(name)
    path.write_text(text)
    return path
