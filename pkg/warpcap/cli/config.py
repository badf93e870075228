"""
Run configuration files.

A configuration is an INI-style text file of `[section]` headers followed by
`key = value` lines; `#` and `;` start comments. Every key is optional and
falls back to the default of the matching dataclass below. Unknown sections
and keys are rejected. Lists are comma separated, booleans are
true/false/yes/no/on/off/1/0, expressions use the language of
`warpcap.cli.expression`.

    [run]       seed, threads
    [metric]    preset, gamma, conformal, sigma11, sigma12, sigma22,
                dgamma_dx1, dgamma_dx2
    [domain]    shape (disk | annulus | interval | mesh-file), radius,
                inner_radius, a, b, cells, h, mesh_file
    [problem]   family (gravity | tilted), c, kappa, tilt, psi, phi, dpsi_ds,
                dphi_ds, beta, mu, beta_prime, C_psi, C_phi
    [solver]    tol, max_newton, dtau, dtau_min, dtau_max, trials, unsafe
    [output]    directory, formats (csv, vtk)
    [mms]       u_exact, kappa0, h, min_order, angle_min_order
    [oracle]    m_dense, tol
    [verify]    h, min_order, ball_fraction, lemma_taus, uniqueness
"""
import configparser
import dataclasses
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

from gelidum import freeze

from warpcap.errors import ConfigError, InvalidInput, WarpcapError
from warpcap.geometry.metric import (
    MetricField,
    custom_metric,
    euclidean_metric,
    product_metric,
    radial_warp_metric,
)
from warpcap.mesh.generate import (
    generate_annulus_mesh,
    generate_disk_mesh,
    generate_interval_mesh,
)
from warpcap.mesh.io import read_mesh
from warpcap.mesh.mesh import Mesh
from warpcap.problem.capillary import BUILTIN_FAMILIES, CapillaryProblem
from warpcap.solver.continuation import ContinuationConfig
from warpcap.utils.env import default_output_dir, default_threads

SHAPES = ("disk", "annulus", "interval", "mesh-file")
FORMATS = ("csv", "vtk")


@dataclass
class RunSection:
    seed: int = 0
    threads: Optional[int] = None


@dataclass
class MetricSection:
    preset: str = "euclidean"
    gamma: Optional[str] = None
    conformal: Optional[str] = None
    sigma11: Optional[str] = None
    sigma12: Optional[str] = None
    sigma22: Optional[str] = None
    dgamma_dx1: Optional[str] = None
    dgamma_dx2: Optional[str] = None


@dataclass
class DomainSection:
    shape: str = "disk"
    radius: float = 1.0
    inner_radius: float = 0.5
    a: float = 0.0
    b: float = 1.0
    cells: int = 64
    h: float = 0.1
    mesh_file: Optional[str] = None


@dataclass
class ProblemSection:
    family: Optional[str] = None
    c: float = 1.0
    kappa: float = 1.0
    tilt: float = 0.1
    psi: str = "s"
    phi: str = "0"
    dpsi_ds: Optional[str] = None
    dphi_ds: Optional[str] = None
    beta: Optional[float] = None
    mu: Optional[float] = None
    beta_prime: Optional[float] = None
    C_psi: Optional[float] = None
    C_phi: Optional[float] = None


@dataclass
class SolverSection:
    tol: float = 1e-10
    max_newton: int = 50
    dtau: float = 0.1
    dtau_min: float = 1e-4
    dtau_max: float = 0.25
    trials: int = 5
    unsafe: bool = False


@dataclass
class OutputSection:
    directory: Optional[str] = None
    formats: Tuple[str, ...] = ("csv",)


@dataclass
class MmsSection:
    u_exact: str = "sqrt(4 - r^2)"
    kappa0: float = 1.0
    h: Tuple[float, ...] = (0.2, 0.1, 0.05)
    min_order: float = 1.8
    angle_min_order: float = 0.8


@dataclass
class OracleSection:
    m_dense: int = 4096
    tol: float = 1e-12


@dataclass
class VerifySection:
    h: Tuple[float, ...] = (0.2, 0.1, 0.05)
    min_order: float = 0.8
    ball_fraction: float = 0.5
    lemma_taus: Tuple[float, ...] = (1e-2, 5e-3, 2.5e-3)
    uniqueness: bool = False


@dataclass
class RunConfig:
    run: RunSection = field(default_factory=RunSection)
    metric: MetricSection = field(default_factory=MetricSection)
    domain: DomainSection = field(default_factory=DomainSection)
    problem: ProblemSection = field(default_factory=ProblemSection)
    solver: SolverSection = field(default_factory=SolverSection)
    output: OutputSection = field(default_factory=OutputSection)
    mms: MmsSection = field(default_factory=MmsSection)
    oracle: OracleSection = field(default_factory=OracleSection)
    verify: VerifySection = field(default_factory=VerifySection)


SECTIONS = {f.name: f.default_factory for f in dataclasses.fields(RunConfig)}


def _coerce(where: str, raw: str, kind):
    if typing.get_origin(kind) is Union:
        if raw.strip().lower() in ("", "none"):
            return None
        (kind,) = [k for k in typing.get_args(kind) if k is not type(None)]
    if typing.get_origin(kind) is tuple:
        (item, _) = typing.get_args(kind)
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        if not parts:
            raise ConfigError(f"{where}: expected a comma separated list")
        return tuple(_coerce(where, p, item) for p in parts)
    raw = raw.strip()
    if kind is bool:
        states = configparser.ConfigParser.BOOLEAN_STATES
        if raw.lower() not in states:
            raise ConfigError(f"{where}: expected a boolean, got '{raw}'")
        return states[raw.lower()]
    if kind is int or kind is float:
        try:
            return kind(raw)
        except ValueError:
            raise ConfigError(f"{where}: expected {kind.__name__}, got '{raw}'") from None
    return raw


def _section(name: str, items) -> object:
    cls = SECTIONS[name]
    hints = typing.get_type_hints(cls)
    values = {}
    for key, raw in items:
        if key not in hints:
            raise ConfigError(
                f"unknown key '{key}' in section [{name}], expected one of {sorted(hints)}"
            )
        values[key] = _coerce(f"[{name}] {key}", raw, hints[key])
    return cls(**values)


def _check(ok: bool, where: str, message: str):
    if not ok:
        raise ConfigError(f"{where}: {message}")


def check_ranges(cfg: RunConfig) -> None:
    """Raise ConfigError naming the first parameter outside its documented range."""
    d, m, o, v = cfg.domain, cfg.mms, cfg.oracle, cfg.verify
    _check(cfg.run.threads is None or cfg.run.threads >= 1, "[run] threads", "must be at least 1")
    _check(d.shape in SHAPES, "[domain] shape", f"must be one of {SHAPES}, got '{d.shape}'")
    _check(d.h > 0, "[domain] h", f"must be positive, got {d.h}")
    _check(d.cells >= 2, "[domain] cells", f"must be at least 2, got {d.cells}")
    _check(d.radius > 0, "[domain] radius", f"must be positive, got {d.radius}")
    _check(
        0 < d.inner_radius < d.radius or d.shape != "annulus",
        "[domain] inner_radius",
        f"must lie in (0, radius), got {d.inner_radius}",
    )
    _check(d.a < d.b, "[domain] b", f"must exceed a, got a={d.a}, b={d.b}")
    _check(
        d.shape != "mesh-file" or d.mesh_file is not None,
        "[domain] mesh_file",
        "required for shape mesh-file",
    )
    _check(
        cfg.problem.family is None or cfg.problem.family in BUILTIN_FAMILIES,
        "[problem] family",
        f"must be one of {sorted(BUILTIN_FAMILIES)}, got '{cfg.problem.family}'",
    )
    for fmt in cfg.output.formats:
        _check(fmt in FORMATS, "[output] formats", f"unknown format '{fmt}', expected {FORMATS}")
    _check(m.kappa0 > 0, "[mms] kappa0", f"must be positive, got {m.kappa0}")
    for where, hs in (("[mms] h", m.h), ("[verify] h", v.h)):
        _check(all(h > 0 for h in hs), where, "every resolution must be positive")
    _check(o.m_dense >= 2, "[oracle] m_dense", f"must be at least 2, got {o.m_dense}")
    _check(o.tol > 0, "[oracle] tol", f"must be positive, got {o.tol}")
    _check(0 < v.ball_fraction < 1, "[verify] ball_fraction", "must lie in (0, 1)")
    _check(
        len(v.lemma_taus) == 3 and all(t > 0 for t in v.lemma_taus),
        "[verify] lemma_taus",
        "needs three positive values",
    )
    try:
        continuation_config(cfg)
    except InvalidInput as e:
        raise ConfigError(f"[solver] {e}") from e


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, strict=True, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError(f"{source}: {e}") from e
    if parser.defaults():
        raise ConfigError(f"{source}: a [DEFAULT] section is not supported")
    sections = {}
    for name in parser.sections():
        if name not in SECTIONS:
            raise ConfigError(f"{source}: unknown section [{name}], expected one of {sorted(SECTIONS)}")
        sections[name] = _section(name, parser.items(name))
    cfg = RunConfig(**sections)
    check_ranges(cfg)
    return cfg


def load_config(
    path: Union[str, Path] = None,
    seed: int = None,
    threads: int = None,
    output_dir: Union[str, Path] = None,
):
    """
    Parse the configuration file (defaults if None), apply the command line
    overrides and return the frozen result.
    """
    if path is None:
        cfg = RunConfig()
    else:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        cfg = parse_config(text, source=str(path))
    if seed is not None:
        cfg.run.seed = int(seed)
    if threads is not None:
        cfg.run.threads = int(threads)
    elif cfg.run.threads is None:
        cfg.run.threads = default_threads()
    if output_dir is not None:
        cfg.output.directory = str(output_dir)
    elif cfg.output.directory is None:
        cfg.output.directory = str(default_output_dir())
    check_ranges(cfg)
    return freeze(cfg, on_freeze="copy")


def continuation_config(cfg: RunConfig) -> ContinuationConfig:
    s = cfg.solver
    return ContinuationConfig(
        tol=s.tol,
        max_newton=s.max_newton,
        dtau=s.dtau,
        dtau_min=s.dtau_min,
        dtau_max=s.dtau_max,
        trials=s.trials,
        unsafe=s.unsafe,
        seed=cfg.run.seed,
    )


def domain_dim(cfg: RunConfig) -> int:
    if cfg.domain.shape == "interval":
        return 1
    if cfg.domain.shape == "mesh-file":
        return read_mesh(cfg.domain.mesh_file).dim
    return 2


def build_metric(cfg: RunConfig, dim: int = None) -> MetricField:
    m = cfg.metric
    dim = domain_dim(cfg) if dim is None else dim
    sigma = (m.sigma11 or "1",) if dim == 1 else (m.sigma11 or "1", m.sigma12 or "0", m.sigma22 or "1")
    try:
        if m.preset == "euclidean":
            return euclidean_metric(dim)
        if m.preset == "product":
            return product_metric(sigma, dim)
        if m.preset == "radial-warp":
            return radial_warp_metric(m.conformal or "1", m.gamma or "1", dim)
        if m.preset == "custom-expression":
            if m.gamma is None:
                raise ConfigError("[metric] gamma: required for preset custom-expression")
            gradient = None
            if m.dgamma_dx1 is not None:
                gradient = (m.dgamma_dx1,) if dim == 1 else (m.dgamma_dx1, m.dgamma_dx2 or "0")
            return custom_metric(m.gamma, sigma, dim, gradient)
    except InvalidInput as e:
        raise ConfigError(f"[metric] {e}") from e
    raise ConfigError(f"[metric] preset: unknown preset '{m.preset}'")


def resolution_mesh(cfg: RunConfig, h: float = None) -> Mesh:
    """
    The configured domain, meshed at edge length h (the configured one if
    None). Interval meshes use `cells` unless h is given.
    """
    d = cfg.domain
    try:
        if d.shape == "disk":
            return generate_disk_mesh(d.radius, d.h if h is None else h)
        if d.shape == "annulus":
            return generate_annulus_mesh(d.inner_radius, d.radius, d.h if h is None else h)
        if d.shape == "interval":
            cells = d.cells if h is None else max(2, round((d.b - d.a) / h))
            return generate_interval_mesh(d.a, d.b, cells)
    except InvalidInput as e:
        raise ConfigError(f"[domain] {e}") from e
    if h is not None:
        raise ConfigError("[domain] shape: a mesh file cannot be refined")
    return read_mesh(d.mesh_file)


def build_problem(cfg: RunConfig) -> CapillaryProblem:
    p = cfg.problem
    declared = dict(beta=p.beta, mu=p.mu, beta_prime=p.beta_prime, C_psi=p.C_psi, C_phi=p.C_phi)
    try:
        if p.family == "gravity":
            problem = BUILTIN_FAMILIES["gravity"](p.c, p.kappa, float(p.phi))
        elif p.family == "tilted":
            problem = BUILTIN_FAMILIES["tilted"](p.c, p.tilt, p.kappa, float(p.phi))
        else:
            return CapillaryProblem.from_strings(p.psi, p.phi, p.dpsi_ds, p.dphi_ds, **declared)
        return dataclasses.replace(problem, **declared)
    except ValueError as e:
        raise ConfigError(f"[problem] {e}") from e
    except WarpcapError as e:
        raise ConfigError(f"[problem] {e}") from e
