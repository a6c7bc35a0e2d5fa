"""Experiment configuration files.

A config is one JSON document::

    {
      "name": "brownian-stable",
      "scales": {"phi_c": {...}, "phi_j": {...}, "psi": {...}},
      "volume": {"ahlfors_exponent": 1.0},
      "envelope": {"mode": "diffusion_plus_jump", "phi_c": "phi_c", "phi_j": "phi_j",
                   "constants": [1, 1, 1, 1]},
      "psi": "psi",
      "grid": {"decades": [-3, 3], "points_per_decade": 32},
      "jump_kernel": {"target": "full", "against": "kernel"},
      "bernstein": {"lambdas": [0.01, 1, 100]},
      "mc": {"eps": 1e-4, "T": 1.0, "n_paths": 100000, "lambdas": [0, 1]},
      "tol": 1e-9,
      "seed": 0
    }

Envelope and psi entries refer to names under ``scales``.  Errors name the
offending field; JSON syntax errors carry the line and column.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .bernstein import LevySpec
from .errors import ConfigError
from .kernels import MODES, HeatKernelEnvelope
from .scales import ScaleSpec, VolumeProfile, log_grid
from .subordinate import KERNEL_REL_TOL, TARGETS, SubordinationProblem

_TOP_KEYS = {"name", "description", "scales", "volume", "envelope", "psi", "grid",
             "jump_kernel", "bernstein", "mc", "tol", "seed"}


@dataclass(frozen=True)
class GridConfig:
    decades: tuple = (-3.0, 3.0)
    points_per_decade: int = 32

    def radii(self):
        lo, hi = self.decades
        return log_grid(10.0 ** lo, 10.0 ** hi, self.points_per_decade)


@dataclass(frozen=True)
class MCConfig:
    eps: float = 1e-4
    T: float = 1.0
    n_paths: int = 100_000
    lambdas: tuple = (0.0, 0.5, 1.0, 2.0)
    dump_samples: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    scales: dict
    volume: VolumeProfile
    mode: str
    phi_j: str
    psi: str
    phi_c: str | None = None
    constants: tuple = (1.0, 1.0, 1.0, 1.0)
    grid: GridConfig = field(default_factory=GridConfig)
    target: str = "full"
    against: str = "kernel"
    lambdas: tuple = tuple(float(x) for x in np.logspace(-2, 2, 9))
    mc: MCConfig = field(default_factory=MCConfig)
    tol: float = KERNEL_REL_TOL
    seed: int = 0
    description: str = ""

    def envelope(self):
        phi_c = None if self.phi_c is None else self.scales[self.phi_c]
        return HeatKernelEnvelope(self.mode, self.scales[self.phi_j], self.volume, phi_c, self.constants)

    def levy(self):
        return LevySpec(self.envelope().phi, self.scales[self.psi])

    def problem(self):
        return SubordinationProblem(self.envelope(), self.scales[self.psi], rel_tol=self.tol)

    def override(self, **kw):
        return replace(self, **kw)

    @classmethod
    def from_dict(cls, d, source="<config>"):
        return _parse(d, source)

    def to_dict(self):
        env = {"mode": self.mode, "phi_j": self.phi_j, "constants": list(self.constants)}
        if self.phi_c is not None:
            env["phi_c"] = self.phi_c
        return {
            "name": self.name,
            "description": self.description,
            "scales": {k: v.to_dict() for k, v in self.scales.items()},
            "volume": self.volume.to_dict(),
            "envelope": env,
            "psi": self.psi,
            "grid": {"decades": list(self.grid.decades), "points_per_decade": self.grid.points_per_decade},
            "jump_kernel": {"target": self.target, "against": self.against},
            "bernstein": {"lambdas": list(self.lambdas)},
            "mc": {"eps": self.mc.eps, "T": self.mc.T, "n_paths": self.mc.n_paths,
                   "lambdas": list(self.mc.lambdas), "dump_samples": self.mc.dump_samples},
            "tol": self.tol,
            "seed": self.seed,
        }


def _need(d, key, where):
    if key not in d:
        raise ConfigError(f"{where}: missing field '{key}'")
    return d[key]


def _number(x, where, positive=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {x!r}")
    x = float(x)
    if not np.isfinite(x) or (positive and not x > 0):
        raise ConfigError(f"{where}: expected a positive finite number, got {x!r}")
    return x


def _numbers(xs, where, nonneg=True):
    if not isinstance(xs, list):
        raise ConfigError(f"{where}: expected a list of numbers")
    out = tuple(_number(x, f"{where}[{i}]") for i, x in enumerate(xs))
    if nonneg and any(x < 0 for x in out):
        raise ConfigError(f"{where}: values must be nonnegative")
    return out


def _parse(d, source):
    if not isinstance(d, dict):
        raise ConfigError(f"{source}: top level must be an object")
    unknown = set(d) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"{source}: unknown fields {sorted(unknown)}")
    scales_raw = _need(d, "scales", source)
    if not isinstance(scales_raw, dict) or not scales_raw:
        raise ConfigError(f"{source}: 'scales' must be a non-empty object")
    scales = {}
    for key, spec in scales_raw.items():
        try:
            scales[key] = ScaleSpec.from_dict(spec)
        except (ConfigError, ValueError) as exc:
            raise ConfigError(f"{source}: scales.{key}: {exc}") from exc
    try:
        vol = VolumeProfile.from_dict(_need(d, "volume", source))
    except (ConfigError, ValueError) as exc:
        raise ConfigError(f"{source}: volume: {exc}") from exc

    env = _need(d, "envelope", source)
    if not isinstance(env, dict):
        raise ConfigError(f"{source}: 'envelope' must be an object")
    mode = _need(env, "mode", f"{source}: envelope")
    if mode not in MODES:
        raise ConfigError(f"{source}: envelope.mode must be one of {list(MODES)}, got {mode!r}")

    def ref(name, where):
        if name not in scales:
            raise ConfigError(f"{source}: {where} refers to unknown scale {name!r}")
        return name

    phi_j = ref(_need(env, "phi_j", f"{source}: envelope"), "envelope.phi_j")
    phi_c = env.get("phi_c")
    if phi_c is not None:
        ref(phi_c, "envelope.phi_c")
    constants = _numbers(env.get("constants", [1, 1, 1, 1]), f"{source}: envelope.constants")
    if len(constants) != 4 or any(c <= 0 for c in constants):
        raise ConfigError(f"{source}: envelope.constants must be four positive numbers")
    psi = ref(_need(d, "psi", source), "psi")

    g = d.get("grid", {})
    decades = g.get("decades", [-3, 3])
    if not (isinstance(decades, list) and len(decades) == 2):
        raise ConfigError(f"{source}: grid.decades must be [lo, hi]")
    lo, hi = (_number(x, f"{source}: grid.decades") for x in decades)
    ppd = g.get("points_per_decade", 32)
    if isinstance(ppd, bool) or not isinstance(ppd, int) or ppd < 1:
        raise ConfigError(f"{source}: grid.points_per_decade must be a positive integer")
    if not hi > lo:
        raise ConfigError(f"{source}: grid.decades must satisfy lo < hi")

    jk = d.get("jump_kernel", {})
    target = jk.get("target", "full")
    against = jk.get("against", "kernel")
    if target not in TARGETS:
        raise ConfigError(f"{source}: jump_kernel.target must be one of {list(TARGETS)}")
    if against != "kernel" and against not in TARGETS:
        raise ConfigError(f"{source}: jump_kernel.against must be 'kernel' or a target name")

    lambdas = _numbers(d.get("bernstein", {}).get("lambdas", [10.0 ** k for k in range(-2, 3)]),
                       f"{source}: bernstein.lambdas")

    m = d.get("mc", {})
    n_paths = m.get("n_paths", 100_000)
    if isinstance(n_paths, bool) or not isinstance(n_paths, int) or n_paths < 1:
        raise ConfigError(f"{source}: mc.n_paths must be a positive integer")
    mc = MCConfig(_number(m.get("eps", 1e-4), f"{source}: mc.eps", positive=True),
                  _number(m.get("T", 1.0), f"{source}: mc.T"),
                  n_paths,
                  _numbers(m.get("lambdas", [0.0, 0.5, 1.0, 2.0]), f"{source}: mc.lambdas"),
                  bool(m.get("dump_samples", False)))
    if mc.T < 0:
        raise ConfigError(f"{source}: mc.T must be nonnegative")

    tol = _number(d.get("tol", KERNEL_REL_TOL), f"{source}: tol", positive=True)
    seed = d.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigError(f"{source}: seed must be an unsigned 64-bit integer")

    return ExperimentConfig(str(d.get("name", Path(str(source)).stem)), scales, vol, mode, phi_j, psi,
                            phi_c, constants, GridConfig((lo, hi), ppd), target, against, lambdas,
                            mc, tol, seed, str(d.get("description", "")))


def load_config(path):
    """Read a config file; ``path`` may also be the name of a built-in preset."""
    p = Path(path)
    if not p.exists():
        if str(path) in preset_names():
            return load_preset(str(path))
        raise ConfigError(f"config file not found: {path}")
    return _loads(p.read_text(encoding="utf-8"), str(p))


def _loads(text, source):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return _parse(d, source)


def _preset_dir():
    return resources.files("subordination") / "presets"


def preset_names():
    return sorted(p.name[:-5] for p in _preset_dir().iterdir() if p.name.endswith(".json"))


def load_preset(name):
    f = _preset_dir() / f"{name}.json"
    if not f.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {preset_names()}")
    return _loads(f.read_text(encoding="utf-8"), f"preset:{name}")
