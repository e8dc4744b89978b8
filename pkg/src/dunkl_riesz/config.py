"""Run configuration, validation and the frozen verification thresholds."""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib


# Ceilings and floors are ten times (floors: one tenth of) the kappa = 0,
# trivial-group values, measured by scripts/calibrate_thresholds.py.
_CALIBRATED = {
    "size": {1: 0.6366197723675988, 2: 0.49999968266671957},
    "smoothness": {1: 1.2729869668375127, 2: 2.57227505207237},
    "lower": {1: 0.0909456817927818, 2: 0.010204081638483964},
    "heat": {1: 1.7724536691638981, 2: 3.9930590071048297},
    "hormander": {1: 0.3498781798205563, 2: 0.5361589176275862},
}
CALIBRATION_PROVENANCE = "scripts/calibrate_thresholds.py --samples 500 --seed 7, trivial group, kappa = 0"


@dataclass(frozen=True)
class Thresholds:
    size: dict = field(default_factory=lambda: dict(_CALIBRATED["size"]))
    smoothness: dict = field(default_factory=lambda: dict(_CALIBRATED["smoothness"]))
    lower: dict = field(default_factory=lambda: dict(_CALIBRATED["lower"]))
    heat: dict = field(default_factory=lambda: dict(_CALIBRATED["heat"]))
    hormander: dict = field(default_factory=lambda: dict(_CALIBRATED["hormander"]))
    factor: float = 10.0
    heat_c_upper: float = 0.125
    heat_c_lower: float = 0.5

    @classmethod
    def default(cls) -> "Thresholds":
        return cls()

    def _get(self, table: dict, dim: int) -> float:
        try:
            return float(table[dim] if dim in table else table[str(dim)])
        except KeyError:
            raise ConfigError("thresholds", f"no calibrated value for dimension {dim}") from None

    def size_ceiling(self, dim: int) -> float:
        return self.factor * self._get(self.size, dim)

    def smoothness_ceiling(self, dim: int) -> float:
        return self.factor * self._get(self.smoothness, dim)

    def lower_floor(self, dim: int) -> float:
        return self._get(self.lower, dim) / self.factor

    def heat_ceiling(self, dim: int) -> float:
        return self.factor * self._get(self.heat, dim)

    def hormander_ceiling(self, dim: int) -> float:
        return self.factor * self._get(self.hormander, dim)


# -- run configuration ---------------------------------------------------------------------


@dataclass
class GroupConfig:
    preset: str = "z2n"  # trivial | z2n | dihedral | product
    dimension: int = 1
    kappa: Any = 1.0
    m: int = 3  # dihedral order
    factors: list = field(default_factory=list)  # for product: list of GroupConfig dicts


@dataclass
class GridConfig:
    half_width: float = 4.0
    cells: int = 256


@dataclass
class QuadratureConfig:
    measure_tol: float = 1e-6
    subordination_nodes: int = 40
    mu_level: int = 4
    eps_sing: float = 1e-8


@dataclass
class FamilyConfig:
    r_min: float = 0.05
    r_max: float = 1.0
    per_decade: int = 3
    center_step: float = 0.25
    center_half_width: float = 3.0


@dataclass
class SymbolConfig:
    preset: str = "log-abs"
    params: dict = field(default_factory=dict)
    csv: str | None = None


@dataclass
class KernelConfig:
    kind: str = "riesz"  # riesz | heat
    points_csv: str | None = None
    pairs: list = field(default_factory=lambda: [[[1.0], [2.0]], [[1.0], [-2.0]]])
    t: float = 1.0
    j: int = 1
    route: str = "subordination"  # subordination | explicit


@dataclass
class MeasureConfig:
    centers: list = field(default_factory=lambda: [[0.0], [1.0]])
    radii: list = field(default_factory=lambda: [0.5, 1.0])
    orbit: bool = False


@dataclass
class CommutatorConfig:
    p: float = 2.0
    eps_trunc: float = 1e-3
    j: int = 1
    presets: list = field(default_factory=lambda: ["sign", "lipschitz-bump", "log-abs", "constant"])
    trials: int = 32


@dataclass
class VerifyConfig:
    pair_samples: int = 500
    heat_samples: int = 1000
    lower_radii: list = field(default_factory=lambda: [0.25, 1.0, 4.0])
    lower_centers: int = 10
    hormander_pairs: int = 10
    outer_radius: float = 8.0
    grids: list = field(default_factory=lambda: [128, 256])
    scales: list = field(default_factory=lambda: [0.5, 1.0, 2.0])


@dataclass
class RunConfig:
    group: GroupConfig = field(default_factory=GroupConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    family: FamilyConfig = field(default_factory=FamilyConfig)
    symbol: SymbolConfig = field(default_factory=SymbolConfig)
    kernel: KernelConfig = field(default_factory=KernelConfig)
    measure: MeasureConfig = field(default_factory=MeasureConfig)
    commutator: CommutatorConfig = field(default_factory=CommutatorConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    thresholds: Thresholds = field(default_factory=Thresholds)
    seed: int = 20240607
    workers: int = 1
    strict: bool = False
    out: str = "artifacts"

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    def validate(self) -> "RunConfig":
        g = self.group
        if g.preset not in ("trivial", "z2n", "dihedral", "product"):
            raise ConfigError("group.preset", f"unknown preset {g.preset!r}")
        if not isinstance(g.dimension, int) or not 1 <= g.dimension <= 3:
            raise ConfigError("group.dimension", "must be an integer in 1..3")
        kap = np.atleast_1d(np.asarray(g.kappa, dtype=float))
        if np.any(kap < 0) or not np.all(np.isfinite(kap)):
            raise ConfigError("group.kappa", "multiplicities must be finite and >= 0")
        if g.preset == "dihedral" and g.m < 2:
            raise ConfigError("group.m", "dihedral order must be >= 2")
        if self.grid.cells < 2 or self.grid.cells % 2:
            raise ConfigError("grid.cells", "must be an even integer >= 2 (keeps sites off the hyperplanes)")
        if not self.grid.half_width > 0:
            raise ConfigError("grid.half_width", "must be positive")
        if not self.quadrature.measure_tol > 0:
            raise ConfigError("quadrature.measure_tol", "must be positive")
        if self.quadrature.subordination_nodes < 4:
            raise ConfigError("quadrature.subordination_nodes", "must be >= 4")
        if not 0 < self.family.r_min <= self.family.r_max:
            raise ConfigError("family.r_min", "need 0 < r_min <= r_max")
        if not 1 < self.commutator.p < np.inf:
            raise ConfigError("commutator.p", "must lie in (1, inf)")
        if not self.commutator.eps_trunc > 0:
            raise ConfigError("commutator.eps_trunc", "must be positive")
        if not 1 <= self.commutator.j <= g.dimension:
            raise ConfigError("commutator.j", f"must lie in 1..{g.dimension}")
        if self.kernel.kind not in ("riesz", "heat"):
            raise ConfigError("kernel.kind", "must be 'riesz' or 'heat'")
        if self.kernel.route not in ("subordination", "explicit"):
            raise ConfigError("kernel.route", "must be 'subordination' or 'explicit'")
        if not self.kernel.t > 0:
            raise ConfigError("kernel.t", "must be positive")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        return self


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _build(cls, data: dict, prefix: str):
    if not isinstance(data, dict):
        raise ConfigError(prefix or "config", "expected a table/object")
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, val in data.items():
        if key not in known:
            raise ConfigError(f"{prefix}{key}", "unknown field")
        default = known[key].default_factory() if callable(known[key].default_factory) else known[key].default
        if is_dataclass(default) and isinstance(val, dict):
            kwargs[key] = _build(type(default), val, f"{prefix}{key}.")
        else:
            kwargs[key] = val
    return cls(**kwargs)


def from_dict(data: dict) -> RunConfig:
    return _build(RunConfig, data, "").validate()


def load(path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_bytes()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {p}: {exc}") from None
    try:
        if p.suffix.lower() == ".toml":
            data = tomllib.loads(text.decode())
        else:
            data = json.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError("config", f"cannot parse {p}: {exc}") from None
    return from_dict(data)
