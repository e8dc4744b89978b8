"""Grid functions and the BMO / VMO machinery on weighted grids.

Grids are cell-centred tensor grids on a box; the quadrature weight of a site
is the Dunkl density at the site times the cell volume.  Regions are Euclidean
balls or orbit balls O(B) = union of B(g c, r), and every average is a weighted
mean over the grid sites falling inside the region.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import GridMismatch, InsufficientResolution, InvalidArgument
from .measure import Ball, OrbitBall, WeightedMeasure
from .reflection import orbit_distance

MIN_POINTS = 8
MODES = ("euclidean", "orbit")


class DomainClipped(UserWarning):
    """A shifted grid left the box; ``bound`` bounds the lost L^p contribution."""

    def __init__(self, message: str, bound: float):
        super().__init__(message)
        self.bound = bound


@dataclass(frozen=True, eq=False)
class Grid:
    measure: WeightedMeasure
    axes: tuple[np.ndarray, ...]
    points: np.ndarray
    weights: np.ndarray
    cell_volume: float

    @classmethod
    def uniform(cls, measure: WeightedMeasure, half_width, n) -> "Grid":
        """Cell-centred grid on prod [-a_i, a_i] with n_i cells per axis.

        Centres never land on a coordinate hyperplane when n_i is even.
        """
        dim = measure.dimension
        hw = np.broadcast_to(np.asarray(half_width, dtype=float), (dim,))
        nn = np.broadcast_to(np.asarray(n, dtype=int), (dim,))
        if np.any(hw <= 0) or np.any(nn < 2):
            raise InvalidArgument("need positive half widths and at least 2 cells per axis")
        axes = tuple(-a + (np.arange(k) + 0.5) * (2 * a / k) for a, k in zip(hw, nn))
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        vol = float(np.prod(2 * hw / nn))
        w = measure.density(pts) * vol
        return cls(measure=measure, axes=axes, points=pts, weights=w, cell_volume=vol)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    @property
    def spacing(self) -> np.ndarray:
        return np.array([a[1] - a[0] for a in self.axes])

    def mask(self, region) -> np.ndarray:
        if isinstance(region, OrbitBall):
            c, r = region.base.center, region.base.radius
            return orbit_distance(self.measure.group, self.points, np.broadcast_to(c, self.points.shape)) < r
        if isinstance(region, Ball):
            return np.sum((self.points - region.center) ** 2, axis=1) < region.radius**2
        raise InvalidArgument(f"unsupported region {region!r}")

    def function(self, values) -> "GridFunction":
        return GridFunction(self, np.asarray(values, dtype=float))

    def sample(self, f: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return self.function(f(self.points))


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.shape != (self.grid.size,):
            raise GridMismatch(f"{v.size} values for a grid of {self.grid.size} sites")
        object.__setattr__(self, "values", v)

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    @property
    def quad_weights(self) -> np.ndarray:
        return self.grid.weights

    def lp_norm(self, p: float = 2.0) -> float:
        return float(np.sum(np.abs(self.values) ** p * self.grid.weights) ** (1.0 / p))

    @classmethod
    def from_csv(cls, grid: Grid, path) -> "GridFunction":
        """Read ``x1,...,xN,value`` rows; sites must match the grid up to 1e-9."""
        rows = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        if rows.shape[1] != grid.measure.dimension + 1:
            raise GridMismatch(f"expected {grid.measure.dimension + 1} columns, got {rows.shape[1]}")
        if len(rows) != grid.size or np.max(np.abs(rows[:, :-1] - grid.points)) > 1e-9:
            raise GridMismatch("CSV sites do not match the grid")
        return cls(grid, rows[:, -1])


# -- region statistics -------------------------------------------------------------


def _region(f: GridFunction, region, min_points: int = MIN_POINTS):
    m = f.grid.mask(region)
    k = int(m.sum())
    if k < min_points:
        raise InsufficientResolution(f"region holds {k} grid sites, need {min_points}")
    return f.values[m], f.grid.weights[m], m


def ball_average(f: GridFunction, region, min_points: int = MIN_POINTS) -> float:
    v, w, _ = _region(f, region, min_points)
    return float(np.sum(v * w) / np.sum(w))


def oscillation(f: GridFunction, region, min_points: int = MIN_POINTS) -> float:
    v, w, _ = _region(f, region, min_points)
    avg = np.sum(v * w) / np.sum(w)
    return float(np.sum(np.abs(v - avg) * w) / np.sum(w))


def weighted_lower_median(values, weights) -> float:
    """Smallest v with mass{f <= v} >= half the total mass."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    k = int(np.searchsorted(cum, 0.5 * cum[-1], side="left"))
    # guard against round-off in the cumulative sum
    while k > 0 and cum[k - 1] >= 0.5 * cum[-1]:
        k -= 1
    return float(values[order][min(k, len(values) - 1)])


def median_value(f: GridFunction, region, min_points: int = MIN_POINTS) -> float:
    v, w, _ = _region(f, region, min_points)
    return weighted_lower_median(v, w)


@dataclass(frozen=True)
class MedianSplit:
    median: float
    E1: np.ndarray
    E2: np.ndarray
    F1: np.ndarray
    F2: np.ndarray
    mass_F1: float
    mass_F2: float
    mass_tilde: float

    def verify(self, f: GridFunction, ball: Ball) -> dict:
        """Brute-force pair scan of the split postconditions."""
        b = f.values
        inside = np.flatnonzero(f.grid.mask(ball))
        cover = np.array_equal(np.sort(np.concatenate([self.E1, self.E2])), inside)
        disjoint = np.intersect1d(self.E1, self.E2).size == 0
        out = {"cover": bool(cover and disjoint)}
        for name, e, fs in (("pair1", self.E1, self.F1), ("pair2", self.E2, self.F2)):
            if e.size == 0 or fs.size == 0:
                out[f"{name}_sign"] = True
                out[f"{name}_median_gap"] = True
                continue
            diff = b[e][:, None] - b[fs][None, :]
            signs = np.sign(diff)
            nz = signs[signs != 0]
            out[f"{name}_sign"] = bool(nz.size == 0 or np.all(nz == nz[0]))
            gap = np.abs(b[e] - self.median)[:, None] <= np.abs(diff)
            out[f"{name}_median_gap"] = bool(np.all(gap))
        return out


def median_split(f: GridFunction, ball: Ball, ball_tilde: Ball, min_points: int = MIN_POINTS) -> MedianSplit:
    """E/F sets for a ball B and its companion B~ around the median of f on B~."""
    _, wt, mt = _region(f, ball_tilde, min_points)
    _, _, mb = _region(f, ball, min_points)
    b = f.values
    m = median_value(f, ball_tilde, min_points)
    idx_t = np.flatnonzero(mt)
    idx_b = np.flatnonzero(mb)
    F1 = idx_t[b[idx_t] <= m]
    F2 = idx_t[b[idx_t] >= m]
    E1 = idx_b[b[idx_b] >= m]
    E2 = idx_b[b[idx_b] < m]
    w = f.grid.weights
    total = float(wt.sum())
    m1, m2 = float(w[F1].sum()), float(w[F2].sum())
    if m1 < 0.5 * total * (1 - 1e-12) or m2 < 0.5 * total * (1 - 1e-12):
        raise InsufficientResolution(f"F-set mass below half of omega(B~): {m1:.4g}, {m2:.4g} of {total:.4g}")
    return MedianSplit(m, E1, E2, F1, F2, m1, m2, total)


# -- families, maximal and sharp functions -------------------------------------------


@dataclass(frozen=True)
class BallFamily:
    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float)
        object.__setattr__(self, "centers", c.reshape(len(c), -1))
        object.__setattr__(self, "radii", np.asarray(self.radii, dtype=float).reshape(-1))
        if len(self.centers) == 0 or len(self.radii) == 0:
            raise InvalidArgument("ball family must be non-empty")

    @classmethod
    def geometric(cls, centers, r_min: float, r_max: float, per_decade: int = 3) -> "BallFamily":
        """Radii r_max * 10^(-j / per_decade) down to r_min; families with a common r_max nest."""
        if not 0 < r_min <= r_max:
            raise InvalidArgument("need 0 < r_min <= r_max")
        k = int(np.floor(per_decade * np.log10(r_max / r_min) + 1e-9))
        return cls(np.asarray(centers, dtype=float), r_max * 10.0 ** (-np.arange(k + 1) / per_decade))

    @classmethod
    def dyadic(cls, centers, r_min: float, r_max: float) -> "BallFamily":
        """Radii r_max * 2^-j down to r_min."""
        if not 0 < r_min <= r_max:
            raise InvalidArgument("need 0 < r_min <= r_max")
        k = int(np.floor(np.log2(r_max / r_min) + 1e-9))
        return cls(np.asarray(centers, dtype=float), r_max * 2.0 ** -np.arange(k + 1))

    @classmethod
    def lattice(cls, half_width: float, step: float, dimension: int, radii) -> "BallFamily":
        ax = np.arange(-half_width, half_width + 0.5 * step, step)
        mesh = np.meshgrid(*[ax] * dimension, indexing="ij")
        return cls(np.stack([m.ravel() for m in mesh], -1), radii)

    def balls(self) -> Iterable[tuple[np.ndarray, float]]:
        for c in self.centers:
            for r in self.radii:
                yield c, float(r)

    def __len__(self) -> int:
        return len(self.centers) * len(self.radii)


def _make_region(c, r, mode: str):
    if mode not in MODES:
        raise InvalidArgument(f"mode must be one of {MODES}")
    b = Ball(c, r)
    return b if mode == "euclidean" else OrbitBall(b)


@dataclass(frozen=True)
class OscillationRow:
    center: tuple
    radius: float
    mode: str
    average: float
    oscillation: float
    status: str = "ok"


@dataclass
class OscillationReport:
    mode: str
    rows: list[OscillationRow]
    by_radius: dict = field(default_factory=dict)
    by_distance: dict = field(default_factory=dict)

    @property
    def valid_rows(self) -> list[OscillationRow]:
        return [r for r in self.rows if r.status == "ok"]

    @property
    def sup(self) -> float:
        v = [r.oscillation for r in self.valid_rows]
        return max(v) if v else float("nan")

    @property
    def skipped(self) -> int:
        return sum(r.status != "ok" for r in self.rows)

    def argmax(self) -> OscillationRow | None:
        v = self.valid_rows
        return max(v, key=lambda r: r.oscillation) if v else None

    def summary(self) -> dict:
        best = self.argmax()
        return {
            "mode": self.mode,
            "sup": self.sup,
            "balls": len(self.rows),
            "skipped": self.skipped,
            "argmax": None if best is None else {"center": list(best.center), "radius": best.radius},
            "by_radius": {str(k): v for k, v in self.by_radius.items()},
            "by_distance": {str(k): v for k, v in self.by_distance.items()},
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            dim = len(self.rows[0].center) if self.rows else 1
            w.writerow([f"c{i + 1}" for i in range(dim)] + ["radius", "mode", "average", "oscillation", "status"])
            for r in self.rows:
                w.writerow(list(r.center) + [r.radius, r.mode, r.average, r.oscillation, r.status])


def _scan(f: GridFunction, family: BallFamily, mode: str, min_points: int) -> list[OscillationRow]:
    rows = []
    for c, r in family.balls():
        region = _make_region(c, r, mode)
        try:
            v, w, _ = _region(f, region, min_points)
        except InsufficientResolution:
            rows.append(OscillationRow(tuple(c), r, mode, float("nan"), float("nan"), "insufficient-resolution"))
            continue
        avg = float(np.sum(v * w) / np.sum(w))
        osc = float(np.sum(np.abs(v - avg) * w) / np.sum(w))
        rows.append(OscillationRow(tuple(c), r, mode, avg, osc))
    return rows


def _bucket_sup(rows, key, edges) -> dict:
    out = {}
    edges = np.asarray(edges, dtype=float)
    for lo, hi in zip(edges[:-1], edges[1:]):
        vals = [r.oscillation for r in rows if r.status == "ok" and lo <= key(r) < hi]
        out[(float(lo), float(hi))] = max(vals) if vals else None
    return out


def bmo_norm(f: GridFunction, mode: str, family: BallFamily, min_points: int = MIN_POINTS) -> OscillationReport:
    """Family sup of oscillations; a lower estimate of ||b||_* (euclidean) or ||b||_d (orbit)."""
    rows = _scan(f, family, mode, min_points)
    rep = OscillationReport(mode, rows)
    radii = np.unique(family.radii)
    rep.by_radius = {float(r): max([x.oscillation for x in rep.valid_rows if x.radius == r], default=None) for r in radii}
    return rep


def vmo_profile(
    f: GridFunction, mode: str, family: BallFamily, radius_buckets, distance_buckets, min_points: int = MIN_POINTS
) -> OscillationReport:
    """Sup oscillation per radius bucket and per |center| bucket.  Empty buckets map to None."""
    if len(radius_buckets) < 2 or len(distance_buckets) < 2:
        raise InvalidArgument("bucket edges need at least two values")
    rows = _scan(f, family, mode, min_points)
    rep = OscillationReport(mode, rows)
    rep.by_radius = _bucket_sup(rows, lambda r: r.radius, radius_buckets)
    rep.by_distance = _bucket_sup(rows, lambda r: float(np.linalg.norm(r.center)), distance_buckets)
    return rep


def _regional_sup(f: GridFunction, kind: str, centers, radii, stat: str, min_points: int) -> GridFunction:
    mode = {"euclidean": "euclidean", "orbit": "orbit"}.get(kind)
    if mode is None:
        raise InvalidArgument("kind must be 'euclidean' or 'orbit'")
    g = f.grid
    radii = np.asarray(radii, dtype=float).reshape(-1)
    absf = np.abs(f.values)
    out = np.zeros(g.size)
    skipped = 0
    uncentred = centers is not None
    cs = g.points if not uncentred else np.asarray(centers, dtype=float).reshape(-1, g.measure.dimension)
    for c in cs:
        for r in radii:
            m = g.mask(_make_region(c, r, mode))
            k = int(m.sum())
            if k < min_points:
                skipped += 1
                continue
            w = g.weights[m]
            if stat == "average":
                val = np.sum(absf[m] * w) / np.sum(w)
            else:
                v = f.values[m]
                val = np.sum(np.abs(v - np.sum(v * w) / np.sum(w)) * w) / np.sum(w)
            if uncentred:
                out[m] = np.maximum(out[m], val)
            else:
                i = int(np.argmin(np.sum((g.points - c) ** 2, axis=1)))
                out[i] = max(out[i], val)
    return GridFunction(g, out, {"skipped": skipped, "kind": kind, "centred": not uncentred})


def maximal_fn(f: GridFunction, kind: str, radii, centers=None, min_points: int = MIN_POINTS) -> GridFunction:
    """Sup of averages of |f| over the radius family.

    With ``centers=None`` the balls are centred at the grid sites; otherwise the
    value at a site is the sup over family balls that contain it.
    """
    return _regional_sup(f, kind, centers, radii, "average", min_points)


def sharp_fn(f: GridFunction, radii, centers=None, kind: str = "euclidean", min_points: int = MIN_POINTS) -> GridFunction:
    """Sup of oscillations over the radius family, same conventions as :func:`maximal_fn`."""
    return _regional_sup(f, kind, centers, radii, "oscillation", min_points)


# -- Frechet-Kolmogorov translation modulus -------------------------------------------


def translation_modulus(f: GridFunction, z, p: float = 2.0) -> float:
    """|| f(. + z) - f ||_{L^p(omega)} with linear interpolation and zero extension."""
    if not 1 < p < np.inf:
        raise InvalidArgument("p must lie in (1, inf)")
    g = f.grid
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (g.measure.dimension,):
        raise InvalidArgument("offset must be a point of R^N")
    if not np.any(z):
        return 0.0
    interp = RegularGridInterpolator(g.axes, f.values.reshape(g.shape), method="linear", bounds_error=False, fill_value=None)
    shifted_pts = g.points + z
    lo = np.array([a[0] for a in g.axes])
    hi = np.array([a[-1] for a in g.axes])
    outside = np.any((shifted_pts < lo) | (shifted_pts > hi), axis=1)
    shifted = interp(shifted_pts)
    shifted[outside] = 0.0
    bound = float(np.sum(np.abs(f.values[outside]) ** p * g.weights[outside]) ** (1 / p)) if np.any(outside) else 0.0
    if bound > 0:
        warnings.warn(DomainClipped(f"shift leaves the grid box at {int(outside.sum())} sites", bound), stacklevel=2)
    return float(np.sum(np.abs(shifted - f.values) ** p * g.weights) ** (1.0 / p))


# -- symbol presets ----------------------------------------------------------------------


def symbol_preset(name: str, dimension: int, **params) -> Callable[[np.ndarray], np.ndarray]:
    """Named symbols b: 'log-abs', 'sign', 'lipschitz-bump', 'constant'.

    'log-abs' is log|x - a| (a defaults to e_1); 'sign' is sign(x_1 - c);
    'lipschitz-bump' is max(0, 1 - |x - a| / width).
    """
    e1 = np.zeros(dimension)
    e1[0] = 1.0
    if name in ("log-abs", "log"):
        a = np.asarray(params.get("anchor", e1), dtype=float)
        return lambda x: np.log(np.linalg.norm(np.asarray(x) - a, axis=-1))
    if name in ("sign", "sign-split"):
        c = float(params.get("split", 0.5))
        return lambda x: np.where(np.asarray(x)[..., 0] >= c, 1.0, -1.0)
    if name == "lipschitz-bump":
        a = np.asarray(params.get("anchor", 0.5 * e1), dtype=float)
        wdt = float(params.get("width", 1.0))
        return lambda x: np.maximum(0.0, 1.0 - np.linalg.norm(np.asarray(x) - a, axis=-1) / wdt)
    if name == "constant":
        v = float(params.get("value", 1.0))
        return lambda x: np.full(np.asarray(x).shape[:-1], v)
    raise InvalidArgument(f"unknown symbol preset {name!r}")


SYMBOL_PRESETS: Sequence[str] = ("log-abs", "sign", "lipschitz-bump", "constant")
