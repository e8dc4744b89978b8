"""Sweeps measuring the constants in the kernel, heat-kernel and commutator estimates.

Every check returns a :class:`SweepReport`.  Reports only ever state that no
counterexample was found in the sampled family.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from math import gamma as gamma_fn, pi

import numpy as np

from .config import Thresholds
from .errors import AccuracyNotReached, InvalidArgument
from .kernels import KernelEvaluator
from .measure import Ball, OrbitBall
from .operators import assemble_riesz, commutator_matrix, op_norm_estimate
from .quadrature import gauss_legendre
from .reflection import orbit, orbit_distance
from .spaces import BallFamily, Grid, bmo_norm, symbol_preset


@dataclass
class SweepReport:
    check: str
    rows: list[dict]
    ratios: np.ndarray
    snapshot: dict
    bound: float | None = None
    bound_kind: str = "ceiling"  # or "floor"
    violations: int = 0
    rejected: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return int(np.sum(np.isfinite(self.ratios)))

    @property
    def sup(self) -> float:
        r = self.ratios[np.isfinite(self.ratios)]
        return float(r.max()) if r.size else float("nan")

    @property
    def inf(self) -> float:
        r = self.ratios[np.isfinite(self.ratios)]
        return float(r.min()) if r.size else float("nan")

    @property
    def passed(self) -> bool:
        if self.count == 0:
            return False
        ok = np.isfinite(self.sup) and self.violations == 0
        return bool(ok and self.extra.get("pass", True))

    def summary(self) -> dict:
        return {
            "check": self.check,
            "samples": self.count,
            "sup": self.sup,
            "inf": self.inf,
            "bound": self.bound,
            "bound_kind": self.bound_kind,
            "violations": self.violations,
            "rejected": self.rejected,
            "passed": self.passed,
            "extra": {k: v for k, v in self.extra.items() if _jsonable(v)},
            "snapshot": self.snapshot,
        }

    def write_csv(self, path) -> None:
        keys: list[str] = []
        for r in self.rows:
            for k in r:
                if k not in keys:
                    keys.append(k)
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            for r in self.rows:
                w.writerow({k: _fmt(v) for k, v in r.items()})


def _jsonable(v) -> bool:
    return isinstance(v, (int, float, str, bool, list, dict, type(None)))


def _fmt(v):
    if isinstance(v, (np.ndarray, list, tuple)):
        return " ".join(repr(float(t)) for t in np.ravel(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def snapshot(ke: KernelEvaluator, **more) -> dict:
    out = {
        "group": ke.spec.name,
        "kappa": ke.kappa.tolist(),
        "dimension": ke.dimension,
        "eps_sing": ke.eps_sing,
        "subordination": asdict(ke.config),
    }
    out.update(more)
    return out


# -- samples -----------------------------------------------------------------------------


@dataclass(frozen=True)
class PairSamples:
    x: np.ndarray
    y: np.ndarray
    kind: tuple[str, ...]
    seed: int

    def __len__(self) -> int:
        return len(self.x)

    def scaled(self, t: float) -> "PairSamples":
        return PairSamples(t * self.x, t * self.y, self.kind, self.seed)


def sample_pairs(
    ke: KernelEvaluator,
    n: int,
    seed: int = 0,
    box: float = 2.0,
    near_orbit: float = 0.2,
    near_diagonal: float = 0.2,
    min_rel: float = 1e-4,
) -> PairSamples:
    """Random pairs in [-box, box]^N plus pairs close to the orbit of x or to x itself.

    Near pairs sit at relative distance 10^-U(0, -log10 min_rel) from g(x).
    """
    rng = np.random.default_rng(seed)
    dim = ke.dimension
    n_orb = int(round(near_orbit * n))
    n_diag = int(round(near_diagonal * n))
    n_rand = n - n_orb - n_diag
    x = rng.uniform(-box, box, (n, dim))
    y = rng.uniform(-box, box, (n, dim))
    kinds = ["random"] * n_rand
    els = ke.group.elements
    nontrivial = els[1:] if len(els) > 1 else els
    for i in range(n_rand, n):
        diag = i >= n_rand + n_orb
        g = els[0] if diag else nontrivial[rng.integers(len(nontrivial))]
        u = rng.standard_normal(dim)
        u /= np.linalg.norm(u)
        rel = 10.0 ** rng.uniform(np.log10(min_rel), -1.0)
        y[i] = g @ x[i] + rel * np.linalg.norm(x[i]) * u
        kinds.append("near-diagonal" if diag else "near-orbit")
    return PairSamples(x, y, tuple(kinds), seed)


def _ball_volumes(ke: KernelEvaluator, centers, radii, tol: float = 1e-6) -> np.ndarray:
    out = np.empty(len(centers))
    for i, (c, r) in enumerate(zip(centers, radii)):
        out[i] = ke.measure.ball(Ball(c, float(r)), tol).value
    return out


def _riesz(ke: KernelEvaluator, x, y, j):
    v, e = ke.riesz_many(x, y, j, check=True)
    return v, e


# -- kernel size and smoothness ----------------------------------------------------------


def check_size(
    ke: KernelEvaluator, samples: PairSamples, j: int = 1, ceiling: float | None = None, d_floor: float = 1e-7
) -> SweepReport:
    """rho = |R_j(x, y)| |x - y| omega(B(x, d)) / d per pair."""
    ceiling = Thresholds.default().size_ceiling(ke.dimension) if ceiling is None else ceiling
    d = np.atleast_1d(orbit_distance(ke.group, samples.x, samples.y))
    ok = d >= d_floor
    rej = int((~ok).sum())
    x, y, d = samples.x[ok], samples.y[ok], d[ok]
    r, err = _riesz(ke, x, y, j)
    vol = _ball_volumes(ke, x, d)
    e = np.linalg.norm(x - y, axis=1)
    rho = np.abs(r) * e * vol / d
    kinds = np.array(samples.kind)[ok]
    naive = np.abs(r) * e * _ball_volumes(ke, x, e)
    rows = [
        {"x": x[i], "y": y[i], "kind": kinds[i], "d": d[i], "euclid": e[i], "kernel": r[i], "kernel_err": err[i],
         "ball": vol[i], "ratio": rho[i], "euclidean_ratio": naive[i]}
        for i in range(len(x))
    ]
    viol = int(np.sum(rho > ceiling))
    return SweepReport("size", rows, rho, snapshot(ke, j=j, seed=samples.seed, d_floor=d_floor), ceiling, "ceiling", viol, rej)


def check_smoothness(
    ke: KernelEvaluator,
    samples: PairSamples,
    variable: str = "y",
    j: int = 1,
    ceiling: float | None = None,
    seed: int = 1,
    root_direction_fraction: float = 0.25,
) -> SweepReport:
    """|R_j(x,y) - R_j(x,y')| |x-y| omega(B(x,d)) / |y-y'| with |y-y'| <= d/2 (or the x analogue)."""
    if variable not in ("x", "y"):
        raise InvalidArgument("variable must be 'x' or 'y'")
    ceiling = Thresholds.default().smoothness_ceiling(ke.dimension) if ceiling is None else ceiling
    rng = np.random.default_rng(seed)
    x, y = samples.x, samples.y
    d = np.atleast_1d(orbit_distance(ke.group, x, y))
    n, dim = x.shape
    dirs = rng.standard_normal((n, dim))
    roots = ke.spec.positive_roots
    use_root = rng.random(n) < root_direction_fraction
    if len(roots):
        dirs[use_root] = roots[rng.integers(len(roots), size=int(use_root.sum()))]
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    h = (0.5 * d * rng.uniform(0.05, 1.0, n))[:, None] * dirs
    moved = np.linalg.norm(h, axis=1)
    ok = (moved <= 0.5 * d * (1 + 1e-12)) & (moved > 0)
    rej = int((~ok).sum())
    x, y, h, d, moved = x[ok], y[ok], h[ok], d[ok], moved[ok]
    if variable == "y":
        xp, yp = x, y + h
    else:
        xp, yp = x + h, y
    r0, _ = _riesz(ke, x, y, j)
    r1, _ = _riesz(ke, xp, yp, j)
    vol = _ball_volumes(ke, x, d)
    e = np.linalg.norm(x - y, axis=1)
    ratio = np.abs(r0 - r1) * e * vol / moved
    kinds = np.array(samples.kind)[ok]
    rows = [
        {"x": x[i], "y": y[i], "kind": kinds[i], "shift": h[i], "root_dir": bool(use_root[ok][i]), "d": d[i],
         "kernel": r0[i], "kernel_shifted": r1[i], "ratio": ratio[i]}
        for i in range(len(x))
    ]
    viol = int(np.sum(ratio > ceiling))
    snap = snapshot(ke, j=j, seed=samples.seed, perturbation_seed=seed, variable=variable)
    return SweepReport(f"smoothness-{variable}", rows, ratio, snap, ceiling, "ceiling", viol, rej)


def scale_sweep(check, ke: KernelEvaluator, samples: PairSamples, scales=(0.5, 1.0, 2.0), **kw) -> dict:
    """sup ratio of ``check`` at each dilation of the sample set."""
    return {float(t): check(ke, samples.scaled(t), **kw).sup for t in scales}


# -- lower bound ---------------------------------------------------------------------------


def companion_center(x0: np.ndarray, r: float, j: int) -> np.ndarray:
    """y0 = x0 + 5 r e_j, which gives y_j - x_j >= 3r on B x B~."""
    y0 = np.array(x0, dtype=float)
    y0[j - 1] += 5.0 * r
    return y0


def _ball_samples(center: np.ndarray, r: float, per_axis: int) -> np.ndarray:
    dim = center.size
    t = np.linspace(-1, 1, per_axis) * (1 - 1e-9)
    mesh = np.stack(np.meshgrid(*[t] * dim, indexing="ij"), -1).reshape(-1, dim)
    mesh = mesh[np.sum(mesh**2, axis=1) <= 1.0 + 1e-12]
    return center + r * mesh


def check_lower_bound(
    ke: KernelEvaluator, radii, centers, j: int = 1, floor: float | None = None, per_axis: int = 7
) -> SweepReport:
    """m = min over sampled (x, y) in B x B~ of |R_j(x, y)| omega(B); sign scan on the product."""
    floor = Thresholds.default().lower_floor(ke.dimension) if floor is None else floor
    rows, ms = [], []
    sign_changes = 0
    for x0 in np.asarray(centers, dtype=float).reshape(-1, ke.dimension):
        for r in radii:
            y0 = companion_center(x0, r, j)
            xs = _ball_samples(x0, r, per_axis)
            ys = _ball_samples(y0, r, per_axis)
            xx = np.repeat(xs, len(ys), axis=0)
            yy = np.tile(ys, (len(xs), 1))
            gap = yy[:, j - 1] - xx[:, j - 1]
            if np.min(gap) < 3.0 * r * (1 - 1e-9):
                rows.append({"center": x0, "radius": r, "status": "geometry-unsatisfied"})
                continue
            vals, _ = ke.riesz_many(xx, yy, j, check=False)
            vol = ke.measure.ball(Ball(x0, float(r)), 1e-8).value
            s = np.sign(vals[np.isfinite(vals)])
            changed = bool(s.size and not np.all(s == s[0]))
            sign_changes += int(changed)
            m = float(np.nanmin(np.abs(vals))) * vol
            ms.append(m)
            rows.append({"center": x0, "radius": r, "companion": y0, "ball": vol, "m": m, "sign_change": changed,
                         "status": "ok"})
    ms = np.array(ms)
    viol = int(np.sum(ms < floor)) + sign_changes
    rep = SweepReport("lower-bound", rows, ms, snapshot(ke, j=j, per_axis=per_axis), floor, "floor", viol,
                      sum(r.get("status") != "ok" for r in rows))
    rep.extra["sign_changes"] = sign_changes
    return rep


# -- Hormander integral -----------------------------------------------------------------------


def _polar_directions(dim: int, n_angle: int):
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    if dim == 2:
        th = 2 * pi * (np.arange(n_angle) + 0.5) / n_angle
        return np.stack([np.cos(th), np.sin(th)], -1), np.full(n_angle, 2 * pi / n_angle)
    raise InvalidArgument("orbit-polar Hormander quadrature supports N <= 2")


def _shell_nodes(ke: KernelEvaluator, pts, a: float, b: float, n_radial: int, n_angle: int):
    """Nodes x = g y + rho u with a <= rho <= b, kept where g y is the nearest orbit point (so rho = d(x, y)).

    Returns (x, d omega weights, rho).
    """
    dim = ke.dimension
    dirs, dir_w = _polar_directions(dim, n_angle)
    xg, wg = gauss_legendre(n_radial)
    rho = a + 0.5 * (b - a) * (xg + 1)
    wr = 0.5 * (b - a) * wg * rho ** (dim - 1)
    xs, ws, rs = [], [], []
    for p in pts:
        cand = (p[None, None, :] + rho[:, None, None] * dirs[None, :, :]).reshape(-1, dim)
        wts = (wr[:, None] * dir_w[None, :]).reshape(-1)
        dist_all = np.linalg.norm(cand[:, None, :] - pts[None, :, :], axis=-1)
        own = np.linalg.norm(cand - p, axis=1) <= dist_all.min(axis=1) * (1 + 1e-12)
        xs.append(cand[own])
        ws.append(wts[own])
        rs.append(np.repeat(rho, len(dirs))[own])
    xs = np.concatenate(xs)
    return xs, np.concatenate(ws) * ke.measure.density(xs), np.concatenate(rs)


def _kernel_gap(ke: KernelEvaluator, xs, y, y0, j):
    r1, _ = ke.riesz_many(xs, np.broadcast_to(y, xs.shape), j, check=False)
    r0, _ = ke.riesz_many(xs, np.broadcast_to(y0, xs.shape), j, check=False)
    return np.abs(r1 - r0)


def _orbit_polar_integral(ke: KernelEvaluator, y, y0, j, inner, outer, n_radial, n_angle):
    """Shell-by-shell integral of |R_j(x,y) - R_j(x,y0)| d omega(x) over inner <= d(x,y) <= outer."""
    pts = orbit(ke.group, y)
    edges = [inner]
    while edges[-1] < outer * (1 - 1e-12):
        edges.append(min(2 * edges[-1], outer))
    shells = []
    for a, b in zip(edges[:-1], edges[1:]):
        xs, ws, _ = _shell_nodes(ke, pts, a, b, n_radial, n_angle)
        shells.append(((a, b), float(np.nansum(_kernel_gap(ke, xs, y, y0, j) * ws))))
    return shells


def _tail_bound(ke: KernelEvaluator, y, y0, j, outer: float, smooth_const: float | None, shells: int = 6,
                n_radial: int = 12, n_angle: int = 32) -> tuple[float, float]:
    """Integral over d(x, y) >= outer of the smoothness bound C |y - y0| / (|x - y| omega(B(x, d))).

    Dyadic shells [2^k outer, 2^(k+1) outer] for k < ``shells`` are integrated
    directly; beyond them the shell integrals halve (the bound is homogeneous of
    degree -N once |x| >> |y|), so the remainder equals the last shell.  With
    ``smooth_const=None`` C is the sup of the smoothness ratio over the tail
    nodes.  Returns (tail, C).
    """
    pts = orbit(ke.group, y)
    sep = float(np.linalg.norm(y - y0))
    parts, ratio_max = [], 0.0
    for k in range(shells):
        a = outer * 2.0**k
        xs, ws, rho = _shell_nodes(ke, pts, a, 2 * a, n_radial, n_angle)
        vol = np.array([ke.measure.ball(Ball(x, float(r)), 1e-8).value for x, r in zip(xs, rho)])
        shape = sep / (np.linalg.norm(xs - y, axis=1) * vol)
        parts.append(float(np.sum(shape * ws)))
        if smooth_const is None:
            ratio_max = max(ratio_max, float(np.nanmax(_kernel_gap(ke, xs, y, y0, j) / shape)))
    c = ratio_max if smooth_const is None else smooth_const
    return c * (sum(parts) + parts[-1]), c


def check_hormander(
    ke: KernelEvaluator,
    pairs,
    outer_radius: float,
    j: int = 1,
    ceiling: float | None = None,
    smooth_const: float | None = None,
    n_radial: int = 24,
    n_angle: int = 128,
) -> SweepReport:
    """Integral of |R_j(x,y) - R_j(x,y0)| over 2|y-y0| <= d(x,y) <= outer plus a tail bound.

    The tail beyond ``outer_radius`` integrates the smoothness bound
    C |y - y0| / (|x - y| omega(B(x, d(x, y)))); ``smooth_const`` fixes C,
    otherwise C is measured per pair on the tail region.
    """
    ceiling = Thresholds.default().hormander_ceiling(ke.dimension) if ceiling is None else ceiling
    rows, totals = [], []
    for y, y0 in pairs:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        y0 = np.atleast_1d(np.asarray(y0, dtype=float))
        sep = float(np.linalg.norm(y - y0))
        if sep == 0.0:
            rows.append({"y": y, "y0": y0, "sep": 0.0, "integral": 0.0, "tail": 0.0, "total": 0.0})
            totals.append(0.0)
            continue
        if 2 * sep >= outer_radius:
            raise InvalidArgument("outer_radius must exceed 2 |y - y0|")
        shells = _orbit_polar_integral(ke, y, y0, j, 2 * sep, outer_radius, n_radial, n_angle)
        integral = sum(v for _, v in shells)
        tail, c = _tail_bound(ke, y, y0, j, outer_radius, smooth_const)
        totals.append(integral + tail)
        rows.append({"y": y, "y0": y0, "sep": sep, "integral": integral, "tail": tail, "total": integral + tail,
                     "tail_const": c, "shells": len(shells)})
    totals = np.array(totals)
    viol = int(np.sum(totals > ceiling))
    snap = snapshot(ke, j=j, outer_radius=outer_radius, n_radial=n_radial, n_angle=n_angle, smooth_const=smooth_const)
    return SweepReport("hormander", rows, totals, snap, ceiling, "ceiling", viol)


# -- heat kernel bounds -------------------------------------------------------------------------


@dataclass(frozen=True)
class HeatSamples:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    kind: tuple[str, ...]
    seed: int


def sample_heat(ke: KernelEvaluator, n: int, seed: int = 0, box: float = 3.0, orbit_fraction: float = 0.25) -> HeatSamples:
    """t log-uniform over 4 decades; a share of pairs are far points of one orbit."""
    rng = np.random.default_rng(seed)
    dim = ke.dimension
    t = 10.0 ** rng.uniform(-2, 2, n)
    x = rng.uniform(-box, box, (n, dim))
    y = rng.uniform(-box, box, (n, dim))
    kinds = ["random"] * n
    els = ke.group.elements
    n_orb = int(round(orbit_fraction * n)) if len(els) > 1 else 0
    for i in range(n_orb):
        g = els[1 + rng.integers(len(els) - 1)]
        y[i] = g @ x[i] + 1e-3 * rng.standard_normal(dim)
        kinds[i] = "same-orbit"
    return HeatSamples(t, x, y, tuple(kinds), seed)


def check_heat_bounds(
    ke: KernelEvaluator,
    samples: HeatSamples,
    c_upper: float | None = None,
    c_lower: float | None = None,
    c_lipschitz: float | None = None,
    ceiling: float | None = None,
    seed: int = 2,
) -> SweepReport:
    """Upper, lower and Lipschitz Gaussian bounds; fitted C per bound at the configured c.

    ratio per sample = max of the three fitted-constant ratios; violations are
    samples above ``ceiling`` in any of the three.
    """
    th = Thresholds.default()
    c_upper = th.heat_c_upper if c_upper is None else c_upper
    c_lower = th.heat_c_lower if c_lower is None else c_lower
    c_lipschitz = th.heat_c_upper if c_lipschitz is None else c_lipschitz
    ceiling = th.heat_ceiling(ke.dimension) if ceiling is None else ceiling
    t, x, y = samples.t, samples.x, samples.y
    rt = np.sqrt(t)
    log_h = ke.log_heat(t, x, y)
    h = np.exp(log_h)
    d = np.atleast_1d(orbit_distance(ke.group, x, y))
    e = np.linalg.norm(x - y, axis=1)
    bx = _ball_volumes(ke, x, rt, 1e-8)
    by = _ball_volumes(ke, y, rt, 1e-8)
    v = np.maximum(bx, by)
    vmin = np.minimum(bx, by)
    up = h * v * np.exp(c_upper * d**2 / t)
    # lower bound: C^-1 vmin^-1 exp(-c |x-y|^2 / t) <= h, i.e. exp(-c e^2/t) / (vmin h) <= C
    lo = np.exp(-c_lower * e**2 / t - np.log(vmin) - log_h)
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal(x.shape)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    step = (rt * rng.uniform(0.01, 0.99, len(t)))[:, None] * dirs
    yp = y + step
    hp = ke.heat(t, x, yp)
    lip = np.abs(h - hp) / (np.linalg.norm(step, axis=1) / rt) * v * np.exp(c_lipschitz * d**2 / t)
    ratio = np.maximum.reduce([up, lo, lip])
    rows = [
        {"t": t[i], "x": x[i], "y": y[i], "kind": samples.kind[i], "h": h[i], "d": d[i], "euclid": e[i],
         "V": v[i], "Vmin": vmin[i], "upper": up[i], "lower": lo[i], "lipschitz": lip[i]}
        for i in range(len(t))
    ]
    viol = int(np.sum(up > ceiling) + np.sum(lo > ceiling) + np.sum(lip > ceiling))
    rep = SweepReport("heat-bounds", rows, ratio,
                      snapshot(ke, seed=samples.seed, c_upper=c_upper, c_lower=c_lower, c_lipschitz=c_lipschitz),
                      ceiling, "ceiling", viol)
    rep.extra.update({"C_upper": float(up.max()), "C_lower": float(lo.max()), "C_lipschitz": float(lip.max()),
                      "c_upper": c_upper, "c_lower": c_lower})
    return rep


# -- commutator sandwich ---------------------------------------------------------------------------


def default_family(grid: Grid, r_max: float = 1.0, step: float = 0.25, points_per_ball: int = 8) -> BallFamily:
    """Lattice centres and geometric radii down to the smallest grid-resolvable radius."""
    h = float(np.max(grid.spacing))
    half = float(np.min([a[-1] for a in grid.axes])) - r_max
    r_min = max(points_per_ball * h, 1e-3) if grid.measure.dimension == 1 else max(2.0 * h, 1e-3)
    return BallFamily.lattice(max(half, step), step, grid.measure.dimension,
                              BallFamily.geometric(np.zeros((1, grid.measure.dimension)), min(r_min, r_max), r_max).radii)


def check_commutator_bounds(
    ke: KernelEvaluator,
    presets,
    grids,
    j: int = 1,
    p: float = 2.0,
    eps_trunc: float = 1e-3,
    stability: float = 0.25,
    seed: int = 0,
) -> SweepReport:
    """Commutator norm against the orbit and Euclidean BMO family estimates at each grid.

    C_up = max over presets of norm / ||b||_d, C_low = max of ||b||_* / norm; PASS
    when both are finite, stable within ``stability`` across grids, and constant
    symbols give a vanishing commutator.
    """
    rows = []
    fits = []
    constant_norms = []
    for g in grids:
        T = assemble_riesz(ke, g, j, eps_trunc)
        fam = default_family(g)
        c_up = c_low = 0.0
        for name in presets:
            b = g.sample(symbol_preset(name, ke.dimension))
            cm = commutator_matrix(T, b)
            est = op_norm_estimate(cm, g.weights, p, seed=seed)
            be = bmo_norm(b, "euclidean", fam).sup
            bd = bmo_norm(b, "orbit", fam).sup
            if name == "constant":
                constant_norms.append(est.value)
            else:
                if bd > 0:
                    c_up = max(c_up, est.value / bd)
                if est.value > 0:
                    c_low = max(c_low, be / est.value)
            rows.append({"grid_sites": g.size, "preset": name, "op_norm": est.value, "converged": est.converged,
                         "lower_estimate": est.lower_estimate, "bmo_euclidean": be, "bmo_orbit": bd,
                         "excluded_pairs": T.excluded})
        fits.append((c_up, c_low))
    fits = np.array(fits)

    def spread(col):
        v = fits[:, col]
        return float((v.max() - v.min()) / v.min()) if v.min() > 0 else float("inf")

    up_spread, low_spread = spread(0), spread(1)
    const_ok = all(v <= 1e-10 for v in constant_norms)
    ok = bool(np.all(np.isfinite(fits)) and np.all(fits > 0) and up_spread <= stability and low_spread <= stability
              and const_ok)
    rep = SweepReport("commutator", rows, fits.ravel(), snapshot(ke, j=j, p=p, eps_trunc=eps_trunc, seed=seed,
                      presets=list(presets), grids=[g.size for g in grids]), stability, "ceiling", 0 if ok else 1)
    rep.extra.update({"C_up": fits[:, 0].tolist(), "C_low": fits[:, 1].tolist(), "C_up_spread": up_spread,
                      "C_low_spread": low_spread, "constant_norms": constant_norms, "pass": ok})
    return rep


def classical_lower_value(dimension: int, j: int = 1, per_axis: int = 7) -> float:
    """min |R_j| omega(B) over the sampled B x B~ for the unweighted kernel (closed form)."""
    x0 = np.zeros(dimension)
    y0 = companion_center(x0, 1.0, j)
    xs = _ball_samples(x0, 1.0, per_axis)
    ys = _ball_samples(y0, 1.0, per_axis)
    diff = xs[:, None, :] - ys[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    k = gamma_fn((dimension + 1) / 2) * pi ** (-(dimension + 1) / 2) * np.abs(diff[..., j - 1]) / r ** (dimension + 1)
    vol = pi ** (dimension / 2) / gamma_fn(dimension / 2 + 1)
    return float(k.min() * vol)
