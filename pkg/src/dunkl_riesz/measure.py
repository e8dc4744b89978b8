"""The Dunkl weight, ball and orbit-ball volumes, and doubling diagnostics.

Volumes are computed by

* N = 1: adaptive quadrature (QUADPACK) split at the root hyperplane x = 0;
* N = 2: polar coordinates about the origin.  The weight is homogeneous of
  degree gamma, so the radial integral over each ray is exact and only the
  angular integral is numerical (tanh-sinh panels split at hyperplane,
  tangent and circle-intersection angles);
* N = 3: stratified Monte Carlo with a recorded seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gamma as gamma_fn

import numpy as np
from scipy import integrate

from .errors import AccuracyNotReached, InvalidArgument
from .quadrature import integrate_panels
from .reflection import ReflectionGroup, RootSystemSpec, generate_group, orbit

DEFAULT_TOL = 1e-3
DEFAULT_SEED = 20240607


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", c)
        if not self.radius > 0:
            raise InvalidArgument(f"ball radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class OrbitBall:
    """Union of B(g(center), radius) over the group."""

    base: Ball


@dataclass(frozen=True)
class Measured:
    value: float
    error: float
    method: str
    seed: int | None = None

    def __float__(self) -> float:
        return float(self.value)


class WeightedMeasure:
    """d omega = prod_{alpha in R} |<alpha, x>|^kappa(alpha) dx."""

    def __init__(self, spec: RootSystemSpec, group: ReflectionGroup | None = None, seed: int = DEFAULT_SEED):
        self.spec = spec
        self.group = group if group is not None else generate_group(spec)
        self.seed = seed

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @cached_property
    def homogeneous_dimension(self) -> float:
        return self.spec.homogeneous_dimension

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.spec.roots.shape[0] == 0:
            return np.ones(x.shape[:-1]) if x.ndim > 0 else 1.0
        dots = np.abs(x @ self.spec.roots.T)
        return np.prod(dots ** self.spec.multiplicity, axis=-1)

    # -- ball volumes -------------------------------------------------------

    def ball(self, b: Ball, tol: float = DEFAULT_TOL, seed: int | None = None) -> Measured:
        return self._union([b.center], b.radius, tol, seed)

    def orbit_ball(self, ob: OrbitBall, tol: float = DEFAULT_TOL, seed: int | None = None) -> Measured:
        pts = orbit(self.group, ob.base.center)
        return self._union(list(pts), ob.base.radius, tol, seed)

    def _union(self, centers, radius: float, tol: float, seed: int | None) -> Measured:
        if not tol > 0:
            raise InvalidArgument("tol must be positive")
        centers = np.array([np.atleast_1d(np.asarray(c, dtype=float)) for c in centers])
        if centers.shape[1] != self.dimension:
            raise InvalidArgument(f"center must be a point of R^{self.dimension}")
        if self.dimension == 1:
            return self._union_1d(centers[:, 0], radius, tol)
        if self.dimension == 2:
            return self._union_polar(centers, radius, tol)
        return self._union_mc(centers, radius, tol, self.seed if seed is None else seed)

    def _union_1d(self, centers: np.ndarray, radius: float, tol: float) -> Measured:
        ivs = sorted((c - radius, c + radius) for c in centers)
        merged: list[list[float]] = []
        for lo, hi in ivs:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        f = lambda t: float(self.density(np.array([t])))
        total = err = 0.0
        for lo, hi in merged:
            pieces = [(lo, 0.0), (0.0, hi)] if lo < 0.0 < hi else [(lo, hi)]
            for a, b in pieces:
                v, e = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-11, limit=200)
                total += v
                err += e
        if err > tol * abs(total):
            raise AccuracyNotReached("1-D ball quadrature", total, err)
        return Measured(total, err, "quad")

    def _angular_breaks(self, centers: np.ndarray, radius: float) -> np.ndarray:
        br = [0.0, 2 * np.pi]
        for a in self.spec.roots:
            th = np.arctan2(a[1], a[0]) + np.pi / 2
            br += [th % (2 * np.pi), (th + np.pi) % (2 * np.pi)]
        for c in centers:
            rc = np.hypot(*c)
            phi = np.arctan2(c[1], c[0])
            if rc > radius:
                w = np.arcsin(radius / rc)
                br += [(phi - w) % (2 * np.pi), (phi + w) % (2 * np.pi)]
            elif rc > 0:
                br += [(phi + np.pi / 2) % (2 * np.pi), (phi - np.pi / 2) % (2 * np.pi)]
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                dvec = centers[j] - centers[i]
                dist = np.hypot(*dvec)
                if 0 < dist < 2 * radius:
                    mid = centers[i] + 0.5 * dvec
                    hgt = np.sqrt(radius**2 - (dist / 2) ** 2)
                    perp = np.array([-dvec[1], dvec[0]]) / dist
                    for p in (mid + hgt * perp, mid - hgt * perp):
                        if np.hypot(*p) > 0:
                            br.append(np.arctan2(p[1], p[0]) % (2 * np.pi))
        return np.array(br)

    def _radial_union(self, theta: np.ndarray, centers: np.ndarray, radius: float) -> np.ndarray:
        """integral of r^(gamma+1) over the union of ray/disk intersections."""
        p = self.spec.gamma + 2.0
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        b = u @ centers.T  # (..., K)
        disc = b * b - np.sum(centers**2, axis=1) + radius**2
        sq = np.sqrt(np.maximum(disc, 0.0))
        lo = np.maximum(b - sq, 0.0)
        hi = np.maximum(b + sq, 0.0)
        empty = (disc <= 0) | (hi <= lo)
        lo = np.where(empty, np.inf, lo)
        hi = np.where(empty, np.inf, hi)
        order = np.argsort(lo, axis=-1)
        lo = np.take_along_axis(lo, order, axis=-1)
        hi = np.take_along_axis(hi, order, axis=-1)
        total = np.zeros(theta.shape)
        reach = np.zeros(theta.shape)
        for k in range(lo.shape[-1]):
            l_k, h_k = lo[..., k], hi[..., k]
            valid = np.isfinite(l_k)
            start = np.where(valid, np.maximum(l_k, reach), 0.0)
            stop = np.where(valid, np.maximum(h_k, start), 0.0)
            add = np.where(valid, stop**p - start**p, 0.0)
            total += add
            reach = np.where(valid, np.maximum(reach, h_k), reach)
        return total / p

    def _union_polar(self, centers: np.ndarray, radius: float, tol: float) -> Measured:
        breaks = self._angular_breaks(centers, radius)

        def f(theta, _dl, _dr):
            u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
            return self.density(u) * self._radial_union(theta, centers, radius)

        for level in (5, 6, 7, 8):
            val, err = integrate_panels(f, breaks, level=level)
            if err <= max(tol * abs(val), 1e-300):
                return Measured(val, err, f"polar-tanh-sinh-{level}")
        raise AccuracyNotReached("polar ball quadrature", val, err)

    def _union_mc(self, centers: np.ndarray, radius: float, tol: float, seed: int) -> Measured:
        """Stratified MC: sum over balls of integral of w / multiplicity of coverage."""
        rng = np.random.default_rng(seed)
        n_dim = self.dimension
        strata = 4
        cells = np.stack(np.meshgrid(*[np.arange(strata)] * n_dim, indexing="ij"), -1).reshape(-1, n_dim)
        cell_w = 2 * radius / strata
        per = 16
        est = var = 0.0
        while True:
            est = var = 0.0
            for c in centers:
                u = rng.random((len(cells), per, n_dim))
                pts = c - radius + (cells[:, None, :] + u) * cell_w
                inside = np.sum((pts[..., None, :] - centers) ** 2, axis=-1) < radius**2  # (S, per, K)
                cover = inside.sum(-1)
                mine = np.sum((pts - c) ** 2, axis=-1) < radius**2
                vals = np.where(mine, self.density(pts) / np.maximum(cover, 1), 0.0)
                vol = cell_w**n_dim
                est += float(np.sum(vol * vals.mean(axis=1)))
                var += float(np.sum(vol**2 * vals.var(axis=1, ddof=1) / per))
            se = np.sqrt(var)
            if se <= tol * abs(est):
                return Measured(est, float(se), "stratified-mc", seed)
            if per >= 1 << 14:
                raise AccuracyNotReached("stratified Monte Carlo budget exhausted", est, float(se))
            per *= 4

    # -- normalisation ------------------------------------------------------

    @cached_property
    def gaussian_mass(self) -> float:
        """c_kappa = integral of exp(-|x|^2/2) d omega, by quadrature over factor blocks."""
        total = 1.0
        for block in _blocks(self.spec):
            total *= _block_gaussian_mass(self.spec, block)
        return total


def _blocks(spec: RootSystemSpec) -> list[list[int]]:
    """Coordinate blocks on which the root system splits as a direct product."""
    parent = list(range(spec.dimension))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in spec.roots:
        nz = np.flatnonzero(np.abs(a) > 1e-12)
        for k in nz[1:]:
            parent[find(k)] = find(nz[0])
    groups: dict[int, list[int]] = {}
    for i in range(spec.dimension):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _block_gaussian_mass(spec: RootSystemSpec, block: list[int]) -> float:
    idx = [i for i, a in enumerate(spec.roots) if np.any(np.abs(a[block]) > 1e-12)]
    roots = spec.roots[idx][:, block]
    kap = spec.multiplicity[idx]
    dens = lambda x: np.prod(np.abs(x @ roots.T) ** kap, axis=-1) if len(idx) else np.ones(np.shape(x)[:-1])
    if len(block) == 1:
        f = lambda t: float(dens(np.array([t]))) * np.exp(-0.5 * t * t)
        a, _ = integrate.quad(f, -np.inf, 0.0, epsabs=0.0, epsrel=1e-12, limit=200)
        b, _ = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
        return a + b
    if len(block) == 2:
        g = float(kap.sum())
        radial = 2.0 ** (g / 2) * gamma_fn(g / 2 + 1)  # integral of r^(g+1) e^{-r^2/2}
        br = [0.0, 2 * np.pi]
        for a in roots:
            th = np.arctan2(a[1], a[0]) + np.pi / 2
            br += [th % (2 * np.pi), (th + np.pi) % (2 * np.pi)]
        ang, _ = integrate_panels(lambda th, *_: dens(np.stack([np.cos(th), np.sin(th)], -1)), br, level=7)
        return radial * ang
    raise NotImplementedError("Gaussian mass for irreducible blocks of rank > 2")


def weight_density(m: WeightedMeasure, x) -> np.ndarray:
    return m.density(x)


def ball_measure(m: WeightedMeasure, b: Ball, tol: float = DEFAULT_TOL, seed: int | None = None) -> Measured:
    return m.ball(b, tol, seed)


def orbit_ball_measure(m: WeightedMeasure, ob: OrbitBall, tol: float = DEFAULT_TOL, seed: int | None = None) -> Measured:
    return m.orbit_ball(ob, tol, seed)


def v_max(m: WeightedMeasure, x, y, r: float, tol: float = DEFAULT_TOL) -> float:
    """V(x, y, r) = max of the two ball measures."""
    if not r > 0:
        raise InvalidArgument("r must be positive")
    return max(m.ball(Ball(x, r), tol).value, m.ball(Ball(y, r), tol).value)


def ball_volumes(m: WeightedMeasure, centers, radii, tol: float = 1e-8) -> np.ndarray:
    """Vectorized convenience: omega(B(c_i, r_i)) for paired arrays."""
    centers = np.asarray(centers, dtype=float).reshape(-1, m.dimension)
    radii = np.broadcast_to(np.asarray(radii, dtype=float), (len(centers),))
    return np.array([m.ball(Ball(c, r), tol).value for c, r in zip(centers, radii)])


def doubling_sweep(m: WeightedMeasure, centers, radii, tol: float = 1e-6) -> np.ndarray:
    """Ratios omega(B(x, 2r)) / omega(B(x, r)) over all (center, radius)."""
    out = []
    for c in np.asarray(centers, dtype=float).reshape(-1, m.dimension):
        for r in radii:
            out.append(m.ball(Ball(c, 2 * r), tol).value / m.ball(Ball(c, r), tol).value)
    return np.array(out)
