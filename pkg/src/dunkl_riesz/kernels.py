"""Intertwining measure, radial translation, heat kernel and Riesz kernels.

Everything here is restricted to root systems whose roots are all coordinate
roots (Z_2^N products and the trivial group), where the intertwining measure
mu_x is a tensor product of rank-one laws: eta_i = x_i s_i with s_i having
density M_k (1-s)^(k-1) (1+s)^k on (-1, 1).

A^2(x, y, eta) = |x|^2 + |y|^2 - 2<y, eta> is always formed per coordinate as

    (|x_i| - |y_i|)^2 + 2 |x_i y_i| w_i,   w_i = 1 - s_i or 1 + s_i,

with w_i obtained without cancellation, so the minimum over eta equals
d(x, y)^2 to full relative precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gamma as gamma_fn, lgamma, log, pi, sqrt

import numpy as np
from scipy import integrate, special

from .errors import AccuracyNotReached, InvalidArgument, SingularPair, UnsupportedGroup
from .measure import WeightedMeasure
from .quadrature import _mu_umax, beta_normalizer, gauss_legendre, tanh_sinh
from .reflection import ReflectionGroup, RootSystemSpec, generate_group, orbit_distance

C1 = 1.0 / sqrt(pi)
EPS_SING = 1e-8
CHUNK = 2048  # pairs per vectorized block


@lru_cache(maxsize=256)
def rank_one_gaussian_mass(kappa: float) -> float:
    """integral of exp(-x^2/2) 2^kappa |x|^(2 kappa) dx over R, by quadrature."""
    f = lambda t: 2.0**kappa * t ** (2 * kappa) * np.exp(-0.5 * t * t)
    v, _ = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return 2.0 * v


def rank1_mu_density(kappa: float, x: float, eta) -> np.ndarray:
    """Density of mu_x on (-|x|, |x|) for the rank-one group with parameter ``kappa``."""
    if not kappa > 0:
        raise InvalidArgument("density exists only for kappa > 0; kappa = 0 is the Dirac mass at x")
    if x == 0:
        raise InvalidArgument("x = 0: mu_0 is the Dirac mass at 0")
    eta = np.asarray(eta, dtype=float)
    ax, sg = abs(x), np.sign(x)
    lo = ax - sg * eta
    hi = ax + sg * eta
    inside = (lo > 0) & (hi > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = beta_normalizer(kappa) * ax ** (-2 * kappa) * lo ** (kappa - 1) * hi**kappa
    return np.where(inside, val, 0.0)


@dataclass(frozen=True)
class IntertwiningMeasure:
    """mu_x for a Z_2^N product: ``kind`` per coordinate is 'dirac' or 'rank-one'."""

    kappa: np.ndarray
    x: np.ndarray

    @property
    def kind(self) -> tuple[str, ...]:
        return tuple("dirac" if k == 0 or xi == 0 else "rank-one" for k, xi in zip(self.kappa, self.x))

    def mass(self) -> float:
        total = 1.0
        for k, xi in zip(self.kappa, self.x):
            if k == 0 or xi == 0:
                continue
            a = abs(xi)
            # density = const (a + s eta)^k (a - s eta)^(k-1), s = sign(x); QAWS takes the endpoint powers
            wvar = (k, k - 1) if xi > 0 else (k - 1, k)
            c = beta_normalizer(k) * a ** (-2 * k)
            v, _ = integrate.quad(lambda e: c, -a, a, weight="alg", wvar=wvar, epsabs=0.0, epsrel=1e-12)
            total *= v
        return total

    def support(self) -> list[tuple[float, float]]:
        return [(xi, xi) if k == 0 else (-abs(xi), abs(xi)) for k, xi in zip(self.kappa, self.x)]


# -- per-coordinate quadrature adapted to the peak of A^-p -----------------------


def _coordinate_rule(kappa: float, same_sign: bool, delta: float, level: int):
    """Nodes in w in (0, 2) for the law of w = 1 -+ s, refined geometrically near w = 0.

    Returns (w, weight).  ``delta`` is the w-scale where the integrand turns
    over; panels are laid at delta * 8^k.
    """
    if kappa == 0.0:
        return np.array([0.0 if same_sign else 2.0]), np.ones(1)
    # density in w: M w^a (2 - w)^b
    a, b = (kappa - 1.0, kappa) if same_sign else (kappa, kappa - 1.0)
    lo = max(delta, 1e-300) / 8.0**4
    breaks = [0.0]
    v = lo
    while v < 2.0:
        breaks.append(v)
        v *= 8.0
    breaks.append(2.0)
    breaks = np.array(breaks)
    ws, wts = [], []
    log_m = log(beta_normalizer(kappa))
    for i in range(len(breaks) - 1):
        p0, p1 = breaks[i], breaks[i + 1]
        half = 0.5 * (p1 - p0)
        umax = _mu_umax(kappa) if i == 0 or i == len(breaks) - 2 else 20.0
        r = tanh_sinh(level, umax)
        log_w = np.log(half) + r.log_one_plus if p0 == 0.0 else np.log(p0 + half * r.one_plus)
        log_2mw = np.log(half) + r.log_one_minus if p1 == 2.0 else np.log((2.0 - p1) + half * r.one_minus)
        lw = log_m + a * log_w + b * log_2mw + np.log(half) + r.log_weight
        ws.append(np.exp(log_w))
        wts.append(np.exp(lw))
    w = np.concatenate(ws)
    wt = np.concatenate(wts)
    keep = wt > 1e-300
    return w[keep], wt[keep]


def _tensor_nodes(kappa: np.ndarray, x: np.ndarray, y: np.ndarray, scales, level: int):
    """Tensor quadrature for mu_x as seen from y.

    Returns (A2, eta, weight): squared A(x, y, eta), the nodes eta and weights.
    """
    n = len(x)
    dsq = np.sum((np.abs(x) - np.abs(y)) ** 2)
    per_a2, per_eta, per_wt = [], [], []
    for i in range(n):
        xy = x[i] * y[i]
        same = xy >= 0.0
        c = 2.0 * abs(xy)
        cands = [s / c for s in scales if s > 0] if c > 0 else [1.0]
        delta = min(cands) if cands else 1.0
        w, wt = _coordinate_rule(float(kappa[i]), bool(same), delta, level)
        s = 1.0 - w if same else w - 1.0
        per_a2.append(c * w)
        per_eta.append(x[i] * s)
        per_wt.append(wt)
    grids = np.meshgrid(*per_a2, indexing="ij")
    a2 = dsq + sum(g for g in grids)
    etas = np.stack(np.meshgrid(*per_eta, indexing="ij"), axis=-1)
    wts = np.prod(np.stack(np.meshgrid(*per_wt, indexing="ij"), axis=-1), axis=-1)
    return a2.ravel(), etas.reshape(-1, n), wts.ravel()


# -- the rank-one Dunkl kernel, scaled ---------------------------------------------


def _log_scaled_dunkl(kappa: float, z: np.ndarray) -> np.ndarray:
    """log( E_k(z) e^{-|z|} ) where E_k(z) = integral of e^{s z} against the law of s."""
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    if kappa == 0.0:
        return np.where(z >= 0, 0.0, 2.0 * z)
    nu = kappa - 0.5
    out = np.empty_like(a)
    small = a < 1.0
    if np.any(small):
        q = 0.25 * a[small] ** 2
        j0 = np.ones_like(q)
        j1 = np.ones_like(q)
        t0 = np.ones_like(q)
        t1 = np.ones_like(q)
        for m in range(1, 14):
            t0 = t0 * q / (m * (nu + m))
            t1 = t1 * q / (m * (nu + 1 + m))
            j0 += t0
            j1 += t1
        e = j0 + np.sign(z[small]) * a[small] / (2 * kappa + 1) * j1
        out[small] = np.log(e) - a[small]
    big = ~small
    far = big & (a >= 40.0 + 4.0 * (kappa + 1.0) ** 2)
    mid = big & ~far
    if np.any(mid):
        am = a[mid]
        v = special.ive(nu, am) + np.sign(z[mid]) * special.ive(nu + 1, am)
        out[mid] = lgamma(kappa + 0.5) + nu * np.log(2.0 / am) + np.log(v)
    if np.any(far):
        af = a[far]
        sg = np.sign(z[far])
        # I_nu +- I_{nu+1} from the large-argument expansion; for the minus sign
        # the leading terms cancel exactly and are dropped analytically
        tot = np.where(sg > 0, 2.0, 0.0)
        c0 = np.ones_like(af)
        c1 = np.ones_like(af)
        mu0, mu1 = 4 * nu * nu, 4 * (nu + 1) ** 2
        for m in range(1, 40):
            c0 = c0 * (mu0 - (2 * m - 1) ** 2) / (8 * m * af)
            c1 = c1 * (mu1 - (2 * m - 1) ** 2) / (8 * m * af)
            term = (-1) ** m * (c0 + sg * c1)
            tot = tot + term
            if np.all(np.abs(term) < 1e-17 * np.abs(tot)):
                break
        val = tot / np.sqrt(2 * pi * af)
        out[far] = lgamma(kappa + 0.5) + nu * np.log(2.0 / af) + np.log(val)
    return out


# -- evaluator -----------------------------------------------------------------------


@dataclass(frozen=True)
class KernelValue:
    value: float
    error: float
    method: str
    flagged: bool = False

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class SubordinationConfig:
    nodes: int = 40
    lower_span: float = 7.0  # log-t span below d^2
    upper_span: float = 14.0  # log-t span above max scale^2
    panel_width: float = 4.0  # max log-t length of middle panels
    rtol: float = 1e-9


@dataclass(eq=False)
class KernelEvaluator:
    """Heat and Riesz kernels for a Z_2^N product (or trivial) weight."""

    spec: RootSystemSpec
    group: ReflectionGroup | None = None
    config: SubordinationConfig = field(default_factory=SubordinationConfig)
    eps_sing: float = EPS_SING
    mu_level: int = 4

    def __post_init__(self):
        kap = self.spec.coordinate_multiplicities()
        if kap is None:
            raise UnsupportedGroup(f"{self.spec.name}: explicit intertwining measure needs coordinate roots only")
        self.kappa = kap
        if self.group is None:
            self.group = generate_group(self.spec)
        self.measure = WeightedMeasure(self.spec, self.group)
        self._c_coord = np.array([rank_one_gaussian_mass(float(k)) for k in kap])

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @property
    def homogeneous_dimension(self) -> float:
        return self.spec.homogeneous_dimension

    @property
    def p(self) -> float:
        return self.spec.gamma + self.dimension + 1.0

    @property
    def c_kappa(self) -> float:
        return float(np.prod(self._c_coord))

    @property
    def d_kappa(self) -> float:
        p = self.p
        return 2.0 ** ((p - 1) / 2) * gamma_fn(p / 2) / sqrt(pi)

    def _pts(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim == 0:
            x = x[None]
        if y.ndim == 0:
            y = y[None]
        if x.shape[-1] != self.dimension or y.shape[-1] != self.dimension:
            raise InvalidArgument(f"points must have {self.dimension} coordinates")
        return x, y

    def _check_j(self, j: int) -> int:
        if not (1 <= j <= self.dimension):
            raise InvalidArgument(f"j must be in 1..{self.dimension}, got {j}")
        return j - 1

    # -- heat kernel --------------------------------------------------------

    def log_heat(self, t, x, y) -> np.ndarray:
        x, y = self._pts(x, y)
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise InvalidArgument("t must be positive")
        out = 0.0
        for i, k in enumerate(self.kappa):
            xi, yi = x[..., i], y[..., i]
            z = xi * yi / (2.0 * t)
            out = out + (
                -log(self._c_coord[i])
                - (k + 0.5) * np.log(2.0 * t)
                - (np.abs(xi) - np.abs(yi)) ** 2 / (4.0 * t)
                + _log_scaled_dunkl(float(k), z)
            )
        return out

    def heat(self, t, x, y):
        v = np.exp(self.log_heat(t, x, y))
        return float(v) if np.ndim(v) == 0 else v

    # -- radial translation ----------------------------------------------------

    def translate(self, profile, x, y, scales=()) -> float:
        """tau_x f(y) = integral of f(sqrt(|x|^2 + |y|^2 + 2<y, eta>)) d mu_x(eta)."""
        x, y = self._pts(x, y)
        a2, _, wt = _tensor_nodes(self.kappa, x, -y, self._scales(x, -y, scales), self.mu_level)
        return float(np.sum(wt * profile(np.sqrt(a2))))

    def _scales(self, x, y, extra):
        d2 = float(np.sum((np.abs(x) - np.abs(y)) ** 2))
        s = [d2] + [float(e) for e in extra]
        s = [v for v in s if v > 0]
        return s or [1.0]

    # -- Riesz kernel by subordination -------------------------------------------------

    def _sub_nodes(self, d2: np.ndarray, big2: np.ndarray, n: int):
        """Log-t nodes and weights per pair: shape (P, Q)."""
        cfg = self.config
        xg, wg = gauss_legendre(n)
        lo = np.log(d2)
        hi = np.log(np.maximum(big2, d2))
        pieces = [(lo - cfg.lower_span, lo)]
        span = hi - lo
        m = max(1, int(np.ceil(np.max(span) / cfg.panel_width)))
        for k in range(m):
            pieces.append((lo + span * k / m, lo + span * (k + 1) / m))
        pieces.append((hi, hi + cfg.upper_span))
        us, ws = [], []
        for a, b in pieces:
            h = 0.5 * (b - a)
            us.append(a[:, None] + h[:, None] * (xg[None, :] + 1.0))
            ws.append(h[:, None] * wg[None, :])
        return np.concatenate(us, axis=1), np.concatenate(ws, axis=1), hi + cfg.upper_span

    def _peak_scale(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Squared distance where h_t(x, y) turns on; mirror images only count where kappa_i > 0."""
        mirrored = self.kappa > 0
        diff = np.where(mirrored, np.abs(x) - np.abs(y), x - y)
        return np.sum(diff**2, axis=-1)

    def _riesz_sub_raw(self, x: np.ndarray, y: np.ndarray, jj: int, n: int) -> np.ndarray:
        d2 = self._peak_scale(x, y)
        big2 = np.maximum.reduce([np.sum(x * x, -1), np.sum(y * y, -1), np.sum((x - y) ** 2, -1)])
        u, w, top = self._sub_nodes(d2, big2, n)
        t = np.exp(u)
        lh = self.log_heat(t, x[:, None, :], y[:, None, :])
        dj = y[:, jj] - x[:, jj]
        body = np.sum(w * np.exp(lh - 0.5 * u), axis=1) * 0.5 * dj
        nb = self.homogeneous_dimension
        big_t = np.exp(top)
        tail = 0.5 * dj / self.c_kappa * 2.0 ** (-nb / 2) * (2.0 / (nb + 1)) * big_t ** (-(nb + 1) / 2)
        return -C1 * (body + tail)

    def riesz_many(self, x, y, j: int, check: bool = True):
        """Vectorized subordination over paired rows of x and y.

        Pairs on the orbit diagonal give NaN. Returns (values, error_estimates).
        """
        jj = self._check_j(j)
        x, y = self._pts(x, y)
        x = x.reshape(-1, self.dimension)
        y = y.reshape(-1, self.dimension)
        d = orbit_distance(self.group, x, y)
        ok = np.atleast_1d(d) > self.eps_sing
        vals = np.full(len(x), np.nan)
        errs = np.full(len(x), np.nan)
        n = self.config.nodes
        idx = np.flatnonzero(ok)
        for start in range(0, idx.size, CHUNK):
            sl = idx[start : start + CHUNK]
            v = self._riesz_sub_raw(x[sl], y[sl], jj, n)
            vals[sl] = v
            if check:
                v2 = self._riesz_sub_raw(x[sl], y[sl], jj, 2 * n)
                errs[sl] = np.abs(v2 - v)
                vals[sl] = v2
        return vals, errs

    def riesz_subordination(self, j: int, x, y) -> KernelValue:
        x, y = self._pts(x, y)
        self._require_off_diagonal(x, y)
        v, e = self.riesz_many(x[None], y[None], j)
        if not e[0] <= self.config.rtol * abs(v[0]) + 1e-300:
            raise AccuracyNotReached("subordination integral did not converge under node doubling", v[0], e[0])
        return KernelValue(float(v[0]), float(e[0]), "subordination")

    def _require_off_diagonal(self, x, y):
        d = orbit_distance(self.group, x, y)
        if not d > self.eps_sing:
            raise SingularPair(f"d(x, y) = {d:.3g} <= {self.eps_sing:g}")

    # -- Riesz kernel by the explicit mu_x formula -----------------------------------

    def _mu_integral(self, x, y, func, level: int):
        a2, eta, wt = _tensor_nodes(self.kappa, x, y, self._scales(x, y, ()), level)
        return float(np.sum(wt * func(a2, eta)))

    def riesz_explicit(self, j: int, x, y, form: str = "reflection", hyperplane_tol: float = 1e-6) -> KernelValue:
        """d_k / c_k { K^(1) + sum over positive roots of kappa alpha_j / (p - 2) K^(alpha) }.

        ``form='reflection'`` evaluates the K^(alpha) difference quotient,
        ``form='direct'`` uses the combined integrand (x_j - y_j) A^-p.
        """
        jj = self._check_j(j)
        x, y = self._pts(x, y)
        self._require_off_diagonal(x, y)
        p = self.p
        const = self.d_kappa / self.c_kappa
        flagged = False

        def evaluate(level):
            nonlocal flagged
            if form == "direct":
                return const * self._mu_integral(x, y, lambda a2, eta: (x[jj] - y[jj]) * a2 ** (-p / 2), level)
            if form != "reflection":
                raise InvalidArgument(f"unknown form {form!r}")
            k1 = self._mu_integral(x, y, lambda a2, eta: (eta[:, jj] - y[jj]) * a2 ** (-p / 2), level)
            kap = self.kappa[jj]
            if kap == 0.0:
                return const * k1
            yj = y[jj]
            scale = max(float(np.linalg.norm(y)), float(np.linalg.norm(x)))
            if abs(yj) < hyperplane_tol * scale:
                # g(y_j) / y_j is even in y_j: evaluate just off the hyperplane
                flagged = True
                yj = hyperplane_tol * scale
            yp = y.copy()
            yp[jj] = yj
            ym = yp.copy()
            ym[jj] = -yj
            g = self._mu_integral(x, yp, lambda a2, eta: a2 ** (1 - p / 2), level) - self._mu_integral(
                x, ym, lambda a2, eta: a2 ** (1 - p / 2), level
            )
            # alpha = sqrt2 e_j: kappa alpha_j / (p-2) * (g / <y, alpha>) = kappa g / ((p-2) y_j)
            return const * (k1 + kap * g / ((p - 2.0) * yj))

        fine = evaluate(self.mu_level + 1)
        coarse = evaluate(self.mu_level)
        return KernelValue(fine, abs(fine - coarse), f"explicit-{form}", flagged)


# -- module-level entry points --------------------------------------------------------


def radial_translate(ke: KernelEvaluator, profile, x, y, scales=()) -> float:
    return ke.translate(profile, x, y, scales)


def heat_kernel(ke: KernelEvaluator, t, x, y):
    return ke.heat(t, x, y)


def riesz_kernel_subordination(ke: KernelEvaluator, j: int, x, y) -> KernelValue:
    return ke.riesz_subordination(j, x, y)


def riesz_kernel_explicit(ke: KernelEvaluator, j: int, x, y, form: str = "reflection") -> KernelValue:
    return ke.riesz_explicit(j, x, y, form)


def classical_riesz(j: int, x, y) -> float:
    """Gamma((N+1)/2) pi^{-(N+1)/2} (x_j - y_j) / |x - y|^(N+1)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = x.size
    r = np.linalg.norm(x - y)
    return gamma_fn((n + 1) / 2) * pi ** (-(n + 1) / 2) * (x[j - 1] - y[j - 1]) / r ** (n + 1)


def riesz_constant_ratio(dimension: int = 1, x=None, y=None) -> float:
    """Subordination kernel over the closed-form classical kernel at kappa = 0."""
    from .reflection import trivial

    ke = KernelEvaluator(trivial(dimension))
    x = np.linspace(0.3, 0.9, dimension) if x is None else np.asarray(x, dtype=float)
    y = -np.linspace(0.5, 1.1, dimension) if y is None else np.asarray(y, dtype=float)
    return ke.riesz_subordination(1, x, y).value / classical_riesz(1, x, y)
