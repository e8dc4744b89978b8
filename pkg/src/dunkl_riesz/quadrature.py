"""Quadrature rules used by the measure and kernel evaluators.

Tanh-sinh rules are returned together with the endpoint complements
``1 - s`` and ``1 + s`` computed without cancellation, so integrands with
algebraic endpoint singularities or endpoint peaks can be evaluated to full
relative precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

_LOG2 = np.log(2.0)


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class TanhSinhRule:
    s: np.ndarray
    log_one_minus: np.ndarray  # log(1 - s)
    log_one_plus: np.ndarray  # log(1 + s)
    log_weight: np.ndarray  # log(h * ds/dt)

    @property
    def one_minus(self) -> np.ndarray:
        return np.exp(self.log_one_minus)

    @property
    def one_plus(self) -> np.ndarray:
        return np.exp(self.log_one_plus)

    @property
    def weight(self) -> np.ndarray:
        return np.exp(self.log_weight)


@lru_cache(maxsize=128)
def tanh_sinh(level: int, umax: float = 20.0) -> TanhSinhRule:
    """Tanh-sinh rule on (-1, 1) with step ``2**-level``.

    ``umax`` bounds |pi/2 sinh t|; the outermost nodes sit at distance about
    ``2 exp(-2 umax)`` from the endpoints.
    """
    h = 2.0**-level
    tmax = np.arcsinh(2.0 * umax / np.pi)
    k = np.arange(-int(np.floor(tmax / h)), int(np.floor(tmax / h)) + 1)
    t = k * h
    u = 0.5 * np.pi * np.sinh(t)
    au = np.abs(u)
    l1pe = np.log1p(np.exp(-2.0 * au))
    # log(1 - tanh|u|) and log(1 + tanh|u|)
    lsmall = _LOG2 - 2.0 * au - l1pe
    lbig = _LOG2 - l1pe
    log_om = np.where(u >= 0, lsmall, lbig)
    log_op = np.where(u >= 0, lbig, lsmall)
    log_cosh_u = au + l1pe - _LOG2
    log_w = np.log(h) + np.log(0.5 * np.pi * np.cosh(t)) - 2.0 * log_cosh_u
    s = np.tanh(u)
    return TanhSinhRule(s=s, log_one_minus=log_om, log_one_plus=log_op, log_weight=log_w)


def integrate_panels(f, breaks, level: int = 5, umax: float = 20.0) -> tuple[float, float]:
    """Integrate a vectorized ``f`` over consecutive panels of ``breaks``.

    ``f(x, dist_left, dist_right)`` receives the nodes and their exact
    distances to the panel ends.  Returns ``(value, error_estimate)`` where
    the error is the difference to the rule one level coarser.
    """
    breaks = np.unique(np.asarray(breaks, dtype=float))
    if breaks.size < 2:
        return 0.0, 0.0
    a = breaks[:-1]
    half = 0.5 * np.diff(breaks)
    keep = half > 0
    a, half = a[keep], half[keep]

    def run(lv: int) -> float:
        r = tanh_sinh(lv, umax)
        dl = half[:, None] * r.one_plus[None, :]
        dr = half[:, None] * r.one_minus[None, :]
        x = a[:, None] + dl
        vals = f(x, dl, dr)
        return float(np.sum(vals * (half[:, None] * r.weight[None, :])))

    fine = run(level)
    coarse = run(level - 1)
    return fine, abs(fine - coarse)


@lru_cache(maxsize=256)
def beta_normalizer(kappa: float) -> float:
    """1 / integral of (1-s)^(kappa-1) (1+s)^kappa over (-1, 1), by adaptive quadrature."""
    val, _ = integrate.quad(lambda s: 1.0, -1.0, 1.0, weight="alg", wvar=(kappa, kappa - 1.0), epsabs=0.0, epsrel=1e-13)
    return 1.0 / val


@dataclass(frozen=True)
class MuRule:
    """Nodes ``s`` in (-1, 1) with weights for the rank-one intertwining law.

    The point mass of mu_x sits at ``eta = x * s``; ``one_minus`` and
    ``one_plus`` are the exact complements used to form A^2 stably.
    """

    s: np.ndarray
    one_minus: np.ndarray
    one_plus: np.ndarray
    weight: np.ndarray


def _mu_umax(kappa: float) -> float:
    # mass left beyond the outermost node is ~ (2 e^{-2 umax})^kappa / kappa
    return float(min(340.0, (37.0 + np.log(1.0 / min(kappa, 1.0))) / (2.0 * min(kappa, 1.0)) + 2.0))


@lru_cache(maxsize=256)
def mu_rule(kappa: float, level: int = 4) -> MuRule:
    """Quadrature for the law with density M (1-s)^(kappa-1) (1+s)^kappa.

    ``kappa == 0`` returns the Dirac mass at ``s = 1``.
    """
    if kappa == 0.0:
        one = np.ones(1)
        return MuRule(s=one, one_minus=np.zeros(1), one_plus=2.0 * one, weight=one)
    r = tanh_sinh(level, _mu_umax(kappa))
    logw = np.log(beta_normalizer(kappa)) + (kappa - 1.0) * r.log_one_minus + kappa * r.log_one_plus + r.log_weight
    w = np.exp(logw)
    keep = w > 1e-300
    return MuRule(s=r.s[keep], one_minus=r.one_minus[keep], one_plus=r.one_plus[keep], weight=w[keep])
