"""Independent reference values built on mpmath hypergeometric functions.

Nothing here imports the package: the rank-one Dunkl kernel is written as
0F1 series, the heat kernel is normalized by its value at x = 0, and the
Riesz kernel is the t-integral of the heat kernel done by mpmath.quad.
"""

import mpmath as mp

mp.mp.dps = 30


def dunkl_kernel(k, z):
    """E_k(z) on the real line for Z_2 with parameter k, E_k(0) = 1."""
    z = mp.mpf(z)
    q = z * z / 4
    return mp.hyp0f1(k + mp.mpf(1) / 2, q) + z / (2 * k + 1) * mp.hyp0f1(k + mp.mpf(3) / 2, q)


def heat_rank_one(k, t, x, y):
    k, t, x, y = mp.mpf(k), mp.mpf(t), mp.mpf(x), mp.mpf(y)
    norm = 2**k * mp.gamma(k + mp.mpf(1) / 2) * (4 * t) ** (k + mp.mpf(1) / 2)
    return mp.exp(-(x * x + y * y) / (4 * t)) * dunkl_kernel(k, x * y / (2 * t)) / norm


def heat(kappas, t, x, y):
    out = mp.mpf(1)
    for k, a, b in zip(kappas, x, y):
        out *= heat_rank_one(k, t, a, b)
    return out


def riesz(kappas, j, x, y):
    """R_j(x, y) = -(1/sqrt(pi)) int_0^inf (y_j - x_j)/(2t) h_t(x, y) dt/sqrt(t); j is 1-based."""
    d2 = min(sum((a - s * b) ** 2 for a, b in zip(x, y)) for s in (1, -1)) if len(x) == 1 else None
    if d2 is None:
        d2 = sum((abs(a) - abs(b)) ** 2 for a, b in zip(x, y))
    d2 = max(float(d2), 1e-6)
    f = lambda t: (y[j - 1] - x[j - 1]) / (2 * t) * heat(kappas, t, x, y) / mp.sqrt(t)
    pts = [0, d2 / 100, d2, 10 * d2, 100 * d2, 1e4 * d2, mp.inf]
    return float(-mp.quad(f, pts) / mp.sqrt(mp.pi))


def heat_mass(kappa, t, x):
    """int h_t(x, y) 2^k |y|^(2k) dy over R."""
    w = lambda y: heat_rank_one(kappa, t, x, y) * 2**mp.mpf(kappa) * abs(y) ** (2 * kappa)
    s = 4 * mp.sqrt(t) + abs(x)
    return float(mp.quad(w, [-mp.inf, -s, -abs(x), 0, abs(x), s, mp.inf]))


def classical_riesz(j, x, y):
    n = len(x)
    r = mp.sqrt(sum((mp.mpf(a) - b) ** 2 for a, b in zip(x, y)))
    c = mp.gamma(mp.mpf(n + 1) / 2) * mp.pi ** (-mp.mpf(n + 1) / 2)
    return float(c * (x[j - 1] - y[j - 1]) / r ** (n + 1))


def gaussian(t, x, y):
    n = len(x)
    r2 = sum((mp.mpf(a) - b) ** 2 for a, b in zip(x, y))
    return float((4 * mp.pi * t) ** (-mp.mpf(n) / 2) * mp.exp(-r2 / (4 * t)))
