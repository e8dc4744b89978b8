"""Dense discretizations of R_j and of the commutator [b, R_j] on weighted grids."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import GridMismatch, InvalidArgument
from .kernels import KernelEvaluator, SubordinationConfig
from .reflection import orbit_distance
from .spaces import Grid, GridFunction

ASSEMBLY_NODES = 24  # log-t nodes per piece; ~1e-7 relative kernel accuracy


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    """T[i, k] = R_j(x_i, x_k) w_k, zero where d(x_i, x_k) <= eps_trunc."""

    grid: Grid
    j: int
    eps_trunc: float
    matrix: np.ndarray
    kernel: np.ndarray  # raw R_j(x_i, x_k), NaN on excluded pairs
    excluded: int
    excluded_mass: float  # sum over rows of the omega-mass of the excluded band, averaged

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def assemble_riesz(
    ke: KernelEvaluator, grid: Grid, j: int, eps_trunc: float, nodes: int = ASSEMBLY_NODES
) -> DiscretizedOperator:
    """Assemble the truncated Riesz matrix, using R_j(y, x) = -R_j(x, y) to halve the work."""
    if not eps_trunc > 0:
        raise InvalidArgument("eps_trunc must be positive")
    if grid.measure.spec is not ke.spec and grid.measure.dimension != ke.dimension:
        raise GridMismatch("grid and kernel evaluator live in different dimensions")
    fast = replace(ke, config=replace(ke.config, nodes=nodes))
    pts = grid.points
    m = len(pts)
    iu, ku = np.triu_indices(m, k=1)
    d = orbit_distance(ke.group, pts[iu], pts[ku])
    keep = d > eps_trunc
    vals = np.full(iu.size, np.nan)
    if np.any(keep):
        vals[keep], _ = fast.riesz_many(pts[iu[keep]], pts[ku[keep]], j, check=False)
    kern = np.full((m, m), np.nan)
    kern[iu, ku] = vals
    kern[ku, iu] = -vals
    mat = np.where(np.isnan(kern), 0.0, kern) * grid.weights[None, :]
    band = np.isnan(kern)
    excluded = int(band.sum())
    excluded_mass = float(np.mean(np.sum(np.where(band, grid.weights[None, :], 0.0), axis=1)))
    return DiscretizedOperator(grid, j, eps_trunc, mat, kern, excluded, excluded_mass)


def _check(T: DiscretizedOperator, f: GridFunction) -> None:
    if f.grid is not T.grid and (f.grid.size != T.grid.size or not np.array_equal(f.grid.points, T.grid.points)):
        raise GridMismatch("function and operator live on different grids")


def apply(T: DiscretizedOperator, f: GridFunction) -> GridFunction:
    _check(T, f)
    return GridFunction(T.grid, T.matrix @ f.values)


def commutator_matrix(T: DiscretizedOperator, b: GridFunction) -> np.ndarray:
    """Entries (b(x_i) - b(x_k)) T[i, k]."""
    _check(T, b)
    return (b.values[:, None] - b.values[None, :]) * T.matrix


def commutator_apply(T: DiscretizedOperator, b: GridFunction, f: GridFunction) -> GridFunction:
    """[b, R_j] f = b R_j f - R_j(b f); meta records the gap to the factorized-matrix route."""
    _check(T, b)
    _check(T, f)
    direct = b.values * (T.matrix @ f.values) - T.matrix @ (b.values * f.values)
    via_matrix = commutator_matrix(T, b) @ f.values
    scale = max(float(np.max(np.abs(via_matrix))), 1e-300)
    gap = float(np.max(np.abs(direct - via_matrix))) / scale
    return GridFunction(T.grid, direct, {"route_gap": gap})


def maximal_truncated(
    ke: KernelEvaluator,
    grid: Grid,
    j: int,
    f: GridFunction,
    truncation_set,
    T: DiscretizedOperator | None = None,
) -> GridFunction:
    """sup over t of |sum over |sigma(x) - y| > t of R_j(x, y) f(y) w(y)|, per group element.

    ``values`` is the max over sigma; ``meta['per_element']`` has shape (|G|, sites).
    """
    ts = np.asarray(truncation_set, dtype=float).reshape(-1)
    if ts.size == 0 or np.any(ts <= 0):
        raise InvalidArgument("truncation_set must be finite and positive")
    if T is None:
        T = assemble_riesz(ke, grid, j, eps_trunc=min(ts.min(), 1e-9))
    _check(T, f)
    pts = grid.points
    g = ke.group
    per = np.zeros((g.order, grid.size))
    for si, s in enumerate(g.elements):
        sx = pts @ s.T
        dist = np.sqrt(np.sum((sx[:, None, :] - pts[None, :, :]) ** 2, axis=-1))
        for t in ts:
            trunc = np.where(dist > t, T.matrix, 0.0) @ f.values
            per[si] = np.maximum(per[si], np.abs(trunc))
    return GridFunction(grid, per.max(axis=0), {"per_element": per, "truncations": ts.tolist()})


# -- norms -------------------------------------------------------------------------------


def lp_norm(f: GridFunction, p: float) -> float:
    if not 1 < p < np.inf:
        raise InvalidArgument("p must lie in (1, inf)")
    return f.lp_norm(p)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    p: float
    converged: bool
    iterations: int
    lower_estimate: bool
    best_vector: np.ndarray | None = field(default=None, repr=False)


def op_norm_estimate(
    matrix,
    weights,
    p: float = 2.0,
    trials: int = 64,
    seed: int = 0,
    rtol: float = 1e-6,
    max_iter: int = 5000,
    test_functions=(),
) -> NormEstimate:
    """Norm of f -> A f on L^p(sum w_k delta_k).

    p = 2: power iteration on B^T B with B = D A D^-1, D = diag(sqrt w).
    Otherwise the max of ||A f||_p / ||f||_p over random and supplied test
    functions, a lower estimate only.
    """
    a = np.asarray(getattr(matrix, "matrix", matrix), dtype=float)
    w = np.asarray(weights, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] != w.size:
        raise InvalidArgument("need a square matrix matching the weights")
    if not 1 < p < np.inf:
        raise InvalidArgument("p must lie in (1, inf)")
    rng = np.random.default_rng(seed)
    if p == 2.0:
        sw = np.sqrt(w)
        bmat = sw[:, None] * a / sw[None, :]
        v = rng.standard_normal(w.size)
        v /= np.linalg.norm(v)
        sigma_sq = 0.0
        for it in range(1, max_iter + 1):
            u = bmat.T @ (bmat @ v)
            nu = np.linalg.norm(u)
            if nu == 0.0:
                return NormEstimate(0.0, p, True, it, False, v / sw)
            new = float(v @ u)
            v = u / nu
            if it > 1 and abs(new - sigma_sq) <= 2 * rtol * abs(new):
                return NormEstimate(float(np.sqrt(new)), p, True, it, False, v / sw)
            sigma_sq = new
        return NormEstimate(float(np.sqrt(sigma_sq)), p, False, max_iter, False, v / sw)

    def ratio(f):
        nf = np.sum(np.abs(f) ** p * w) ** (1 / p)
        return 0.0 if nf == 0 else float(np.sum(np.abs(a @ f) ** p * w) ** (1 / p) / nf)

    cands = [rng.standard_normal(w.size) for _ in range(trials)]
    cands += [np.asarray(getattr(t, "values", t), dtype=float) for t in test_functions]
    two = op_norm_estimate(a, w, 2.0, seed=seed, rtol=1e-4, max_iter=500)
    if two.best_vector is not None:
        cands.append(two.best_vector)
    best, arg = 0.0, None
    for f in cands:
        r = ratio(f)
        if r > best:
            best, arg = r, f
    return NormEstimate(best, p, True, len(cands), True, arg)
