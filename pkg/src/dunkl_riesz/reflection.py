"""Root systems, finite reflection groups, orbits and the orbit distance.

Roots are stored normalized to squared length 2.  The multiplicity function is
a per-root array and must be constant on group orbits of roots.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GroupTooLarge, InvalidArgument

ROOT_TOL = 1e-10
GROUP_TOL = 1e-10
_HASH_DECIMALS = 8

# generic direction used to pick a positive subsystem
_POSITIVE_PROBE = np.array([1.0, 0.0316227766, 0.0017320508])


def reflect(alpha, x):
    """Reflect ``x`` in the hyperplane orthogonal to ``alpha``.

    Uses ``x - 2<x,a>/|a|^2 a`` so un-normalized roots are handled too.
    ``x`` may carry leading batch dimensions.
    """
    alpha = np.asarray(alpha, dtype=float)
    x = np.asarray(x, dtype=float)
    nrm2 = float(alpha @ alpha)
    if nrm2 == 0.0:
        raise InvalidArgument("reflection root must be nonzero")
    return x - np.multiply.outer(2.0 * (x @ alpha) / nrm2, alpha)


def reflection_matrix(alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    nrm2 = float(alpha @ alpha)
    if nrm2 == 0.0:
        raise InvalidArgument("reflection root must be nonzero")
    return np.eye(alpha.size) - 2.0 * np.outer(alpha, alpha) / nrm2


def _find_row(rows: np.ndarray, v: np.ndarray, tol: float = ROOT_TOL) -> int:
    hit = np.flatnonzero(np.max(np.abs(rows - v), axis=1) < tol)
    return int(hit[0]) if hit.size else -1


@dataclass(frozen=True, eq=False)
class RootSystemSpec:
    """A normalized root system with a G-invariant multiplicity function.

    Build instances with :meth:`from_roots` or the preset helpers
    (:func:`trivial`, :func:`z2n`, :func:`dihedral`, :func:`product`).
    """

    dimension: int
    roots: np.ndarray
    positive: np.ndarray
    multiplicity: np.ndarray
    name: str = "custom"

    @classmethod
    def from_roots(cls, roots, kappa, dimension: int | None = None, name: str = "custom") -> "RootSystemSpec":
        """Normalize, validate and select a positive subsystem.

        ``kappa`` is a scalar (same value on every root) or one value per root.
        """
        roots = np.asarray(roots, dtype=float)
        if roots.size == 0:
            if dimension is None:
                raise InvalidArgument("dimension is required for an empty root system")
            roots = np.zeros((0, dimension))
        if roots.ndim != 2:
            raise InvalidArgument("roots must be a 2-D array (n_roots, dimension)")
        n = roots.shape[1] if dimension is None else dimension
        if roots.shape[1] != n or n < 1:
            raise InvalidArgument(f"roots must live in R^{n}")
        norms = np.linalg.norm(roots, axis=1)
        if np.any(norms == 0.0):
            raise InvalidArgument("zero vector is not a root")
        roots = roots * (np.sqrt(2.0) / norms)[:, None]

        kappa = np.asarray(kappa, dtype=float)
        if kappa.ndim == 0:
            kappa = np.full(len(roots), float(kappa))
        if kappa.shape != (len(roots),):
            raise InvalidArgument(f"need one multiplicity per root ({len(roots)}), got {kappa.shape}")
        if np.any(kappa < 0) or not np.all(np.isfinite(kappa)):
            raise InvalidArgument("multiplicity must be finite and nonnegative")

        # no duplicates
        for i in range(len(roots)):
            if _find_row(roots[i + 1 :], roots[i]) >= 0:
                raise InvalidArgument(f"duplicate root {roots[i]}")

        # closure under own reflections and -R = R
        for a in roots:
            refl = reflect(a, roots) if len(roots) else roots
            for r in refl:
                if _find_row(roots, r) < 0:
                    raise InvalidArgument(f"root set not closed: sigma_{a} maps onto {r}")
            if _find_row(roots, -a) < 0:
                raise InvalidArgument(f"-{a} missing from root set")

        # G-invariance of kappa, checked on generators (enough: they generate G)
        for a in roots:
            for i, r in enumerate(reflect(a, roots) if len(roots) else roots):
                j = _find_row(roots, r)
                if abs(kappa[j] - kappa[i]) > 1e-12:
                    raise InvalidArgument(
                        f"multiplicity not G-invariant: kappa({roots[i]})={kappa[i]} "
                        f"but kappa({roots[j]})={kappa[j]}"
                    )

        probe = _POSITIVE_PROBE[:n] if n <= 3 else np.cos(np.arange(1, n + 1) * 0.731)
        positive = roots @ probe > 0
        return cls(dimension=n, roots=roots, positive=positive, multiplicity=kappa, name=name)

    @property
    def positive_roots(self) -> np.ndarray:
        return self.roots[self.positive]

    @property
    def positive_multiplicity(self) -> np.ndarray:
        return self.multiplicity[self.positive]

    @property
    def gamma(self) -> float:
        """Sum of the multiplicity over all roots."""
        return float(self.multiplicity.sum())

    @property
    def homogeneous_dimension(self) -> float:
        return self.dimension + self.gamma

    def coordinate_multiplicities(self) -> np.ndarray | None:
        """Per-coordinate kappa when every root is a coordinate root +-sqrt(2) e_i.

        Returns ``None`` for root systems outside the Z_2^N-product family.
        Coordinates without roots get kappa = 0.
        """
        out = np.zeros(self.dimension)
        for a, k in zip(self.roots, self.multiplicity):
            nz = np.flatnonzero(np.abs(a) > ROOT_TOL)
            if nz.size != 1:
                return None
            out[nz[0]] = k
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "roots": self.roots.tolist(),
            "multiplicity": self.multiplicity.tolist(),
        }


def trivial(dimension: int = 1) -> RootSystemSpec:
    return RootSystemSpec.from_roots(np.zeros((0, dimension)), [], dimension=dimension, name=f"trivial-{dimension}")


def z2n(dimension: int, kappa) -> RootSystemSpec:
    """Product of sign flips; ``kappa`` scalar or one value per coordinate."""
    kap = np.broadcast_to(np.asarray(kappa, dtype=float), (dimension,))
    roots, ks = [], []
    for i in range(dimension):
        e = np.zeros(dimension)
        e[i] = np.sqrt(2.0)
        roots += [e, -e]
        ks += [kap[i], kap[i]]
    return RootSystemSpec.from_roots(roots, ks, dimension=dimension, name=f"z2^{dimension}")


def dihedral(m: int, kappa) -> RootSystemSpec:
    """Root system I_2(m) in the plane, roots at angles l*pi/m.

    For even ``m`` the roots split into two orbits (even/odd ``l``) and
    ``kappa`` may be a pair; for odd ``m`` there is a single orbit.
    """
    if m < 2:
        raise InvalidArgument("dihedral order m must be >= 2")
    kap = np.atleast_1d(np.asarray(kappa, dtype=float))
    if kap.size == 1:
        kap = np.repeat(kap, 2)
    if m % 2 == 1 and kap[0] != kap[1]:
        raise InvalidArgument("odd dihedral groups have a single root orbit; give one kappa")
    angles = np.arange(2 * m) * np.pi / m
    roots = np.sqrt(2.0) * np.column_stack([np.cos(angles), np.sin(angles)])
    ks = [kap[l % 2] for l in range(2 * m)]
    return RootSystemSpec.from_roots(roots, ks, dimension=2, name=f"dihedral-{m}")


def product(*factors: RootSystemSpec) -> RootSystemSpec:
    """Direct product of root systems acting on orthogonal coordinate blocks."""
    dim = sum(f.dimension for f in factors)
    roots, ks, off = [], [], 0
    for f in factors:
        for a, k in zip(f.roots, f.multiplicity):
            v = np.zeros(dim)
            v[off : off + f.dimension] = a
            roots.append(v)
            ks.append(k)
        off += f.dimension
    name = " x ".join(f.name for f in factors)
    return RootSystemSpec.from_roots(np.array(roots).reshape(-1, dim), ks, dimension=dim, name=name)


@dataclass(frozen=True, eq=False)
class ReflectionGroup:
    """Finite group of orthogonal matrices; ``elements[0]`` is the identity."""

    elements: np.ndarray
    generator_indices: tuple[int, ...] = field(default=())

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dimension(self) -> int:
        return self.elements.shape[1]

    def apply(self, x) -> np.ndarray:
        """All images g(x); shape ``(..., |G|, N)`` for input ``(..., N)``."""
        x = np.asarray(x, dtype=float)
        return np.einsum("gij,...j->...gi", self.elements, x)

    def index_of(self, m: np.ndarray, tol: float = GROUP_TOL) -> int:
        diff = np.max(np.abs(self.elements - m[None]), axis=(1, 2))
        hit = np.flatnonzero(diff < tol)
        return int(hit[0]) if hit.size else -1

    def cayley_table(self) -> np.ndarray:
        n = self.order
        table = np.empty((n, n), dtype=int)
        for i in range(n):
            for j in range(n):
                table[i, j] = self.index_of(self.elements[i] @ self.elements[j])
        return table


def _key(m: np.ndarray) -> bytes:
    r = np.round(m, _HASH_DECIMALS) + 0.0  # +0.0 folds -0.0 into 0.0
    return r.tobytes()


def generate_group(spec: RootSystemSpec, max_order: int = 1024) -> ReflectionGroup:
    """Breadth-first closure of {I} together with the root reflections."""
    if max_order < 2:
        raise InvalidArgument("max_order must be >= 2")
    n = spec.dimension
    elements: list[np.ndarray] = [np.eye(n)]
    index: dict[bytes, int] = {_key(elements[0]): 0}
    gens: list[int] = []

    def lookup(m: np.ndarray) -> int:
        i = index.get(_key(m))
        if i is not None:
            return i
        # rounding boundary: fall back to a tolerance scan
        for j, e in enumerate(elements):
            if np.max(np.abs(e - m)) < GROUP_TOL:
                return j
        return -1

    gen_mats = []
    for a in spec.positive_roots:
        s = reflection_matrix(a)
        i = lookup(s)
        if i < 0:
            elements.append(s)
            index[_key(s)] = len(elements) - 1
            i = len(elements) - 1
        gens.append(i)
        gen_mats.append(s)

    queue = deque(range(len(elements)))
    while queue:
        i = queue.popleft()
        for s in gen_mats:
            prod = s @ elements[i]
            if lookup(prod) < 0:
                if len(elements) >= max_order:
                    raise GroupTooLarge(
                        f"closure exceeds max_order={max_order}; not a finite reflection group or numerical drift"
                    )
                elements.append(prod)
                index[_key(prod)] = len(elements) - 1
                queue.append(len(elements) - 1)
    return ReflectionGroup(elements=np.array(elements), generator_indices=tuple(gens))


def orbit(g: ReflectionGroup, x, tol: float = GROUP_TOL) -> np.ndarray:
    """Distinct points of the G-orbit of ``x`` (merged at ``tol``)."""
    imgs = g.apply(np.asarray(x, dtype=float).reshape(-1))
    out: list[np.ndarray] = []
    for p in imgs:
        if not any(np.max(np.abs(p - q)) < tol for q in out):
            out.append(p)
    return np.array(out)


def orbit_distance(g: ReflectionGroup, x, y) -> np.ndarray | float:
    """d(x, y) = min over the group of |x - g(y)|; broadcasts over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if y.ndim == 0:
        y = y[None]
    gy = g.apply(y)  # (..., G, N)
    diff = x[..., None, :] - gy
    d = np.sqrt(np.min(np.einsum("...gi,...gi->...g", diff, diff), axis=-1))
    return float(d) if d.ndim == 0 else d
