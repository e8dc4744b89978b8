"""Command line entry point: ``dunkl-riesz <subcommand> [--config PATH] ...``.

Each subcommand writes CSV rows and a JSON summary into ``--out``; every JSON
file embeds the full configuration that produced it.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .config import RunConfig
from .errors import ConfigError, DunklError
from .kernels import KernelEvaluator, SubordinationConfig
from .measure import Ball, OrbitBall, WeightedMeasure
from .operators import assemble_riesz, commutator_apply, commutator_matrix, op_norm_estimate
from .reflection import RootSystemSpec, dihedral, generate_group, product, trivial, z2n
from .spaces import BallFamily, Grid, GridFunction, bmo_norm, symbol_preset
from . import verify

log = logging.getLogger("dunkl_riesz")

SUBCOMMANDS = ("group", "measure", "kernel", "bmo", "commutator", "verify-all")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ROW_ERROR = 0, 1, 2, 3


def build_spec(g) -> RootSystemSpec:
    if g.preset == "trivial":
        return trivial(g.dimension)
    if g.preset == "z2n":
        return z2n(g.dimension, g.kappa)
    if g.preset == "dihedral":
        return dihedral(g.m, g.kappa)
    parts = [build_spec(cfgmod._build(cfgmod.GroupConfig, f, "group.factors.")) for f in g.factors]
    if not parts:
        raise ConfigError("group.factors", "product preset needs at least one factor")
    return product(*parts)


def _evaluator(cfg: RunConfig, spec: RootSystemSpec) -> KernelEvaluator:
    q = cfg.quadrature
    return KernelEvaluator(spec, config=SubordinationConfig(nodes=q.subordination_nodes), eps_sing=q.eps_sing,
                           mu_level=q.mu_level)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def _write_rows(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


# -- subcommands ---------------------------------------------------------------------------


def run_group(cfg: RunConfig, out: Path) -> int:
    spec = build_spec(cfg.group)
    g = generate_group(spec)
    rows = []
    for i, m in enumerate(g.elements):
        det = float(np.linalg.det(m))
        rows.append([i, det, " ".join(repr(float(v)) for v in m.ravel())])
    _write_rows(out / "group.csv", ["element", "det", "matrix"], rows)
    table = g.cayley_table()
    _write_json(out / "group.json", {
        "config": cfg.to_dict(),
        "spec": spec.to_dict(),
        "order": g.order,
        "homogeneous_dimension": spec.homogeneous_dimension,
        "reflections": int(sum(np.isclose(float(np.linalg.det(m)), -1.0) for m in g.elements)),
        "cayley_is_latin": bool(all(len(set(r)) == g.order for r in table)),
    })
    return EXIT_OK


def run_measure(cfg: RunConfig, out: Path) -> int:
    spec = build_spec(cfg.group)
    meas = WeightedMeasure(spec, seed=cfg.seed)
    tol = cfg.quadrature.measure_tol
    rows, failed = [], 0
    for c in cfg.measure.centers:
        for r in cfg.measure.radii:
            try:
                b = Ball(c, float(r))
                m = meas.orbit_ball(OrbitBall(b), tol, cfg.seed) if cfg.measure.orbit else meas.ball(b, tol, cfg.seed)
                rows.append([" ".join(map(str, np.atleast_1d(c))), float(r), m.value, m.error, m.method,
                             m.seed if m.seed is not None else "", "ok"])
            except DunklError as exc:
                failed += 1
                rows.append([" ".join(map(str, np.atleast_1d(c))), float(r), "", "", "", "", f"error: {exc}"])
                if cfg.strict:
                    break
    _write_rows(out / "measure.csv", ["center", "radius", "value", "stderr", "method", "seed", "status"], rows)
    _write_json(out / "measure.json", {"config": cfg.to_dict(), "rows": len(rows), "failed": failed,
                                       "orbit": cfg.measure.orbit})
    return EXIT_ROW_ERROR if failed and cfg.strict else EXIT_OK


def _kernel_points(cfg: RunConfig, dim: int):
    """(x, y, t) triples from ``kernel.points_csv`` (x1..xN, y1..yN[, t]) or ``kernel.pairs``."""
    k = cfg.kernel
    if k.points_csv:
        data = np.loadtxt(k.points_csv, delimiter=",", comments="#", ndmin=2, skiprows=_header_lines(k.points_csv))
        if data.shape[1] not in (2 * dim, 2 * dim + 1):
            raise ConfigError("kernel.points_csv", f"expected {2 * dim} or {2 * dim + 1} columns, got {data.shape[1]}")
        t = data[:, 2 * dim] if data.shape[1] == 2 * dim + 1 else np.full(len(data), k.t)
        return data[:, :dim], data[:, dim : 2 * dim], t
    try:
        x = np.array([np.atleast_1d(p[0]) for p in k.pairs], dtype=float).reshape(-1, dim)
        y = np.array([np.atleast_1d(p[1]) for p in k.pairs], dtype=float).reshape(-1, dim)
    except (ValueError, IndexError, TypeError):
        raise ConfigError("kernel.pairs", f"expected a list of [x, y] points in dimension {dim}") from None
    return x, y, np.full(len(x), k.t)


def _header_lines(path) -> int:
    with open(path) as fh:
        first = fh.readline()
    try:
        [float(v) for v in first.strip().split(",")]
        return 0
    except ValueError:
        return 1


def run_kernel(cfg: RunConfig, out: Path) -> int:
    spec = build_spec(cfg.group)
    ke = _evaluator(cfg, spec)
    x, y, t = _kernel_points(cfg, spec.dimension)
    k = cfg.kernel
    rows, failed = [], 0
    for xi, yi, ti in zip(x, y, t):
        fx, fy = " ".join(map(repr, xi.tolist())), " ".join(map(repr, yi.tolist()))
        try:
            if k.kind == "heat":
                val = float(ke.heat(ti, xi[None, :], yi[None, :])[0])
                rows.append([fx, fy, float(ti), val, "bessel-closed-form", 0.0, "ok"])
            else:
                kv = ke.riesz_subordination(k.j, xi, yi) if k.route == "subordination" else ke.riesz_explicit(k.j, xi, yi)
                status = "flagged" if kv.flagged else "ok"
                rows.append([fx, fy, k.j, kv.value, kv.method, kv.error, status])
        except DunklError as exc:
            failed += 1
            rows.append([fx, fy, float(ti) if k.kind == "heat" else k.j, "", "", "", f"error: {exc}"])
            if cfg.strict:
                break
    _write_rows(out / "kernel.csv", ["x", "y", "t" if k.kind == "heat" else "j", "value", "method", "est_error", "status"],
                rows)
    _write_json(out / "kernel.json", {"config": cfg.to_dict(), "rows": len(rows), "failed": failed})
    return EXIT_ROW_ERROR if failed and cfg.strict else EXIT_OK


def _grid(cfg: RunConfig, spec: RootSystemSpec, cells: int | None = None) -> Grid:
    meas = WeightedMeasure(spec, seed=cfg.seed)
    return Grid.uniform(meas, cfg.grid.half_width, cells or cfg.grid.cells)


def _family(cfg: RunConfig, dim: int) -> BallFamily:
    f = cfg.family
    radii = BallFamily.geometric(np.zeros((1, dim)), f.r_min, f.r_max, f.per_decade).radii
    return BallFamily.lattice(f.center_half_width, f.center_step, dim, radii)


def _symbol(cfg: RunConfig, grid: Grid, name: str | None = None) -> GridFunction:
    s = cfg.symbol
    if name is None and s.csv:
        return GridFunction.from_csv(grid, s.csv)
    return grid.sample(symbol_preset(name or s.preset, grid.measure.dimension, **s.params))


def run_bmo(cfg: RunConfig, out: Path) -> int:
    spec = build_spec(cfg.group)
    grid = _grid(cfg, spec)
    b = _symbol(cfg, grid)
    fam = _family(cfg, spec.dimension)
    summary = {"config": cfg.to_dict(), "family_size": len(fam)}
    for mode in ("euclidean", "orbit"):
        rep = bmo_norm(b, mode, fam)
        rep.write_csv(out / f"bmo_{mode}.csv")
        summary[mode] = rep.summary()
    _write_json(out / "bmo.json", summary)
    return EXIT_OK


def run_commutator(cfg: RunConfig, out: Path) -> int:
    spec = build_spec(cfg.group)
    ke = _evaluator(cfg, spec)
    grid = _grid(cfg, spec)
    c = cfg.commutator
    T = assemble_riesz(ke, grid, c.j, c.eps_trunc)
    fam = verify.default_family(grid)
    b = _symbol(cfg, grid)
    cm = commutator_matrix(T, b)
    est = op_norm_estimate(cm, grid.weights, c.p, trials=c.trials, seed=cfg.seed)
    be = bmo_norm(b, "euclidean", fam).sup
    bd = bmo_norm(b, "orbit", fam).sup
    rng = np.random.default_rng(cfg.seed)
    rows = []
    tests = [("random", rng.standard_normal(grid.size)) for _ in range(c.trials)]
    if est.best_vector is not None:
        tests.append(("extremal", est.best_vector))
    for name, v in tests:
        f = grid.function(v)
        cf = commutator_apply(T, b, f)
        nf = f.lp_norm(c.p)
        rows.append([name, nf, cf.lp_norm(c.p), cf.lp_norm(c.p) / nf if nf else 0.0, cf.meta["route_gap"]])
    _write_rows(out / "commutator.csv", ["test_function", "norm_f", "norm_commutator_f", "ratio", "route_gap"], rows)
    _write_json(out / "commutator.json", {
        "config": cfg.to_dict(),
        "op_norm_lower": est.value,
        "op_norm_converged": est.converged,
        "op_norm_is_lower_estimate": est.lower_estimate,
        "bmo_euclidean": be,
        "bmo_orbit": bd,
        "ratios": {"op_norm_over_bmo_orbit": est.value / bd if bd else None,
                   "bmo_euclidean_over_op_norm": be / est.value if est.value else None},
        "grid_sites": grid.size,
        "excluded_pairs": T.excluded,
    })
    return EXIT_OK


def verify_battery(cfg: RunConfig) -> list[verify.SweepReport]:
    """Kernel, heat and commutator checks at the configured group, all seeded from ``cfg.seed``."""
    spec = build_spec(cfg.group)
    ke = _evaluator(cfg, spec)
    v, dim, seed = cfg.verify, spec.dimension, cfg.seed
    th = cfg.thresholds
    j = cfg.commutator.j
    rng = np.random.default_rng(seed)
    pairs = verify.sample_pairs(ke, v.pair_samples, seed=seed)
    reports = [
        verify.check_size(ke, pairs, j, ceiling=th.size_ceiling(dim)),
        verify.check_smoothness(ke, pairs, "y", j, ceiling=th.smoothness_ceiling(dim), seed=seed + 1),
        verify.check_smoothness(ke, pairs, "x", j, ceiling=th.smoothness_ceiling(dim), seed=seed + 2),
    ]
    sweep = verify.scale_sweep(verify.check_size, ke, pairs, v.scales, j=j, ceiling=th.size_ceiling(dim))
    vals = np.array(list(sweep.values()))
    spread = float((vals.max() - vals.min()) / vals.min())
    homog = verify.SweepReport("size-scale-sweep", [{"scale": s, "sup": r} for s, r in sweep.items()], vals,
                               verify.snapshot(ke, scales=list(v.scales)), 0.10, "ceiling", int(spread > 0.10))
    homog.extra["spread"] = spread
    reports.append(homog)
    centers = rng.uniform(-2, 2, (v.lower_centers, dim))
    reports.append(verify.check_lower_bound(ke, v.lower_radii, centers, j, floor=th.lower_floor(dim)))
    ys = rng.uniform(-2, 2, (v.hormander_pairs, dim))
    offs = rng.standard_normal((v.hormander_pairs, dim))
    offs *= (rng.uniform(0.05, 0.5, v.hormander_pairs) / np.linalg.norm(offs, axis=1))[:, None]
    reports.append(verify.check_hormander(ke, list(zip(ys, ys + offs)), v.outer_radius, j,
                                          ceiling=th.hormander_ceiling(dim)))
    heat = verify.sample_heat(ke, v.heat_samples, seed=seed + 3)
    reports.append(verify.check_heat_bounds(ke, heat, th.heat_c_upper, th.heat_c_lower, ceiling=th.heat_ceiling(dim)))
    grids = [_grid(cfg, spec, n) for n in v.grids]
    reports.append(verify.check_commutator_bounds(ke, cfg.commutator.presets, grids, j, cfg.commutator.p,
                                                  cfg.commutator.eps_trunc, seed=seed))
    return reports


def run_verify_all(cfg: RunConfig, out: Path) -> int:
    reports = verify_battery(cfg)
    checks = {}
    for rep in reports:
        rep.write_csv(out / f"verify_{rep.check}.csv")
        checks[rep.check] = rep.summary()
        log.info("%-18s %s sup=%.4g violations=%d", rep.check, "PASS" if rep.passed else "FAIL", rep.sup,
                 rep.violations)
    ok = all(r.passed for r in reports)
    _write_json(out / "verdict.json", {"config": cfg.to_dict(), "passed": ok, "checks": checks,
                                       "calibration": cfgmod.CALIBRATION_PROVENANCE})
    return EXIT_OK if ok else EXIT_FAIL


RUNNERS = {
    "group": run_group,
    "measure": run_measure,
    "kernel": run_kernel,
    "bmo": run_bmo,
    "commutator": run_commutator,
    "verify-all": run_verify_all,
}


def run(subcommand: str, cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return RUNNERS[subcommand](cfg, out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON or TOML run configuration")
    common.add_argument("--seed", type=int, help="override the configured seed (unsigned 64-bit)")
    common.add_argument("--workers", type=int, help="worker count recorded in the run snapshot")
    common.add_argument("--strict", action="store_true", default=None, help="treat per-row numerical failures as fatal")
    common.add_argument("--out", type=Path, help="output directory for CSV/JSON artifacts")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="dunkl-riesz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = cfgmod.load(args.config) if args.config else RunConfig()
        overrides = {k: getattr(args, k) for k in ("seed", "workers", "strict") if getattr(args, k) is not None}
        if args.out is not None:
            overrides["out"] = str(args.out)
        cfg = replace(cfg, **overrides).validate()
        return run(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DunklError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ROW_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
