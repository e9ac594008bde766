"""Command-line front end: emits figure-ready tables for every library capability.

Subcommands:
    bounds    finite-n bound sweeps over a dimension range
    asym      exact bounds vs sandwich members and asymptotic forms
    invert    fixed-error NLD inversion (converse / achievable / approximation)
    simulate  seeded Monte Carlo of a builtin lattice, or a scale search
    equiv     section-integral equivalence residuals at small n

Output is CSV (one header line, full-precision, LF line endings) or JSON
lines behind --format json.  Exit status: 0 success, 2 usage error,
1 numerical failure (one machine-parsable line on stderr).
"""

import argparse
import json
import math
import sys

from . import asymptotics, bounds, dispersion, lattices
from .quadrature import QuadratureError

__all__ = ["main"]


def _parse_n_range(text: str) -> list[int]:
    """Dimension range: 'a', 'a:b' (step 1), 'a:b:step', or geometric 'a:b:xG'."""
    parts = text.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    if len(parts) not in (2, 3):
        raise ValueError(f"bad range syntax {text!r}")
    a, b = int(parts[0]), int(parts[1])
    if a < 1 or b < a:
        raise ValueError(f"bad range bounds in {text!r}")
    if len(parts) == 2:
        return list(range(a, b + 1))
    step = parts[2]
    if step.startswith("x"):
        ratio = float(step[1:])
        if ratio <= 1.0:
            raise ValueError(f"geometric ratio must exceed 1, got {step!r}")
        out = []
        v = float(a)
        while v <= b + 1e-9:
            out.append(int(round(v)))
            v *= ratio
        return sorted(set(out))
    inc = int(step)
    if inc < 1:
        raise ValueError(f"step must be >= 1, got {step!r}")
    return list(range(a, b + 1, inc))


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit(rows: list[dict], columns: list[str], fmt: str, out_path: str | None) -> None:
    lines = []
    if fmt == "csv":
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(row[c]) for c in columns))
    else:
        for row in rows:
            lines.append(json.dumps({c: row[c] for c in columns}))
    text = "\n".join(lines) + "\n"
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


_BOUND_ORDER = ("sphere", "ml", "typicality", "poltyrev")


def _cmd_bounds(args) -> list[tuple[list[dict], list[str]]]:
    which = args.which.split(",") if args.which else list(_BOUND_ORDER)
    for w in which:
        if w not in _BOUND_ORDER:
            raise _Usage(f"unknown bound kind {w!r} (choose from {', '.join(_BOUND_ORDER)})")
    columns = ["n"]
    for w in which:
        columns += [w, f"{w}_log"]
    rows = []
    for n in _parse_n_range(args.n):
        point = bounds.ChannelPoint(n=n, nld=args.nld, sigma2=args.sigma2)
        row = {"n": n}
        for w in which:
            fn = {"sphere": bounds.sphere_bound, "ml": bounds.ml_bound,
                  "typicality": bounds.typicality_bound,
                  "poltyrev": bounds.poltyrev_ml_bound}[w]
            bv = fn(point)
            if bv.clamped:
                print(f"warning: {w} bound exceeds 1 at n={n} (clamped, vacuous)",
                      file=sys.stderr)
            row[w] = bv.value
            row[f"{w}_log"] = bv.log_raw
        rows.append(row)
    return [(rows, columns)]


def _safe_log(fn, *a):
    try:
        return fn(*a).log_value
    except (ValueError, asymptotics.AsymptoticSingularity):
        return math.nan


def _cmd_asym(args) -> list[tuple[list[dict], list[str]]]:
    columns = ["n",
               "sphere_log", "sphere_lower_q_log", "sphere_lower_log",
               "sphere_upper_log", "sphere_asym_log", "sphere_ratio",
               "ml_log", "ml_lower_q_log", "ml_lower_log", "ml_upper_log",
               "ml_asym_log", "ml_ratio", "ml_branch",
               "typicality_log", "typicality_asym_log", "typicality_ratio"]
    rows = []
    for n in _parse_n_range(args.n):
        point = bounds.ChannelPoint(n=n, nld=args.nld, sigma2=args.sigma2)
        row = {"n": n}
        row["sphere_log"] = bounds.sphere_bound(point).log_raw
        row["ml_log"] = bounds.ml_bound(point).log_raw
        row["typicality_log"] = bounds.typicality_bound(point).log_raw
        try:
            sw = asymptotics.sphere_sandwich(point)
            row["sphere_lower_q_log"] = sw.lower_q.log_value
            row["sphere_lower_log"] = sw.lower_analytic.log_value
            row["sphere_upper_log"] = sw.upper.log_value
        except ValueError:
            row["sphere_lower_q_log"] = row["sphere_lower_log"] = row["sphere_upper_log"] = math.nan
        try:
            mw = asymptotics.ml_sandwich(point)
            row["ml_lower_q_log"] = mw.lower_q.log_value
            row["ml_lower_log"] = mw.lower_analytic.log_value
            row["ml_upper_log"] = mw.upper.log_value
        except ValueError:
            row["ml_lower_q_log"] = row["ml_lower_log"] = row["ml_upper_log"] = math.nan
        row["sphere_asym_log"] = _safe_log(asymptotics.sphere_asymptotic, point)
        row["ml_asym_log"] = _safe_log(asymptotics.ml_asymptotic, point)
        row["typicality_asym_log"] = _safe_log(asymptotics.typicality_asymptotic, point)
        row["ml_branch"] = asymptotics.ml_asymptotic_branch(point)
        for k in ("sphere", "ml", "typicality"):
            row[f"{k}_ratio"] = math.exp(row[f"{k}_log"] - row[f"{k}_asym_log"]) \
                if math.isfinite(row[f"{k}_asym_log"]) else math.nan
        rows.append(row)
    return [(rows, columns)]


def _cmd_invert(args) -> list[tuple[list[dict], list[str]]]:
    columns = ["n", "delta_converse", "delta_achievable", "delta_approx",
               "delta_star", "delta_cr",
               "gap_db_converse", "gap_db_achievable", "gap_db_approx"]
    ds = bounds.delta_star(args.sigma2)
    dcr = bounds.delta_cr(args.sigma2)
    rows = []
    for n in _parse_n_range(args.n):
        conv = dispersion.nld_eps_converse(n, args.eps, args.sigma2).delta
        ach = dispersion.nld_eps_achievable(n, args.eps, args.sigma2).delta
        approx = dispersion.nld_eps_approx(n, args.eps, args.sigma2)
        rows.append({
            "n": n, "delta_converse": conv, "delta_achievable": ach,
            "delta_approx": approx, "delta_star": ds, "delta_cr": dcr,
            "gap_db_converse": dispersion.gap_db(conv, args.sigma2),
            "gap_db_achievable": dispersion.gap_db(ach, args.sigma2),
            "gap_db_approx": dispersion.gap_db(approx, args.sigma2),
        })
    return [(rows, columns)]


def _cmd_simulate(args) -> list[tuple[list[dict], list[str]]]:
    try:
        spec = lattices.builtin(args.lattice)
    except lattices.UnsupportedLatticeError as exc:
        raise _Usage(str(exc)) from exc
    except ValueError as exc:
        raise _Usage(str(exc)) from exc
    if args.target_eps is not None:
        if not (0.0 < args.target_eps < 1.0):
            raise _Usage(f"--target-eps must be in (0, 1), got {args.target_eps}")
        res = lattices.find_scale_for_error(spec, args.target_eps, args.sigma2,
                                            trials_per_probe=args.trials,
                                            seed=args.seed, streams=args.streams)
        est = res.estimate
        columns = ["lattice", "n", "scale", "delta", "gap_db", "eps_target",
                   "trials", "errors", "p_hat", "ci_low", "ci_high",
                   "seed", "streams", "probes"]
        rows = [{
            "lattice": spec.name, "n": spec.dim, "scale": res.scale,
            "delta": res.delta, "gap_db": res.gap_db,
            "eps_target": args.target_eps, "trials": est.trials,
            "errors": est.errors, "p_hat": est.p_hat,
            "ci_low": est.ci_low, "ci_high": est.ci_high,
            "seed": args.seed, "streams": args.streams, "probes": res.probes,
        }]
        return [(rows, columns)]
    est = lattices.simulate_error_prob(spec, args.sigma2, args.trials,
                                       seed=args.seed, streams=args.streams)
    record = est.to_record(spec, args.sigma2)
    columns = ["lattice", "n", "delta", "sigma2", "trials", "errors",
               "p_hat", "ci_low", "ci_high", "seed", "streams"]
    return [([record], columns)]


def _cmd_equiv(args) -> list[tuple[list[dict], list[str]]]:
    n = int(args.n)
    if not (2 <= n <= 8):
        raise _Usage(f"equiv supports n in 2..8, got {n}")
    radii = [float(tok) for tok in args.r.split(",")]
    if any(r <= 0 for r in radii):
        raise _Usage("radii must be positive")
    columns = ["n", "r", "lhs", "rhs", "rel_discrepancy"]
    rows = []
    for r in radii:
        lhs, rhs = bounds.equivalence_sides(n, r, args.sigma2)
        rows.append({"n": n, "r": r, "lhs": lhs, "rhs": rhs,
                     "rel_discrepancy": abs(lhs - rhs) / rhs})
    return [(rows, columns)]


class _Usage(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icawgn",
        description="Bounds, asymptotics, inversion and simulation for "
                    "infinite constellations over unconstrained AWGN.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, eps=False):
        p.add_argument("--sigma2", type=float, default=1.0, help="noise variance per dimension")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if eps:
            p.add_argument("--eps", type=float, required=True, help="target error probability")

    p = sub.add_parser("bounds", help="finite-n bounds over a dimension range")
    p.add_argument("--n", required=True, help="dimension range a:b[:step|:xG]")
    p.add_argument("--nld", type=float, required=True, help="NLD delta in nats/dim")
    p.add_argument("--which", default=None,
                   help="comma list from sphere,ml,typicality,poltyrev (default all)")
    common(p)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("asym", help="exact bounds vs sandwiches and asymptotics")
    p.add_argument("--n", required=True)
    p.add_argument("--nld", type=float, required=True)
    common(p)
    p.set_defaults(func=_cmd_asym)

    p = sub.add_parser("invert", help="NLD at fixed error probability")
    p.add_argument("--n", required=True)
    common(p, eps=True)
    p.set_defaults(func=_cmd_invert)

    p = sub.add_parser("simulate", help="Monte Carlo on a builtin lattice")
    p.add_argument("--lattice", required=True, help="Z1, Zk, A2, D4 or E8")
    p.add_argument("--trials", type=int, default=100000,
                   help="trials (per probe when --target-eps is given)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--streams", type=int, default=1)
    p.add_argument("--target-eps", type=float, default=None,
                   help="search the scale reaching this error probability")
    common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("equiv", help="section-integral equivalence residuals")
    p.add_argument("--n", required=True, help="single dimension in 2..8")
    p.add_argument("--r", required=True, help="comma list of radii")
    common(p)
    p.set_defaults(func=_cmd_equiv)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        tables = args.func(args)
    except _Usage as exc:
        parser.exit(2, f"{parser.prog}: usage error: {exc}\n")
    except (QuadratureError, ArithmeticError, asymptotics.AsymptoticSingularity) as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        parser.exit(2, f"{parser.prog}: usage error: {exc}\n")
    for rows, columns in tables:
        _emit(rows, columns, args.format, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
