"""powergen command line: coefficients, zeros, densities, curve checks, verification and plot data."""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import checks, cubic, series, zeros
from .polyparse import PolyParseError, format_poly, parse_poly
from .quadrature import QuadratureSpec

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- serialization


def fmt_float(v: float) -> str:
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        return "null"
    if v == 0.0:
        return "-0.0" if math.copysign(1.0, v) < 0 else "0.0"
    text = format(v, ".17g")
    if "e" not in text and "." not in text and "inf" not in text:
        text += ".0"
    return text


def _plain(obj):
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    return obj


def to_json(obj, indent: int = 2, level: int = 0) -> str:
    """Deterministic JSON with every float written to 17 significant digits."""
    obj = _plain(obj)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return _json_str(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json_str(str(k))}: {to_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(_plain(v), (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _json_str(s: str) -> str:
    import json

    return json.dumps(s)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "" if not math.isfinite(v) else fmt_float(v)
    if v is None:
        return ""
    return v


# ---------------------------------------------------------------- config


def worker_count() -> int:
    raw = os.environ.get("POWERGEN_THREADS")
    if raw is None or not raw.strip():
        return min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"POWERGEN_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise UsageError(f"POWERGEN_THREADS must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; keys may use dashes or underscores."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value.strip('"').strip("'")
    return out


def _parse_range(text: str):
    try:
        lo, hi = (int(s) for s in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if lo > hi or lo < 0:
        raise argparse.ArgumentTypeError(f"empty or negative range {text!r}")
    return list(range(lo, hi + 1))


def _float_list(text: str):
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}")


def _positive_float(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text!r}")
    return v


def _spec(args) -> QuadratureSpec:
    try:
        return QuadratureSpec(levels=args.levels, rel_tol=args.rel_tol)
    except ValueError as exc:
        raise UsageError(str(exc))


def _poly_arg(text, name):
    try:
        return parse_poly(text)
    except PolyParseError as exc:
        raise UsageError(f"--{name}: {exc}")


# ---------------------------------------------------------------- commands


def cmd_coeffs(args):
    ms = args.m_range or ([args.m] if args.m is not None else None)
    if ms is None:
        raise UsageError("coeffs needs --m or --m-range")
    if (args.A is None) != (args.B is None):
        raise UsageError("--A and --B must be given together")
    results = []
    for m in ms:
        if args.A is None:
            c = series.pm_coeffs(args.alpha, m)
            results.append(
                {
                    "alpha": c.alpha,
                    "m": m,
                    "degree": c.degree,
                    "leading_sign": c.leading_sign,
                    "end_sign": c.end_sign,
                    "coeffs": c.coeffs,
                }
            )
        else:
            A, B = _poly_arg(args.A, "A"), _poly_arg(args.B, "B")
            h = series.hm_coeffs(args.alpha, A, B, m)[m]
            results.append(
                {
                    "alpha": float(args.alpha),
                    "m": m,
                    "A": format_poly(A),
                    "B": format_poly(B),
                    "degree": h.degree,
                    "coeffs": h.coeffs.real,
                    "coeffs_imag": h.coeffs.imag,
                }
            )
    if args.format == "csv":
        general = args.A is not None
        header = ["m", "k", "coeff"] + (["coeff_imag"] if general else [])
        rows = []
        for r in results:
            for k, c in enumerate(r["coeffs"]):
                rows.append([r["m"], k, c] + ([r["coeffs_imag"][k]] if general else []))
        return to_csv(header, rows), EXIT_OK
    return to_json(results[0] if args.m_range is None else {"results": results}), EXIT_OK


def _real_roots_payload(rr: zeros.RealRoots):
    return {
        "alpha": rr.alpha,
        "m": rr.m,
        "method": rr.method,
        "count": len(rr.roots),
        "expected_count": rr.expected_count,
        "roots": rr.roots,
        "residuals": rr.residuals,
        "all_below_critical": rr.all_below_critical,
        "residuals_ok": rr.residuals_ok,
        "brackets_verified": rr.brackets_verified,
        "extra_roots": [complex(z) for z in rr.extra_roots],
        "ok": rr.ok,
    }


def cmd_roots(args):
    ms = args.m_range or ([args.m] if args.m is not None else None)
    if ms is None:
        raise UsageError("roots needs --m or --m-range")
    if (args.A is None) != (args.B is None):
        raise UsageError("--A and --B must be given together")
    workers = worker_count()
    if args.A is not None:
        A, B = _poly_arg(args.A, "A"), _poly_arg(args.B, "B")

        def solve(m):
            h = series.hm_coeffs(args.alpha, A, B, m)[m]
            if h.degree < 1:
                raise UsageError(f"H_{m} is constant; no roots")
            rs = zeros.aberth_roots(h, ratio_fn=lambda z: zeros.hm_newton_ratios(args.alpha, A, B, m, z))
            return {
                "alpha": float(args.alpha),
                "m": m,
                "count": len(rs.roots),
                "roots": [complex(z) for z in rs.roots],
                "residuals": rs.residuals,
                "iterations": rs.iterations,
                "ok": rs.converged,
            }

        payloads = ordered_map(solve, ms, workers)
    else:
        payloads = ordered_map(lambda m: _real_roots_payload(zeros.pm_real_roots(args.alpha, m, args.method)), ms, workers)
    status = EXIT_OK if all(p["ok"] for p in payloads) else EXIT_FAIL
    if args.format == "csv":
        general = args.A is not None
        header = ["m", "index", "root"] + (["root_imag"] if general else []) + ["residual"]
        rows = []
        for p in payloads:
            for i, (z, res) in enumerate(zip(p["roots"], p["residuals"])):
                if general:
                    rows.append([p["m"], i, z.real, z.imag, res])
                else:
                    rows.append([p["m"], i, z, res])
        return to_csv(header, rows), status
    return to_json(payloads[0] if args.m_range is None else {"results": payloads}), status


def cmd_density(args):
    if args.z is not None:
        zs = args.z
        try:
            dens = [zeros.limiting_density(z) for z in zs]
            cdf = [zeros.limiting_cdf(z) for z in zs]
        except ValueError as exc:
            raise UsageError(str(exc))
        if args.format == "csv":
            return to_csv(["z", "density", "cdf"], zip(zs, dens, cdf)), EXIT_OK
        return to_json({"z": zs, "density": dens, "cdf": cdf}), EXIT_OK
    if args.m is None:
        raise UsageError("density needs --m (report) or --z (point values)")
    rep = zeros.density_report(args.alpha, args.m, args.grid_size)
    status = EXIT_OK if rep.roots.ok else EXIT_FAIL
    if args.format == "csv":
        rows = zip(rep.z_grid, rep.density, rep.empirical_cdf, rep.model_cdf)
        return to_csv(["z", "density", "empirical_cdf", "model_cdf"], rows), status
    payload = {
        "alpha": rep.alpha,
        "m": rep.m,
        "root_count": len(rep.roots.roots),
        "roots_ok": rep.roots.ok,
        "ks_distance": rep.ks_distance,
        "z_grid": rep.z_grid,
        "density": rep.density,
        "empirical_cdf": rep.empirical_cdf,
        "model_cdf": rep.model_cdf,
    }
    return to_json(payload), status


def cmd_curve(args):
    if args.A is None or args.B is None or args.m is None:
        raise UsageError("curve needs --A, --B and --m")
    A, B = _poly_arg(args.A, "A"), _poly_arg(args.B, "B")
    try:
        rep = zeros.curve_check_Hm(args.alpha, A, B, args.m, tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc))
    status = EXIT_OK if rep.on_curve and rep.root_set.converged else EXIT_FAIL
    if args.format == "csv":
        rows = [[z.real, z.imag, w.real, w.imag, ""] for z, w in zip(rep.roots, rep.w)]
        rows += [[z.real, z.imag, "", "", reason] for z, reason in rep.excluded_roots]
        return to_csv(["root_re", "root_im", "w_re", "w_im", "excluded"], rows), status
    payload = {
        "alpha": rep.alpha,
        "m": rep.m,
        "A": format_poly(A),
        "B": format_poly(B),
        "roots": [complex(z) for z in rep.roots],
        "w": [complex(w) for w in rep.w],
        "max_im": rep.max_im,
        "im_ok": rep.im_ok,
        "re_range_ok": rep.re_range_ok,
        "on_curve": rep.on_curve,
        "converged": rep.root_set.converged,
        "excluded_roots": [{"root": complex(z), "reason": reason} for z, reason in rep.excluded_roots],
    }
    return to_json(payload), status


_VERIFY_ARGS = {
    "integral-rep": ("alpha", "m", "z", "spec"),
    "watson": ("alpha", "m", "theta", "spec"),
    "upper-bound": ("alpha", "m", "theta", "spec"),
    "asymptotics": ("alpha", "m", "theta", "spec"),
    "dominance": ("alpha", "m", "spec"),
    "winding": ("alpha", "m", "spec"),
    "derivative": ("alpha", "m"),
    "density": ("alpha", "m"),
    "geometry": (),
}


def cmd_verify(args):
    names = list(checks.CHECKS) if args.check == "all" else [args.check]
    if args.alpha_given and any(n in ("integral-rep", "watson", "upper-bound", "asymptotics", "dominance", "winding") for n in names):
        if not 0 < args.alpha < 1:
            raise UsageError("integral checks need 0 < alpha < 1")
    values = {
        "alpha": args.alpha if args.alpha_given else None,
        "m": args.m,
        "z": args.z,
        "theta": args.theta,
        "spec": _spec(args),
    }
    workers = worker_count()
    results = []
    for name in names:
        kwargs = {k: values[k] for k in _VERIFY_ARGS[name]}
        kwargs["workers"] = workers
        try:
            res = checks.CHECKS[name](**kwargs)
        except ArithmeticError as exc:
            res = checks.CheckResult(name, False, math.nan, math.nan, {"error": str(exc)})
        results.append(res)
    status = EXIT_OK if all(r.passed for r in results) else EXIT_FAIL
    if args.format == "csv":
        rows = [[r.name, "pass" if r.passed else "fail", r.measured, r.tolerance] for r in results]
        return to_csv(["check", "status", "measured", "tolerance"], rows), status
    payload = {
        "passed": all(bool(r.passed) for r in results),
        "checks": [
            {
                "check": r.name,
                "passed": bool(r.passed),
                "measured": r.measured,
                "tolerance": r.tolerance,
                "details": r.details,
            }
            for r in results
        ],
    }
    return to_json(payload), status


ZERO_PLOT_ALPHA = 7.5
ZERO_PLOT_M_MAX = 50


def density_curve_samples(n: int = 400):
    """Density samples on ``[-10, -4/27)``, uniform in ``theta``, plus ``z = -2``."""
    th_lo = cubic.theta_from_z(-10.0)
    thetas = np.linspace(th_lo, math.pi - 1e-4, n)
    zs = np.append(cubic.z_of_theta(thetas), -2.0)
    dens = np.append(zeros.limiting_density_theta(thetas), zeros.limiting_density(-2.0))
    order = np.argsort(zs, kind="stable")
    return zs[order], dens[order]


def cmd_figures(args):
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    workers = worker_count()
    alpha = args.alpha if args.alpha_given else ZERO_PLOT_ALPHA
    solved = ordered_map(lambda m: zeros.pm_real_roots(alpha, m), range(1, ZERO_PLOT_M_MAX + 1), workers)
    rows = [[rr.m, z] for rr in solved for z in rr.roots]
    failed = [rr.m for rr in solved if not rr.ok]
    (outdir / "fig1.csv").write_text(to_csv(["m", "root"], rows), newline="")
    zs, dens = density_curve_samples()
    rows2 = [["sample", z, d] for z, d in zip(zs, dens)]
    rows2.append(["marker", cubic.Z_CRIT, None])
    (outdir / "fig2.csv").write_text(to_csv(["kind", "z", "density"], rows2), newline="")
    summary = {
        "fig1": str(outdir / "fig1.csv"),
        "fig1_alpha": alpha,
        "fig1_rows": len(rows),
        "fig1_failed_m": failed,
        "fig2": str(outdir / "fig2.csv"),
        "fig2_rows": len(rows2),
        "marker_z": cubic.Z_CRIT,
    }
    status = EXIT_OK if not failed else EXIT_FAIL
    if args.format == "csv":
        return to_csv(["file", "rows"], [[summary["fig1"], len(rows)], [summary["fig2"], len(rows2)]]), status
    return to_json(summary), status


COMMANDS = {
    "coeffs": cmd_coeffs,
    "roots": cmd_roots,
    "density": cmd_density,
    "verify": cmd_verify,
    "curve": cmd_curve,
    "figures": cmd_figures,
}


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser, alpha_required=True):
    p.add_argument("--alpha", type=_positive_float, default=None, help="exponent alpha > 0")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--output", default=None, help="write to this file instead of stdout")
    p.add_argument("--config", default=None, help="flat key = value file; flags override it")
    p.add_argument("--levels", type=int, default=10, help="quadrature refinement levels (3..14)")
    p.add_argument("--rel-tol", type=_positive_float, default=1e-10, help="quadrature relative tolerance")
    p.set_defaults(alpha_required=alpha_required)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="powergen", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="coefficients of P_m or H_m")
    _common(p)
    p.add_argument("--m", type=_nonneg_int)
    p.add_argument("--m-range", type=_parse_range, help="LO:HI inclusive")
    p.add_argument("--A", default=None, help="A(z) as ascending coefficients, e.g. '0,1'")
    p.add_argument("--B", default=None, help="B(z) as ascending coefficients")

    p = sub.add_parser("roots", help="zeros of P_m (real) or H_m (complex)")
    _common(p)
    p.add_argument("--m", type=_nonneg_int)
    p.add_argument("--m-range", type=_parse_range)
    p.add_argument("--A", default=None)
    p.add_argument("--B", default=None)
    p.add_argument("--method", choices=["auto", "bracket", "reciprocal"], default="auto")

    p = sub.add_parser("density", help="limiting zero density and KS comparison")
    _common(p)
    p.add_argument("--m", type=_nonneg_int)
    p.add_argument("--z", type=_float_list, help="comma-separated points for density/CDF values")
    p.add_argument("--grid-size", type=int, default=200)

    p = sub.add_parser("curve", help="curve membership of the zeros of H_m")
    _common(p)
    p.add_argument("--m", type=_nonneg_int)
    p.add_argument("--A", default=None)
    p.add_argument("--B", default=None)
    p.add_argument("--tol", type=_positive_float, default=1e-6)

    p = sub.add_parser("verify", help="numerical checks of the integral identities and zero laws")
    _common(p, alpha_required=False)
    p.add_argument("--check", choices=list(checks.CHECKS) + ["all"], default="all")
    p.add_argument("--m", type=_nonneg_int)
    p.add_argument("--z", type=float)
    p.add_argument("--theta", type=float)

    p = sub.add_parser("figures", help="write fig1.csv and fig2.csv")
    _common(p, alpha_required=False)
    p.add_argument("--outdir", default=".")
    return ap


def _apply_config(parser, argv):
    """Re-parse with config values installed as defaults, so flags still win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(cfg) - known - {"config"})
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    sub.set_defaults(**{k: v for k, v in cfg.items() if k != "config"})
    return parser.parse_args(argv)


_VALUE_FLAGS = {"--z", "--A", "--B", "--theta", "--alpha"}


def _glue_negative_values(argv):
    """``--z -2,-1`` -> ``--z=-2,-1``; argparse would read ``-2,-1`` as an option."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2] not in ("", "-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        args.alpha_given = args.alpha is not None
        if args.alpha is None:
            if args.alpha_required:
                raise UsageError("--alpha is required")
            args.alpha = 0.5
        _spec(args)
        text, status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"powergen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"powergen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        Path(args.output).write_text(text, newline="")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
