"""Command-line front end.

Every command reads a region-spec JSON file (``--region``) and writes CSV or
JSON to stdout or ``--out``. Exit codes: 0 success, 2 bad configuration,
3 numeric or domain failure, 4 a check that ran but failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .cplxdim import WindowSpec, find_poles, residue_content_check, residue_with_error
from .errors import RegionError, ZetaInfError
from .inversion import inversion_identity_check
from .minkowski import estimate_dimension
from .regions import SCHEMA_VERSION, Norm, load_region, total_measure
from .tube import Grid, tube_scan
from .zeta import ZetaEvaluator, zeta_closed_form, zeta_numeric_with_error

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CHECK = 4


class ConfigError(Exception):
    pass


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"not a complex number: {text!r}") from None


def _s_values(tokens) -> list:
    out = []
    for tok in tokens or ():
        out.extend(_complex(p) for p in tok.split(",") if p)
    if not out:
        raise ConfigError("give at least one s value (e.g. --s=-2.5,-2.8+1j)")
    return out


def _point(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"--at expects re,im, got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise ConfigError(f"--at expects re,im, got {text!r}") from None


def _num(v):
    """JSON-safe float: infinities as strings, NaN as null."""
    if v is None:
        return None
    v = float(v)
    if math.isnan(v):
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _grid(args, region) -> Grid:
    t0 = region.t_min if args.t0 is None else args.t0
    return Grid(t0, args.ratio, args.count)


# ---------------------------------------------------------------------------
# commands


def cmd_tube_scan(args, region) -> tuple:
    scan = tube_scan(region, args.norm, _grid(args, region), args.method, args.samples, args.seed)
    return (scan.to_json() + "\n" if args.format == "json" else scan.to_csv()), 0


def cmd_dim(args, region) -> tuple:
    scan = tube_scan(region, args.norm, _grid(args, region), args.method, args.samples, args.seed)
    est = estimate_dimension(scan, region.ambient_dim, args.tail_fraction, args.delta)
    if args.format == "table":
        osc = est.residual_oscillation
        rows = [("D_hat", "-inf" if est.minus_infinity else f"{est.D_hat:.6f}"),
                ("window", f"[{est.window[0]:.6g}, {est.window[1]:.6g}]"),
                ("content_upper", f"{est.content_upper:.6g}"),
                ("content_lower", f"{est.content_lower:.6g}"),
                ("measurable", est.measurable_verdict),
                ("oscillation", f"{osc.amplitude:.3g}"
                 + (f" (period {osc.period_log_t:.4f})" if osc.period_log_t else "")),
                ("drift", str(est.drift))]
        width = max(len(k) for k, _ in rows)
        return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows), 0
    return _dump(est.to_dict()), 0


def cmd_zeta(args, region) -> tuple:
    ev = ZetaEvaluator(region, args.norm, args.T, args.mode)
    lines = ["re_s,im_s,re_zeta,im_zeta,abs_err"]
    for s in _s_values(args.s):
        if args.mode == "closed_form":
            z, err = complex(zeta_closed_form(ev, s)), 0.0
        else:
            z, err = zeta_numeric_with_error(ev, s, tol=args.tol)
        lines.append(",".join(repr(float(v)) for v in (s.real, s.imag, z.real, z.imag, err)))
    return "\n".join(lines) + "\n", 0


def cmd_poles(args, region) -> tuple:
    ev = ZetaEvaluator(region, args.norm, args.T, "closed_form")
    win = WindowSpec(*args.window, depth=args.depth)
    poles = find_poles(ev, win)
    out = [dict(p.to_dict(), schema=SCHEMA_VERSION) for p in poles]
    return _dump(out), 0


def cmd_residue(args, region) -> tuple:
    ev = ZetaEvaluator(region, args.norm, args.T, "closed_form")
    at = _point(args.at)
    res, err, r = residue_with_error(ev, at, args.radius)
    return _dump({"schema": SCHEMA_VERSION, "re": at.real, "im": at.imag,
                  "res_re": res.real, "res_im": res.imag, "error": err, "radius": r}), 0


def cmd_invert_check(args, region) -> tuple:
    rep = inversion_identity_check(region, args.T, _s_values(args.s), args.samples, args.seed)
    return _dump(rep.to_dict()), 0 if rep.passed else EXIT_CHECK


def cmd_measure(args, region) -> tuple:
    return _dump({"schema": SCHEMA_VERSION, "family": region.family,
                  "measure": total_measure(region)}), 0


def cmd_residue_content(args, region) -> tuple:
    rep = residue_content_check(region, args.norm)
    d = rep.to_dict()
    d = {k: (_num(v) if isinstance(v, float) else v) for k, v in d.items()}
    return _dump(d), 0 if (rep.passed or rep.skipped) else EXIT_CHECK


COMMANDS = {
    "tube-scan": cmd_tube_scan,
    "dim": cmd_dim,
    "zeta": cmd_zeta,
    "poles": cmd_poles,
    "residue": cmd_residue,
    "invert-check": cmd_invert_check,
    "measure": cmd_measure,
    "residue-content": cmd_residue_content,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--region", required=True, help="region-spec JSON file")
    common.add_argument("--norm", default="sup", choices=["euclidean", "sup"])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--tol", type=float, default=1e-9)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--t0", type=float, default=None, help="first radius (default: t_min)")
    grid.add_argument("--ratio", type=float, default=2 ** 0.25)
    grid.add_argument("--count", type=int, default=64)
    grid.add_argument("--method", choices=["analytic", "mc"], default="analytic")
    grid.add_argument("--samples", type=int, default=100_000)

    p = argparse.ArgumentParser(prog="zetainf",
                                description="Fractal zeta functions and dimensions at infinity.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("tube-scan", parents=[common, grid], help="tube function on a grid")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")

    sp = sub.add_parser("dim", parents=[common, grid], help="box dimension and contents")
    sp.add_argument("--tail-fraction", type=float, default=0.5)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--format", choices=["json", "table"], default="json")

    sp = sub.add_parser("zeta", parents=[common], help="evaluate the zeta function")
    sp.add_argument("--s", action="append", required=True,
                    help="s values, comma separated, e.g. --s -2.5,-2.8+1j")
    sp.add_argument("--T", type=float, default=None)
    sp.add_argument("--mode", choices=["numeric", "closed_form"], default="numeric")

    sp = sub.add_parser("poles", parents=[common], help="complex dimensions in a window")
    sp.add_argument("--window", type=float, nargs=4, required=True,
                    metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    sp.add_argument("--depth", type=int, default=40)
    sp.add_argument("--T", type=float, default=None)

    sp = sub.add_parser("residue", parents=[common], help="residue by a circle contour")
    sp.add_argument("--at", required=True, help="pole location re,im")
    sp.add_argument("--radius", type=float, default=1e-2)
    sp.add_argument("--T", type=float, default=None)

    sp = sub.add_parser("invert-check", parents=[common], help="inversion identity check")
    sp.add_argument("--s", action="append", required=True)
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--T", type=float, default=None)

    sub.add_parser("measure", parents=[common], help="exact Lebesgue measure")
    sub.add_parser("residue-content", parents=[common],
                   help="residue versus Minkowski content check")
    return p


def _write(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# options whose values routinely start with '-' (negative real parts)
_SIGNED_OPTIONS = ("--s", "--at")


def _join_signed(argv):
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _SIGNED_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_signed(argv))
    try:
        args.norm = Norm.parse(args.norm)
        region = load_region(args.region)
        text, code = COMMANDS[args.command](args, region)
    except (ConfigError, RegionError) as exc:
        print(f"zetainf: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ZetaInfError, ArithmeticError, RuntimeError) as exc:
        print(f"zetainf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _write(text, args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
