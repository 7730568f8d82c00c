"""Command line: ``hairlab <subcommand> --a <real> [options]``.

Exit codes: 0 success, 2 usage error, 3 numeric diagnostic failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .basin import NonContraction, boundary_point, boundary_polyline, verify_quadratic_like
from .hairs import (CapExceeded, accumulation_report, bracket_check, choose_blocks, landing_report, mu_linear,
                    trace_hair, DEFAULT_DELTA)
from .inverse import CutLineError, NoConvergenceError
from .mapcore import FOverflowError, InvalidParameterError, Params
from .partition import sample_curves
from .render import RenderJob, render_classification
from .symbolic import Generator, SequenceError, lift, parse_bseq
from .tails import DomainError, TailUniquenessError, base_polyline, tail_polyline

# every numeric default lives here; a config file overrides these, flags override the file
DEFAULTS = {
    "view": "-8,4,-6,6",
    "px": "512x512",
    "budget": 200,
    "workers": 1,
    "lift": 1,
    "depth": None,
    "delta": DEFAULT_DELTA,
    "jmax": 3,
    "mu": "linear:1",
    "ks": "auto",
    "kcap": 60,
    "eps": 0.05,
    "samples": 200,
    "grid": 8,
    "xmax": None,
}
DEPTH_DEFAULTS = {"hair": 12, "boundary-point": 60, "boundary": 60}

NUMERIC_ERRORS = (NonContraction, NoConvergenceError, CutLineError, TailUniquenessError, CapExceeded,
                  FOverflowError, DomainError)


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        from importlib.metadata import version
        return version("artifact")
    except Exception:
        return "0.0.0"


def _view(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad --view {text!r}")
    if len(vals) != 4:
        raise UsageError("--view needs x0,x1,y0,y1")
    return vals


def _px(text: str) -> tuple:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad --px {text!r} (expected WxH)")
    return w, h


def _mu(text: str, jmax: int) -> list:
    """``linear:<step>`` or ``linear:<step>:<offset>`` giving mu_j = offset + step * j."""
    parts = text.split(":")
    if parts[0] != "linear" or len(parts) not in (2, 3):
        raise UsageError(f"bad --mu {text!r}")
    try:
        step = float(parts[1])
        off = float(parts[2]) if len(parts) == 3 else 0.0
    except ValueError:
        raise UsageError(f"bad --mu {text!r}")
    if step <= 0:
        raise UsageError("--mu step must be positive")
    return mu_linear(step, jmax, off)


def _seq(args):
    if not args.seq:
        raise UsageError("--seq is required")
    try:
        b = parse_bseq(args.seq)
        return lift(b, int(args.lift))
    except (SequenceError, ValueError) as exc:
        raise UsageError(str(exc))


def _out(args, default: str) -> Path:
    return Path(args.out if args.out else default)


def _params_dict(p: Params) -> dict:
    return {"a": p.a, "R": p.R, "p_a": p.p_a, "q_a": p.q_a}


def _hair_diag(h, p, eps, extra=None):
    rep = landing_report(h, p)
    acc = accumulation_report(h, base_polyline(h.itinerary, p), eps)
    d = io.diagnostics(rep.verdict, rep.endpoint, rep.rates, acc.returning_arcs, extra,
                       gaps=rep.gaps, period=rep.period, multiplier=rep.multiplier,
                       flagged=h.flagged, itinerary=str(h.itinerary))
    return rep, acc, d


# --- subcommands: each returns (exit code, written paths)


def cmd_render(args, p):
    x0, x1, y0, y1 = _view(args.view)
    try:
        job = RenderJob(p.a, (x0, x1, y0, y1), _px(args.px), int(args.budget))
    except ValueError as exc:
        raise UsageError(str(exc))
    raster, stats = render_classification(job, workers=int(args.workers))
    out = io.write(_out(args, "render.ppm"), io.ppm_bytes(raster))
    print(json.dumps(stats.as_dict(), sort_keys=True))
    return 0, [out]


def cmd_curves(args, p):
    x0, x1, _, _ = _view(args.view)
    out = io.write(_out(args, "curves.csv"), io.curves_csv(sample_curves(p, x0, x1, int(args.samples))))
    return 0, [out]


def cmd_tail(args, p):
    t = _seq(args)
    x_top = float(args.xmax) if args.xmax else 4.0 * p.R
    out = io.write(_out(args, "tail.csv"), io.polyline_csv(tail_polyline(t, p, x_top)))
    return 0, [out]


def cmd_hair(args, p):
    t = _seq(args)
    depth = int(args.depth or DEPTH_DEFAULTS["hair"])
    h = trace_hair(t, depth, p, delta=float(args.delta))
    rep, acc, d = _hair_diag(h, p, float(args.eps))
    out = _out(args, "hair.csv")
    paths = [io.write(out, io.polyline_csv(h.polyline)), io.write(out.with_suffix(".json"), io.json_bytes(d))]
    print(f"{rep.verdict} endpoint={rep.endpoint} returning_arcs={acc.returning_arcs}")
    return 0, paths


def cmd_nonlanding(args, p):
    if not args.tau:
        raise UsageError("--tau is required")
    tau = [int(c) for c in args.tau if c in "01"]
    jmax = int(args.jmax)
    out = _out(args, "nonlanding.csv")
    if args.ks == "auto":
        bc = choose_blocks(tau, jmax, _mu(args.mu, jmax), p=p, k_cap=int(args.kcap))
        ks = bc.ks
        if not bc.complete:
            d = io.diagnostics("CapExceeded", None, (), None, None, failed_j=bc.failed_j, ks=ks,
                               crossings={f"{j},{k}": n for (j, k), n in bc.crossings.items()})
            path = io.write(out.with_suffix(".json"), io.json_bytes(d))
            print(f"CapExceeded at j={bc.failed_j}; partial ks={ks}", file=sys.stderr)
            return 3, [path]
    else:
        try:
            ks = [int(k) for k in args.ks.split(",") if k]
        except ValueError:
            raise UsageError(f"bad --ks {args.ks!r}")
    try:
        T = Generator(tuple(tau), tuple(ks))
    except SequenceError as exc:
        raise UsageError(str(exc))
    depth = int(args.depth or (len(tau) + sum(k + 2 for k in ks)))
    h = trace_hair(lift(T, 1), depth, p, delta=float(args.delta))
    gaps = {n: bracket_check(T, n, p).arc_gap for n in range(1, len(ks) + 1)}
    rep, acc, d = _hair_diag(h, p, float(args.eps), gaps)
    d["generator"] = str(T)
    paths = [io.write(out, io.polyline_csv(h.polyline)), io.write(out.with_suffix(".json"), io.json_bytes(d))]
    print(f"T = {T}")
    print(f"{rep.verdict} returning_arcs={acc.returning_arcs}")
    return 0, paths


def cmd_boundary_point(args, p):
    t = _seq(args)
    bp = boundary_point(t, int(args.depth or DEPTH_DEFAULTS["boundary-point"]), p)
    print(f"{io.fmt(bp.z.real)} {io.fmt(bp.z.imag)} angle={bp.angle}")
    paths = []
    if args.out:
        d = {"point": bp.z, "angle": bp.angle, "gap": bp.residual, "itinerary": str(t)}
        paths.append(io.write(args.out, io.json_bytes(d)))
    return 0, paths


def cmd_boundary(args, p):
    poly = boundary_polyline(p, int(args.grid), int(args.depth or DEPTH_DEFAULTS["boundary"]))
    out = io.write(_out(args, "boundary.csv"), io.boundary_csv(poly.angles, poly.points))
    return 0, [out]


def cmd_verify(args, p):
    rep = verify_quadratic_like(p)
    print(rep)
    return (0 if rep.verdict else 3), []


COMMANDS = {
    "render": cmd_render,
    "curves": cmd_curves,
    "hair": cmd_hair,
    "tail": cmd_tail,
    "nonlanding": cmd_nonlanding,
    "boundary-point": cmd_boundary_point,
    "boundary": cmd_boundary,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float)
    common.add_argument("--out")
    common.add_argument("--manifest")
    common.add_argument("--config")
    common.add_argument("--seq")
    common.add_argument("--lift", choices=["1", "2"])
    common.add_argument("--depth", type=int)
    common.add_argument("--delta", type=float)
    common.add_argument("--tau")
    common.add_argument("--ks")
    common.add_argument("--jmax", type=int)
    common.add_argument("--kcap", type=int)
    common.add_argument("--mu")
    common.add_argument("--eps", type=float)
    common.add_argument("--view")
    common.add_argument("--px")
    common.add_argument("--budget", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--grid", type=int)
    common.add_argument("--xmax", type=float)
    parser = argparse.ArgumentParser(prog="hairlab", description="Hairs and basin boundary of f_a(z) = a(z-(1-a))e^(z+a)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _resolve(args) -> argparse.Namespace:
    """Fill unset options from the config file, then from DEFAULTS."""
    cfg = io.read_config(args.config) if args.config else {}
    for key, val in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, cfg.get(key, val))
    if args.a is None and "a" in cfg:
        args.a = float(cfg["a"])
    unknown = set(cfg) - set(DEFAULTS) - {"a"}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if args.a is None:
        raise UsageError("--a is required")
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = _resolve(args)
        p = Params.from_a(args.a)
        code, paths = COMMANDS[args.command](args, p)
    except (UsageError, InvalidParameterError) as exc:
        print(f"hairlab: error: {exc}", file=sys.stderr)
        return 2
    except io.ExportError as exc:
        print(f"hairlab: {exc}", file=sys.stderr)
        return 3
    except NUMERIC_ERRORS as exc:
        print(f"hairlab: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if args.manifest:
        m = io.manifest(argv, _params_dict(p), paths, _version())
        io.write(args.manifest, io.json_bytes(m))
    return code


def replay(manifest_path) -> bool:
    """Re-run the command recorded in a manifest; True when every output digest matches."""
    m = json.loads(Path(manifest_path).read_text())
    argv = [v for v in m["command"]]
    if "--manifest" in argv:
        i = argv.index("--manifest")
        del argv[i:i + 2]
    main(argv)
    return all(io.sha256_file(path) == digest for path, digest in m["outputs"].items())


if __name__ == "__main__":
    sys.exit(main())
