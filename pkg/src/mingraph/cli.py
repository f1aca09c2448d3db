"""Command-line front end: ``mingraph <command> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on invalid
input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .area import FlatSurface, Rectangle, horizontal_area, horizontal_normal_field, parse_domain
from .graph_line import BracketError, LineGraphSurface, singular_scan
from .heisenberg import HorizontalVec, Point, geodesic_trace
from .mesh import DEGENERATE_AREA, SINGULAR_TOL, graph_mesh, write_channels_csv, write_obj
from .multiwedge import (
    ANGLE_TOL,
    MultiWedgeSurface,
    SingularHalflineSurface,
    WedgeConfig,
    make_cone,
    validate_config,
)
from .profiles import load_json_text, parse_profile
from .verifier import ORACLE_RTOL, perturb_test

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Bad user input; reported with exit status 2."""


def thread_count() -> int:
    raw = os.environ.get("MINGRAPH_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"MINGRAPH_THREADS: expected an integer, got {raw!r}") from None
    return max(1, n)


def _read_json_arg(text: str, what: str):
    """Inline JSON, or ``@path`` to read it from a file."""
    if text.startswith("@"):
        path = Path(text[1:])
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from None
    try:
        return load_json_text(text)
    except ValueError as exc:
        raise InputError(f"{what}: {exc}") from None


def _domain(tokens: Sequence[str]):
    try:
        if len(tokens) == 1:
            return parse_domain(tokens[0])
        if len(tokens) == 4:
            return Rectangle(*(float(t) for t in tokens))
    except ValueError as exc:
        raise InputError(f"--domain: {exc}") from None
    raise InputError("--domain: expected X0 X1 Y0 Y1 or disk:R")


def _profile(text: str, flag: str):
    try:
        return parse_profile(text)
    except ValueError as exc:
        raise InputError(f"{flag}: {exc}") from None


def _config(text: str) -> WedgeConfig:
    obj = _read_json_arg(text, "--config")
    try:
        return WedgeConfig.from_json(obj)
    except ValueError as exc:
        raise InputError(f"--config: {exc}") from None


def build_surface(args: argparse.Namespace):
    try:
        if args.profile is not None:
            return LineGraphSurface(_profile(args.profile, "--profile"))
        if args.config is not None:
            return MultiWedgeSurface(_config(args.config))
        if args.halfline is not None:
            return SingularHalflineSurface(_profile(args.halfline, "--halfline"), args.direction)
        return FlatSurface()
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _surface_options(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--profile", help="beta profile: JSON or zero, constant:B, linear:S, example, cantor")
    g.add_argument("--config", help="wedge configuration JSON, or @file")
    g.add_argument("--halfline", help="profile of a single singular halfline patched with t = 0")
    g.add_argument("--height", choices=["zero"], help="the plane t = 0")
    p.add_argument("--direction", type=float, default=0.0, help="halfline direction angle")


def _header(seed: int | None, tolerances: dict, **extra) -> dict:
    """Reproducibility header shared by every JSON report."""
    return {"tool": "mingraph", "version": __version__, "seed": seed,
            "tolerances": tolerances, **extra}


def _emit(obj: dict) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def cmd_eval(args) -> int:
    s = build_surface(args)
    for x, y in args.point:
        u = float(s.height(x, y))
        ux, uy = (float(v) for v in s.gradient(x, y))
        try:
            f, g = horizontal_normal_field(s, np.array([x]), np.array([y]), args.side)
            nu = f"({_fmt(float(f[0]))}, {_fmt(float(g[0]))})"
        except ValueError:
            nu = "undefined"
        print(f"x={_fmt(x)} y={_fmt(y)} u={_fmt(u)} ux={_fmt(ux)} uy={_fmt(uy)} nu={nu}")
    return EXIT_OK


def cmd_mesh(args) -> int:
    s = build_surface(args)
    m = graph_mesh(s, _domain(args.domain), args.n)
    out = Path(args.out)
    write_obj(m, out.with_suffix(".obj"))
    write_channels_csv(m, out.with_suffix(".csv"))
    _emit(_header(
        None,
        {"degenerate_area": DEGENERATE_AREA, "singular_tol": SINGULAR_TOL},
        vertices=len(m.vertices),
        triangles=len(m.triangles),
        horizontal_area=m.horizontal_area(),
        files=[str(out.with_suffix(".obj")), str(out.with_suffix(".csv"))],
    ))
    return EXIT_OK


def cmd_area(args) -> int:
    s = build_surface(args)
    rep = horizontal_area(s, _domain(args.domain), args.n, workers=thread_count())
    _emit(_header(None, {"error_estimate": "|A_n - A_n/2|"}, **rep.to_json()))
    return EXIT_OK


def cmd_verify(args) -> int:
    s = build_surface(args)
    dom = _domain(args.domain)
    if args.oracle and not isinstance(dom, Rectangle):
        raise InputError("--oracle needs a rectangular --domain")
    rep = perturb_test(
        s, dom, trials=args.trials, amplitude=args.amplitude, seed=args.seed, n=args.n,
        workers=thread_count(), oracle=args.oracle, oracle_n=args.oracle_n,
        oracle_iters=args.oracle_iters,
    )
    body = rep.to_json()
    del body["seed"]
    _emit(_header(
        args.seed,
        {"deficit": rep.tol, "oracle_rtol": ORACLE_RTOL},
        amplitude=args.amplitude,
        n=args.n,
        **body,
    ))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_cone(args) -> int:
    c = _config(args.config)
    ok, why = validate_config(c)
    if not ok:
        raise InputError(f"--config: {why}")
    try:
        s = make_cone(c)
    except ValueError as exc:
        raise InputError(f"--config: {exc}") from None
    report = _header(
        None,
        {"angle_sum": ANGLE_TOL},
        k=c.k,
        bisectors=list(c.bisectors),
        half_angles=c.half_angles.tolist(),
        boundaries=np.mod(c.boundary_angles, 2 * math.pi).tolist(),
    )
    if args.mesh:
        m = graph_mesh(s, _domain(args.domain), args.n)
        out = Path(args.mesh)
        write_obj(m, out.with_suffix(".obj"))
        write_channels_csv(m, out.with_suffix(".csv"))
        report["files"] = [str(out.with_suffix(".obj")), str(out.with_suffix(".csv"))]
    _emit(report)
    return EXIT_OK


def _csv_out(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline="", encoding="ascii"), True


def cmd_scan(args) -> int:
    s = build_surface(args)
    dom = _domain(args.domain)
    pts = singular_scan(s, dom.bounds, args.n, args.tol)
    fh, close = _csv_out(args.out)
    try:
        w = csv.writer(fh)
        w.writerow(["x", "y"])
        w.writerows([repr(x), repr(y)] for x, y in pts)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_geodesic(args) -> int:
    try:
        p0 = Point(*args.start)
    except ValueError as exc:
        raise InputError(f"--start: {exc}") from None
    if args.steps < 1:
        raise InputError("--steps must be >= 1")
    h0 = HorizontalVec(math.cos(args.angle), math.sin(args.angle))
    pts, phis = geodesic_trace(p0, h0, args.lam, args.length, args.steps)
    s = np.linspace(0.0, args.length, len(pts))
    fh, close = _csv_out(args.out)
    try:
        w = csv.writer(fh)
        w.writerow(["s", "x", "y", "t", "phi"])
        for si, (x, y, t), ph in zip(s.tolist(), pts.tolist(), phis.tolist()):
            w.writerow([repr(si), repr(x), repr(y), repr(t), repr(ph)])
    finally:
        if close:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mingraph", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"mingraph {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="print u, grad u and the horizontal normal at points")
    _surface_options(e)
    e.add_argument("--point", nargs=2, type=float, action="append", required=True,
                   metavar=("X", "Y"))
    e.add_argument("--side", type=int, choices=[1, -1], default=None,
                   help="one-sided normal on the singular line")
    e.set_defaults(func=cmd_eval)

    m = sub.add_parser("mesh", help="write an OBJ mesh and CSV channels")
    _surface_options(m)
    m.add_argument("--domain", nargs="+", default=["-2", "2", "-2", "2"])
    m.add_argument("--n", type=int, default=100)
    m.add_argument("--out", required=True, help="output prefix; .obj and .csv are appended")
    m.set_defaults(func=cmd_mesh)

    a = sub.add_parser("area", help="horizontal area as JSON")
    _surface_options(a)
    a.add_argument("--domain", nargs="+", default=["-1", "1", "-1", "1"])
    a.add_argument("--n", type=int, default=200)
    a.set_defaults(func=cmd_area)

    v = sub.add_parser("verify", help="bump-perturbation minimality test as JSON")
    _surface_options(v)
    v.add_argument("--domain", nargs="+", default=["-2", "2", "-2", "2"])
    v.add_argument("--n", type=int, default=200)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--amplitude", type=float, default=0.5)
    v.add_argument("--oracle", action="store_true", help="also run the subgradient oracle")
    v.add_argument("--oracle-n", type=int, default=64)
    v.add_argument("--oracle-iters", type=int, default=50_000)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("cone", help="build a cone from a wedge configuration")
    c.add_argument("--config", required=True, help="wedge configuration JSON, or @file")
    c.add_argument("--mesh", help="also write a mesh with this prefix")
    c.add_argument("--domain", nargs="+", default=["-2", "2", "-2", "2"])
    c.add_argument("--n", type=int, default=100)
    c.set_defaults(func=cmd_cone)

    s = sub.add_parser("scan-singular", help="CSV of grid points on the singular set")
    _surface_options(s)
    s.add_argument("--domain", nargs="+", default=["-2", "2", "-2", "2"])
    s.add_argument("--n", type=int, default=201)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--out")
    s.set_defaults(func=cmd_scan)

    g = sub.add_parser("geodesic", help="CSV trace of a geodesic of curvature lam")
    g.add_argument("--start", nargs=3, type=float, default=[0.0, 0.0, 0.0], metavar=("X", "Y", "T"))
    g.add_argument("--angle", type=float, default=0.0, help="initial direction in the horizontal plane")
    g.add_argument("--lam", type=float, default=0.0)
    g.add_argument("--length", type=float, default=1.0)
    g.add_argument("--steps", type=int, default=100)
    g.add_argument("--out")
    g.set_defaults(func=cmd_geodesic)
    return p


def run_command(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, BracketError, FloatingPointError) as exc:
        print(f"mingraph: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
