"""Command-line front end: ``finslerium <command> [flags]``.

Every command prints a JSON report on stdout.  With ``--out DIR`` the report
(or its CSV/SVG rendering) is written there together with ``manifest.json``.
Exit status: 0 pass, 1 verdict failure, 2 usage error, 3 violated hypothesis.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .chern import curvature_bound_estimate, holomorphic_sectional_curvature
from .comparison import ModelSpace, QuadratureConfig, comparison_report, ComparisonReport
from .errors import ConfigurationError, FinsleriumError, HypothesisViolationError
from .io import (
    RunManifest,
    digest,
    dumps,
    parallel_map,
    parse_complex_list,
    parse_params,
    parse_region,
    write_artifact,
)
from .kahler import KahlerModel, kahler_identity_checks
from .maps import identity_map, parse_map
from .metrics import MetricDescriptor, SamplePlan, expression_metric, make_metric, validate_metric
from .schwarz import SchwarzConfig, phi_trace, schwarz_check
from .wirtinger import AUTO, FD, JetPoint

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_HYPOTHESIS = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def _common(p, metric=True, sampling=True):
    if metric:
        p.add_argument("--metric", default="euclidean",
                       help="zoo name, or expr:<expression|file> in z1.., zb1.., v1.., vb1..")
        p.add_argument("--param", action="append", default=[], metavar="K=V")
        p.add_argument("--dim", type=int)
    if sampling:
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--region", help="disk:R or ball:R")
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="finslerium", description="Numerical complex Finsler geometry checks.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="homogeneity, Euler identities and Levi positivity")
    _common(p)
    p.add_argument("--mode", choices=("auto", "fd"), default="auto")

    p = sub.add_parser("curvature", help="holomorphic sectional curvature at one jet")
    _common(p, sampling=False)
    p.add_argument("--z", help="comma-separated complex literals")
    p.add_argument("--v", help="comma-separated complex literals")
    p.add_argument("--mode", choices=("auto", "fd"), default="auto")

    p = sub.add_parser("curvature-bounds", help="inf and sup of the curvature over a ball")
    _common(p)

    p = sub.add_parser("comparison", help="distance Hessian bounds on a model space")
    _common(p, metric=False, sampling=False)
    p.add_argument("--curvature", type=float, default=1.0, help="K >= 0, sectional curvature -K^2")
    p.add_argument("--radii", default="0.25,0.5,1,2,4")
    p.add_argument("--dim", type=int, default=2)

    p = sub.add_parser("kahler-check", help="Kahler identities on a model space")
    _common(p, metric=False)
    p.add_argument("--model", choices=("flat", "poincare-disk"), default="poincare-disk")
    p.add_argument("--dim", type=int, default=1)

    for name, helptext in (("schwarz", "sampled Schwarz ratio against K1/K2"),
                           ("phi-trace", "auxiliary function on a disk")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--map", default=None, help="identity, power:k, mobius:a, embed:c1,c2, linear:..., expr:...")
        p.add_argument("--target", default=None, help="target metric; defaults to --metric")
        p.add_argument("--target-param", action="append", default=[], metavar="K=V")
        p.add_argument("--target-dim", type=int)
        if name == "schwarz":
            p.add_argument("--k1", type=float)
            p.add_argument("--k2", type=float)
            p.add_argument("--estimate-bounds", action="store_true")
        else:
            p.add_argument("--k1", type=float, default=-4.0)
            p.add_argument("--k2", type=float, default=-4.0)
            p.add_argument("--a", type=float, default=3.0)
            p.add_argument("--b", type=float, default=3.0)
            p.add_argument("--grid", default="256,64", help="radial,angular point counts")
    return ap


def _metric(name, params, dim) -> MetricDescriptor:
    if name.startswith("expr:"):
        src = name[5:]
        text = Path(src).read_text().strip() if os.path.exists(src) else src
        if dim is None:
            raise ConfigurationError("expression metrics need --dim")
        return expression_metric(text, dim, params)
    return make_metric(name, dim, **params)


def _radius(m: MetricDescriptor, region) -> float:
    if region is not None:
        return parse_region(region)
    if m.domain_radius is None:
        return 1.0
    return m.domain_radius if m.domain_closed else 0.9 * m.domain_radius


def _plan(args, m, default_count) -> SamplePlan:
    return SamplePlan(args.samples or default_count, _radius(m, args.region), args.seed)


def _inputs(*metrics, map_spec=None) -> dict:
    out = {}
    for label, m in metrics:
        out[label] = digest(m.to_json())
    if map_spec is not None:
        out["map"] = digest(Path(map_spec[5:]).read_bytes() if map_spec.startswith("expr:")
                            and os.path.exists(map_spec[5:]) else map_spec)
    return out


def _render(args, payload: dict, report=None) -> tuple[str, str]:
    """Text and file name for the requested format."""
    if args.format == "json":
        return dumps(payload), f"{args.command}.json"
    render = getattr(report, "to_" + args.format, None)
    if render is None:
        raise ConfigurationError(f"{args.command} has no {args.format} output")
    return render(), f"{args.command}.{args.format}"


# each command returns (payload, verdict, report-with-renderers or None)

def _cmd_validate(args, man):
    m = _metric(args.metric, parse_params(args.param), args.dim)
    man.inputs = _inputs(("metric", m))
    rep = validate_metric(m, _plan(args, m, 200), FD if args.mode == "fd" else AUTO)
    return {"command": "validate", "metric": m.to_dict(), **rep.to_dict()}, rep.passed, None


def _cmd_curvature(args, man):
    m = _metric(args.metric, parse_params(args.param), args.dim)
    man.inputs = _inputs(("metric", m))
    z = parse_complex_list(args.z) if args.z else np.zeros(m.dim, dtype=complex)
    v = parse_complex_list(args.v) if args.v else np.eye(m.dim, dtype=complex)[0]
    p = JetPoint.of(z, v)
    K, res = holomorphic_sectional_curvature(m, p, FD if args.mode == "fd" else AUTO)
    return {"command": "curvature", "metric": m.to_dict(), "site": p.to_dict(), "K": K, "imag_residue": res}, True, None


def _cmd_bounds(args, man):
    m = _metric(args.metric, parse_params(args.param), args.dim)
    man.inputs = _inputs(("metric", m))
    b = curvature_bound_estimate(m, _plan(args, m, 200))
    return {"command": "curvature-bounds", "metric": m.to_dict(), "radius": _radius(m, args.region),
            **b.to_dict()}, True, None


def _cmd_comparison(args, man):
    if args.curvature < 0:
        raise ConfigurationError("--curvature is K >= 0 (sectional curvature -K^2)")
    space = ModelSpace.of(args.curvature, args.dim)
    radii = [float(r) for r in args.radii.split(",")]
    q = QuadratureConfig()
    parts = parallel_map(lambda r: comparison_report(space, [r], q), radii)
    rep = ComparisonReport(space, [row for part in parts for row in part.rows])
    man.inputs = {"space": digest(dumps({"kind": space.kind, "K": space.K, "dim": space.dim, "radii": radii}))}
    return {"command": "comparison", **rep.to_dict()}, rep.passed, rep


def _cmd_kahler(args, man):
    model = KahlerModel(args.model, args.dim)
    count = args.samples or 100
    default_r = 0.9 if model.kind == "poincare-disk" else 2.0
    R = parse_region(args.region) if args.region else default_r
    rep = kahler_identity_checks(model, SamplePlan(count, R, args.seed, 0.05))
    man.inputs = {"model": digest(dumps({"kind": model.kind, "n": model.n}))}
    return {"command": "kahler-check", **rep.to_dict()}, rep.passed, None


def _pair(args):
    G = _metric(args.metric, parse_params(args.param), args.dim)
    if args.target is None:
        H = G
    else:
        H = _metric(args.target, parse_params(args.target_param), args.target_dim)
    f = parse_map(args.map) if args.map else identity_map(G.dim)
    return f, G, H


def _cmd_schwarz(args, man):
    f, G, H = _pair(args)
    man.inputs = _inputs(("source", G), ("target", H), map_spec=args.map or f.name)
    if args.estimate_bounds:
        cfg = SchwarzConfig(args.k1, args.k2, "estimated", _plan(args, G, 200))
    else:
        if args.k1 is None or args.k2 is None:
            raise ConfigurationError("give --k1 and --k2, or --estimate-bounds")
        cfg = SchwarzConfig(args.k1, args.k2, "user", _plan(args, G, 200))
    rep = schwarz_check(f, G, H, cfg)
    return {"command": "schwarz", "map": f.name, "source": G.to_dict(), "target": H.to_dict(),
            "seed": args.seed, **rep.to_dict()}, rep.verdict, rep


def _cmd_phi(args, man):
    f, G, H = _pair(args)
    man.inputs = _inputs(("source", G), ("target", H), map_spec=args.map or f.name)
    try:
        grid = tuple(int(x) for x in args.grid.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"--grid wants two integers, got {args.grid!r}") from exc
    if len(grid) != 2 or min(grid) < 2:
        raise ConfigurationError("--grid wants two integers >= 2")
    tr = phi_trace(f, G, H, args.a, args.b, grid=grid)
    ok = tr.first_order_ok and tr.second_order_ok and tr.boundary_ratio < 1e-6
    return {"command": "phi-trace", "map": f.name, "source": G.to_dict(), "target": H.to_dict(),
            "a": args.a, "b": args.b, "grid": list(grid), "pass": ok, **tr.to_dict()}, ok, tr


COMMANDS = {
    "validate": _cmd_validate,
    "curvature": _cmd_curvature,
    "curvature-bounds": _cmd_bounds,
    "comparison": _cmd_comparison,
    "kahler-check": _cmd_kahler,
    "schwarz": _cmd_schwarz,
    "phi-trace": _cmd_phi,
}


def _out_dir(argv):
    """Best-effort ``--out`` lookup so a manifest can be written after a parse error."""
    for i, tok in enumerate(argv):
        if tok == "--out" and i + 1 < len(argv):
            return Path(argv[i + 1])
        if tok.startswith("--out="):
            return Path(tok[6:])
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    t0 = time.perf_counter()
    man = RunManifest(command=["finslerium", *argv], seed=0)
    out = _out_dir(argv)
    status = EXIT_PASS
    try:
        args = build_parser().parse_args(argv)
        man.seed = getattr(args, "seed", 0)
        out = args.out
        payload, verdict, report = COMMANDS[args.command](args, man)
        text, name = _render(args, payload, report)
        if out is not None:
            write_artifact(out, name, text, man)
            if args.format != "json":
                write_artifact(out, f"{args.command}.json", dumps(payload), man)
        if args.format == "json" or out is None:
            sys.stdout.write(text)
        status = EXIT_PASS if verdict else EXIT_FAIL
    except SystemExit as exc:  # --help / --version
        status = int(exc.code or 0)
    except HypothesisViolationError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        status = EXIT_HYPOTHESIS
    except (FinsleriumError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    man.wall_time = round(time.perf_counter() - t0, 6)
    man.exit_status = status
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        man.write(out)
    return status


run_command = main

if __name__ == "__main__":
    sys.exit(main())
