"""Command-line front end.

Exit codes: 0 success, 1 violation or missed target, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bounds import InequalityViolation, PreconditionError, Verdict, sequence_probe
from .diskmap import BoundaryPoint, DiskMapError, DiskSelfMap
from .harness import ALL_EQUATIONS, GeneratorConfig, SweepGrid, random_map, run_suite
from .numerics import ArcSpec, QuadratureError, arc_profile_csv, image_arc_length, loewner_check
from .sharpness import (
    SEARCH_EQUATIONS,
    SHARPNESS_TARGET,
    FamilySpec,
    SoundnessViolation,
    minimize_slack,
)


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def manifest(command: str, config: dict) -> dict:
    return {
        "command": command,
        "config": config,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "input_digest": hashlib.sha256(_canonical({"command": command, "config": config}).encode()).hexdigest(),
    }


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(command: str, config: dict, payload: dict, out: str | None):
    doc = {"manifest": manifest(command, config), "payload": payload}
    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", out)


def _emit_csv(command: str, config: dict, body: str, out: str | None):
    head = "".join(f"# {k}: {v if isinstance(v, str) else _canonical(v)}\n"
                   for k, v in manifest(command, config).items())
    _emit(head + body, out)


# -- argument types -----------------------------------------------------------


def equation_list(text: str) -> tuple[str, ...]:
    if text.strip() == "all":
        return ALL_EQUATIONS
    tags = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [t for t in tags if t not in ALL_EQUATIONS]
    if bad or not tags:
        raise argparse.ArgumentTypeError(
            f"unknown equation tag(s) {bad or [text]}; choose from {', '.join(ALL_EQUATIONS)} or 'all'"
        )
    return tags


def search_equation(text: str) -> str:
    if text not in SEARCH_EQUATIONS:
        raise argparse.ArgumentTypeError(f"choose from {', '.join(SEARCH_EQUATIONS)}")
    return text


def _number(text: str) -> float:
    t = text.strip().lower()
    named = {"pi": math.pi, "2pi": 2 * math.pi, "tau": 2 * math.pi, "-pi": -math.pi}
    if t in named:
        return named[t]
    return float(t)


def arc_pair(text: str) -> ArcSpec:
    try:
        start, end = (_number(p) for p in text.split(","))
        return ArcSpec(start, end)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--arc expects 'start,end' with 0 < end - start <= 2pi ({exc})")


def unit_interval(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("value must lie in (0, 1)")
    return v


def load_map(args, parser) -> DiskSelfMap:
    if args.map:
        text = args.map.strip()
        try:
            if not text.startswith("{"):
                text = Path(text).read_text(encoding="utf-8")
            return DiskSelfMap.from_json(text)
        except (OSError, json.JSONDecodeError, DiskMapError) as exc:
            parser.error(f"cannot read --map: {exc}")
    config = GeneratorConfig(
        seed=args.seed,
        max_degree=max(args.degree, args.degree_max),
        zero_modulus_cap=args.cap,
        degree=args.degree,
        samples=args.index + 1,
    )
    return random_map(config, args.index)


# -- commands ---------------------------------------------------------------------


def cmd_verify(args, parser) -> int:
    config = GeneratorConfig(
        seed=args.seed,
        max_degree=args.degree_max,
        zero_modulus_cap=args.cap,
        origin_multiplicity=args.k,
        with_post_shift=args.shift,
        samples=args.samples,
    )
    grid = SweepGrid(args.boundary_points, args.radii, args.angles)
    summary = run_suite(config, args.eq, grid, tolerance=args.tolerance)
    echo = {
        "generator": config.to_dict(),
        "equations": list(args.eq),
        "grid": vars(grid),
        "tolerance": args.tolerance,
    }
    _emit_json("verify", echo, summary.to_dict(), args.out)
    return 0 if summary.failure_count == 0 else 1


def cmd_sharpness(args, parser) -> int:
    k = args.k if args.k is not None else 1
    degree = args.degree if args.degree is not None else k + 1
    try:
        family = FamilySpec(degree, min(k, degree), free_phase=args.free_phase, cap=args.cap)
        echo = {"family": family.to_dict(), "equation": args.eq, "budget": args.budget,
                "seed": args.seed, "target": args.target}
        result = minimize_slack(family, args.eq, args.budget, seed=args.seed)
    except SoundnessViolation as exc:
        _emit_json("sharpness", echo, {"error": str(exc), "bundle": exc.bundle}, args.out)
        return 1
    except ValueError as exc:
        parser.error(str(exc))
    _emit_json("sharpness", echo, result.to_dict(), args.out)
    return 0 if result.min_slack <= args.target else 1


def cmd_loewner(args, parser) -> int:
    f = load_map(args, parser)
    arc = args.arc or ArcSpec.full_circle()
    echo = {"map": f.to_dict(), "arc": [arc.theta_start, arc.theta_end], "tolerance": args.tolerance}
    if args.format == "csv":
        _emit_csv("loewner", echo, arc_profile_csv(f, arc, args.samples), args.out)
        return 0
    try:
        quad = image_arc_length(f, arc)
        report = loewner_check(f, arc, args.tolerance)
    except QuadratureError as exc:
        print(f"quadrature failed: {exc}", file=sys.stderr)
        return 1
    except InequalityViolation as exc:
        report = exc.report
    except PreconditionError as exc:
        parser.error(str(exc))
    payload = {
        "quadrature": quad.to_dict(),
        "report": report.to_dict(),
        "arc_length": arc.length,
        "ratio": quad.value / arc.length,
    }
    _emit_json("loewner", echo, payload, args.out)
    return 1 if report.verdict is Verdict.VIOLATED else 0


def cmd_probe(args, parser) -> int:
    f = load_map(args, parser)
    b = BoundaryPoint(args.angle)
    try:
        probe = sequence_probe(f, b, args.depth, args.tolerance)
    except PreconditionError as exc:
        parser.error(str(exc))
    echo = {"map": f.to_dict(), "angle": b.angle, "depth": args.depth, "tolerance": args.tolerance}
    if args.format == "json":
        payload = {
            "angle": b.angle,
            "limit_bound": probe.limit_bound,
            "radii": list(probe.radii),
            "quotients": list(probe.quotients),
            "rung_bounds": list(probe.rung_bounds),
            "min_slack": probe.min_slack,
            "holds": probe.holds,
        }
        _emit_json("probe", echo, payload, args.out)
    else:
        rows = ["j,t,quotient,rung_bound,limit_bound"]
        ladder = zip(probe.radii, probe.quotients, probe.rung_bounds)
        for j, (t, q, lb) in enumerate(ladder, start=1):
            rows.append(f"{j},{t!r},{q!r},{lb!r},{probe.limit_bound!r}")
        _emit_csv("probe", echo, "\n".join(rows) + "\n", args.out)
    return 0 if probe.holds else 1


# -- parser ---------------------------------------------------------------------------


def _map_flags(p):
    p.add_argument("--map", help="map JSON inline or a path to a JSON file")
    p.add_argument("--seed", type=int, default=0, help="seed for a generated map when --map is absent")
    p.add_argument("--degree", type=int, default=4, help="degree of a generated map")
    p.add_argument("--degree-max", type=int, default=8)
    p.add_argument("--index", type=int, default=0, help="sample index of a generated map")
    p.add_argument("--cap", type=unit_interval, default=0.95)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schwarz-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="sweep the bound checks over a seeded corpus")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--degree-max", type=int, default=8)
    v.add_argument("--cap", type=unit_interval, default=0.95)
    v.add_argument("--k", type=int, default=1, help="forced multiplicity of the zero at 0")
    v.add_argument("--shift", action="store_true", help="post-compose a random automorphism")
    v.add_argument("--eq", type=equation_list, default=ALL_EQUATIONS)
    v.add_argument("--tolerance", type=float, default=None)
    v.add_argument("--boundary-points", type=int, default=16)
    v.add_argument("--radii", type=int, default=16)
    v.add_argument("--angles", type=int, default=16)
    v.add_argument("--format", choices=["json"], default="json")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sharpness", help="drive a bound's slack to zero over a Blaschke family")
    s.add_argument("--eq", type=search_equation, required=True)
    s.add_argument("--degree", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--budget", type=int, default=5000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=unit_interval, default=0.95)
    s.add_argument("--free-phase", action="store_true")
    s.add_argument("--target", type=float, default=SHARPNESS_TARGET)
    s.add_argument("--format", choices=["json"], default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sharpness)

    lo = sub.add_parser("loewner", help="image arc length against the sharpened Loewner bound")
    _map_flags(lo)
    lo.add_argument("--arc", type=arc_pair)
    lo.add_argument("--tolerance", type=float, default=1e-8)
    lo.add_argument("--samples", type=int, default=256, help="rows in the csv profile")
    lo.add_argument("--format", choices=["json", "csv"], default="json")
    lo.add_argument("--out")
    lo.set_defaults(func=cmd_loewner)

    pr = sub.add_parser("probe", help="radial quotient ladder toward a boundary point")
    _map_flags(pr)
    pr.add_argument("--angle", type=_number, default=0.0)
    pr.add_argument("--depth", type=int, default=20)
    pr.add_argument("--tolerance", type=float, default=1e-9)
    pr.add_argument("--format", choices=["json", "csv"], default="csv")
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_probe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "budget", 100) < 100:
        parser.error("--budget must be at least 100")
    if getattr(args, "samples", 0) < 0:
        parser.error("--samples must be >= 0")
    try:
        return args.func(args, parser)
    except (ValueError, DiskMapError) as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
