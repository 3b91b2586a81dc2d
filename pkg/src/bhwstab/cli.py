"""Command-line driver: one subcommand per experiment, JSON or CSV on stdout.

Exit status: 0 success, 1 a verified property failed, 2 usage error,
3 budget or ambiguity error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import io
import json
import logging
import math
import sys
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .bhw import check_bhw
from .enumeration import DEFAULT_BUDGET, boundary_gap_box, count_lattice_points, list_lattice_points
from .exceptions import AmbiguityError, BudgetExceededError, MarginError
from .geometry_core import (
    DEFAULT_TAU,
    BoxBody,
    LpBallBody,
    rotation_2d,
    sample_perturbation,
    sample_rotation,
    transform_body,
)
from .lp import lp_bhw_comparison, lp_threshold_report, verify_lp_hull_stability
from .minima import check_lipschitz_sandwich, successive_minima
from .stability import audit_radius_guarantee, rotation_sweep, stability_radius

log = logging.getLogger("bhwstab")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _p_value(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real number or 'inf', got {text!r}") from None


def _eps_grid(text: str) -> list[float]:
    try:
        lo, hi, n = text.split(":")
        return [float(v) for v in np.linspace(float(lo), float(hi), int(n))]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from None


def _jsonable(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _body(args):
    if args.alphas is None:
        raise UsageError("--alphas is required")
    if args.body == "box":
        return BoxBody(args.alphas)
    if args.body == "lp":
        if args.p is None:
            raise UsageError("--body lp needs --p")
        return LpBallBody(args.p, args.alphas)
    box = BoxBody(args.alphas)
    if args.theta is not None:
        return transform_body(rotation_2d(args.theta, box.dim), box)
    if args.eps_target is not None:
        return transform_body(sample_rotation(box.dim, args.eps_target, args.seed), box)
    raise UsageError("--body rotated-box needs --theta or --eps-target")


def _box(args) -> BoxBody:
    if args.alphas is None:
        raise UsageError("--alphas is required")
    return BoxBody(args.alphas)


# each command returns (result, ok)

def cmd_count(args):
    return count_lattice_points(_body(args), args.tau, args.budget, args.workers, args.shards), True


def cmd_list(args):
    pts = list_lattice_points(_body(args), args.tau, args.budget, args.workers)
    return {"count": len(pts), "points": pts}, True


def cmd_minima(args):
    return successive_minima(_body(args), args.budget), True


def cmd_check(args):
    rep = check_bhw(_body(args), args.tau, args.budget, args.workers)
    if rep.ambiguous:
        log.warning("%d boundary-ambiguous lattice point(s) counted as members", rep.ambiguous)
    out = _jsonable(rep)
    out["G"], out["R"] = rep.count, rep.rhs
    return out, rep.holds


def cmd_gap(args):
    box = _box(args)
    return {"delta": boundary_gap_box(box, args.budget), "alphas": box.alphas}, True


def cmd_radius(args):
    return stability_radius(_box(args)), True


def cmd_sweep_rot(args):
    if args.eps_grid is None:
        raise UsageError("sweep-rot needs --eps-grid lo:hi:n")
    recs = rotation_sweep(_box(args), args.eps_grid, args.samples, args.seed, args.tau, args.budget, args.workers)
    amb = sum(1 for r in recs if r.ambiguous)
    if amb:
        log.warning("%d record(s) contain boundary-ambiguous points", amb)
    margin = sum(1 for r in recs if r.margin)
    if margin:
        log.warning("%d record(s) fall in the radius margin and are not asserted on", margin)
    nonzero = [r for r in recs if r.epsilon > 0]
    if nonzero:
        held = sum(r.drop_claim_holds for r in nonzero)
        log.info("drop >= 2^d - 1 held in %d of %d nonzero-epsilon records", held, len(nonzero))
    return recs, True


def cmd_audit_radius(args):
    audit = audit_radius_guarantee(_box(args), args.samples, args.seed, args.tau, args.budget, args.workers)
    if audit.margin_excluded:
        log.warning("%d sample(s) excluded by the radius margin", audit.margin_excluded)
    return audit, audit.violations == 0


def cmd_lipschitz(args):
    body = _body(args) if args.body != "rotated-box" else _box(args)
    d = body.dim
    if args.theta is not None:
        T = rotation_2d(args.theta, d)
    elif args.eps_target is not None:
        T = sample_perturbation(d, args.eps_target, args.seed)
    else:
        raise UsageError("lipschitz needs --theta or --eps-target")
    rep = check_lipschitz_sandwich(body, T, args.budget)
    out = _jsonable(rep)
    out["holds"] = rep.holds
    out["transform"] = T.tolist()
    return out, rep.holds


def cmd_lp_threshold(args):
    if args.alphas is None:
        raise UsageError("--alphas is required")
    return lp_threshold_report(args.alphas), True


def cmd_lp_verify(args):
    if args.alphas is None or args.p is None:
        raise UsageError("lp-verify needs --alphas and --p")
    res = verify_lp_hull_stability(args.alphas, args.p, args.tau, args.budget)
    ok = True
    if res.status == "ok":
        ok = res.equal == (res.p > res.p0_exact)
    elif res.status == "integral_alpha":
        log.warning("an integral semi-axis keeps the worst lattice point outside every finite-p ball")
    return res, ok


def cmd_lp_compare(args):
    if args.alphas is None or args.p is None:
        raise UsageError("lp-compare needs --alphas and --p")
    cmp = lp_bhw_comparison(args.alphas, args.p, args.tau, args.budget)
    ok = cmp.minima_monotone and cmp.rhs_monotone and cmp.report_p.holds and cmp.report_box.holds
    return cmp, ok


COMMANDS = {
    "count": cmd_count,
    "list": cmd_list,
    "minima": cmd_minima,
    "check": cmd_check,
    "gap": cmd_gap,
    "radius": cmd_radius,
    "sweep-rot": cmd_sweep_rot,
    "audit-radius": cmd_audit_radius,
    "lipschitz": cmd_lipschitz,
    "lp-threshold": cmd_lp_threshold,
    "lp-verify": cmd_lp_verify,
    "lp-compare": cmd_lp_compare,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--body", choices=("box", "lp", "rotated-box"), default="box")
    common.add_argument("--alphas", type=_float_list)
    common.add_argument("--p", type=_p_value)
    common.add_argument("--theta", type=float)
    common.add_argument("--eps-target", type=float)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=20)
    common.add_argument("--eps-grid", type=_eps_grid)
    common.add_argument("--tau", type=float, default=DEFAULT_TAU)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--workers", type=int, default=None, help="thread count for sharded work")
    common.add_argument("--shards", type=int, default=None, help="slab count for counting")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="bhwstab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def manifest(args, argv: Sequence[str]) -> dict:
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("command", "format", "verbose") and v is not None}
    return {
        "command": args.command,
        "parameters": _jsonable(params),
        "seed": args.seed,
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, separators=(",", ":"))
        else:
            out[key] = repr(v) if isinstance(v, float) else v
    return out


def render_csv(result: Any, man: dict) -> str:
    rows = result if isinstance(result, list) else [result]
    if isinstance(result, dict) and "points" in result:
        rows = [{f"x{i}": c for i, c in enumerate(p)} for p in result["points"]]
    flat = [_flatten(r) for r in rows]
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(man, sort_keys=True) + "\n")
    if flat:
        writer = csv.DictWriter(buf, fieldnames=list(flat[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
    return buf.getvalue()


def render_json(result: Any, man: dict) -> str:
    return json.dumps({"manifest": man, "result": result}, sort_keys=True) + "\n"


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        result, ok = COMMANDS[args.command](args)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceededError, AmbiguityError, MarginError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    payload = _jsonable(result)
    man = manifest(args, argv)
    stdout.write(render_csv(payload, man) if args.format == "csv" else render_json(payload, man))
    if not ok:
        print("verification failed", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
