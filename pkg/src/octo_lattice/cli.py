"""octo-lattice command line.

    octo-lattice verify stokes-whole --seeds 20
    octo-lattice probe-associator --seeds 50 --real-only
    octo-lattice report-half-space --side lower --json report.json

Exit codes: 0 pass, 1 identity violation, 2 usage error, 3 desk-scale guard.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import lattice, operators, suites, weyl

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
SCHEMA = 1


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seeds", type=int, default=10, help="number of seeds (default 10)")
    p.add_argument("--seed0", type=int, default=0, help="first seed (default 0)")
    p.add_argument("--h", type=float, default=1.0, help="mesh width (default 1, exact mode)")
    p.add_argument("--support", type=int, default=3, help="window extent per axis, at most 4")
    p.add_argument("--points", type=int, default=32, help="scattered points per function, at most 64")
    p.add_argument("--tolerance", type=float, default=None,
                   help="residual tolerance; 0 is exact, default 0 for h=1 else 1e-12 relative")
    p.add_argument("--convention", choices=weyl.CONVENTIONS, default=weyl.FLAT,
                   help="composition of the second Weyl application")
    p.add_argument("--base-layer", type=int, choices=(0, 1), default=1,
                   help="half-lattices are m7 >= b and m7 <= -b")
    p.add_argument("--interpretation", choices=suites.INTERPRETATIONS, default="both",
                   help="reading of the half-lattice right-hand sides")
    p.add_argument("--probe-direction", choices=(operators.FORWARD, operators.BACKWARD),
                   default=operators.FORWARD)
    p.add_argument("--f", dest="f_path", metavar="PATH", help="grid function JSON used as f")
    p.add_argument("--g", dest="g_path", metavar="PATH", help="grid function JSON used as g")
    p.add_argument("--json", dest="json_path", metavar="PATH", help="write a JSON report")
    p.add_argument("--timings", action="store_true", help="record durations (reports become non-reproducible)")
    p.add_argument("--quiet", action="store_true", help="print only the summary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="octo-lattice",
                                     description="Verify discrete octonionic identities on hZ^8.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("target", choices=suites.TARGETS + ("all",))
    _common(p)

    p = sub.add_parser("probe-associator", help="associator probe next to the whole-lattice Stokes sum")
    _common(p)
    p.add_argument("--real-only", action="store_true", help="real-valued inputs")
    p.add_argument("--disjoint", action="store_true", help="separated supports")

    p = sub.add_parser("report-half-space", help="four-way half-lattice comparison")
    _common(p)
    p.add_argument("--side", choices=("upper", "lower"), default="upper")
    return parser


def _load(path):
    if path is None:
        return None
    try:
        return lattice.load(path)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read grid function {path}: {exc}") from exc


def make_config(args) -> suites.SuiteConfig:
    if args.seeds < 1:
        raise UsageError("--seeds must be positive")
    if args.h <= 0:
        raise UsageError("--h must be positive")
    if args.support < 1 or args.points < 1:
        raise UsageError("--support and --points must be positive")
    if args.tolerance is not None and args.tolerance < 0:
        raise UsageError("--tolerance must be non-negative")
    if args.g_path and not args.f_path:
        raise UsageError("--g requires --f")
    f, g = _load(args.f_path), _load(args.g_path)
    for grid in (f, g):
        if grid is not None and grid.h != args.h:
            raise UsageError(f"file mesh width {grid.h:g} differs from --h {args.h:g}")
    return suites.SuiteConfig(
        seeds=args.seeds, seed0=args.seed0, h=args.h, support=args.support, points=args.points,
        tolerance=args.tolerance, convention=args.convention, base_layer=args.base_layer,
        interpretation=args.interpretation, probe_direction=args.probe_direction,
        real_only=getattr(args, "real_only", False), disjoint=getattr(args, "disjoint", False),
        timings=args.timings, f=f, g=g,
    )


def _config_dict(cfg: suites.SuiteConfig, args) -> dict:
    return {
        "seeds": len(cfg.seed_list()), "seed0": cfg.seed0, "h": cfg.h, "support": cfg.support,
        "points": cfg.points, "tolerance": cfg.tol, "convention": cfg.convention,
        "base_layer": cfg.base_layer, "interpretation": cfg.interpretation,
        "probe_direction": cfg.probe_direction, "f": args.f_path, "g": args.g_path,
    }


def _write_json(path, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _print_checks(results, quiet: bool, out) -> None:
    if quiet:
        return
    for r in results:
        print(r.line(), file=out)
        if r.note and not r.passed:
            print(f"  note: {r.note}", file=out)


def cmd_verify(args, cfg, out) -> int:
    results = suites.run_target(args.target, cfg)
    _print_checks(results, args.quiet, out)
    summary = suites.summarize(results)
    print(f"{args.target}: {summary['total'] - summary['failed']}/{summary['total']} checks passed", file=out)
    if args.json_path:
        _write_json(args.json_path, {
            "schema": SCHEMA, "command": "verify", "target": args.target,
            "config": _config_dict(cfg, args), "checks": [r.to_dict() for r in results],
            "summary": summary,
        })
    return EXIT_OK if summary["pass"] else EXIT_FAIL


def cmd_probe(args, cfg, out) -> int:
    results, verdict = suites.probe_batch(cfg)
    if not args.quiet:
        for r in results:
            print(f"seed={r.seed} probe_norm={r.extra['probe_norm']:.6g} stokes_norm={r.residual:.6g}", file=out)
    expect = "at least one nonzero probe" if verdict["expect_nonzero"] else "all probes zero"
    print(f"probe-associator: {verdict['nonzero_probes']}/{len(results)} nonzero probes, "
          f"stokes sums {'all zero' if verdict['stokes_all_zero'] else 'NOT all zero'}; "
          f"expected {expect}: {'PASS' if verdict['pass'] else 'FAIL'}", file=out)
    if args.json_path:
        _write_json(args.json_path, {
            "schema": SCHEMA, "command": "probe-associator",
            "config": dict(_config_dict(cfg, args), real_only=cfg.real_only, disjoint=cfg.disjoint),
            "checks": [r.to_dict() for r in results], "summary": verdict,
        })
    return EXIT_OK if verdict["pass"] else EXIT_FAIL


def cmd_report(args, cfg, out) -> int:
    reports = suites.half_space_reports(cfg, args.side)
    tol = cfg.tol
    failed = 0
    docs = []
    for rep in reports:
        agrees = bool(rep.oracle_agrees(tol))
        failed += not agrees
        matching = rep.matching_interpretations(tol)
        if not args.quiet:
            print(f"seed={rep.seed} region={rep.region} oracle={'agrees' if agrees else 'DISAGREES'} "
                  f"matching={'+'.join(matching) or 'none'}", file=out)
            for key, value in rep.residuals.items():
                print(f"  {key}: {value:.6g}", file=out)
        docs.append({
            "seed": rep.seed, "h": rep.h, "region": str(rep.region), "side": rep.side,
            "residuals": rep.residuals, "oracle_agrees": agrees, "matching_interpretations": matching,
            "lhs": rep.lhs.to_dict(), "telescope": rep.telescope.to_dict(),
            "rhs_i1": rep.rhs_i1.to_dict(), "rhs_i2": rep.rhs_i2.to_dict(),
        })
    print(f"report-half-space {args.side}: {len(reports) - failed}/{len(reports)} oracle agreements", file=out)
    if args.json_path:
        _write_json(args.json_path, {
            "schema": SCHEMA, "command": "report-half-space", "side": args.side,
            "config": _config_dict(cfg, args), "reports": docs,
            "summary": {"total": len(reports), "failed": failed, "pass": failed == 0},
        })
    return EXIT_OK if failed == 0 else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "probe-associator": cmd_probe, "report-half-space": cmd_report}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = make_config(args)
        cfg.check_guard()
    except UsageError as exc:
        print(f"octo-lattice: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except suites.GuardError as exc:
        print(f"octo-lattice: desk-scale guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    return COMMANDS[args.command](args, cfg, out)


if __name__ == "__main__":
    sys.exit(main())
