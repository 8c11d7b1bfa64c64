"""Command-line front end: ``swipt-twr {analytic,simulate,sweep,validate}``.

Exit codes: 0 ok, 1 validation-suite failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import analytic, sweeps
from .model import ConfigError, SystemConfig, apply_settings, load_config, default_config, validate
from .montecarlo import estimate_outage
from .validation import run_checks

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parse_set(items: list[str]) -> list[tuple[str, str]]:
    pairs = []
    for item in items:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        pairs.append((k.strip(), v.strip()))
    return pairs


def build_config(args) -> SystemConfig:
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        cfg = load_config(path)
    else:
        cfg = default_config()
    cfg = apply_settings(cfg, _parse_set(args.set or []))
    return validate(cfg)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_analytic(cfg: SystemConfig, args) -> int:
    out = analytic.analytic_outage(cfg)
    probs, _ = analytic.phase_probabilities(cfg)
    se = analytic.spectrum_efficiency_from(cfg, out.p_out_pu, out.p_out_su)
    report = {
        "p_out_pu": out.p_out_pu,
        "p_out_su": out.p_out_su,
        **asdict(probs),
        "se": se,
        "ee": se / (cfg.Pp1 + cfg.Pp2),
        "bessel_branch": "degenerate" if out.degenerate_branch_used else "general",
        "degenerate_branch_used": out.degenerate_branch_used,
    }
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        width = max(map(len, report))
        text = "".join(f"{k:<{width}}  {v:.17g}\n" if isinstance(v, float)
                       else f"{k:<{width}}  {v}\n" for k, v in report.items())
    _emit(text, args.output)
    return EXIT_OK


def cmd_simulate(cfg: SystemConfig, args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    out = analytic.analytic_outage(cfg)
    pu, su = estimate_outage(cfg, args.trials, args.seed, workers=args.workers)
    rows = []
    for name, est, ref in (("pu", pu, out.p_out_pu), ("su", su, out.p_out_su)):
        rows.append({"system": name, "mc": est.p_hat, "stderr": est.stderr,
                     "analytic": ref, "z": est.z_score(ref),
                     "wilson_low": est.wilson[0] if est.wilson else None,
                     "wilson_high": est.wilson[1] if est.wilson else None,
                     "trials": est.n_trials, "seed": est.seed})
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        lines = [f"{'system':<6} {'mc':>22} {'stderr':>22} {'analytic':>22} {'z':>8}"]
        for r in rows:
            lines.append(f"{r['system']:<6} {r['mc']:>22.17g} {r['stderr']:>22.17g} "
                         f"{r['analytic']:>22.17g} {r['z']:>+8.3f}")
            if r["wilson_low"] is not None:
                lines.append(f"{'':<6} wilson 95% [{r['wilson_low']:.6g}, {r['wilson_high']:.6g}]")
        lines.append(f"trials = {args.trials}, seed = {args.seed}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK


def cmd_sweep(cfg: SystemConfig, args) -> int:
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    try:
        spec = sweeps.SweepSpec(args.param, args.start, args.stop, args.steps,
                                mc_trials=args.trials, seed=args.seed)
    except sweeps.SweepError as exc:
        raise UsageError(str(exc)) from exc
    result = sweeps.run_sweep(cfg, spec, workers=args.workers)
    text = sweeps.to_json(result) if args.format == "json" else sweeps.to_csv(result)
    _emit(text, args.output)
    if args.gnuplot:
        if not args.output:
            raise UsageError("--gnuplot needs --output")
        script = Path(args.output).with_suffix(".gp")
        script.write_text(sweeps.gnuplot_script(args.output, args.param), encoding="utf-8")
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_checks(fast=args.fast)
    for c in results:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    failed = [c for c in results if not c.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: " + ", ".join(c.name for c in failed))
        return EXIT_CHECK_FAILED
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swipt-twr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file (defaults: reference scenario)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config key; repeatable")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    p = sub.add_parser("analytic", parents=[common], help="closed-form outage, SE and EE")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo vs closed form")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep to CSV/JSON")
    p.add_argument("--param", choices=sweeps.PARAMETERS, required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials per point (0: none)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--gnuplot", action="store_true", help="also write <output>.gp")

    p = sub.add_parser("validate", help="run the built-in numerical self-checks")
    p.add_argument("--fast", action="store_true", help="skip the Monte Carlo smoke test")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.command == "validate":
            return cmd_validate(args)
        cfg = build_config(args)
        handler = {"analytic": cmd_analytic, "simulate": cmd_simulate, "sweep": cmd_sweep}
        return handler[args.command](cfg, args)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, sweeps.SweepError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
