"""Command-line entry point: run scenarios, reproduce figure bundles,
bisect stimulus thresholds, and render plots from CSV artifacts.

Exit codes: 0 success, 2 config/parse error, 3 parameter validation
error, 4 numeric blow-up during integration, 5 bisection bracket error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .core import ValidationError
from .numerics import NonFiniteError
from .scenarios import (
    FIGURES,
    BracketError,
    ConfigError,
    emit_plot,
    load_config,
    reproduce_figure,
    run_bisect,
    run_scenario,
)

EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_NONFINITE = 4
EXIT_BRACKET = 5

OUTPUT_ROOT_ENV = "EXCITABLE_OUT"


def _output_root(args_out: str | None, fallback: str) -> Path:
    if args_out:
        return Path(args_out)
    env = os.environ.get(OUTPUT_ROOT_ENV)
    if env:
        return Path(env) / fallback
    return Path("runs") / fallback


def _apply_overrides(cfg, args):
    import excitable.scenarios as sc
    from .core import make_time_grid

    if getattr(args, "dt", None) is not None:
        cfg = dataclasses.replace(
            cfg, time=make_time_grid(cfg.time.t_start, cfg.time.t_end, args.dt)
        )
    if getattr(args, "stride", None) is not None:
        if args.stride < 1:
            raise sc.ConfigError(f"--stride must be >= 1, got {args.stride}")
        cfg = dataclasses.replace(cfg, stride=args.stride)
    return cfg


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    cfg = _apply_overrides(cfg, args)
    out = _output_root(args.out or cfg.output_dir, Path(args.config).stem)
    manifest = run_scenario(cfg, out)
    print(f"wrote {len(manifest['outputs'])} artifact(s) to {out}")
    for w in manifest["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _cmd_reproduce(args) -> int:
    out = _output_root(args.out, "figures")
    manifest = reproduce_figure(args.figure, out, quick=args.quick)
    cal = manifest.get("calibration")
    if cal:
        print(f"{args.figure}: calibrated threshold {cal['threshold']:.6g} "
              f"(bracket {cal['bracket'][0]:.6g}..{cal['bracket'][1]:.6g}, "
              f"monotone={cal['monotone_in_bracket']})")
    print(f"{args.figure}: artifacts under {Path(out) / args.figure}")
    return 0


def _cmd_bisect(args) -> int:
    cfg = load_config(args.config)
    cfg = _apply_overrides(cfg, args)
    result = run_bisect(cfg, (args.lo, args.hi), args.iterations)
    payload = dataclasses.asdict(result)
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_plot(args) -> int:
    out = args.out or str(Path(args.csv).with_suffix(".png"))
    emit_plot(args.csv, out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="excitable",
        description="Simulate excitable point-neuron and neural-field models.",
    )
    parser.add_argument(
        "--seedless",
        action="store_true",
        help="accepted for interface compatibility; all models are "
        "deterministic, so this is a no-op",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a YAML config")
    p_run.add_argument("config", help="path to scenario YAML")
    p_run.add_argument("--out", help="output directory")
    p_run.add_argument("--dt", type=float, help="override time step")
    p_run.add_argument("--stride", type=int, help="override recording stride")
    p_run.set_defaults(func=_cmd_run)

    p_rep = sub.add_parser("reproduce", help="rebuild a figure bundle")
    p_rep.add_argument("figure", choices=FIGURES)
    p_rep.add_argument("--out", help="output root (default runs/figures)")
    p_rep.add_argument(
        "--quick",
        action="store_true",
        help="skip re-bisection and use stored calibrated amplitudes",
    )
    p_rep.set_defaults(func=_cmd_reproduce)

    p_bis = sub.add_parser(
        "bisect", help="bisect the pulse amplitude threshold of a scenario"
    )
    p_bis.add_argument("config", help="scenario YAML with a single-pulse stimulus")
    p_bis.add_argument("--lo", type=float, required=True, help="subthreshold bracket end")
    p_bis.add_argument("--hi", type=float, required=True, help="superthreshold bracket end")
    p_bis.add_argument("--iterations", type=int, default=30)
    p_bis.add_argument("--out", help="write the result JSON here as well")
    p_bis.add_argument("--dt", type=float, help="override time step")
    p_bis.add_argument("--stride", type=int, help="override recording stride")
    p_bis.set_defaults(func=_cmd_bisect)

    p_plot = sub.add_parser("plot", help="render a long-format CSV artifact")
    p_plot.add_argument("csv", help="CSV produced by 'run' or 'reproduce'")
    p_plot.add_argument("--out", help="output image path (default: CSV path + .png)")
    p_plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except NonFiniteError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return EXIT_NONFINITE
    except BracketError as e:
        print(f"bisection error: {e}", file=sys.stderr)
        return EXIT_BRACKET


if __name__ == "__main__":
    sys.exit(main())
