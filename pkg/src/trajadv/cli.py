"""Command line entry point.

    trajadv run --config configs/standup.yaml --out out/
    trajadv compare --config configs/standup.yaml
    trajadv validate-config configs/standup.yaml

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import SimConfig, load_config
from .controller import ControlMode
from .errors import ConfigError, NumericalError, TrajAdvError
from .logio import OutputError, write_csv
from .plots import write_plots
from .scenario import HANDS, WrenchProfile
from .simulation import StepError, run_simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("trajadv")


def _load(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    overrides = {}
    if getattr(args, "advancement", None):
        overrides["advancement"] = args.advancement == "on"
    if getattr(args, "mode", None):
        overrides["mode"] = ControlMode(args.mode)
    if getattr(args, "out", None):
        overrides["output_dir"] = args.out
    return cfg.with_overrides(**overrides) if overrides else cfg


def unassisted(cfg: SimConfig) -> SimConfig:
    """Same run with every hand-channel pulse removed."""
    pulses = tuple(p for p in cfg.profile.pulses if p.channel != HANDS)
    return cfg.with_overrides(profile=WrenchProfile(pulses))


def cmd_run(args) -> int:
    cfg = _load(args)
    rows, summary = run_simulation(cfg)
    out = Path(cfg.output_dir)
    write_csv(rows, out / "log.csv")
    write_plots(rows, out, curve=cfg.curve())
    (out / "summary.json").write_text(json.dumps(summary.as_dict(), indent=2) + "\n")
    print(json.dumps(summary.as_dict(), indent=2))
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _load(args)
    with ThreadPoolExecutor(max_workers=2) as pool:
        fut_a = pool.submit(run_simulation, cfg)
        fut_u = pool.submit(run_simulation, unassisted(cfg))
        (_, assisted), (_, plain) = fut_a.result(), fut_u.result()
    delta = None
    if assisted.time_to_goal is not None and plain.time_to_goal is not None:
        delta = assisted.time_to_goal - plain.time_to_goal
    report = {
        "assisted": assisted.as_dict(),
        "unassisted": plain.as_dict(),
        "delta": {"time_to_goal": delta, "final_psi": assisted.final_psi - plain.final_psi},
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    print(f"{args.config}: ok ({cfg.model.kind}, {cfg.n_steps} steps of {cfg.dt} s)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trajadv", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one simulation and write log.csv, summary.json and SVG plots")
    run.add_argument("--config", help="YAML configuration file (defaults are used when omitted)")
    run.add_argument("--out", help="output directory (overrides output.directory)")
    run.add_argument("--advancement", choices=("on", "off"))
    run.add_argument("--mode", choices=[m.value for m in ControlMode])
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="run with and without hand assistance and print the difference")
    cmp_.add_argument("--config")
    cmp_.add_argument("--advancement", choices=("on", "off"))
    cmp_.add_argument("--mode", choices=[m.value for m in ControlMode])
    cmp_.set_defaults(func=cmd_compare)

    val = sub.add_parser("validate-config", help="check a configuration file and exit")
    val.add_argument("config")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StepError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc.cause, ConfigError) else EXIT_NUMERICAL
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 1
    except TrajAdvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
