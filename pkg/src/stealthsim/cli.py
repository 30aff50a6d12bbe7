"""Command line entry point: ``stealthsim run | plot | selftest``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from .cli_io import (ConfigNotFoundError, ConfigParseError, RunManifest, config_to_dict,
                     emit_plot, emit_roc_csv, parse_config, read_roc_csv)
from .scenario import ConfigValidationError, ScenarioConfig, run_campaign

log = logging.getLogger("stealthsim")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stealthsim", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo campaign and write roc.csv, roc.svg, manifest.json")
    run.add_argument("--config", type=Path, help="JSON scenario config (defaults if omitted)")
    run.add_argument("--seed", type=_u64)
    run.add_argument("--trials", type=int)
    run.add_argument("--mode", choices=("baseline", "csi", "both"))
    run.add_argument("--out", type=Path, required=True, help="output directory")

    plot = sub.add_parser("plot", help="render a ROC CSV as SVG")
    plot.add_argument("--in", dest="inp", type=Path, required=True)
    plot.add_argument("--out", type=Path, required=True)

    sub.add_parser("selftest", help="fast numerical self-checks")
    return ap


def cmd_run(args) -> int:
    cfg = parse_config(args.config) if args.config else ScenarioConfig()
    over = {k: v for k, v in (("seed", args.seed), ("n_trials", args.trials), ("mode", args.mode))
            if v is not None}
    if over:
        cfg = replace(cfg, **over)
    args.out.mkdir(parents=True, exist_ok=True)
    started = _now()
    log.info("running %d trials, array %s, mode %s", cfg.n_trials, cfg.gnb_array, cfg.mode)
    res = run_campaign(cfg, progress=lambda i, n: log.debug("trial %d/%d", i, n))
    csv_path = emit_roc_csv(res, args.out / "roc.csv")
    svg_path = emit_plot(res, args.out / "roc.svg", title=f"ROC, M={res.antennas}")
    man = RunManifest(config=config_to_dict(cfg), seed=cfg.seed, started=started, finished=_now(),
                      outputs={"roc_csv": str(csv_path), "roc_svg": str(svg_path)})
    man.write(args.out / "manifest.json")
    print(f"wrote {csv_path}, {svg_path}, {args.out / 'manifest.json'}")
    return 0


def cmd_plot(args) -> int:
    curves = read_roc_csv(args.inp)
    emit_plot(curves, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest
    return 0 if run_selftest(verbose=True) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    handler = {"run": cmd_run, "plot": cmd_plot, "selftest": cmd_selftest}[args.cmd]
    try:
        return handler(args)
    except ConfigNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigParseError as exc:
        print(f"error: malformed config: {exc}", file=sys.stderr)
        return 2
    except ConfigValidationError as exc:
        print(f"error: invalid config key {exc.key!r}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
