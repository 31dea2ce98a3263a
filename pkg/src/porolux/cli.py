"""``porolux solve --config <path>`` command line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import MODES, ConfigError, parse_config
from .runner import EXIT_CONFIG, run


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="porolux", description="Thin-film Darcy-Brinkman flow with viscous heating")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="run a configuration file")
    s.add_argument("--config", required=True, type=Path)
    s.add_argument("--out", type=Path, default=None, help="output directory (overrides run.output_dir)")
    s.add_argument("--mode", choices=MODES, default=None, help="override run.mode")
    s.add_argument("--log-level", choices=("info", "debug"), default="info")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper()),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        text = args.config.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text, mode=args.mode)
    except ConfigError as exc:
        print(f"error: invalid config {args.config}:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
