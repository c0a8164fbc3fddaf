"""Command line entry point: ``latent-align {stability,align,latent,synth,metrics}``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .harness import CONFIG_FIELDS, _convert


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    for name, f in CONFIG_FIELDS.items():
        flag = "--" + name.replace("_", "-")
        if name == "backend":
            p.add_argument(flag, choices=["lowrank", "lle"], default=None)
        elif name == "latent":
            p.add_argument(flag, choices=["on", "off"], default=None)
        else:
            p.add_argument(flag, default=None, metavar=name.upper(), help=f"config key {name}")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latent-align",
        description="Latent-word densification, low rank alignment and stability metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "stability": "neighborhood overlap across consecutive model instances",
        "align": "align two models' neighborhoods with and without latent anchors",
        "latent": "dump latent words with a provenance sidecar",
        "synth": "write a synthetic model pair",
        "metrics": "trustworthiness/continuity and overlap between two model files",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        if name == "synth":
            p.add_argument("paths", nargs=2, metavar="PATH")
        _add_overrides(p)
    return parser


def config_from_args(args: argparse.Namespace) -> harness.ExperimentConfig:
    overrides = {}
    for name, f in CONFIG_FIELDS.items():
        raw = getattr(args, name, None)
        if raw is not None:
            overrides[name] = _convert(f, raw)
    return harness.load_config(args.config, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        if args.command == "stability":
            harness.run_stability(config)
        elif args.command == "align":
            harness.run_alignment(config)
        elif args.command == "latent":
            harness.run_latent_dump(config)
        elif args.command == "synth":
            harness.run_synth(config, args.paths)
        elif args.command == "metrics":
            harness.run_metrics(config)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"latent-align {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
