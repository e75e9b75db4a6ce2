"""Command-line entry point: ``lindri <command> [--config F] [--out DIR] [--seed N] [--set k=v]``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .config import Config, parse_overrides, parse_text
from .experiments import RUNNERS, SCAN_MODEL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lindri", description="Repeated-interaction Lindblad experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        s = sub.add_parser(name)
        s.add_argument("--config", type=Path, help="key = value model/experiment file")
        s.add_argument("--out", type=Path, default=Path("."), help="output directory")
        s.add_argument("--seed", type=int, default=0, help="seed for random test states")
        s.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    return p


def load_config(command: str, path, overrides) -> Config:
    values = parse_text(path.read_text()) if path else {}
    values.update(parse_overrides(overrides))
    defaults = {}
    if command == "scan-lambda" and not any(k.startswith(("system.", "interaction[")) for k in values):
        defaults = dict(SCAN_MODEL)
    return Config(values, defaults)


def write_outputs(out: Path, name: str, header, rows, summary: dict):
    out.mkdir(parents=True, exist_ok=True)
    stem = name.replace("-", "_")
    if header is not None:
        with open(out / f"{stem}.csv", "w", newline="") as fh:
            for key in ("command", "norm_proxy", "seed"):
                fh.write(f"# {key}={summary[key]}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    with open(out / f"{stem}.summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed < 0 or args.seed >= 2**64:
        print(json.dumps({"error": "ValueError", "message": "seed must be a 64-bit unsigned integer"}),
              file=sys.stderr)
        return 1
    try:
        cfg = load_config(args.command, args.config, args.overrides)
        header, rows, summary = RUNNERS[args.command](cfg, args.seed)
        write_outputs(args.out, args.command, header, rows, summary)
    except Exception as exc:  # reported as a machine-readable object
        print(json.dumps({"error": type(exc).__name__, "message": str(exc),
                          "command": args.command}), file=sys.stderr)
        return 1
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
