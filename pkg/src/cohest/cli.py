"""Command-line entry point: ``cohest {tightness-scan,noise-scan,estimate,simulate}``.

Exit codes: 0 success, 2 configuration error, 3 infeasible for every
subset, 4 input parse error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys

from .errors import ConfigError, NoFeasibleSolution, ParseError, UnknownOperator
from .harness import (
    RunConfig,
    cmd_estimate,
    cmd_noise_scan,
    cmd_simulate,
    cmd_tightness_scan,
    format_rows,
    subset_text,
    target_group,
)
from .measurement import ingest_csv, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_PARSE = 0, 2, 3, 4

# flag name -> (RunConfig field, converter)
_KEYS = {
    "family": ("family", str),
    "n": ("n", int),
    "n-max": ("n_max", int),
    "eta": ("eta", lambda s: [float(x) for x in str(s).split(",") if x.strip()]),
    "eta-steps": ("eta_steps", int),
    "shots": ("shots", int),
    "w": ("w", float),
    "subsets": ("subsets", str),
    "seed": ("seed", int),
    "out": ("out", str),
    "format": ("format", str),
}


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; keys are the long flag names without dashes."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("_", "-")
            if key not in _KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = val
    return values


def build_config(args: argparse.Namespace, defaults: dict | None = None) -> RunConfig:
    merged: dict = {}
    if args.config:
        merged.update(read_config_file(args.config))
    if defaults:
        for k, v in defaults.items():
            merged.setdefault(k, v)
    for key in _KEYS:
        v = getattr(args, key.replace("-", "_"), None)
        if v is not None:
            merged[key] = v
    kwargs = {}
    for key, val in merged.items():
        field, conv = _KEYS[key]
        try:
            kwargs[field] = conv(val)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {val!r}") from None
    return RunConfig(**kwargs).validate()


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--family", choices=["ghz", "cluster"])
    p.add_argument("--n", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--eta", help="comma-separated noise weights")
    p.add_argument("--eta-steps", type=int)
    p.add_argument("--shots", type=int)
    p.add_argument("--w", type=float, help="interval half-width in sigmas (default 3)")
    p.add_argument("--subsets", choices=["generators", "group", "search"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohest", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("tightness-scan", "bounds vs exact values on pure GHZ / cluster states over n"),
        ("noise-scan", "bounds vs exact values on depolarized states over eta"),
        ("simulate", "write finite-shot expectation records as CSV"),
        ("estimate", "bound coherence from an expectation CSV"),
    ]:
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "estimate":
            p.add_argument("input", help="operator,mean,sigma,shots CSV")
            p.add_argument("--diag", help="index,prob CSV of computational-basis populations")
            p.add_argument("--subset-log", help="write per-subset status CSV here")
    return parser


def read_diag(path: str) -> list[float]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip().lower() for h in rows[0]] != ["index", "prob"]:
        raise ParseError("expected header index,prob", 1)
    probs = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            probs[int(row[0])] = float(row[1])
        except (ValueError, IndexError):
            raise ParseError("bad index,prob row", lineno) from None
    return [probs.get(i, 0.0) for i in range(max(probs) + 1)] if probs else []


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "tightness-scan":
            cfg = build_config(args)
            _emit(format_rows(cmd_tightness_scan(cfg), cfg.format), cfg.out)
        elif args.command == "noise-scan":
            cfg = build_config(args, {"n": "4"})
            _emit(format_rows(cmd_noise_scan(cfg), cfg.format), cfg.out)
        elif args.command == "simulate":
            cfg = build_config(args, {"shots": "10000"})
            records = cmd_simulate(cfg)
            if cfg.out:
                write_csv(records, cfg.out)
            else:
                write_csv(records, sys.stdout)
        else:
            cfg = build_config(args)
            group = target_group(cfg.family, cfg.n)
            records = ingest_csv(args.input, group)
            diag = read_diag(args.diag) if args.diag else None
            rows, search = cmd_estimate(cfg, records, diag, eta_known=args.eta is not None)
            if search is not None:
                if args.subset_log:
                    with open(args.subset_log, "w", newline="") as fh:
                        w = csv.writer(fh, lineterminator="\n")
                        w.writerow(["subset", "status"])
                        for labels, status in search.status.items():
                            w.writerow([subset_text(group, labels), status])
                if search.n_infeasible:
                    print(f"{search.n_infeasible} of {len(search.status)} subsets infeasible",
                          file=sys.stderr)
            _emit(format_rows(rows, cfg.format), cfg.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoFeasibleSolution as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ParseError, UnknownOperator) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
