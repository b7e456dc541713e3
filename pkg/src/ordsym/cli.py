"""Command-line interface.

Commands: test, block-test, simulate-null, power, generate, patterns, reproduce.
Reports are JSON; bulk data (null draws, generated series, histograms) is CSV.
Exit status is 0 whenever the command completes, whether or not H0 is rejected.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .data import apply_transform, ingest_csv
from .errors import OrdsymError
from .experiments import EXPERIMENTS, StudyOptions, block_test, pattern_table, reproduce
from .generators import generate, parse_process, power_experiment
from .nulldist import TestConfig, run_test
from .partitions import BUILDERS, Partition, custom_partition

log = logging.getLogger("ordsym")


def default_seed() -> int:
    return int(os.environ.get("ORDSYM_SEED", 42))


def _bandwidth(text: str) -> float | None:
    if text == "auto":
        return None
    value = float(text)
    if value < 1:
        raise argparse.ArgumentTypeError("bandwidth must be >= 1 or 'auto'")
    return value


def _column(text: str) -> str | int:
    return int(text) if text.lstrip("-").isdigit() else text


def resolve_partition(selector: str, d: int, complete: bool = False) -> Partition:
    if selector.startswith("file:"):
        path = Path(selector[5:])
        if not path.exists():
            raise FileNotFoundError(f"partition file not found: {path}")
        return custom_partition(d, path.read_text(), complete_with_singletons=complete, name=selector)
    if selector not in BUILDERS:
        raise OrdsymError(f"unknown partition {selector!r}; use reversal, reflection, gaussian or file:<path>")
    return BUILDERS[selector](d)


def _common(p: argparse.ArgumentParser, data: bool = True) -> None:
    if data:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="CSV file with the series ('-' for stdin)")
        src.add_argument("--process", help="synthetic process, e.g. 'ma1(theta=0.5,innov=gaussian)'")
        p.add_argument("--n", type=int, default=1000, help="length of a synthetic series (default 1000)")
        p.add_argument("--column", type=_column, default=None, help="column name or 0-based index")
        p.add_argument("--transform", choices=["none", "log-returns", "diff"], default="none")
    p.add_argument("--d", type=int, default=3, help="pattern order (default 3)")
    p.add_argument("--partition", default="reversal", help="reversal|reflection|gaussian|file:<path>")
    p.add_argument("--complete-singletons", action="store_true", help="patterns missing from a partition file become singleton groups")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mc-samples", type=int, default=20000)
    p.add_argument("--kernel", choices=["bartlett", "parzen", "qs"], default="bartlett")
    p.add_argument("--bandwidth", type=_bandwidth, default=None, metavar="F|auto", help="HAC bandwidth (default auto = ceil(n^(1/3)))")
    p.add_argument("--raw-indicators", action="store_true", help="do not demean pattern indicators in the HAC estimator")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default $ORDSYM_SEED or 42)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--verbose", action="store_true", help="include covariance matrices in reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordsym", description="Ordinal-pattern symmetry tests for time series.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the symmetry test on one series")
    _common(p)
    p.add_argument("--draws-csv", default=None, help="also write the null draws to this CSV")

    p = sub.add_parser("block-test", help="test consecutive non-overlapping blocks")
    _common(p)
    p.add_argument("--block-size", type=int, required=True)

    p = sub.add_parser("simulate-null", help="write Monte Carlo null draws as CSV")
    _common(p)

    p = sub.add_parser("power", help="empirical rejection rate for a synthetic process")
    _common(p, data=False)
    p.add_argument("--process", required=True)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--replicates", type=int, default=200)

    p = sub.add_parser("generate", help="write a synthetic series as CSV")
    p.add_argument("--process", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("patterns", help="dump pattern counts and frequencies")
    p.add_argument("--input", required=True)
    p.add_argument("--column", type=_column, default=None)
    p.add_argument("--transform", choices=["none", "log-returns", "diff"], default="none")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--out", default=None)

    p = sub.add_parser("reproduce", help="rerun a simulation study at desk scale")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replicates", type=int, default=200)
    p.add_argument("--mc-samples", type=int, default=20000)
    p.add_argument("--kernel", choices=["bartlett", "parzen", "qs"], default="bartlett")
    p.add_argument("--bandwidth", type=_bandwidth, default=None)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="JSON summary path (default stdout)")
    p.add_argument("--data-dir", default=None, help="directory for CSV histogram/KDE data")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(repr(v) if isinstance(v, float) else str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _series(args) -> np.ndarray:
    if args.input is not None:
        x = ingest_csv(args.input, args.column)
        # record the data, not where it came from, so file and stdin runs agree
        args.input_sha256 = hashlib.sha256(np.ascontiguousarray(x, dtype="<f8").tobytes()).hexdigest()
        args.input_length = int(x.size)
    else:
        x = generate(parse_process(args.process), args.n, args.seed)
    return apply_transform(x, args.transform)


def _config(args) -> TestConfig:
    return TestConfig(
        alpha=args.alpha,
        mc_samples=args.mc_samples,
        kernel=args.kernel,
        bandwidth=args.bandwidth,
        demean=not args.raw_indicators,
        seed=args.seed,
        threads=args.threads,
    )


def resolved_config(args) -> dict[str, Any]:
    """The run configuration embedded in every report (scheduling and output options excluded)."""
    skip = {"threads", "out", "log_level", "draws_csv", "data_dir", "verbose", "input"}
    out = {k: v for k, v in vars(args).items() if k not in skip}
    if getattr(args, "input", None) is None:
        out.pop("column", None)
    else:
        out.pop("n", None)
    if "bandwidth" in out:
        out["bandwidth"] = "auto" if out["bandwidth"] is None else out["bandwidth"]
    return out


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seed", None) is None:
        args.seed = default_seed()
    cmd = args.command

    if cmd == "generate":
        x = generate(parse_process(args.process), args.n, args.seed)
        _emit(_csv(["value"], ([repr(float(v))] for v in x)), args.out)
        return 0

    if cmd == "patterns":
        args.process = None
        x = _series(args)
        table = pattern_table(x, args.d)
        table["config"] = resolved_config(args)
        _emit(_json(table), args.out)
        return 0

    if cmd == "reproduce":
        opts = StudyOptions(
            seed=args.seed,
            replicates=args.replicates,
            mc_samples=args.mc_samples,
            kernel=args.kernel,
            bandwidth=args.bandwidth,
            alpha=args.alpha,
            threads=args.threads,
        )
        summary = reproduce(args.experiment, opts, args.data_dir)
        _emit(_json(summary), args.out)
        return 0

    partition = resolve_partition(args.partition, args.d, args.complete_singletons)
    config = _config(args)

    if cmd == "power":
        res = power_experiment(parse_process(args.process), partition, args.n, args.replicates, args.alpha, args.seed, config, args.threads)
        out = res.to_dict()
        out["config"] = resolved_config(args)
        _emit(_json(out), args.out)
        return 0

    x = _series(args)
    if cmd == "test":
        report = run_test(x, args.d, partition, config)
        out = report.to_dict(args.verbose)
        out["config"] = resolved_config(args)
        _emit(_json(out), args.out)
        if args.draws_csv:
            _emit(_csv(["index", "draw"], enumerate(report.null_sample.draws.tolist())), args.draws_csv)
    elif cmd == "block-test":
        res = block_test(x, args.block_size, args.d, partition, config)
        out = res.to_dict(args.verbose)
        out["config"] = resolved_config(args)
        _emit(_json(out), args.out)
    elif cmd == "simulate-null":
        report = run_test(x, args.d, partition, config)
        _emit(_csv(["index", "draw"], enumerate(report.null_sample.draws.tolist())), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except (ValueError, OSError) as exc:
        print(f"ordsym: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
