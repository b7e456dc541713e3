"""Block-wise testing and the reproducible simulation studies."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np
from scipy.stats import gaussian_kde

from . import estimators as est
from . import patterns as pt
from .errors import SeriesTooShort, UnknownExperiment
from .generators import ProcessSpec, generate, parse_process, power_experiment
from .nulldist import TestConfig, TestReport, run_test
from .partitions import Partition, from_patterns, gaussian_partition

logger = logging.getLogger(__name__)


@dataclass
class BlockTestResult:
    reports: list[TestReport]
    block_size: int
    dropped: int

    @property
    def rejection_rate(self) -> float:
        return float(np.mean([r.reject for r in self.reports]))

    @property
    def mean_p_value(self) -> float:
        return float(np.mean([r.p_value for r in self.reports]))

    def to_dict(self, verbose: bool = False) -> dict[str, Any]:
        return {
            "block_size": self.block_size,
            "n_blocks": len(self.reports),
            "dropped": self.dropped,
            "rejection_rate": self.rejection_rate,
            "mean_p_value": self.mean_p_value,
            "blocks": [r.to_dict(verbose) for r in self.reports],
        }


def block_test(series, block_size: int, d: int, partition: Partition, config: TestConfig | None = None) -> BlockTestResult:
    """Test consecutive non-overlapping blocks; the trailing remainder is dropped.

    Block ``b`` uses the Monte Carlo substream ``(seed, b)``.
    """
    config = config or TestConfig()
    x = np.asarray(series, dtype=float).ravel()
    if block_size < d + 1:
        raise ValueError(f"block size must be >= d + 1 = {d + 1}")
    if x.size < block_size:
        raise SeriesTooShort(f"series of length {x.size} is shorter than one block of {block_size}")
    n_blocks = x.size // block_size
    root = np.random.SeedSequence(_seed_int(config.seed))
    reports = []
    for b in range(n_blocks):
        block = x[b * block_size : (b + 1) * block_size]
        cfg = replace(config, seed=np.random.SeedSequence(root.entropy, spawn_key=(b,)))
        try:
            reports.append(run_test(block, d, partition, cfg))
        except Exception as exc:
            if hasattr(exc, "stage"):
                exc.stage = f"block {b}: {exc.stage}" if exc.stage else f"block {b}"
            raise
    return BlockTestResult(reports, block_size, int(x.size - n_blocks * block_size))


def _seed_int(seed) -> int:
    if isinstance(seed, np.random.SeedSequence):
        return int(seed.entropy)
    return int(seed)


# -- plot data -----------------------------------------------------------------


def histogram_rows(values: np.ndarray, bins: int = 50) -> list[dict[str, float]]:
    counts, edges = np.histogram(values, bins=bins)
    width = np.diff(edges)
    density = counts / (counts.sum() * width)
    return [
        {"bin_left": float(edges[i]), "bin_right": float(edges[i + 1]), "count": int(counts[i]), "density": float(density[i])}
        for i in range(bins)
    ]


def kde_rows(values: np.ndarray, points: int = 200) -> list[dict[str, float]]:
    values = np.asarray(values, dtype=float)
    if values.size < 2 or np.ptp(values) == 0:
        return []
    kde = gaussian_kde(values)
    pad = 0.1 * np.ptp(values)
    grid = np.linspace(values.min() - pad, values.max() + pad, points)
    return [{"x": float(g), "density": float(v)} for g, v in zip(grid, kde(grid))]


def write_csv(path: Path, rows: list[dict[str, Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        if not rows:
            return
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


# -- studies -------------------------------------------------------------------

SETTING_B_GROUPS = [[(1, 2, 3), (1, 3, 2), (3, 1, 2), (2, 1, 3)], [(2, 3, 1), (3, 2, 1)]]


def setting_a_partition() -> Partition:
    return gaussian_partition(3)


def setting_b_partition() -> Partition:
    return from_patterns(3, SETTING_B_GROUPS, name="settingB")


@dataclass
class StudyOptions:
    seed: int = 42
    replicates: int = 200
    mc_samples: int = 20000
    kernel: str = "bartlett"
    bandwidth: float | None = None
    alpha: float = 0.05
    threads: int = 1

    def config(self, **overrides) -> TestConfig:
        base = TestConfig(
            alpha=self.alpha,
            mc_samples=self.mc_samples,
            kernel=self.kernel,
            bandwidth=self.bandwidth,
            seed=self.seed,
            threads=self.threads,
        )
        return replace(base, **overrides)

    def to_dict(self) -> dict[str, Any]:
        # threads only affects scheduling, never the numbers
        return {
            "seed": self.seed,
            "replicates": self.replicates,
            "mc_samples": self.mc_samples,
            "kernel": self.kernel,
            "bandwidth": "auto" if self.bandwidth is None else self.bandwidth,
            "alpha": self.alpha,
        }


def _statistic_replicates(spec: ProcessSpec, partition: Partition, n: int, R: int, seed: int) -> np.ndarray:
    root = np.random.SeedSequence(seed)
    out = np.empty(R)
    for j in range(R):
        x = generate(spec, n, np.random.SeedSequence(root.entropy, spawn_key=(j, 0)))
        counts = est.count_patterns(x, partition.d)
        out[j] = counts.n * est.d2_statistic(counts, partition)
    return out


def _null_study(name: str, partition: Partition, opts: StudyOptions, data: dict[str, list]) -> dict[str, Any]:
    spec = parse_process("ma1(theta=0.5,innov=gaussian)")
    n = 1000
    x = generate(spec, n, np.random.SeedSequence(opts.seed, spawn_key=(0,)))
    report = run_test(x, 3, partition, opts.config(mc_samples=2000, seed=np.random.SeedSequence(opts.seed, spawn_key=(1,))))
    draws = report.null_sample.draws
    stats = _statistic_replicates(spec, partition, n, opts.replicates, opts.seed + 1)
    data[f"{name}_null_hist"] = histogram_rows(draws)
    data[f"{name}_null_kde"] = kde_rows(draws)
    data[f"{name}_statistic_hist"] = histogram_rows(stats)
    data[f"{name}_statistic_kde"] = kde_rows(stats)
    data[f"{name}_null_draws"] = [{"index": i, "draw": float(v)} for i, v in enumerate(draws)]
    out = {
        "process": str(spec),
        "n": n,
        "partition": partition.describe(),
        "null_draws": {"N": int(draws.size), "mean": float(draws.mean()), "variance": float(draws.var())},
        "statistic_replicates": {"R": int(stats.size), "mean": float(stats.mean()), "variance": float(stats.var())},
        "test": report.to_dict(),
    }
    if name == "settingB":
        root = stats / np.sqrt(n)
        out["sqrt_n_statistic"] = {"mean": float(root.mean()), "variance": float(root.var())}
    return out


def _setting_a(opts: StudyOptions, data):
    return _null_study("settingA", setting_a_partition(), opts, data)


def _setting_b(opts: StudyOptions, data):
    return _null_study("settingB", setting_b_partition(), opts, data)


def _power_grid(cells: list[tuple[str, str, int]], partition: Partition, opts: StudyOptions, data, name: str):
    rows = []
    for k, (label, process, n) in enumerate(cells):
        spec = parse_process(process)
        res = power_experiment(spec, partition, n, opts.replicates, opts.alpha, opts.seed + k, opts.config(), opts.threads)
        logger.info("%s %s n=%d rate=%.3f", name, process, n, res.rate)
        rows.append({"cell": label, "process": str(spec), "n": n, "replicates": res.N, "seed": res.seed, "rejection_rate": res.rate})
    data[f"{name}_rates"] = rows
    return {"partition": partition.describe(), "cells": rows}


def _setting_c(opts: StudyOptions, data):
    marginals = ["laplace(1,4)", "pareto(1,2)", "logistic(100,1)", "cauchy(1,12)"]
    cells = [
        (f"{fam}/{m.split('(')[0]}", f"{fam}(theta=0.5,innov=gaussian)|subordinate({m})", n)
        for n in (1000, 2000)
        for fam in ("ar1", "ma1")
        for m in marginals
    ]
    return _power_grid(cells, setting_a_partition(), opts, data, "settingC")


def _setting_d(opts: StudyOptions, data):
    innovations = ["lognormal", "chi2", "exp", "student_t(1)"]
    cells = [
        (f"{fam}/{i.split('(')[0]}", f"{fam}(theta=0.5,innov={i})", n)
        for n in (250, 500, 1000)
        for fam in ("ar1", "ma1")
        for i in innovations
    ]
    return _power_grid(cells, setting_a_partition(), opts, data, "settingD")


def _power_table(opts: StudyOptions, data):
    cells = [
        (f"{fam}/theta={th}", f"{fam}(theta={th},innov=gaussian)", n)
        for th in (0.1, 0.3, 0.5)
        for fam in ("ar1", "ma1")
        for n in (500, 1000, 1500, 2000)
    ]
    return _power_grid(cells, setting_b_partition(), opts, data, "powerTable")


EXPERIMENTS: dict[str, Callable[[StudyOptions, dict], dict]] = {
    "settingA": _setting_a,
    "settingB": _setting_b,
    "settingC": _setting_c,
    "settingD": _setting_d,
    "powerTable": _power_table,
}


def reproduce(experiment: str, opts: StudyOptions | None = None, data_dir: str | Path | None = None) -> dict[str, Any]:
    """Run a named study; returns the JSON summary and optionally writes CSV data files."""
    if experiment not in EXPERIMENTS:
        raise UnknownExperiment(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    opts = opts or StudyOptions()
    data: dict[str, list] = {}
    summary = {"experiment": experiment, "config": opts.to_dict(), "results": EXPERIMENTS[experiment](opts, data)}
    if data_dir is not None:
        data_dir = Path(data_dir)
        for name, rows in data.items():
            write_csv(data_dir / f"{name}.csv", rows)
        summary["data_files"] = sorted(f"{name}.csv" for name in data)
    return summary


def pattern_table(series, d: int) -> dict[str, Any]:
    counts = est.count_patterns(series, d)
    return {
        "d": d,
        "n_windows": counts.n,
        "patterns": [
            {"id": i, "pattern": pt.format_pattern(p), "count": int(c), "frequency": float(c / counts.n)}
            for i, (p, c) in enumerate(zip(pt.all_patterns(d), counts.counts))
        ],
    }
