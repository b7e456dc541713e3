"""Monte Carlo null law, p-values and the end-to-end test.

The null law of ``n * D2`` is ``sum_i lambda_i (W_i^2 - 1) + c`` with
``W ~ N(0, Sigma)``.  It is simulated in fixed-size chunks, each chunk drawing
from its own counter-based (Philox) stream keyed on ``(seed, chunk index)``,
so the draws do not depend on how many worker threads are used.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import estimators as est
from . import longrun, patterns
from .errors import DegenerateModel, EmptySample, NotPSD, OrdsymError, TooFewWindows
from .partitions import Partition
from .spectral import SpectralModel, build_spectral_model

logger = logging.getLogger(__name__)

CHUNK = 4096
PSD_TOL = 1e-10

SeedLike = int | np.random.SeedSequence


def _seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def substream(seed: SeedLike, *key: int) -> np.random.Generator:
    """Independent generator for the sub-task identified by ``key``."""
    root = _seed_sequence(seed)
    child = np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + tuple(key))
    return np.random.Generator(np.random.Philox(child))


@dataclass(frozen=True)
class NullSample:
    draws: np.ndarray
    seed: Any
    N: int

    @property
    def mean(self) -> float:
        return float(self.draws.mean())

    @property
    def var(self) -> float:
        return float(self.draws.var())


def sqrt_psd(sigma: np.ndarray) -> np.ndarray:
    """Symmetric square root; valid for singular matrices."""
    vals, vecs = np.linalg.eigh(sigma)
    if vals.size and vals.min() < -PSD_TOL:
        raise NotPSD(f"covariance has eigenvalue {vals.min():.3g} < 0")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def sample_quadratic_form(
    eigenvalues: np.ndarray,
    sigma: np.ndarray,
    c: float,
    N: int,
    seed: SeedLike,
    threads: int = 1,
) -> np.ndarray:
    lam = np.asarray(eigenvalues, dtype=float)
    t = lam.size
    if t == 0:
        raise DegenerateModel("no non-zero eigenvalues (every group is a singleton); the statistic is degenerate")
    if N < 1:
        raise EmptySample("need at least one Monte Carlo draw")
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (t, t):
        raise NotPSD(f"covariance shape {sigma.shape} does not match {t} eigenvalues")
    root = sqrt_psd(sigma)
    n_chunks = -(-N // CHUNK)

    def run(k: int) -> np.ndarray:
        size = min(CHUNK, N - k * CHUNK)
        z = substream(seed, k).standard_normal((size, t))
        w = z @ root
        return (w * w - 1.0) @ lam + c

    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(n_chunks)))
    else:
        parts = [run(k) for k in range(n_chunks)]
    return np.concatenate(parts)


def sample_null(model: SpectralModel, sigma, N: int, seed: SeedLike, threads: int = 1) -> NullSample:
    cov = getattr(sigma, "sigma", sigma)
    draws = sample_quadratic_form(model.eigenvalues, cov, model.c_hat, N, seed, threads)
    draws.setflags(write=False)
    return NullSample(draws, seed, int(N))


def _draws(sample) -> np.ndarray:
    draws = np.asarray(getattr(sample, "draws", sample), dtype=float)
    if draws.size == 0:
        raise EmptySample("null sample is empty")
    return draws


def p_value(statistic: float, sample) -> float:
    """Left-tail add-one Monte Carlo p-value."""
    draws = _draws(sample)
    return float((1 + np.count_nonzero(draws <= statistic)) / (draws.size + 1))


def quantile(sample, q: float) -> float:
    """Empirical quantile with the lower order-statistic rule."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {q}")
    return float(np.quantile(_draws(sample), q, method="lower"))


@dataclass
class TestConfig:
    alpha: float = 0.05
    mc_samples: int = 20000
    kernel: str = "bartlett"
    bandwidth: float | None = None
    demean: bool = True
    seed: SeedLike = 42
    threads: int = 1
    min_mc_samples: int = 1000

    __test__ = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.mc_samples < self.min_mc_samples:
            raise ValueError(f"mc_samples must be >= {self.min_mc_samples}, got {self.mc_samples}")
        longrun.kernel_name(self.kernel)


@dataclass
class TestReport:
    statistic: float
    d2: float
    u_statistic: float
    p_value: float
    alpha: float
    reject: bool
    critical_value: float
    c_hat: float
    eigenvalues: list[float]
    p_hat: list[float]
    null_mean: float
    null_var: float
    diagnostics: dict[str, Any]
    sigma: list[list[float]] = field(default_factory=list)
    null_sample: NullSample | None = field(default=None, repr=False)

    __test__ = False

    def to_dict(self, verbose: bool = False) -> dict[str, Any]:
        out = {
            "statistic": self.statistic,
            "d2": self.d2,
            "u_statistic": self.u_statistic,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "reject": self.reject,
            "critical_value": self.critical_value,
            "c_hat": self.c_hat,
            "eigenvalues": self.eigenvalues,
            "p_hat": self.p_hat,
            "null_mean": self.null_mean,
            "null_var": self.null_var,
            "diagnostics": self.diagnostics,
        }
        if verbose:
            out["sigma"] = self.sigma
        return out


class _Stage:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if isinstance(exc, OrdsymError) and exc.stage is None:
            exc.stage = self.name
        return False


def _seed_repr(seed: SeedLike):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": int(seed.entropy), "spawn_key": [int(k) for k in seed.spawn_key]}
    return int(seed)


def run_test(series: Sequence[float], d: int, partition: Partition, config: TestConfig | None = None) -> TestReport:
    """Full pipeline: patterns, statistic, spectral model, HAC, null simulation, decision."""
    config = config or TestConfig()
    with _Stage("patterns"):
        x = np.asarray(series, dtype=float).ravel()
        if x.size < d + 1:
            raise TooFewWindows(f"series of length {x.size} gives fewer than 2 windows for d={d}")
        ids = patterns.pattern_sequence(x, d)
        counts = est.PatternCounts.from_ids(ids, d)
    with _Stage("estimators"):
        d2 = est.d2_statistic(counts, partition)
        u = est.u_statistic(counts, partition)
    with _Stage("spectral"):
        model = build_spectral_model(partition, counts)
    with _Stage("longrun"):
        omega = longrun.estimate_omega_from_ids(ids, d, config.kernel, config.bandwidth, config.demean)
        wcov = longrun.w_covariance(omega, model)
    with _Stage("nulldist"):
        sample = sample_null(model, wcov, config.mc_samples, config.seed, config.threads)
        stat = counts.n * d2
        p = p_value(stat, sample)
        crit = quantile(sample, config.alpha)
    logger.debug("n=%d statistic=%.6g p=%.4g", counts.n, stat, p)
    diagnostics = {
        "series_length": int(x.size),
        "n_windows": counts.n,
        "d": d,
        "partition": partition.name,
        "groups": partition.describe(),
        "counts": counts.counts.tolist(),
        "kernel": omega.kernel_name,
        "bandwidth": omega.bandwidth,
        "demeaned": omega.demeaned,
        "min_eig_raw": wcov.min_eig_raw,
        "mc_samples": config.mc_samples,
        "seed": _seed_repr(config.seed),
    }
    return TestReport(
        statistic=float(stat),
        d2=d2,
        u_statistic=u,
        p_value=p,
        alpha=config.alpha,
        reject=bool(p < config.alpha),
        critical_value=crit,
        c_hat=model.c_hat,
        eigenvalues=model.eigenvalues.tolist(),
        p_hat=model.p_hat.tolist(),
        null_mean=sample.mean,
        null_var=sample.var,
        diagnostics=diagnostics,
        sigma=wcov.sigma.tolist(),
        null_sample=sample,
    )
