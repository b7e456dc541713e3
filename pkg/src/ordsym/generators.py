"""Synthetic stationary processes for size and power studies.

Linear AR(1)/MA(1) models with configurable innovations, optionally passed
through ``g(y) = F^{-1}(Phi((y - mu) / sigma))`` to prescribe the marginal law
while keeping the ordinal structure of the Gaussian process.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
from scipy.signal import lfilter
from scipy.special import log_ndtr, ndtr

from .errors import BadProcessSpec, UnknownMarginal, UnstableAR
from .nulldist import SeedLike, TestConfig, _seed_sequence, run_test
from .partitions import Partition

FAMILIES = ("ar1", "ma1", "iid")
INNOVATIONS = ("gaussian", "lognormal", "chi2", "exp", "student_t", "cauchy")
_INNOVATION_ALIASES = {
    "normal": "gaussian",
    "lognormal_centered": "lognormal",
    "chi2_1": "chi2",
    "exp_1": "exp",
    "exponential": "exp",
    "t": "student_t",
}


@dataclass(frozen=True)
class Marginal:
    name: str
    params: tuple[float, ...] = ()

    _DEFAULTS = {
        "normal": (0.0, 1.0),
        "pareto": (1.0, 2.0),
        "laplace": (1.0, 4.0),
        "logistic": (100.0, 1.0),
        "cauchy": (1.0, 12.0),
        "exponential": (1.0,),
    }

    def __post_init__(self):
        if self.name not in self._DEFAULTS:
            raise UnknownMarginal(f"unknown marginal {self.name!r}; choose from {', '.join(self._DEFAULTS)}")
        if not self.params:
            object.__setattr__(self, "params", self._DEFAULTS[self.name])
        if len(self.params) != len(self._DEFAULTS[self.name]):
            raise BadProcessSpec(f"{self.name} takes {len(self._DEFAULTS[self.name])} parameters, got {self.params}")

    def from_standard_normal(self, z: np.ndarray) -> np.ndarray:
        """``F^{-1}(Phi(z))`` evaluated in log space to stay strictly increasing in the tails."""
        z = np.asarray(z, dtype=float)
        a = self.params
        if self.name == "normal":
            return a[0] + a[1] * z
        if self.name == "pareto":
            x_m, alpha = a
            return x_m * np.exp(-log_ndtr(-z) / alpha)
        if self.name == "laplace":
            mu, b = a
            return np.where(z < 0, mu + b * (math.log(2.0) + log_ndtr(z)), mu - b * (math.log(2.0) + log_ndtr(-z)))
        if self.name == "logistic":
            mu, s = a
            return mu + s * (log_ndtr(z) - log_ndtr(-z))
        if self.name == "cauchy":
            mu, gamma = a
            with np.errstate(divide="ignore"):
                upper = mu + gamma / np.tan(np.pi * ndtr(-np.abs(z)))
            return np.where(z >= 0, upper, 2 * mu - upper)
        rate = a[0]
        return -log_ndtr(-z) / rate

    def __str__(self) -> str:
        return f"{self.name}({','.join(_fmt(v) for v in self.params)})"


def _fmt(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() else repr(float(v))


@dataclass(frozen=True)
class ProcessSpec:
    family: str = "ma1"
    theta: float = 0.5
    innovation: str = "gaussian"
    innovation_df: float = 1.0
    subordination: Marginal | None = None
    burn_in: int = 1000

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BadProcessSpec(f"unknown process family {self.family!r}")
        innov = _INNOVATION_ALIASES.get(self.innovation, self.innovation)
        if innov not in INNOVATIONS:
            raise BadProcessSpec(f"unknown innovation {self.innovation!r}")
        object.__setattr__(self, "innovation", innov)
        if self.family == "ar1":
            if abs(self.theta) >= 1:
                raise UnstableAR(f"AR(1) needs |theta| < 1, got {self.theta}")
            if self.burn_in < 100:
                raise BadProcessSpec(f"AR(1) burn-in must be >= 100, got {self.burn_in}")

    @property
    def gaussian_moments(self) -> tuple[float, float]:
        """Mean and standard deviation of the (pre-subordination) Gaussian process."""
        if self.family == "ar1":
            return 0.0, math.sqrt(1.0 / (1.0 - self.theta**2))
        if self.family == "ma1":
            return 0.0, math.sqrt(1.0 + self.theta**2)
        return 0.0, 1.0

    def __str__(self) -> str:
        innov = self.innovation
        if innov == "student_t":
            innov = f"student_t({_fmt(self.innovation_df)})"
        args = [f"innov={innov}"]
        if self.family != "iid":
            args.insert(0, f"theta={_fmt(self.theta)}")
        if self.family == "ar1" and self.burn_in != 1000:
            args.append(f"burn_in={self.burn_in}")
        text = f"{self.family}({','.join(args)})"
        if self.subordination is not None:
            text += f"|subordinate({self.subordination})"
        return text


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


_CALL = re.compile(r"^\s*([A-Za-z_][\w]*)\s*(?:\((.*)\))?\s*$")


def _call(text: str) -> tuple[str, list[str]]:
    m = _CALL.match(text)
    if not m:
        raise BadProcessSpec(f"cannot parse {text!r}")
    args = m.group(2)
    return m.group(1).lower(), [] if args is None or not args.strip() else _split_top(args, ",")


def parse_marginal(text: str) -> Marginal:
    name, args = _call(text)
    try:
        return Marginal(name, tuple(float(a) for a in args))
    except ValueError as exc:
        if isinstance(exc, (UnknownMarginal, BadProcessSpec)):
            raise
        raise BadProcessSpec(f"bad marginal parameters in {text!r}") from None


def parse_process(text: str) -> ProcessSpec:
    """Parse e.g. ``ar1(theta=0.5,innov=gaussian)|subordinate(pareto(1,2))``."""
    stages = _split_top(text, "|")
    family, args = _call(stages[0])
    kwargs: dict[str, Any] = {"family": family}
    for arg in args:
        if "=" not in arg:
            raise BadProcessSpec(f"expected key=value, got {arg!r}")
        key, value = (s.strip() for s in arg.split("=", 1))
        if key == "theta":
            kwargs["theta"] = float(value)
        elif key in ("innov", "innovation"):
            name, inner = _call(value)
            kwargs["innovation"] = name
            if inner:
                kwargs["innovation_df"] = float(inner[0])
        elif key == "burn_in":
            kwargs["burn_in"] = int(value)
        else:
            raise BadProcessSpec(f"unknown process argument {key!r}")
    for stage in stages[1:]:
        name, inner = _call(stage)
        if name != "subordinate" or len(inner) != 1:
            raise BadProcessSpec(f"unknown transform {stage!r}")
        kwargs["subordination"] = parse_marginal(inner[0])
    return ProcessSpec(**kwargs)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(_seed_sequence(seed)))


def innovations(spec: ProcessSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    kind = spec.innovation
    if kind == "gaussian":
        return rng.standard_normal(size)
    if kind == "lognormal":
        return np.exp(rng.standard_normal(size)) - math.exp(0.5)
    if kind == "chi2":
        return rng.chisquare(1.0, size)
    if kind == "exp":
        return rng.exponential(1.0, size)
    if kind == "student_t":
        return rng.standard_t(spec.innovation_df, size)
    return rng.standard_cauchy(size)


def subordinate(series, marginal: Marginal, mu: float = 0.0, sigma: float = 1.0) -> np.ndarray:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if isinstance(marginal, str):
        marginal = parse_marginal(marginal)
    z = (np.asarray(series, dtype=float) - mu) / sigma
    return marginal.from_standard_normal(z)


def generate(spec: ProcessSpec, n: int, seed: SeedLike | np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = _rng(seed)
    if spec.family == "ar1":
        eps = innovations(spec, n + spec.burn_in, rng)
        x = lfilter([1.0], [1.0, -spec.theta], eps)[spec.burn_in :]
    elif spec.family == "ma1":
        eps = innovations(spec, n + 1, rng)
        x = eps[1:] + spec.theta * eps[:-1]
    else:
        x = innovations(spec, n, rng)
    if spec.subordination is not None:
        mu, sd = spec.gaussian_moments
        x = subordinate(x, spec.subordination, mu, sd)
    return x


@dataclass
class PowerResult:
    rate: float
    p_values: list[float]
    statistics: list[float]
    rejects: list[bool]
    process: str
    partition: str
    n: int
    N: int
    alpha: float
    seed: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "process": self.process,
            "partition": self.partition,
            "n": self.n,
            "N": self.N,
            "alpha": self.alpha,
            "seed": self.seed,
            "rejection_rate": self.rate,
            "p_values": self.p_values,
            "statistics": self.statistics,
        }


def power_experiment(
    spec: ProcessSpec,
    partition: Partition,
    n: int,
    N: int,
    alpha: float = 0.05,
    seed: int = 42,
    config: TestConfig | None = None,
    threads: int = 1,
) -> PowerResult:
    """Rejection rate over ``N`` independent series of length ``n``.

    Replicate ``j`` draws its series from substream ``(seed, j, 0)`` and its
    Monte Carlo null from ``(seed, j, 1)``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    base = config or TestConfig()
    root = np.random.SeedSequence(int(seed))

    def one(j: int):
        x = generate(spec, n, np.random.SeedSequence(root.entropy, spawn_key=(j, 0)))
        cfg = replace(base, alpha=alpha, seed=np.random.SeedSequence(root.entropy, spawn_key=(j, 1)), threads=1)
        return run_test(x, partition.d, partition, cfg)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(one, range(N)))
    else:
        reports = [one(j) for j in range(N)]
    p_values = [r.p_value for r in reports]
    rejects = [r.reject for r in reports]
    return PowerResult(
        rate=float(np.mean(rejects)),
        p_values=p_values,
        statistics=[r.statistic for r in reports],
        rejects=rejects,
        process=str(spec),
        partition=partition.name,
        n=n,
        N=N,
        alpha=alpha,
        seed=int(seed),
    )
