"""Kernel (HAC) estimation of the long-run covariance of pattern indicators.

``omega = (1/n) sum_{s,l} I_s I_l^T k((l - s) / bandwidth)`` where ``I_t`` is the
one-hot indicator of the pattern of window ``t``.  By default the indicators
are demeaned with the in-sample frequencies first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.signal import fftconvolve

from .errors import BandwidthTooSmall, DimensionMismatch, TooFewWindows, UnknownKernel
from .spectral import SpectralModel

KERNELS = ("bartlett", "parzen", "quadratic-spectral")
_ALIASES = {"qs": "quadratic-spectral", "newey-west": "bartlett"}

# lag loop with exact pair counts up to this many lags; FFT beyond
_DIRECT_MAX_LAGS = 512
_CUTOFF = 1e-12


def kernel_name(name: str) -> str:
    key = name.lower()
    key = _ALIASES.get(key, key)
    if key not in KERNELS:
        raise UnknownKernel(f"unknown kernel {name!r}; choose from {', '.join(KERNELS)}")
    return key


def hac_kernel(name: str, x):
    """Evaluate a lag-window kernel; accepts scalars or arrays."""
    key = kernel_name(name)
    x = np.abs(np.asarray(x, dtype=float))
    if key == "bartlett":
        out = np.clip(1.0 - x, 0.0, None)
    elif key == "parzen":
        out = np.where(
            x <= 0.5,
            1.0 - 6.0 * x**2 + 6.0 * x**3,
            np.where(x <= 1.0, 2.0 * (1.0 - x) ** 3, 0.0),
        )
    else:
        z = 6.0 * np.pi * x / 5.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 3.0 / z**2 * (np.sin(z) / z - np.cos(z))
        # the closed form cancels badly near 0; use its Taylor series there
        z2 = z * z
        series = 1.0 - z2 / 10.0 + z2 * z2 / 280.0 - z2**3 / 15120.0
        out = np.where(z < 0.1, series, out)
    return float(out) if out.ndim == 0 else out


def default_bandwidth(n: int) -> float:
    """ceil(n^(1/3)): grows without bound while bandwidth/n -> 0."""
    return float(max(1, math.ceil(round(n ** (1.0 / 3.0), 12))))


def max_lag(name: str, bandwidth: float, n: int) -> int:
    key = kernel_name(name)
    if key in ("bartlett", "parzen"):
        reach = math.ceil(bandwidth) - 1 if float(bandwidth).is_integer() else math.floor(bandwidth)
    else:
        # |k(x)| <= 25/(12 pi^2 x^2) (1 + 5/(6 pi x)); solve envelope < cutoff
        c = 25.0 / (12.0 * np.pi**2)
        x = math.sqrt(c / _CUTOFF)
        x *= 1.0 + 5.0 / (6.0 * np.pi * x)
        reach = math.ceil(x * bandwidth)
    return int(max(0, min(n - 1, reach)))


@dataclass(frozen=True)
class LongRunCovariance:
    omega: np.ndarray
    kernel_name: str
    bandwidth: float
    n: int
    demeaned: bool = True


@dataclass(frozen=True)
class WCovariance:
    sigma: np.ndarray
    min_eig_raw: float
    sigma_raw: np.ndarray


def _lag_products(ids: np.ndarray, size: int, lag: int) -> np.ndarray:
    """sum_s I_s I_{s+lag}^T as exact integer counts."""
    pairs = ids[: ids.size - lag] * size + ids[lag:]
    return np.bincount(pairs, minlength=size * size).reshape(size, size).astype(float)


def estimate_omega_from_ids(
    ids: np.ndarray,
    d: int,
    kernel: str = "bartlett",
    bandwidth: float | None = None,
    demean: bool = True,
) -> LongRunCovariance:
    ids = np.asarray(ids, dtype=np.int64)
    n = int(ids.size)
    if n < 2:
        raise TooFewWindows(f"need at least 2 windows, got {n}")
    key = kernel_name(kernel)
    if bandwidth is None:
        bandwidth = default_bandwidth(n)
    bandwidth = float(bandwidth)
    if not bandwidth >= 1.0:
        raise BandwidthTooSmall(f"bandwidth must be >= 1, got {bandwidth}")
    size = factorial(d)
    counts = np.bincount(ids, minlength=size).astype(float)
    p = counts / n
    top = max_lag(key, bandwidth, n)
    weights = hac_kernel(key, np.arange(top + 1) / bandwidth)
    weights = np.where(np.abs(weights) < _CUTOFF, 0.0, weights)

    if top <= _DIRECT_MAX_LAGS:
        omega = np.zeros((size, size))
        for lag in range(top + 1):
            w = weights[lag]
            if w == 0.0:
                continue
            prod = _lag_products(ids, size, lag)
            if demean:
                head = np.bincount(ids[: n - lag], minlength=size).astype(float)
                tail = np.bincount(ids[lag:], minlength=size).astype(float)
                prod = prod - np.outer(head, p) - np.outer(p, tail) + (n - lag) * np.outer(p, p)
            if lag == 0:
                omega += w * prod
            else:
                omega += w * (prod + prod.T)
        omega /= n
    else:
        x = np.zeros((n, size))
        x[np.arange(n), ids] = 1.0
        if demean:
            x -= p
        window = np.concatenate([weights[:0:-1], weights])
        smoothed = fftconvolve(x, window[:, None], mode="same", axes=0)
        omega = x.T @ smoothed / n
    omega = 0.5 * (omega + omega.T)
    omega.setflags(write=False)
    return LongRunCovariance(omega, key, bandwidth, n, demean)


def estimate_omega(series, d: int, kernel: str = "bartlett", bandwidth: float | None = None, demean: bool = True) -> LongRunCovariance:
    from .patterns import pattern_sequence

    return estimate_omega_from_ids(pattern_sequence(series, d), d, kernel, bandwidth, demean)


def project_psd(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Clip negative eigenvalues to zero; also return the smallest raw eigenvalue."""
    if matrix.size == 0:
        return matrix.copy(), 0.0
    vals, vecs = np.linalg.eigh(matrix)
    clipped = (vecs * np.clip(vals, 0.0, None)) @ vecs.T
    return 0.5 * (clipped + clipped.T), float(vals.min())


def w_covariance(omega: LongRunCovariance, model: SpectralModel) -> WCovariance:
    """Covariance of the limiting Gaussian vector: g_i^T omega g_j, made PSD."""
    g = model.eigenvectors
    if omega.omega.shape != (g.shape[0], g.shape[0]):
        raise DimensionMismatch(
            f"omega is {omega.omega.shape} but eigenvectors have {g.shape[0]} rows"
        )
    raw = g.T @ omega.omega @ g
    raw = 0.5 * (raw + raw.T)
    sigma, min_eig = project_psd(raw)
    return WCovariance(sigma, min_eig, raw)
