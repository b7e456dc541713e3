"""Closed-form eigenpairs of the kernel operator and the centering constant.

Restricted to step functions on patterns, the integral operator of the kernel
``h`` acts as the matrix ``M[u, v] = h(u, v) p(v)``.  When ``p`` is constant
within each group it is block diagonal, and group ``i`` of size ``d_i``
contributes the eigenvalue ``-p_i`` with multiplicity ``d_i - 1``.  We use the
Helmert-type basis ``(e_1 + ... + e_j - j e_{j+1}) / sqrt(p_i j (j+1))`` on each
block, which is orthonormal in ``L^2(p)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import ZeroGroupProbability
from .estimators import (
    PatternCounts,
    _check,
    _probability_vector,
    grouped_frequencies,
    kernel_matrix,
    symbolic_correlation,
)
from .partitions import Partition


@dataclass(frozen=True)
class SpectralModel:
    partition: Partition
    eigenvalues: np.ndarray  # (t,)
    eigenvectors: np.ndarray  # (d!, t), columns indexed by pattern id
    c_hat: float
    p_hat: np.ndarray  # (m,) group means p(G_i)/|G_i|
    owner: np.ndarray  # (t,) group index of each eigenvector

    @property
    def t(self) -> int:
        return int(self.eigenvalues.size)

    def to_dict(self, with_vectors: bool = False) -> dict:
        out = {
            "t": self.t,
            "eigenvalues": self.eigenvalues.tolist(),
            "c_hat": self.c_hat,
            "p_hat": self.p_hat.tolist(),
        }
        if with_vectors:
            out["eigenvectors"] = self.eigenvectors.T.tolist()
        return out


def helmert_block(size: int, scale: float) -> np.ndarray:
    """``size x (size-1)`` matrix of the scaled Helmert contrasts."""
    out = np.zeros((size, size - 1))
    for j in range(1, size):
        out[:j, j - 1] = 1.0
        out[j, j - 1] = -float(j)
        out[:, j - 1] /= sqrt(scale * j * (j + 1))
    return out


def eigenpairs(partition: Partition, group_means: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues, eigenvectors and owning group for given group means p_i."""
    group_means = np.asarray(group_means, dtype=float)
    values, columns, owner = [], [], []
    for i, members in enumerate(partition.groups):
        k = len(members)
        if k < 2:
            continue
        p_i = float(group_means[i])
        if p_i <= 0.0:
            raise ZeroGroupProbability(
                f"group {i} ({k} patterns) was never observed, so its eigenvectors are undefined; "
                "use a longer series or merge this group with another"
            )
        block = helmert_block(k, p_i)
        full = np.zeros((partition.size, k - 1))
        full[list(members), :] = block
        columns.append(full)
        values += [-p_i] * (k - 1)
        owner += [i] * (k - 1)
    if columns:
        vectors = np.hstack(columns)
    else:
        vectors = np.zeros((partition.size, 0))
    return np.array(values, dtype=float), vectors, np.array(owner, dtype=np.int64)


def build_spectral_model(partition: Partition, counts: PatternCounts) -> SpectralModel:
    _check(counts, partition)
    freq = grouped_frequencies(counts, partition)
    p_hat = freq.group_means
    values, vectors, owner = eigenpairs(partition, p_hat)
    c_hat = float(np.sum(p_hat) - symbolic_correlation(counts))
    for arr in (values, vectors, p_hat, owner):
        arr.setflags(write=False)
    return SpectralModel(partition, values, vectors, c_hat, p_hat, owner)


def operator_matrix(partition: Partition, p) -> np.ndarray:
    """Matrix of the kernel integral operator on pattern step functions."""
    p = _probability_vector(p, partition.size)
    return kernel_matrix(partition) * p[None, :]
