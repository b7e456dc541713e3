import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordsym import estimators as est
from ordsym.errors import NotAProbabilityVector, ZeroGroupProbability
from ordsym.partitions import BUILDERS, custom_partition, gaussian_partition, singleton_partition
from ordsym.spectral import build_spectral_model, eigenpairs, helmert_block, operator_matrix


def counts_of(values, d):
    return est.PatternCounts(d, np.asarray(values, dtype=np.int64), int(np.sum(values)))


def random_symmetric_p(partition, rng):
    w = rng.uniform(0.05, 1.0, partition.m)
    means = w / np.sum(w * partition.sizes)
    return means, means[partition.group_index]


class TestSettingAVectors:
    def test_block_vectors(self):
        # uniform counts: every group mean is 1/6
        part = gaussian_partition(3)
        model = build_spectral_model(part, counts_of([10] * 6, 3))
        assert model.eigenvalues.tolist() == pytest.approx([-1 / 6] * 4)
        p1 = p2 = 1 / 6
        big = [1, 2, 3, 4]  # ids of the size-4 group, canonical order
        small = [0, 5]
        expected = {
            (tuple(big), 0): np.array([1, -1, 0, 0]) / np.sqrt(2 * p1),
            (tuple(big), 1): np.array([1, 1, -2, 0]) / np.sqrt(6 * p1),
            (tuple(big), 2): np.array([1, 1, 1, -3]) / np.sqrt(12 * p1),
            (tuple(small), 0): np.array([1, -1]) / np.sqrt(2 * p2),
        }
        g = model.eigenvectors
        cols = {}
        for k in range(model.t):
            owner = part.groups[model.owner[k]]
            cols.setdefault(owner, []).append(g[:, k])
        for (members, j), vec in expected.items():
            col = cols[members][j]
            assert np.allclose(col[list(members)], vec, atol=1e-15)
            others = [i for i in range(6) if i not in members]
            assert np.all(col[others] == 0)

    def test_c_hat_uniform(self):
        # c = sum_i p_i - S; for large uniform counts S -> 1/6 and c -> 1/6
        model = build_spectral_model(gaussian_partition(3), counts_of([10**6] * 6, 3))
        assert model.c_hat == pytest.approx(1 / 6, abs=1e-6)

    def test_c_hat_formula(self):
        c = counts_of([4, 1, 2, 3, 5, 6], 3)
        part = gaussian_partition(3)
        model = build_spectral_model(part, c)
        means = est.grouped_frequencies(c, part).group_means
        assert model.c_hat == pytest.approx(means.sum() - est.symbolic_correlation(c), abs=1e-15)

    def test_singleton_degenerate(self):
        model = build_spectral_model(singleton_partition(3), counts_of([1] * 6, 3))
        assert model.t == 0 and model.eigenvectors.shape == (6, 0)

    def test_zero_group(self):
        with pytest.raises(ZeroGroupProbability, match="merge"):
            build_spectral_model(gaussian_partition(3), counts_of([5, 0, 0, 0, 0, 5], 3))

    def test_unobserved_singleton_is_fine(self):
        part = custom_partition(3, "(1,2,3) (3,2,1)\n(1,3,2) (2,3,1)", complete_with_singletons=True)
        model = build_spectral_model(part, counts_of([3, 2, 0, 2, 0, 3], 3))
        assert model.t == 2


class TestOperator:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 4), st.sampled_from(["reversal", "reflection", "gaussian"]), st.integers(0, 2**32 - 1))
    def test_eigen_equation(self, d, name, seed):
        part = BUILDERS[name](d)
        means, p = random_symmetric_p(part, np.random.default_rng(seed))
        lam, g, _ = eigenpairs(part, means)
        m = operator_matrix(part, p)
        assert np.max(np.abs(m @ g - g * lam)) < 1e-10
        gram = g.T @ (g * p[:, None])
        assert np.max(np.abs(gram - np.eye(lam.size))) < 1e-10
        assert abs(lam.sum() - (means.sum() - 1.0)) < 1e-12
        assert np.max(np.abs(m.sum(axis=1))) < 1e-14
        assert np.max(np.abs(p @ g)) < 1e-12

    def test_rejects_bad_p(self):
        with pytest.raises(NotAProbabilityVector):
            operator_matrix(gaussian_partition(3), np.ones(6))

    def test_helmert_orthogonal(self):
        h = helmert_block(5, 1.0)
        assert np.allclose(h.T @ h, np.eye(4), atol=1e-15)
        assert np.allclose(h.sum(axis=0), 0.0, atol=1e-15)

    def test_to_dict(self):
        model = build_spectral_model(gaussian_partition(3), counts_of([1] * 6, 3))
        d = model.to_dict(with_vectors=True)
        assert d["t"] == 4 and len(d["eigenvectors"]) == 4 and len(d["eigenvectors"][0]) == 6
