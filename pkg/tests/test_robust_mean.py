import numpy as np
import pytest

from robust_phase.domain import ConfigurationError, SizeError
from robust_phase.robust_mean import robust_mean_1d, robust_mean_nd
from robust_phase.seeds import derive_seed


def test_constant_vector_any_epsilon():
    for eps in (0.0, 0.1, 0.3):
        res = robust_mean_1d(np.full(100, 3.25), eps)
        assert res.mean_hat == 3.25
        assert res.kept_fraction == 1.0


def test_one_sided_huge_outliers():
    rng = np.random.default_rng(0)
    data = np.r_[rng.standard_normal(10_000), np.full(1_000, 1e6)]
    res = robust_mean_1d(data, 0.1)
    assert abs(res.mean_hat) <= 0.1  # oracle: clean mean is ~0
    assert res.kept_fraction == pytest.approx(10_000 / 11_000)


def test_clean_gaussian_clt_accuracy():
    rng = np.random.default_rng(1)
    data = rng.standard_normal(10_000) + 5.0
    res = robust_mean_1d(data, 0.0)
    assert abs(res.mean_hat - 5.0) <= 0.05  # 3/sqrt(m) envelope


def test_skewed_clean_mean_nearly_unbiased():
    # chi-square-shaped responses: the fence must not cut the mean-carrying tail
    rng = np.random.default_rng(2)
    y = rng.standard_normal(200_000) ** 2 + 0.4 * rng.standard_t(4.5, 200_000)
    res = robust_mean_1d(y, 0.05)
    assert res.mean_hat == pytest.approx(1.0, abs=0.02)


def test_1d_input_validation():
    with pytest.raises(SizeError):
        robust_mean_1d([], 0.1)
    with pytest.raises(SizeError):
        robust_mean_1d(np.ones(5), 0.1)
    with pytest.raises(ConfigurationError):
        robust_mean_1d(np.ones(10), 0.4)


def test_nd_clean_matches_sample_mean():
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((10_000, 10))
    res = robust_mean_nd(pts, 0.0)
    assert np.array_equal(res.mean_hat, pts.mean(axis=0))
    assert np.linalg.norm(res.mean_hat) <= 4.0 * np.sqrt(10 / 10_000)


def test_nd_single_point():
    p = np.array([[1.0, 2.0, 3.0]])
    res = robust_mean_nd(p, 0.0)
    assert np.array_equal(res.mean_hat, p[0])


def test_nd_far_cluster_removed():
    # eps*m points at distance 50 along e1: error <= C sqrt(eps) with C <= 3
    rng = np.random.default_rng(4)
    pts = rng.standard_normal((10_000, 10))
    pts[:1000] = 0.1 * rng.standard_normal((1000, 10))
    pts[:1000, 0] += 50.0
    res = robust_mean_nd(pts, 0.1)
    assert np.linalg.norm(res.mean_hat) <= 1.0


def test_nd_translation_equivariance():
    rng = np.random.default_rng(5)
    pts = rng.standard_normal((2_000, 6)) * rng.standard_t(5.0, 2_000)[:, None]
    shift = np.array([10.0, -3.0, 0.0, 2.5, 100.0, -7.0])
    a = robust_mean_nd(pts, 0.05).mean_hat
    b = robust_mean_nd(pts + shift, 0.05).mean_hat
    assert np.linalg.norm(b - (a + shift)) <= 1e-9


def test_nd_epsilon_range():
    pts = np.zeros((10, 2))
    with pytest.raises(ConfigurationError):
        robust_mean_nd(pts, 0.3)
    with pytest.raises(SizeError):
        robust_mean_nd(np.zeros((0, 2)), 0.1)


def test_nd_removal_budget():
    # outright removal (the fence) stays within 3 eps; clean data loses ~nothing
    rng = np.random.default_rng(6)
    clean = rng.standard_normal((20_000, 8))
    res = robust_mean_nd(clean, 0.1)
    assert not res.warning
    corrupted = clean.copy()
    corrupted[:2000] = 1e4
    res2 = robust_mean_nd(corrupted, 0.1)
    assert not res2.warning  # fence removed exactly the planted 10% <= 3 eps
    assert np.linalg.norm(res2.mean_hat - clean[2000:].mean(axis=0)) < 0.1


def test_nd_error_scaling_in_epsilon():
    # boundary-riding cluster on a heavy-tailed cloud: fitted exponent of
    # error vs eps in the sqrt-law band [0.35, 0.65]
    d, m = 10, 20_000
    eps_grid = [0.02, 0.05, 0.1]
    meds = []
    for eps in eps_grid:
        errs = []
        for t in range(20):
            rng = np.random.default_rng(derive_seed(21, t, int(eps * 1000)))
            pts = rng.standard_normal((m, d)) * rng.standard_t(4.5, m)[:, None]
            k = int(eps * m)
            level = np.quantile(np.abs(pts[:, 0]), 1.0 - 2.0 * eps)
            pts[:k] = 0.0
            pts[:k, 0] = level
            errs.append(np.linalg.norm(robust_mean_nd(pts, eps).mean_hat))
        meds.append(np.median(errs))
    slope = np.polyfit(np.log(eps_grid), np.log(meds), 1)[0]
    assert 0.35 <= slope <= 0.65
