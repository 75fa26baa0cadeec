import numpy as np
import pytest

from robust_phase.domain import (
    ConfigurationError,
    CorruptionPlan,
    DimensionError,
    GDConfig,
    MeasurementSet,
    NoiseModel,
    Signal,
    SymmetrizedSet,
    TruncationParams,
    dist,
    weight_cap,
)


def test_dist_identity_and_sign():
    x = np.array([1.0, -2.0, 0.5])
    assert dist(x, x) == 0.0
    assert dist(-x, x) == 0.0


def test_dist_orthogonal_pair():
    # both sign choices give sqrt(2)
    assert dist(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(np.sqrt(2.0))


def test_dist_dimension_mismatch():
    with pytest.raises(DimensionError):
        dist(np.ones(3), np.ones(4))


def test_dist_sign_symmetry_and_triangle():
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = rng.standard_normal(5)
        y = rng.standard_normal(5)
        assert dist(x, y) == pytest.approx(dist(-x, y))
        assert dist(x, y) <= np.linalg.norm(x - y) + 1e-12


def test_signal_caches_norm():
    sig = Signal(np.array([3.0, 4.0]))
    assert sig.n == 2
    assert sig.norm == pytest.approx(5.0, rel=1e-12)
    with pytest.raises(DimensionError):
        Signal(np.ones((2, 2)))


def test_noise_model_fourth_moment_dominates_variance():
    for maker in (NoiseModel.gaussian, NoiseModel.student_t, NoiseModel.rademacher_mixture):
        nm = maker(0.7)
        assert nm.k4 >= nm.sigma
    with pytest.raises(ConfigurationError):
        NoiseModel(kind=NoiseModel.gaussian(1.0).kind, sigma=1.0, k4=0.5)


def test_student_t_needs_dof_above_four():
    with pytest.raises(ConfigurationError):
        NoiseModel.student_t(1.0, dof=4.0)


def test_noise_moments_match_draws():
    # empirical second moments match sigma for every kind; fourth moments
    # are MC-checked only where they concentrate (the t(4.5) fourth moment
    # has infinite variance, so its k4 is validated by the closed form)
    rng = np.random.default_rng(7)
    for nm in (NoiseModel.gaussian(0.8), NoiseModel.student_t(0.8), NoiseModel.rademacher_mixture(0.8)):
        z = nm.draw_centered(rng, 400_000)
        assert np.mean(z**2) == pytest.approx(nm.sigma**2, rel=0.05)
    for nm in (NoiseModel.gaussian(0.8), NoiseModel.rademacher_mixture(0.8)):
        z = nm.draw_centered(rng, 400_000)
        assert np.mean(z**4) == pytest.approx(nm.k4**4, rel=0.1)
    assert NoiseModel.student_t(0.8).k4 == pytest.approx((3.0 * 2.5 / 0.5) ** 0.25 * 0.8)


def test_corruption_plan_rejects_breakdown_regime():
    with pytest.raises(ConfigurationError):
        CorruptionPlan(0.5)
    CorruptionPlan(0.49)  # boundary ok


def test_measurement_set_shape_checks():
    a = np.ones((5, 3))
    with pytest.raises(DimensionError):
        MeasurementSet(a, np.ones(4))
    ms = MeasurementSet(a, np.ones(5))
    assert ms.m == 5 and ms.n == 3
    assert not ms.corrupted_mask.any()


def test_symmetrized_set_consistency():
    with pytest.raises(DimensionError):
        SymmetrizedSet(np.ones((3, 2)), np.ones((4, 2)), np.ones(3))


def test_truncation_params_bounds():
    TruncationParams(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ConfigurationError):
        TruncationParams(2.0, 1.0, 3.9, 1.0)  # B < tau^2


def test_gd_config_validation():
    GDConfig(0, 1, None)
    with pytest.raises(ConfigurationError):
        GDConfig(1, 1, -0.5)
    with pytest.raises(ConfigurationError):
        GDConfig(1, 1, 0.1, delta=0.7)


def test_weight_cap():
    assert weight_cap(0.0, 10) == pytest.approx(0.1)
    assert weight_cap(0.2, 10) == pytest.approx(0.125)


def test_domain_types_are_immutable():
    sig = Signal(np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        sig.x_star[0] = 2.0
