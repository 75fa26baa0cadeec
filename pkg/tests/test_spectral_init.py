import math

import numpy as np
import pytest

from robust_phase import datagen
from robust_phase.domain import (
    ConfigurationError,
    CorruptionPlan,
    LargeOutlier,
    MeasurementSet,
    NoiseModel,
    Signal,
    dist,
)
from robust_phase.seeds import derive_seed
from robust_phase.spectral_init import (
    InitConfig,
    M1_CONSTANT,
    estimate_norm,
    spectral_initialize,
    truncate,
)

SIGMA_RUP1 = 15.0**-0.25


def test_estimate_norm_noiseless():
    sig = Signal.random_direction(6, 2.0, seed=0)
    data = datagen.generate_clean(sig, NoiseModel.gaussian(0.0), 10_000, seed=1)
    assert estimate_norm(data.responses, 0.0) == pytest.approx(2.0, abs=0.05)


def test_estimate_norm_clamps_at_zero():
    assert estimate_norm(np.full(100, -1.0), 0.1) == 0.0


def test_estimate_norm_accuracy_under_corruption():
    # |norm_hat - ||x*||| <= ||x*||/27 in >= 90% of 50 trials at eps=0.05,
    # sigma = ||x*||^2 (so r_up = K4 = 15^(1/4) for Student-t noise)
    r_up = 15.0**0.25
    m1 = math.ceil(M1_CONSTANT * math.log(2.0 / 0.1) * (1.0 + r_up**2))
    ok = 0
    for t in range(50):
        sig = Signal.random_direction(10, 1.0, seed=derive_seed(81, t))
        data = datagen.generate_clean(sig, NoiseModel.student_t(1.0), m1, seed=derive_seed(83, t))
        data = datagen.corrupt(data, CorruptionPlan(0.05, LargeOutlier(100.0), derive_seed(87, t)))
        ok += abs(estimate_norm(data.responses, 0.05) - 1.0) <= 1.0 / 27.0
    assert ok >= 45


def test_truncate_extremes():
    sig = Signal.random_direction(4, 1.0, seed=2)
    data = datagen.generate_clean(sig, NoiseModel.gaussian(0.2), 500, seed=3)
    lifts = data.responses[:, None] * data.sensing
    pts, params = truncate(data, 1e12)
    assert np.array_equal(pts, lifts)
    assert params.bound_B >= params.tau**2
    pts0, _ = truncate(data, 1e-12)
    assert np.all(pts0 == 0.0)
    with pytest.raises(ConfigurationError):
        truncate(data, 0.0)


def test_truncate_zeroes_rows_keeps_m():
    sig = Signal.random_direction(4, 1.0, seed=4)
    data = datagen.generate_clean(sig, NoiseModel.student_t(0.5), 2_000, seed=5)
    lifts = data.responses[:, None] * data.sensing
    tau = float(np.quantile(np.linalg.norm(lifts, axis=1), 0.9))
    pts, _ = truncate(data, tau)
    assert pts.shape == lifts.shape
    norms = np.linalg.norm(pts, axis=1)
    assert np.all(norms <= tau + 1e-12)
    kept = norms > 0
    assert np.array_equal(pts[kept], lifts[kept])


def test_spectral_initialize_clean_noiseless():
    # sigma=0, eps=0, n=10 at the theorem-shaped m2: success >= 98% of 50
    # trials (the heavy sixth-order lift tails put the needed m2 well above
    # 1e4 at these constants; see the decisions ledger)
    n, ok = 10, 0
    cfg = InitConfig.from_rates(n, 0.0, delta=0.1, r_up=1.0)
    for t in range(50):
        sig = Signal.random_direction(n, 1.0, seed=derive_seed(91, t))
        d1 = datagen.generate_clean(sig, NoiseModel.gaussian(0.0), cfg.m1, derive_seed(93, t))
        d2 = datagen.generate_clean(sig, NoiseModel.gaussian(0.0), cfg.m2, derive_seed(95, t))
        est = spectral_initialize(d1, d2, cfg)
        ok += dist(est.x0, sig.x_star) <= sig.norm / 9.0
    assert ok >= 49


def test_spectral_initialize_corrupted_success_rate():
    # lighter flavor of the acceptance criterion at n=10, eps=0.05
    n, eps, ok = 10, 0.05, 0
    for t in range(25):
        sig = Signal.random_direction(n, 1.0, seed=derive_seed(97, t))
        noise = NoiseModel.student_t(SIGMA_RUP1)
        cfg = InitConfig.from_rates(n, eps, delta=0.1, r_up=1.0)
        plan = lambda s: CorruptionPlan(eps, LargeOutlier(100.0), s)
        d1 = datagen.corrupt(datagen.generate_clean(sig, noise, cfg.m1, derive_seed(99, t)),
                             plan(derive_seed(101, t)))
        d2 = datagen.corrupt(datagen.generate_clean(sig, noise, cfg.m2, derive_seed(103, t)),
                             plan(derive_seed(105, t)))
        est = spectral_initialize(d1, d2, cfg)
        ok += dist(est.x0, sig.x_star) <= sig.norm / 9.0
    assert ok >= 22


def test_degenerate_norm_returns_flagged_zero():
    sig = Signal.random_direction(5, 1.0, seed=6)
    d2 = datagen.generate_clean(sig, NoiseModel.gaussian(0.1), 1_000, seed=7)
    d1 = MeasurementSet(np.zeros((100, 5)), np.full(100, -2.0))
    est = spectral_initialize(d1, d2, InitConfig(1.0, 0.0, 0.1, 100, 1_000))
    assert est.degenerate
    assert np.all(est.x0 == 0.0)


def test_scale_equivariance():
    # x* -> 10 x* with y -> 100 y scales the initializer by 10
    sig = Signal.random_direction(6, 1.0, seed=8)
    d1 = datagen.generate_clean(sig, NoiseModel.gaussian(0.0), 2_000, seed=9)
    d2 = datagen.generate_clean(sig, NoiseModel.gaussian(0.0), 8_000, seed=10)
    cfg = InitConfig(1.0, 0.0, 0.1, 2_000, 8_000)
    base = spectral_initialize(d1, d2, cfg)
    scale = lambda d: MeasurementSet(d.sensing, 100.0 * d.responses)
    scaled = spectral_initialize(scale(d1), scale(d2), cfg)
    assert np.allclose(scaled.x0, 10.0 * base.x0, rtol=1e-9, atol=1e-12)
    assert scaled.norm_hat == pytest.approx(10.0 * base.norm_hat, rel=1e-12)


def test_eigengap_oracle_and_davis_kahan_pipeline():
    # lambda1 - lambda2 = 12 ||x*||^4 on clean data (n=5, MC within 5%), and
    # the exact top eigenvector of the truncated second moment satisfies the
    # eigenvector perturbation bound with the measured truncation gap
    n, m = 5, 400_000
    sig = Signal.random_direction(n, 1.0, seed=11)
    data = datagen.generate_clean(sig, NoiseModel.student_t(SIGMA_RUP1), m, seed=12)
    lifts = data.responses[:, None] * data.sensing
    emp = lifts.T @ lifts / m
    evals = np.linalg.eigvalsh(emp)
    assert evals[-1] - evals[-2] == pytest.approx(12.0, rel=0.05)

    cfg = InitConfig(1.0, 0.0, 0.1, 8, 8)
    tau = cfg.tau_constant * math.sqrt(n) * 2.0
    pts, _ = truncate(data, tau, r_up=1.0, norm_hat=1.0)
    trunc_emp = pts.T @ pts / m
    gap_op = np.linalg.norm(emp - trunc_emp, 2)
    u = np.linalg.eigh(trunc_emp)[1][:, -1]
    xhat = sig.x_star / sig.norm
    d = min(np.linalg.norm(u - xhat), np.linalg.norm(u + xhat))
    # sampling noise enters both sides; allow a small additive envelope
    assert d <= 2.0 * math.sqrt(2.0) * (gap_op + 0.2) / 12.0 + 0.05
