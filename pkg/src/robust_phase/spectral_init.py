"""Robust spectral initialization for zero-mean-noise phase retrieval.

Pipeline: robust norm estimate from a first batch of responses, norm-based
truncation of the lifted vectors y_i a_i, robust PCA on the truncated
lifts, then scaling of the recovered direction by the norm estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import ConfigurationError, MeasurementSet, SpectralEstimate, TruncationParams
from .robust_mean import robust_mean_1d
from .robust_pca import robust_top_eigen

# Truncation radius tau = TAU_CONSTANT * sqrt(n) * (r_up^2+1) * norm_hat^2,
# calibrated once (Student-t noise, r_up=1, n in {3,5}, m=2e6) so the
# operator-norm truncation gap stays below sqrt(2)*norm^4/9 with a ~2x
# margin.  Smaller constants leave heavy-tail mass outside the radius and
# blow the gap bound by orders of magnitude.
TAU_CONSTANT = 28.0
# Fourth-moment budget v' = V_CONSTANT * (r_up^2+1) * norm_hat^4 handed to
# the PCA filter; 1024 ~= 8 * sqrt(16380), the analytic worst-direction
# bound for the truncated lift.
V_CONSTANT = 1024.0
# Sample-size constants for the theorem-shaped batch formulas, calibrated
# so the desk-scale success criteria hold with margin (n=20, eps=0.05,
# Student-t noise at r_up=1).
M1_CONSTANT = 150.0
M2_CONSTANT = 5.0


@dataclass(frozen=True)
class InitConfig:
    r_up: float
    epsilon: float
    delta: float
    m1: int
    m2: int
    tau_constant: float = TAU_CONSTANT
    v_constant: float = V_CONSTANT

    @staticmethod
    def from_rates(n: int, epsilon: float, delta: float = 0.1, r_up: float = 1.0,
                   m1_constant: float = M1_CONSTANT, m2_constant: float = M2_CONSTANT,
                   tau_constant: float = TAU_CONSTANT) -> "InitConfig":
        """Batch sizes from the theorem-shaped formulas
        m1 = C*log(2/delta)*(1+r_up^2), m2 = C*n*(r_up^2+1)*log(2n/(delta*eps))/eps."""
        r2 = 1.0 + r_up**2
        m1 = math.ceil(m1_constant * math.log(2.0 / delta) * r2)
        eps_eff = max(epsilon, 0.02)  # the 1/eps rate stops helping below this
        m2 = math.ceil(m2_constant * n * r2 * math.log(2.0 * n / (delta * eps_eff)) / eps_eff)
        return InitConfig(r_up, epsilon, delta, m1, m2, tau_constant)


def estimate_norm(responses, epsilon: float) -> float:
    """sqrt of the clamped robust mean of y; E[y] = ||x*||^2."""
    est = robust_mean_1d(responses, epsilon).mean_hat
    return math.sqrt(max(0.0, est))


def truncate(data: MeasurementSet, tau: float, *, r_up: float = 1.0,
             norm_hat: float | None = None,
             v_constant: float = V_CONSTANT) -> tuple[np.ndarray, TruncationParams]:
    """Zero every lifted vector X_i = y_i a_i with ||X_i|| > tau.

    Zeroing rather than discarding keeps m fixed, so downstream corruption
    budgets are unchanged.  The returned params carry the support bound B
    and the fourth-moment budget v' certified by tau and the norm estimate.
    """
    if tau <= 0:
        raise ConfigurationError("tau must be positive")
    X = data.responses[:, None] * data.sensing
    keep = np.linalg.norm(X, axis=1) <= tau
    X = np.where(keep[:, None], X, 0.0)
    if norm_hat is None:
        bound_B = 2.0 * tau**2
        v_prime = tau**2
    else:
        bound_B = tau**2 + (16.0 + r_up**2) * norm_hat**4
        v_prime = v_constant * (r_up**2 + 1.0) * norm_hat**4
    return X, TruncationParams(tau, r_up, bound_B, v_prime)


def spectral_initialize(data_norm: MeasurementSet, data_pca: MeasurementSet,
                        config: InitConfig) -> SpectralEstimate:
    """Norm estimate -> truncation -> robust PCA -> scaled initializer."""
    n = data_pca.n
    norm_hat = estimate_norm(data_norm.responses, config.epsilon)
    if norm_hat == 0.0:
        u = np.zeros(n)
        u[0] = 1.0
        return SpectralEstimate(u, 0.0, 0.0, np.zeros(n), degenerate=True)
    tau = config.tau_constant * math.sqrt(n) * (config.r_up**2 + 1.0) * norm_hat**2
    points, params = truncate(data_pca, tau, r_up=config.r_up, norm_hat=norm_hat,
                              v_constant=config.v_constant)
    pca = robust_top_eigen(points, config.epsilon, config.delta,
                           v_prime=params.fourth_moment_v)
    x0 = norm_hat * pca.u_hat
    return SpectralEstimate(pca.u_hat, pca.lambda_hat, norm_hat, x0, warning=pca.warning)
