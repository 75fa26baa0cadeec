"""Robust spectral initialization for non-zero-mean noise via symmetrization.

The paired-difference statistic v = <b,x*><c,x*> + noise is mean-free, so
the unknown noise mean never enters.  The norm cannot be read off a first
moment here (that route carries Theta(sqrt(n*eps)) error); instead the
initializer estimates E[v^2] = ||x*||^4 + sigma^2/2 robustly, truncates the
lift v*b, runs robust PCA for the direction AND the top eigenvalue
3||x*||^4 + sigma^2/2 of Cov(v b), and recovers the norm from
((lambda_hat - v2_hat)/2)^(1/4).

Corruption doubles under pairing: a symmetrized sample is bad if either
parent was, so every internal tolerance uses 2*eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import ConfigurationError, SizeError, SpectralEstimate, SymmetrizedSet
from .robust_mean import fence_keep
from .robust_pca import robust_top_eigen
from .spectral_init import V_CONSTANT

# Calibrated like the zero-mean radius: tau' = BD_TAU_CONSTANT * sqrt(n)
# * (r_up^2+1) * v_hat keeps the truncation gap under norm^4/54.
BD_TAU_CONSTANT = 14.0
BD_M1_CONSTANT = 150.0
BD_M2_CONSTANT = 6.0


@dataclass(frozen=True)
class BdInitConfig:
    """epsilon is the corruption fraction of the raw (pre-pairing) data."""

    r_up: float
    epsilon: float
    delta: float
    m1: int
    m2: int
    tau_constant: float = BD_TAU_CONSTANT
    v_constant: float = V_CONSTANT

    @staticmethod
    def from_rates(n: int, epsilon: float, delta: float = 0.1, r_up: float = 1.0,
                   m1_constant: float = BD_M1_CONSTANT, m2_constant: float = BD_M2_CONSTANT,
                   tau_constant: float = BD_TAU_CONSTANT) -> "BdInitConfig":
        """Symmetrized batch sizes; note the (r_up^2+1)^2 rate on m2."""
        r2 = 1.0 + r_up**2
        m1 = math.ceil(m1_constant * math.log(3.0 / delta) * r2)
        eps_eff = max(2.0 * epsilon, 0.02)
        m2 = math.ceil(m2_constant * n * r2**2 * math.log(3.0 * n / (delta * eps_eff)) / eps_eff)
        return BdInitConfig(r_up, epsilon, delta, m1, m2, tau_constant)


def estimate_second_moment(upsilon, epsilon: float) -> tuple[float, float]:
    """Robust (E[v^2])-hat and its clamped square root.

    The outlier fence is computed on v itself (symmetric, light anchor
    tails) and the kept values are squared afterwards: v^2 has median far
    below its mean, so any central fence on v^2 either passes everything
    or cuts the tail that carries the mean.
    """
    u = np.asarray(upsilon, float).ravel()
    if u.size < 8:
        raise SizeError(f"need at least 8 values, got {u.size}")
    if not 0.0 <= epsilon < 1.0 / 3.0:
        raise ConfigurationError(f"epsilon={epsilon} outside [0, 1/3)")
    kept = u[fence_keep(u)]
    v2 = max(0.0, float(np.mean(kept**2)))
    return v2, math.sqrt(v2)


def bd_spectral_initialize(sym: SymmetrizedSet, config: BdInitConfig,
                           sym_norm: SymmetrizedSet | None = None) -> SpectralEstimate:
    """Initializer from a symmetrized batch.

    sym_norm, when given, supplies the fresh batch for the E[v^2] estimate
    (the four-batch layout); otherwise sym is reused for both steps.
    """
    eps2 = 2.0 * config.epsilon
    norm_batch = sym_norm if sym_norm is not None else sym
    v2_hat, v_hat = estimate_second_moment(norm_batch.upsilon, eps2)
    n = sym.n
    if v_hat == 0.0:
        u = np.zeros(n)
        u[0] = 1.0
        return SpectralEstimate(u, 0.0, 0.0, np.zeros(n), degenerate=True)
    tau = config.tau_constant * math.sqrt(n) * (config.r_up**2 + 1.0) * v_hat
    X = sym.upsilon[:, None] * sym.b
    X = np.where(np.linalg.norm(X, axis=1)[:, None] <= tau, X, 0.0)
    v_prime = config.v_constant * (config.r_up**2 + 1.0) * v2_hat
    pca = robust_top_eigen(X, eps2, config.delta, v_prime=v_prime)
    gap = (pca.lambda_hat - v2_hat) / 2.0
    degenerate = gap < 0.0
    norm_hat = max(0.0, gap) ** 0.25
    return SpectralEstimate(pca.u_hat, pca.lambda_hat, norm_hat, norm_hat * pca.u_hat,
                            degenerate=degenerate, warning=pca.warning)
