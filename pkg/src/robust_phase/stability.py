"""Empirical probes of the weighted second-moment stability condition.

estimate_gamma lower-bounds

    sup_{w in S_eps^m} ||sum_i w_i X_i X_i^T - Sigma||_op / ||Sigma||_op

by a greedy direction-wise adversary: along each probe direction it pushes
the weights to the extreme feasible corner (cap 1/((1-eps)m) on the
largest or smallest squared projections).  The true supremum over all
weight functions is intractable; a certified lower bound is what the
open-question experiments need, since it can refute stability and can
only understate the evidence for it.
"""

from __future__ import annotations

import math

import numpy as np

from .domain import ConfigurationError, Signal, StabilityReport, weight_cap
from .oracle import pr_second_moment_matrix
from .seeds import derive_seed
from .spectral_init import InitConfig, truncate
from . import datagen

DEFAULT_DIRECTIONS = 16
_TOP_EIGVECS = 3


def _extreme_weights(scores: np.ndarray, epsilon: float, largest: bool) -> np.ndarray:
    """The S_eps^m corner maximizing (largest=True) or minimizing sum w_i s_i."""
    m = scores.size
    cap = weight_cap(epsilon, m)
    order = np.argsort(scores, kind="stable")
    if largest:
        order = order[::-1]
    n_full = int(math.floor(1.0 / cap))
    w = np.zeros(m)
    w[order[:n_full]] = cap
    rest = 1.0 - n_full * cap
    if rest > 0 and n_full < m:
        w[order[n_full]] = rest
    return w


def _op_norm_dev(points: np.ndarray, sigma_ref: np.ndarray) -> float:
    emp = points.T @ points / points.shape[0]
    return float(np.max(np.abs(np.linalg.eigvalsh(emp - sigma_ref))))


def estimate_gamma(points, sigma_ref, epsilon: float,
                   directions: int = DEFAULT_DIRECTIONS, seed: int = 0) -> StabilityReport:
    """Greedy lower bound on the worst relative weighted-second-moment
    deviation from sigma_ref over the eps weight slice."""
    X = np.atleast_2d(np.asarray(points, float))
    sigma_ref = np.asarray(sigma_ref, float)
    m, n = X.shape
    if not 0.0 <= epsilon < 0.5:
        raise ConfigurationError(f"epsilon={epsilon} outside [0, 0.5)")
    ref_op = float(np.linalg.norm(sigma_ref, 2))
    denom = ref_op if ref_op > 0.0 else 1.0

    uniform = np.full(m, 1.0 / m)
    base_dev = _op_norm_dev(X, sigma_ref) / denom
    if epsilon == 0.0:
        # S_0^m is the singleton uniform weight; report the exact deviation.
        return StabilityReport(base_dev, epsilon, uniform, sigma_ref)

    rng = np.random.default_rng(seed)
    emp = X.T @ X / m
    evals, evecs = np.linalg.eigh(emp)
    dirs = [evecs[:, -(k + 1)] for k in range(min(_TOP_EIGVECS, n))]
    while len(dirs) < directions:
        v = rng.standard_normal(n)
        dirs.append(v / np.linalg.norm(v))

    # the uniform weight is itself feasible, so gamma(eps) >= gamma(0)
    best = base_dev
    best_w = uniform
    for v in dirs:
        s = (X @ v) ** 2
        ref_v = float(v @ sigma_ref @ v)
        for largest in (True, False):
            w = _extreme_weights(s, epsilon, largest)
            dev = abs(float(w @ s) - ref_v) / denom
            if dev > best:
                best = dev
                best_w = w
    return StabilityReport(best, epsilon, best_w, sigma_ref)


def question1_sweep(n_grid, m_multipliers, trials: int, config: InitConfig,
                    sigma: float = 0.0, seed: int = 0,
                    directions: int = DEFAULT_DIRECTIONS) -> list[dict]:
    """Tabulate gamma quantiles of clean truncated lifted samples against
    the analytic second moment over an (n, m = mult*n*log n) grid.

    Exploration instrument only: stability of the truncated empirical
    distribution at near-linear sample sizes is an open question, so rows
    carry no pass/fail.
    """
    if len(list(n_grid)) == 0 or len(list(m_multipliers)) == 0:
        raise ConfigurationError("empty grid")
    from .domain import NoiseModel

    rows = []
    for n in n_grid:
        signal = Signal(np.r_[1.0, np.zeros(n - 1)])
        sigma_ref = pr_second_moment_matrix(signal, sigma)
        noise = NoiseModel.student_t(sigma) if sigma > 0 else NoiseModel.gaussian(0.0)
        tau = config.tau_constant * math.sqrt(n) * (config.r_up**2 + 1.0) * signal.norm**2
        for j, mult in enumerate(m_multipliers):
            m = max(int(round(mult * n * math.log(n))), n + 1)
            gammas = []
            for t in range(trials):
                s = derive_seed(seed, n, j, t)
                data = datagen.generate_clean(signal, noise, m, s)
                points, _ = truncate(data, tau, r_up=config.r_up, norm_hat=signal.norm)
                rep = estimate_gamma(points, sigma_ref, config.epsilon,
                                     directions=directions, seed=s)
                gammas.append(rep.gamma_observed)
            g = np.sort(gammas)
            rows.append({
                "n": int(n), "multiplier": float(mult), "m": int(m),
                "trials": int(trials),
                "gamma_q25": float(np.quantile(g, 0.25)),
                "gamma_median": float(np.quantile(g, 0.5)),
                "gamma_q75": float(np.quantile(g, 0.75)),
                "gamma_max": float(g[-1]),
            })
    return rows
