"""Robust top eigenvector/eigenvalue of a second-moment matrix from
eps-corrupted bounded samples.

robust_top_eigen filters on the rank-one lifts X_i X_i^T: points whose
squared projection onto the current principal direction deviates from the
weighted eigenvalue by more than the certified fourth-moment budget get
softly downweighted.  stability_top_eigen is the same loop with the
stopping rule parameterized by the stability margin gamma instead of the
fourth-moment budget.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .domain import ConfigurationError, SizeError

POWER_TOL = 1e-10
POWER_MAX_ITER = 1000
MASS_BUDGET_COEFF = 3.0
MASS_BUDGET_CAP = 0.45
MAX_ROUNDS = 30
EPS_CERTIFIED = 1.0 / 36.0  # contract regime; larger eps runs best-effort
EPS_MAX = 0.25


class PcaBackend(enum.Enum):
    FILTERING = "filtering"
    STABILITY_SAMPLE = "stability_sample"


@dataclass(frozen=True)
class PcaResult:
    u_hat: np.ndarray
    lambda_hat: float
    kept_fraction: float
    backend: PcaBackend
    warning: bool = False
    iterations: int = 0


def power_iteration(M: np.ndarray, tol: float = POWER_TOL,
                    max_iter: int = POWER_MAX_ITER) -> tuple[float, np.ndarray]:
    """Top eigenpair of a PSD matrix, deterministic start at the basis
    vector with the largest diagonal entry."""
    n = M.shape[0]
    x = np.zeros(n)
    x[int(np.argmax(np.diag(M)))] = 1.0
    lam = 0.0
    for _ in range(max_iter):
        y = M @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0, x
        y /= norm
        if y @ x < 0:
            y = -y
        done = np.linalg.norm(y - x) <= tol
        x = y
        lam = float(x @ M @ x)
        if done:
            break
    return lam, _canonical_sign(x)


def _canonical_sign(u: np.ndarray) -> np.ndarray:
    """Flip so the largest-magnitude coordinate is positive."""
    j = int(np.argmax(np.abs(u)))
    return -u if u[j] < 0 else u


def _weighted_quantile(values: np.ndarray, weights: np.ndarray, q: float) -> float:
    order = np.argsort(values, kind="stable")
    cw = np.cumsum(weights[order])
    pos = np.searchsorted(cw, q * cw[-1], side="left")
    pos = min(pos, values.size - 1)
    return float(values[order[pos]])


def _filter_loop(X: np.ndarray, epsilon: float, stop_fn, backend: PcaBackend) -> PcaResult:
    """Shared double-filtering loop over rank-one lifts.

    stop_fn(lam1, proj2, w, total) decides whether the weighted second
    moment is already explained by the clean model.  Rows that are
    identically zero (mass removed by truncation upstream) start with zero
    weight so they do not deflate the eigenvalue estimate.
    """
    m = X.shape[0]
    active = np.linalg.norm(X, axis=1) > 0.0
    if not active.any():
        u = np.zeros(X.shape[1])
        u[0] = 1.0
        return PcaResult(u, 0.0, 0.0, backend, warning=True)
    w = np.where(active, 1.0 / active.sum(), 0.0)
    budget = min(MASS_BUDGET_COEFF * epsilon, MASS_BUDGET_CAP)
    # too few rows to even check the stopping premise
    warning = bool(active.sum() < 2 * X.shape[1])
    it = 0
    lam1 = 0.0
    v1 = None
    for it in range(1, MAX_ROUNDS + 1):
        total = w.sum()
        M = (X.T * w) @ X / total
        lam1, v1 = power_iteration(M)
        if lam1 <= 0.0:
            break
        proj2 = (X @ v1) ** 2
        if stop_fn(lam1, proj2, w, total):
            break
        scores = (proj2 - lam1) ** 2
        q = _weighted_quantile(scores[active], w[active] / total, 1.0 - 2.0 * epsilon)
        over = active & (scores > q)
        if not over.any() or q <= 0.0:
            break
        # inverse-proportional soft downweight above the quantile
        factor = np.ones(m)
        factor[over] = q / scores[over]
        removal = float(w @ (1.0 - factor))
        removed_so_far = 1.0 - total
        if removed_so_far + removal > budget:
            frac = max(0.0, (budget - removed_so_far) / removal)
            w = w * (1.0 - frac * (1.0 - factor))
            warning = True
            break
        w = w * factor
    total = w.sum()
    M = (X.T * w) @ X / total
    lam1, v1 = power_iteration(M)
    return PcaResult(v1, lam1, float(total), backend, warning, it)


def robust_top_eigen(points, epsilon: float, delta: float = 0.05,
                     v_prime: float | None = None) -> PcaResult:
    """Filtering estimate of the top eigenpair of E[X X^T].

    v_prime is the caller's certified bound on the fourth-moment deviation
    sup_{|v|=1} E[(<v,X>^2 - v' Sigma v)^2]^(1/2); filtering stops once the
    weighted variance of the squared projections fits inside v_prime^2.
    The certified contract covers eps <= 1/36; larger eps (up to 0.25)
    runs best-effort with the same mechanics.
    """
    X = np.atleast_2d(np.asarray(points, float))
    if X.shape[0] == 0:
        raise SizeError("empty input")
    if not 0.0 <= epsilon <= EPS_MAX:
        raise ConfigurationError(f"epsilon={epsilon} outside [0, {EPS_MAX}]")
    if X.shape[0] == 1:
        norm = float(np.linalg.norm(X[0]))
        if norm == 0.0:
            u = np.zeros(X.shape[1])
            u[0] = 1.0
            return PcaResult(u, 0.0, 1.0, PcaBackend.FILTERING, warning=True)
        return PcaResult(_canonical_sign(X[0] / norm), norm**2, 1.0, PcaBackend.FILTERING)
    if epsilon == 0.0:
        M = X.T @ X / X.shape[0]
        lam, u = power_iteration(M)
        return PcaResult(u, lam, 1.0, PcaBackend.FILTERING)
    if v_prime is None:
        # fall back to the trivial support bound: proj^2 <= max row norm^2
        v_prime = float(np.max(np.linalg.norm(X, axis=1)) ** 2)
    v_prime2 = float(v_prime) ** 2

    def stop(lam1, proj2, w, total):
        var_w = float(w @ (proj2 - lam1) ** 2) / total
        return var_w <= v_prime2

    return _filter_loop(X, epsilon, stop, PcaBackend.FILTERING)


def stability_top_eigen(points, epsilon: float, gamma: float,
                        gamma0: float = 0.1) -> PcaResult:
    """Alternate backend with the stopping rule written in the stability
    margin gamma: stop once lam1 <= (1+gamma) * trimmed mean of the squared
    projections.  Requires 20*eps < gamma < gamma0."""
    X = np.atleast_2d(np.asarray(points, float))
    if X.shape[0] == 0:
        raise SizeError("empty input")
    if gamma <= 20.0 * epsilon:
        raise ConfigurationError(f"gamma={gamma} must exceed 20*eps={20 * epsilon}")
    if gamma >= gamma0:
        raise ConfigurationError(f"gamma={gamma} must be below gamma0={gamma0}")
    if epsilon == 0.0:
        M = X.T @ X / X.shape[0]
        lam, u = power_iteration(M)
        return PcaResult(u, lam, 1.0, PcaBackend.STABILITY_SAMPLE)

    def stop(lam1, proj2, w, total):
        trim = min(2.0 * epsilon, 0.24)
        hi = _weighted_quantile(proj2, w / total, 1.0 - trim)
        keep = proj2 <= hi
        denom = float(w[keep].sum())
        if denom <= 0.0:
            return True
        trimmed = float(w[keep] @ proj2[keep]) / denom
        return lam1 <= (1.0 + gamma) * trimmed

    return _filter_loop(X, epsilon, stop, PcaBackend.STABILITY_SAMPLE)
