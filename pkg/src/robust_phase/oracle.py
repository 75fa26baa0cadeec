"""Closed-form moments, population risk, eigenvector perturbation bound and
Monte-Carlo moment checks used as independent oracles across the test
suites."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .domain import ConfigurationError, Signal


def pr_second_moment_matrix(signal: Signal, sigma: float) -> np.ndarray:
    """E[y^2 a a^T] = (3||x*||^4 + sigma^2) I + 12 ||x*||^2 x* x*^T.

    Top eigenvalue 15||x*||^4 + sigma^2 along x*; eigengap 12||x*||^4.
    """
    x = signal.x_star
    n4 = signal.norm**4
    return (3.0 * n4 + sigma**2) * np.eye(signal.n) + 12.0 * signal.norm**2 * np.outer(x, x)


def pr_lift_mean_matrix(signal: Signal) -> np.ndarray:
    """E[y a a^T] = ||x*||^2 I + 2 x* x*^T."""
    x = signal.x_star
    return signal.norm**2 * np.eye(signal.n) + 2.0 * np.outer(x, x)


def bd_covariance_matrix(signal: Signal, sigma: float) -> np.ndarray:
    """Cov(v b) = (||x*||^4 + sigma^2/2) I + 2 ||x*||^2 x* x*^T.

    Eigenvalues 3||x*||^4 + sigma^2/2 (top) and ||x*||^4 + sigma^2/2.
    """
    x = signal.x_star
    return (signal.norm**4 + sigma**2 / 2.0) * np.eye(signal.n) \
        + 2.0 * signal.norm**2 * np.outer(x, x)


def bd_population_risk(x, signal: Signal, sigma: float):
    """Population risk of the paired-difference objective with its gradient
    and Hessian:

        r(x) = (||x*||^4 + ||x||^4 - 2 <x,x*>^2 + sigma^2/2) / 2
        grad = 2 x ||x||^2 - 2 <x,x*> x*
        hess = 2 ||x||^2 I + 4 x x^T - 2 x* x*^T
    """
    x = np.asarray(x, float)
    xs = signal.x_star
    if x.shape != xs.shape:
        raise ConfigurationError(f"x has shape {x.shape}, signal is {xs.shape}")
    nx2 = float(x @ x)
    inner = float(x @ xs)
    value = 0.5 * (signal.norm**4 + nx2**2 - 2.0 * inner**2 + sigma**2 / 2.0)
    grad = 2.0 * nx2 * x - 2.0 * inner * xs
    hess = 2.0 * nx2 * np.eye(x.size) + 4.0 * np.outer(x, x) - 2.0 * np.outer(xs, xs)
    return value, grad, hess


class GapError(ValueError):
    """The targeted eigenvalue has no separation from the rest of the spectrum."""


def davis_kahan_bound(S: np.ndarray, T: np.ndarray, i: int) -> float:
    """2^(3/2) ||S - T||_op / gap_i(S), bounding min over signs of
    ||v_i(S) - theta v_i(T)||."""
    S = np.asarray(S, float)
    T = np.asarray(T, float)
    evals = np.sort(np.linalg.eigvalsh(S))[::-1]
    lam_i = evals[i]
    others = np.delete(evals, i)
    gap = float(np.min(np.abs(others - lam_i))) if others.size else 0.0
    if gap <= 0.0:
        raise GapError(f"eigenvalue {i} of S has zero gap")
    return 2.0**1.5 * float(np.linalg.norm(S - T, 2)) / gap


def double_factorial(k: int) -> int:
    """k!! for k >= -1, guarded to the range the moment lemma uses."""
    if k < -1 or k > 31:
        raise ConfigurationError(f"double factorial out of supported range: {k}")
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def gaussian_mixed_moment_bound(i: int, signal: Signal, v) -> float:
    """Analytic bound on E[(a^T x*)^i (v^T a)^4] for even i:

        (i+3)!! ||x*||^(i-4) (v^T x*)^4 + ||x*||^i (3(i-1)!! + 6(i+1)!!) ||v||^4

    For odd i the expectation is exactly zero.
    """
    if i < 2 or i % 2 != 0:
        raise ConfigurationError("bound is defined for even i >= 2")
    if i > 16:
        raise ConfigurationError("supported up to i = 16")
    v = np.asarray(v, float)
    inner = float(v @ signal.x_star)
    nv4 = float(v @ v) ** 2
    a = double_factorial(i + 3) * signal.norm ** (i - 4) * inner**4
    b = signal.norm**i * (3 * double_factorial(i - 1) + 6 * double_factorial(i + 1)) * nv4
    return a + b


class MomentCheck(NamedTuple):
    estimate: float
    bound: float
    stderr: float


def moment_bound_check(i: int, signal: Signal, v, samples: int, seed: int = 0) -> MomentCheck:
    """Monte-Carlo E[(a^T x*)^i (v^T a)^4] next to the analytic bound.

    Odd i returns bound 0.0; the estimate is then consistent with zero
    within a few stderr.
    """
    if i < 1:
        raise ConfigurationError("i must be positive")
    v = np.asarray(v, float)
    rng = np.random.default_rng(seed)
    vals = np.empty(samples)
    chunk = 1_000_000
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        a = rng.standard_normal((k, signal.n))
        vals[done : done + k] = (a @ signal.x_star) ** i * (a @ v) ** 4
        done += k
    est = float(vals.mean())
    stderr = float(vals.std(ddof=1)) / math.sqrt(samples)
    bound = 0.0 if i % 2 else gaussian_mixed_moment_bound(i, signal, v)
    return MomentCheck(est, bound, stderr)
