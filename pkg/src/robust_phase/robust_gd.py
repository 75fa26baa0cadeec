"""Robust gradient descent refinement.

Each round evaluates per-sample gradients on a fresh batch, replaces their
average with a robust mean, and takes one step.  The loop is shared
between the phase-retrieval and the symmetrized (blind-deconvolution)
objectives; only the per-sample gradient differs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import (
    GDConfig,
    MeasurementSet,
    Signal,
    SizeError,
    SpectralEstimate,
    SymmetrizedSet,
    dist,
)
from .robust_mean import robust_mean_nd

DIVERGENCE_FACTOR = 10.0


@dataclass(frozen=True)
class GdTrace:
    iterates: tuple
    errors: tuple | None
    rounds_run: int
    warning: bool = False

    @property
    def x_final(self) -> np.ndarray:
        return self.iterates[-1]


def sample_gradient_pr(x, a, y: float) -> np.ndarray:
    """Gradient of (y - <a,x>^2)^2 / 4 at x: (<a,x>^2 - y) <a,x> a."""
    x = np.asarray(x, float)
    a = np.asarray(a, float)
    p = float(a @ x)
    return (p * p - y) * p * a


def sample_gradient_bd(x, b, c, upsilon: float) -> np.ndarray:
    """Gradient of (v - <b,x><c,x>)^2 / 2 at x."""
    x = np.asarray(x, float)
    b = np.asarray(b, float)
    c = np.asarray(c, float)
    pb = float(b @ x)
    pc = float(c @ x)
    return (pb * pc - upsilon) * (pc * b + pb * c)


def _batch_gradients_pr(x: np.ndarray, batch: MeasurementSet) -> np.ndarray:
    p = batch.sensing @ x
    return ((p * p - batch.responses) * p)[:, None] * batch.sensing


def _batch_gradients_bd(x: np.ndarray, batch: SymmetrizedSet) -> np.ndarray:
    pb = batch.b @ x
    pc = batch.c @ x
    r = pb * pc - batch.upsilon
    return r[:, None] * (pc[:, None] * batch.b + pb[:, None] * batch.c)


def default_step_size(norm_hat: float) -> float:
    """1 over the local smoothness constant 6*||x*||^2."""
    return 1.0 / (6.0 * max(norm_hat, 1e-12) ** 2)


def robust_descend(init: SpectralEstimate, batches, config: GDConfig, model: str = "pr",
                   epsilon: float = 0.0, signal: Signal | None = None) -> GdTrace:
    """Run P rounds of robustly averaged gradient steps from init.x0.

    batches must supply one fresh MeasurementSet ("pr") or SymmetrizedSet
    ("bd") per round; epsilon is the corruption fraction each batch may
    carry (already doubled by the caller for symmetrized data).  When the
    ground-truth signal is passed, the trace records dist(x_t, x*)/||x*||
    per iterate for diagnostics; the descent itself never reads it.
    """
    if model not in ("pr", "bd"):
        raise ValueError(f"model must be 'pr' or 'bd', got {model!r}")
    batches = list(batches)
    if len(batches) < config.rounds_P:
        raise SizeError(f"{len(batches)} batches supplied for {config.rounds_P} rounds")
    grad_fn = _batch_gradients_pr if model == "pr" else _batch_gradients_bd
    eta = config.step_size if config.step_size is not None else default_step_size(init.norm_hat)

    x = np.array(init.x0, float)
    iterates = [x.copy()]
    guard = DIVERGENCE_FACTOR * max(float(np.linalg.norm(x)), 1e-9)
    warning = False
    rounds = 0
    for t in range(config.rounds_P):
        grads = grad_fn(x, batches[t])
        g = robust_mean_nd(grads, epsilon, config.delta).mean_hat
        x = x - eta * g
        iterates.append(x.copy())
        rounds = t + 1
        if np.linalg.norm(x) > guard:
            warning = True
            break

    errors = None
    if signal is not None:
        errors = tuple(dist(xt, signal.x_star) / signal.norm for xt in iterates)
    return GdTrace(tuple(iterates), errors, rounds, warning)
