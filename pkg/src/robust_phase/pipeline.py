"""End-to-end solvers: robust spectral initialization followed by robust
gradient descent, for the zero-mean model ("pr") and the unknown-mean
model ("bd", symmetrized internally).  A naive baseline (plain mean,
plain PCA, plain-mean gradient steps) backs the breakdown comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import datagen
from .blind_deconv import BdInitConfig, bd_spectral_initialize
from .domain import GDConfig, MeasurementSet, Signal, SpectralEstimate, dist
from .robust_gd import GdTrace, default_step_size, robust_descend
from .robust_pca import power_iteration
from .spectral_init import InitConfig, spectral_initialize


@dataclass(frozen=True)
class PipelineReport:
    """Every intermediate quantity the analysis tracks, so failures localize."""

    norm_hat: float
    lambda_hat: float
    dist_init: float | None
    dist_final: float | None
    norm_err: float | None
    align_init: float | None
    rounds_run: int
    init_warning: bool
    gd_warning: bool
    degenerate: bool


def _report(init: SpectralEstimate, trace: GdTrace, signal: Signal | None) -> PipelineReport:
    d0 = df = nerr = align = None
    if signal is not None:
        d0 = dist(init.x0, signal.x_star)
        df = dist(trace.x_final, signal.x_star)
        nerr = abs(init.norm_hat - signal.norm)
        align = abs(float(init.u_hat @ signal.x_star)) / signal.norm
    return PipelineReport(init.norm_hat, init.lambda_hat, d0, df, nerr, align,
                          trace.rounds_run, init.warning, trace.warning, init.degenerate)


def _tuned(gd_cfg: GDConfig, init: SpectralEstimate) -> GDConfig:
    if gd_cfg.step_size is not None:
        return gd_cfg
    return replace(gd_cfg, step_size=default_step_size(init.norm_hat))


def solve_pr(data_norm: MeasurementSet, data_pca: MeasurementSet, gd_batches,
             init_cfg: InitConfig, gd_cfg: GDConfig,
             signal: Signal | None = None):
    """Zero-mean model: spectral init on two batches, then P rounds of
    robust gradient descent on fresh batches."""
    init = spectral_initialize(data_norm, data_pca, init_cfg)
    trace = robust_descend(init, gd_batches, _tuned(gd_cfg, init), model="pr",
                           epsilon=init_cfg.epsilon, signal=signal)
    return trace.x_final, trace, _report(init, trace, signal)


def solve_bd(data_norm: MeasurementSet, data_pca: MeasurementSet, gd_batches,
             init_cfg: BdInitConfig, gd_cfg: GDConfig,
             signal: Signal | None = None):
    """Unknown-mean model: symmetrize every batch, then initialize and
    descend on the paired-difference statistic (corruption budget 2*eps)."""
    sym_norm = datagen.symmetrize(data_norm)
    sym_pca = datagen.symmetrize(data_pca)
    init = bd_spectral_initialize(sym_pca, init_cfg, sym_norm=sym_norm)
    sym_batches = [datagen.symmetrize(b) for b in gd_batches]
    trace = robust_descend(init, sym_batches, _tuned(gd_cfg, init), model="bd",
                           epsilon=2.0 * init_cfg.epsilon, signal=signal)
    return trace.x_final, trace, _report(init, trace, signal)


def naive_initialize(data_norm: MeasurementSet, data_pca: MeasurementSet) -> SpectralEstimate:
    """Plain spectral init: mean of y for the norm, top eigenvector of
    (1/m) sum y_i a_i a_i^T for the direction.  No robustness anywhere."""
    norm_hat = float(np.sqrt(max(0.0, data_norm.responses.mean())))
    M = ((data_pca.responses[:, None] * data_pca.sensing).T @ data_pca.sensing) / data_pca.m
    lam, u = power_iteration(M)
    return SpectralEstimate(u, lam, norm_hat, norm_hat * u)


def naive_solve_pr(data_norm: MeasurementSet, data_pca: MeasurementSet, gd_batches,
                   gd_cfg: GDConfig, signal: Signal | None = None):
    """Plain mean + plain PCA + plain-mean gradient descent baseline."""
    init = naive_initialize(data_norm, data_pca)
    trace = robust_descend(init, gd_batches, _tuned(gd_cfg, init), model="pr",
                           epsilon=0.0, signal=signal)
    return trace.x_final, trace, _report(init, trace, signal)
