"""Core value types shared by every estimator and the experiment harness.

All containers are frozen dataclasses over read-only numpy arrays, so they
can be shared freely across worker processes.  Estimators must only ever
read ``sensing`` / ``responses`` from a :class:`MeasurementSet`; the
``corrupted_mask`` exists for diagnostics and plots only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np


class ConfigurationError(ValueError):
    """A parameter is outside the range an estimator can operate in."""


class SizeError(ValueError):
    """A dataset is the wrong size or shape for the requested operation."""


class DimensionError(ValueError):
    """Vector/matrix dimensions do not match."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


def dist(x: np.ndarray, x_star: np.ndarray) -> float:
    """Sign-invariant recovery error min(||x - x*||, ||x + x*||)."""
    x = np.asarray(x, float)
    x_star = np.asarray(x_star, float)
    if x.shape != x_star.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {x_star.shape}")
    return float(min(np.linalg.norm(x - x_star), np.linalg.norm(x + x_star)))


@dataclass(frozen=True)
class Signal:
    """Ground-truth vector, its dimension and cached Euclidean norm."""

    x_star: np.ndarray
    n: int = field(init=False)
    norm: float = field(init=False)

    def __post_init__(self):
        x = _readonly(np.atleast_1d(self.x_star))
        if x.ndim != 1 or x.size < 1:
            raise DimensionError("x_star must be a nonempty 1-d vector")
        object.__setattr__(self, "x_star", x)
        object.__setattr__(self, "n", int(x.size))
        object.__setattr__(self, "norm", float(np.linalg.norm(x)))

    @staticmethod
    def random_direction(n: int, norm: float, seed: int) -> "Signal":
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(n)
        v *= norm / np.linalg.norm(v)
        return Signal(v)


class NoiseKind(enum.Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T = "student_t"
    SCALED_RADEMACHER_MIXTURE = "rademacher_mixture"


# Scaled Rademacher mixture: zeta = sigma * R * S with R uniform on {-1,+1}
# and S = _RADEMACHER_HI w.p. _RADEMACHER_P else _RADEMACHER_LO,
# normalized so E[S^2] = 1.
_RADEMACHER_P = 0.05
_RADEMACHER_HI = 4.0
_RADEMACHER_LO = math.sqrt((1.0 - _RADEMACHER_P * _RADEMACHER_HI**2) / (1.0 - _RADEMACHER_P))


@dataclass(frozen=True)
class NoiseModel:
    """Conditional noise law: mean mu, std sigma, fourth-moment scale k4.

    k4 is defined through E[zeta^4 | a] = k4^4, so Cauchy-Schwarz forces
    k4 >= sigma.  For Student-t the degrees of freedom must exceed 4 so
    that k4 is finite.
    """

    kind: NoiseKind
    sigma: float
    k4: float
    mu: float = 0.0
    dof: float | None = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ConfigurationError("sigma must be nonnegative")
        if self.k4 < self.sigma - 1e-12:
            raise ConfigurationError(f"k4={self.k4} < sigma={self.sigma} violates Cauchy-Schwarz")
        if self.kind is NoiseKind.STUDENT_T and (self.dof is None or self.dof <= 4):
            raise ConfigurationError("Student-t noise needs dof > 4 for a finite fourth moment")

    @staticmethod
    def gaussian(sigma: float, mu: float = 0.0) -> "NoiseModel":
        return NoiseModel(NoiseKind.GAUSSIAN, sigma, 3.0**0.25 * sigma, mu)

    @staticmethod
    def student_t(sigma: float, dof: float = 4.5, mu: float = 0.0) -> "NoiseModel":
        if dof <= 4:
            raise ConfigurationError("Student-t noise needs dof > 4 for a finite fourth moment")
        # variance-sigma^2 scaling of t_dof; kurtosis 3(dof-2)/(dof-4)
        k4 = (3.0 * (dof - 2.0) / (dof - 4.0)) ** 0.25 * sigma
        return NoiseModel(NoiseKind.STUDENT_T, sigma, k4, mu, dof=dof)

    @staticmethod
    def rademacher_mixture(sigma: float, mu: float = 0.0) -> "NoiseModel":
        s4 = _RADEMACHER_P * _RADEMACHER_HI**4 + (1 - _RADEMACHER_P) * _RADEMACHER_LO**4
        return NoiseModel(NoiseKind.SCALED_RADEMACHER_MIXTURE, sigma, s4**0.25 * sigma, mu)

    def draw_centered(self, rng: np.random.Generator, m: int) -> np.ndarray:
        """Draw m samples of zeta - mu (the mean is added separately)."""
        if self.kind is NoiseKind.GAUSSIAN:
            return self.sigma * rng.standard_normal(m)
        if self.kind is NoiseKind.STUDENT_T:
            scale = self.sigma * math.sqrt((self.dof - 2.0) / self.dof)
            return scale * rng.standard_t(self.dof, m)
        signs = rng.integers(0, 2, m) * 2.0 - 1.0
        hi = rng.random(m) < _RADEMACHER_P
        levels = np.where(hi, _RADEMACHER_HI, _RADEMACHER_LO)
        return self.sigma * signs * levels


# --- adversary strategies -------------------------------------------------
#
# The corruption model allows arbitrary modification of an eps-fraction of
# samples after inspecting the whole clean dataset.  No finite catalog is
# worst-case; these four strategies cover the regimes the experiments probe
# (mass outliers, spectral hijacking, filter-evading bias, constant bias).
# Custom strategies plug in by implementing corrupt_rows().


@dataclass(frozen=True)
class NoCorruption:
    pass


@dataclass(frozen=True)
class LargeOutlier:
    """Replace rows by isotropic junk of the given scale: ||a_i|| = scale, y_i = scale^2."""

    scale: float = 100.0


@dataclass(frozen=True)
class DirectionPlant:
    """Plant a spurious eigendirection: a_i = magnitude*v + small noise, y_i = magnitude^2."""

    direction: np.ndarray
    magnitude: float

    def __post_init__(self):
        d = np.asarray(self.direction, float)
        d = d / np.linalg.norm(d)
        object.__setattr__(self, "direction", _readonly(d))


@dataclass(frozen=True)
class SignAlignedResponse:
    """Shift responses by +-shift with sign(<a_i,d><a_i,e>), where d is the
    adversary's signal-direction estimate from the clean data and e is an
    orthogonal direction.

    The sign pattern is even in a_i, so the induced gradient bias points
    along e, the weakest-curvature direction of the recovery landscape,
    while the response mean stays untouched.  shift=None auto-sizes each
    corrupted sample so its gradient projection rides level_scale times
    the (1-2eps) quantile of the clean projections, the detection
    boundary of score-based filtering estimators.
    """

    shift: float | None = None
    level_scale: float = 1.0


@dataclass(frozen=True)
class MeanShift:
    """Add a constant to the corrupted responses."""

    shift: float


Strategy = NoCorruption | LargeOutlier | DirectionPlant | SignAlignedResponse | MeanShift


@dataclass(frozen=True)
class CorruptionPlan:
    """Fraction eps of samples handed to a strategy, seeded for reproducibility."""

    epsilon: float
    strategy: object = NoCorruption()
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 0.5:
            raise ConfigurationError(f"epsilon={self.epsilon} outside [0, 0.5) (breakdown regime)")


@dataclass(frozen=True)
class MeasurementSet:
    """Sensing rows a_i and responses y_i.

    corrupted_mask records which rows an adversary replaced.  It is
    diagnostic-only: estimators never read it (see tests for the taint
    check), so breakdown plots can be drawn without leaking oracle
    information into the estimation path.
    """

    sensing: np.ndarray
    responses: np.ndarray
    m: int = field(init=False)
    corrupted_mask: object = None

    def __post_init__(self):
        a = _readonly(np.atleast_2d(self.sensing))
        y = _readonly(np.atleast_1d(self.responses))
        if a.ndim != 2 or y.ndim != 1 or a.shape[0] != y.size:
            raise DimensionError(f"sensing {a.shape} inconsistent with responses {y.shape}")
        object.__setattr__(self, "sensing", a)
        object.__setattr__(self, "responses", y)
        object.__setattr__(self, "m", int(y.size))
        if self.corrupted_mask is None:
            mask = np.zeros(self.m, dtype=bool)
            mask.setflags(write=False)
            object.__setattr__(self, "corrupted_mask", mask)

    @property
    def n(self) -> int:
        return self.sensing.shape[1]

    def take(self, idx: np.ndarray) -> "MeasurementSet":
        mask = self.corrupted_mask
        sub_mask = mask[idx] if isinstance(mask, np.ndarray) else mask
        return MeasurementSet(self.sensing[idx], self.responses[idx], corrupted_mask=sub_mask)


@dataclass(frozen=True)
class SymmetrizedSet:
    """Paired-difference form (b_j, c_j, upsilon_j) that cancels any noise mean."""

    b: np.ndarray
    c: np.ndarray
    upsilon: np.ndarray
    m: int = field(init=False)

    def __post_init__(self):
        b = _readonly(np.atleast_2d(self.b))
        c = _readonly(np.atleast_2d(self.c))
        u = _readonly(np.atleast_1d(self.upsilon))
        if b.shape != c.shape or b.shape[0] != u.size:
            raise DimensionError("b, c, upsilon sizes inconsistent")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "upsilon", u)
        object.__setattr__(self, "m", int(u.size))

    @property
    def n(self) -> int:
        return self.b.shape[1]


@dataclass(frozen=True)
class SpectralEstimate:
    """Robust top-direction, eigenvalue, norm estimate and scaled initializer."""

    u_hat: np.ndarray
    lambda_hat: float
    norm_hat: float
    x0: np.ndarray
    degenerate: bool = False
    warning: bool = False

    def __post_init__(self):
        object.__setattr__(self, "u_hat", _readonly(self.u_hat))
        object.__setattr__(self, "x0", _readonly(self.x0))


@dataclass(frozen=True)
class TruncationParams:
    """Truncation radius tau plus the support/fourth-moment bounds it certifies."""

    tau: float
    r_up: float
    bound_B: float
    fourth_moment_v: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ConfigurationError("tau must be positive")
        if self.bound_B < self.tau**2:
            raise ConfigurationError("bound_B must be at least tau^2")


@dataclass(frozen=True)
class GDConfig:
    """Robust gradient descent: P rounds of batch size m_tilde with step eta.

    step_size=None means auto-tune to 1/(6*norm_hat^2), the reciprocal of
    the local smoothness constant, from the initializer's norm estimate.
    """

    rounds_P: int
    batch_m: int
    step_size: float | None = None
    delta: float = 0.05
    radius_check: bool = False

    def __post_init__(self):
        if self.rounds_P < 0:
            raise ConfigurationError("rounds_P must be nonnegative")
        if self.batch_m < 1:
            raise ConfigurationError("batch_m must be positive")
        if self.step_size is not None and self.step_size <= 0:
            raise ConfigurationError("step_size must be positive")
        if not 0.0 < self.delta < 0.5:
            raise ConfigurationError("delta must lie in (0, 0.5)")


@dataclass(frozen=True)
class StabilityReport:
    """Observed worst-case weighted second-moment deviation over the eps-slice."""

    gamma_observed: float
    epsilon: float
    worst_weights: np.ndarray
    sigma_ref: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "worst_weights", _readonly(self.worst_weights))
        object.__setattr__(self, "sigma_ref", _readonly(self.sigma_ref))


def weight_cap(epsilon: float, m: int) -> float:
    """Per-point cap 1/((1-eps) m) of the stability weight slice."""
    return 1.0 / ((1.0 - epsilon) * m)


__all__ = [
    "ConfigurationError",
    "SizeError",
    "DimensionError",
    "dist",
    "Signal",
    "NoiseKind",
    "NoiseModel",
    "NoCorruption",
    "LargeOutlier",
    "DirectionPlant",
    "SignAlignedResponse",
    "MeanShift",
    "CorruptionPlan",
    "MeasurementSet",
    "SymmetrizedSet",
    "SpectralEstimate",
    "TruncationParams",
    "GDConfig",
    "StabilityReport",
    "weight_cap",
    "replace",
]
