"""Multiplier-bootstrap and Gumbel simultaneous confidence bands."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .longrun import MultiplierCov
from .series import ConfigError
from .spectral import SpectralEstimate


class NumericError(ArithmeticError):
    """Raised when a numerical step receives non-finite data."""


class UnstableQuantileWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 1000
    alpha: float = 0.1
    seed: int = 0
    eig_clip_tol: float = 1e-10

    def __post_init__(self):
        if self.B < 1:
            raise ConfigError(f"bootstrap replications must be >= 1, got {self.B}")
        check_alpha(self.alpha)


def check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


@dataclass(frozen=True)
class PsdFactor:
    """``F`` with ``F @ F.T`` approximating ``C``; zero-eigenvalue columns dropped."""

    F: np.ndarray
    min_eig: float
    clipped_mass: float
    n_clipped: int

    @property
    def dim(self) -> int:
        return self.F.shape[0]


@dataclass(frozen=True)
class BandResult:
    method: str
    freqs: np.ndarray
    f_hat: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    quantile: float
    alpha: float
    provenance: dict = field(default_factory=dict)

    def covers(self, target) -> bool:
        target = np.asarray(target, dtype=float)
        return bool(np.all((self.lower <= target) & (target <= self.upper)))

    @property
    def mean_length(self) -> float:
        return float(np.mean(self.upper - self.lower))


def psd_factor(C, tol: float = 1e-10) -> PsdFactor:
    """Eigen-factor a symmetric matrix, clipping eigenvalues below ``tol * max_eig`` to zero.

    ``clipped_mass`` is the total magnitude of negative eigenvalues removed.
    """
    C = C.C if isinstance(C, MultiplierCov) else np.asarray(C, dtype=float)
    if not np.all(np.isfinite(C)):
        raise NumericError("covariance matrix has non-finite entries")
    C = 0.5 * (C + C.T)
    evals, evecs = np.linalg.eigh(C)
    top = max(float(evals[-1]), 0.0) if evals.size else 0.0
    keep = evals > tol * top if top > 0 else np.zeros(evals.size, dtype=bool)
    negative = evals < 0
    F = evecs[:, keep] * np.sqrt(evals[keep])[None, :]
    return PsdFactor(
        F=F,
        min_eig=float(evals[0]) if evals.size else 0.0,
        clipped_mass=float(-evals[negative].sum()),
        n_clipped=int(np.sum(~keep)),
    )


def bootstrap_maxima(factor: PsdFactor, B: int, seed: int) -> np.ndarray:
    """Sorted ``max_k |xi_k|`` over ``B`` draws of ``xi = F z``, ``z`` standard normal.

    One Philox stream keyed by ``seed``; the draws do not depend on how the
    caller schedules work.
    """
    r = factor.F.shape[1]
    if r == 0:
        return np.zeros(B)
    rng = np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))
    Z = rng.standard_normal((B, r))
    xi = Z @ factor.F.T
    return np.sort(np.max(np.abs(xi), axis=1))


def empirical_quantile(sorted_maxima: np.ndarray, alpha: float) -> float:
    """Order statistic at rank ``ceil(B (1 - alpha))`` of pre-sorted values."""
    B = sorted_maxima.size
    rank = math.ceil(B * (1.0 - alpha) - 1e-9)
    rank = min(max(rank, 1), B)
    return float(sorted_maxima[rank - 1])


def bootstrap_quantile(factor: PsdFactor, cfg: BootstrapConfig):
    """Return ``(q_star, summary)`` for the max-abs Gaussian statistic."""
    if cfg.B < 20 / cfg.alpha:
        warnings.warn(
            f"B={cfg.B} is small for alpha={cfg.alpha}; quantile may be unstable",
            UnstableQuantileWarning,
            stacklevel=2,
        )
    maxima = bootstrap_maxima(factor, cfg.B, cfg.seed)
    q = empirical_quantile(maxima, cfg.alpha)
    summary = {"B": cfg.B, "mean_max": float(maxima.mean()), "max_max": float(maxima[-1])}
    return q, summary


def bootstrap_band(est: SpectralEstimate, q_star: float, alpha: float = float("nan"), provenance=None) -> BandResult:
    """Multiplicative band ``f_hat * (1 -/+ q_star * sqrt(M/T))``."""
    if q_star < 0:
        raise ValueError(f"q_star must be nonnegative, got {q_star}")
    half = q_star * math.sqrt(est.M / est.T)
    f = est.values
    lo = f * (1.0 - half)
    hi = f * (1.0 + half)
    return BandResult(
        method="bootstrap",
        freqs=est.freqs,
        f_hat=f,
        lower=np.minimum(lo, hi),
        upper=np.maximum(lo, hi),
        quantile=float(q_star),
        alpha=alpha,
        provenance=dict(provenance or {}),
    )


def coarse_grid(M: int) -> np.ndarray:
    """Frequencies ``s pi / M`` for ``s = 1..M``."""
    return np.arange(1, M + 1) * np.pi / M


def gumbel_quantile(p: float) -> float:
    """Quantile of the standard Gumbel law ``exp(-exp(-x))``."""
    return -math.log(-math.log(p))


def gumbel_centering(M: int) -> float:
    """``2 log M - log(pi log M)``."""
    if M < 2:
        raise ConfigError(f"Gumbel band needs M >= 2, got {M}")
    return 2.0 * math.log(M) - math.log(math.pi * math.log(M))


GUMBEL_CONVENTIONS = ("squared", "standard")


def gumbel_critical_value(alpha: float, convention: str = "squared") -> float:
    """Critical value added to the centering constant.

    ``squared`` is the quantile of ``exp(-exp(-x/2))``, the limit law of the
    maximum of the squared standardised deviations; ``standard`` plugs in the
    standard Gumbel quantile unchanged.
    """
    check_alpha(alpha)
    c = gumbel_quantile(1.0 - alpha)
    if convention == "squared":
        return 2.0 * c
    if convention == "standard":
        return c
    raise ConfigError(f"unknown Gumbel convention {convention!r}; valid: {', '.join(GUMBEL_CONVENTIONS)}")


def gumbel_halfwidth(f_hat, M: int, T: int, alpha: float, W2: float, convention: str = "squared") -> np.ndarray:
    radicand_factor = gumbel_critical_value(alpha, convention) + gumbel_centering(M)
    if radicand_factor < 0:
        raise ConfigError(f"negative Gumbel radicand (c + mu = {radicand_factor:.4g}) for M={M}, alpha={alpha}")
    f_hat = np.asarray(f_hat, dtype=float)
    return np.sqrt((M / T) * radicand_factor * f_hat**2 * W2)


def gumbel_band(est_coarse: SpectralEstimate, M: int, T: int, alpha: float, W2: float,
                convention: str = "squared", provenance=None) -> BandResult:
    """Additive band ``f_hat(lambda_s) +/- C(lambda_s)`` on the coarse grid ``s pi / M``."""
    if est_coarse.N != M:
        raise ValueError(f"coarse estimate must have M={M} frequencies, got {est_coarse.N}")
    half = gumbel_halfwidth(est_coarse.values, M, T, alpha, W2, convention)
    f = est_coarse.values
    return BandResult(
        method="gumbel",
        freqs=est_coarse.freqs,
        f_hat=f,
        lower=f - half,
        upper=f + half,
        quantile=float(np.mean(half)),
        alpha=alpha,
        provenance=dict(provenance or {}),
    )
