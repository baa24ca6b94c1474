"""Kernel long-run covariance of lagged products and the multiplier covariance matrix."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .series import AutocovSeq, ConfigError, as_series
from .spectral import CoefMatrix, SpectralEstimate

DEFAULT_TRUNC_TOL = 1e-12
DIVISOR_FLOOR = 1e-8


class DivisorClampWarning(RuntimeWarning):
    """Some spectral estimates were non-positive and got clamped."""


@dataclass(frozen=True)
class CovKernel:
    """Weight ``K((t - s) / b)`` for the long-run covariance.

    ``scale`` stretches the kernel argument, ``K(x) = k0(x / scale)``, so the
    same bandwidth ``b`` can be matched to other parameterisations of the
    Gaussian kernel (``scale = 1/sqrt(2)`` gives ``exp(-x**2)``).
    """

    name: str
    bandwidth: float
    scale: float = 1.0

    def __post_init__(self):
        if self.name not in KERNEL_NAMES:
            raise ConfigError(f"unknown covariance kernel {self.name!r}; valid: {', '.join(KERNEL_NAMES)}")
        if not self.bandwidth > 0:
            raise ConfigError(f"bandwidth must be positive, got {self.bandwidth}")
        if not self.scale > 0:
            raise ConfigError(f"kernel scale must be positive, got {self.scale}")

    def __call__(self, x):
        x = np.abs(np.asarray(x, dtype=float)) / self.scale
        if self.name == "gaussian":
            return np.exp(-0.5 * x**2)
        return np.clip(1.0 - x, 0.0, None)

    def support(self, tol: float = DEFAULT_TRUNC_TOL) -> int:
        """Largest integer lag ``l`` with ``K(l / b) >= tol``."""
        if self.name == "gaussian":
            return int(math.floor(self.bandwidth * self.scale * math.sqrt(2.0 * math.log(1.0 / tol))))
        # triangular: K(l/b) > 0 iff l < b*scale
        return max(0, int(math.ceil(self.bandwidth * self.scale)) - 1)


# gaussian: Fourier transform is a Gaussian; triangular: Fejer kernel. Both nonnegative.
KERNEL_NAMES = ("gaussian", "triangular")


@dataclass(frozen=True)
class LongRunCov:
    sigma: np.ndarray
    T: int
    kernel: CovKernel
    lags_used: int

    @property
    def M(self) -> int:
        return self.sigma.shape[0] - 1


@dataclass(frozen=True)
class MultiplierCov:
    C: np.ndarray
    divisor: np.ndarray
    clamped: np.ndarray = field(repr=False)

    @cached_property
    def min_eig_before_clip(self) -> float:
        return float(np.linalg.eigvalsh(self.C)[0]) if self.C.size else 0.0

    @property
    def max_diag(self) -> float:
        return float(np.max(np.diag(self.C))) if self.C.size else 0.0


def centered_products(x: np.ndarray, gamma: np.ndarray, M: int) -> np.ndarray:
    """``Y[t-1, j] = x_t x_{t-j} - gamma[j]`` for ``t > j``, zero otherwise (1-based t)."""
    T = x.size
    Y = np.zeros((T, M + 1))
    for j in range(M + 1):
        Y[j:, j] = x[j:] * x[: T - j] - gamma[j]
    return Y


def sigma_hat(series, acov: AutocovSeq, M: int, kernel: CovKernel, trunc_tol: float = DEFAULT_TRUNC_TOL) -> LongRunCov:
    """Kernel-weighted long-run covariance of the centred lagged products.

    Lags ``|t - s|`` beyond the kernel's support at ``trunc_tol`` are dropped,
    so the cost is ``O(T * L * M**2)`` with ``L`` the retained band.
    """
    series = as_series(series)
    x = series.values
    T = x.size
    if M >= T:
        raise IndexError(f"truncation lag M={M} must be smaller than T={T}")
    if acov.max_lag < M:
        raise IndexError(f"autocovariances cover lags up to {acov.max_lag} < M={M}")
    Y = centered_products(x, acov.gamma, M)
    L = min(kernel.support(trunc_tol), T - 1)
    S = Y.T @ Y
    for lag in range(1, L + 1):
        k = float(kernel(lag / kernel.bandwidth))
        P = Y[lag:].T @ Y[: T - lag]
        S += k * (P + P.T)
    S /= T
    S = 0.5 * (S + S.T)
    return LongRunCov(sigma=S, T=T, kernel=kernel, lags_used=L)


def sigma_hat_full(series, acov: AutocovSeq, M: int, kernel: CovKernel) -> np.ndarray:
    """Untruncated double sum over ``(t, s)``; reference path for small ``T``."""
    x = as_series(series).values
    T = x.size
    Y = centered_products(x, acov.gamma, M)
    t = np.arange(T)
    K = kernel((t[:, None] - t[None, :]) / kernel.bandwidth)
    return Y.T @ K @ Y / T


def multiplier_cov(est: SpectralEstimate, coefs: CoefMatrix, lrc: LongRunCov) -> MultiplierCov:
    """Standardised covariance ``C = D A Sigma A^T D`` with ``D = diag(1 / f_hat)``.

    Non-positive estimates are clamped at ``1e-8 * max f_hat`` before
    division, with a DivisorClampWarning.
    """
    A = coefs.a
    if A.shape[0] != est.N:
        raise ValueError(f"coefficient rows {A.shape[0]} != number of frequencies {est.N}")
    if A.shape[1] != lrc.sigma.shape[0]:
        raise ValueError(f"coefficient columns {A.shape[1]} != long-run covariance size {lrc.sigma.shape[0]}")
    f = est.values
    top = float(np.max(np.abs(f))) if f.size else 0.0
    floor = DIVISOR_FLOOR * top if top > 0 else 1.0
    clamped = f < floor
    if np.any(clamped & (f <= 0)):
        warnings.warn(
            f"{int(np.sum(f <= 0))} non-positive spectral estimates clamped at {floor:.3g}",
            DivisorClampWarning,
            stacklevel=2,
        )
    divisor = np.maximum(f, floor)
    G = (A @ lrc.sigma) @ A.T
    d = 1.0 / divisor
    C = d[:, None] * G * d[None, :]
    C = 0.5 * (C + C.T)
    return MultiplierCov(C=C, divisor=divisor, clamped=clamped)
