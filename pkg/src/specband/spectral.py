"""Lag-window spectral density estimator, its linear coefficients and exact expectation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import AutocovSeq, FourierGrid, fourier_grid
from .windows import WindowSpec, window as get_window


@dataclass(frozen=True)
class SpectralEstimate:
    values: np.ndarray
    freqs: np.ndarray
    T: int
    M: int
    window: str

    @property
    def N(self) -> int:
        return self.values.size

    @property
    def has_negative(self) -> bool:
        return bool(np.min(self.values) < 0)


@dataclass(frozen=True)
class CoefMatrix:
    """Weights ``a[k, j]`` so that ``f_hat(lambda_k) = sqrt(M) * sum_j a[k, j] gamma_hat(j)``."""

    a: np.ndarray
    M: int

    @property
    def shape(self):
        return self.a.shape


def _freqs(grid) -> np.ndarray:
    if isinstance(grid, FourierGrid):
        return grid.frequencies
    return np.atleast_1d(np.asarray(grid, dtype=float))


def _lag_weights(M: int, win: WindowSpec) -> np.ndarray:
    """``w(j/M)`` for ``j = 0..M``, with ``w(0) = 1`` pinned."""
    lw = win(np.arange(M + 1) / M)
    lw[0] = 1.0
    return lw


def _cosine_sum(weighted_gamma: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    # (1/2pi) [g0 + 2 sum_{j>=1} g_j cos(j lambda)]
    j = np.arange(1, weighted_gamma.size)
    c = np.cos(np.outer(freqs, j))
    return (weighted_gamma[0] + 2.0 * (c @ weighted_gamma[1:])) / (2.0 * np.pi)


def lag_window_values(gammas: np.ndarray, M: int, window="parzen", freqs=None) -> np.ndarray:
    """Row-wise estimator values for a stack of autocovariance vectors ``(n, >= M+1)``."""
    win = get_window(window)
    g = np.atleast_2d(np.asarray(gammas, dtype=float))[:, : M + 1] * _lag_weights(M, win)[None, :]
    c = np.cos(np.outer(np.arange(1, M + 1), _freqs(freqs)))
    return (g[:, :1] + 2.0 * (g[:, 1:] @ c)) / (2.0 * np.pi)


def lag_window_estimate(acov: AutocovSeq, M: int, window="parzen", grid=None) -> SpectralEstimate:
    """Evaluate the lag-window estimator.

    Parameters
    ----------
    acov : AutocovSeq
        Sample autocovariances covering lags ``0..M``.
    M : int
        Truncation lag, ``1 <= M < T``.
    window : str or WindowSpec
    grid : FourierGrid or array of frequencies, optional
        Defaults to the positive Fourier grid of length ``acov.T``.
    """
    win = get_window(window)
    T = acov.T
    if M >= T:
        raise IndexError(f"truncation lag M={M} must be smaller than T={T}")
    if M < 1:
        raise IndexError(f"truncation lag must be at least 1, got {M}")
    if acov.max_lag < M:
        raise IndexError(f"autocovariances cover lags up to {acov.max_lag} < M={M}")
    if grid is None:
        grid = fourier_grid(T)
    freqs = _freqs(grid)
    values = _cosine_sum(_lag_weights(M, win) * acov.gamma[: M + 1], freqs)
    return SpectralEstimate(values=values, freqs=freqs, T=T, M=M, window=win.name)


def coefficients(M: int, window="parzen", grid=None, T: int | None = None) -> CoefMatrix:
    """Coefficient matrix of shape ``(N, M + 1)``.

    ``a[k, 0] = 1 / (2 pi sqrt(M))`` and
    ``a[k, j] = w(j/M) cos(j lambda_k) / (pi sqrt(M))`` for ``j >= 1``.
    """
    if M < 1:
        raise IndexError(f"truncation lag must be at least 1, got {M}")
    win = get_window(window)
    if grid is None:
        if T is None:
            raise ValueError("either grid or T is required")
        grid = fourier_grid(T)
    freqs = _freqs(grid)
    j = np.arange(M + 1)
    a = _lag_weights(M, win)[None, :] * np.cos(np.outer(freqs, j)) / (np.pi * np.sqrt(M))
    a[:, 0] = 1.0 / (2.0 * np.pi * np.sqrt(M))
    return CoefMatrix(a=a, M=M)


def expected_sample_autocov(gamma: np.ndarray, T: int, max_lag: int, demeaned: bool = False) -> np.ndarray:
    """Exact expectation of the divisor-``T`` sample autocovariances.

    Without de-meaning this is ``(1 - j/T) gamma(j)``. With de-meaning the
    sample mean correction is included exactly, which needs ``gamma`` on
    lags ``0..T-1``.
    """
    gamma = np.asarray(gamma, dtype=float)
    j = np.arange(max_lag + 1)
    if not demeaned:
        return (1.0 - j / T) * gamma[: max_lag + 1]
    if gamma.size < T:
        raise IndexError(f"de-meaned expectation needs gamma on lags 0..{T - 1}")
    g = gamma[:T]
    cum = np.cumsum(g)
    t = np.arange(1, T + 1)
    # T * E[X_t Xbar] = sum_{s} gamma(|t-s|)
    m = (cum[t - 1] + cum[T - t] - g[0]) / T
    var_mean = m.sum() / T
    cm = np.concatenate([[0.0], np.cumsum(m)])
    out = np.empty(max_lag + 1)
    for lag in j:
        # sum_{t=lag+1}^{T} m_t + sum_{t=1}^{T-lag} m_t
        cross = (cm[T] - cm[lag]) + cm[T - lag]
        out[lag] = ((T - lag) * (g[lag] + var_mean) - cross) / T
    return out


def smoothed_target(true_gamma, M: int, T: int, window="parzen", grid=None, demeaned: bool = False) -> SpectralEstimate:
    """``E f_hat`` for a process with known autocovariances ``true_gamma``.

    ``true_gamma`` may be an AutocovSeq or array indexed by lag.
    """
    win = get_window(window)
    gamma = true_gamma.gamma if isinstance(true_gamma, AutocovSeq) else np.asarray(true_gamma, float)
    if gamma.size < M + 1:
        raise IndexError(f"true autocovariances cover lags up to {gamma.size - 1} < M={M}")
    if grid is None:
        grid = fourier_grid(T)
    freqs = _freqs(grid)
    eg = expected_sample_autocov(gamma, T, M, demeaned=demeaned)
    values = _cosine_sum(_lag_weights(M, win) * eg, freqs)
    return SpectralEstimate(values=values, freqs=freqs, T=T, M=M, window=win.name)
