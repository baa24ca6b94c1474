"""End-to-end band construction for one observed series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bands, longrun
from .series import TimeSeries, autocov, demean as demean_series, fourier_grid
from .spectral import SpectralEstimate, coefficients, lag_window_estimate
from .windows import window as get_window


@dataclass(frozen=True)
class Diagnostics:
    min_eig: float
    max_diag: float
    clipped_mass: float
    n_clamped: int
    negative_estimates: bool


def estimate(series: TimeSeries, M: int, window="parzen", demean: bool = True) -> SpectralEstimate:
    if demean:
        series = demean_series(series)
    return lag_window_estimate(autocov(series, M), M, window, fourier_grid(series.T))


def bootstrap_band(series: TimeSeries, M: int, kernel: longrun.CovKernel, cfg: bands.BootstrapConfig,
                   window="parzen", demean: bool = True):
    """Estimate, assemble the multiplier covariance, draw the bootstrap quantile, build the band."""
    win = get_window(window)
    if demean:
        series = demean_series(series)
    grid = fourier_grid(series.T)
    acov = autocov(series, M)
    est = lag_window_estimate(acov, M, win, grid)
    lrc = longrun.sigma_hat(series, acov, M, kernel)
    mc = longrun.multiplier_cov(est, coefficients(M, win, grid), lrc)
    factor = bands.psd_factor(mc, cfg.eig_clip_tol)
    q, _ = bands.bootstrap_quantile(factor, cfg)
    prov = {"T": series.T, "M": M, "window": win.name, "bandwidth": kernel.bandwidth, "seed": cfg.seed}
    band = bands.bootstrap_band(est, q, cfg.alpha, prov)
    diag = Diagnostics(factor.min_eig, mc.max_diag, factor.clipped_mass, int(np.sum(mc.clamped)), est.has_negative)
    return band, diag


def gumbel_band(series: TimeSeries, M: int, alpha: float, window="parzen", demean: bool = True,
                convention: str = "squared"):
    win = get_window(window)
    if demean:
        series = demean_series(series)
    est = lag_window_estimate(autocov(series, M), M, win, bands.coarse_grid(M))
    prov = {"T": series.T, "M": M, "window": win.name}
    return bands.gumbel_band(est, M, series.T, alpha, float(win.closed_l2), convention, prov)
