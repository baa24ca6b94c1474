"""Lag-window spectral density estimation with simultaneous confidence bands."""

__version__ = "0.1.0"

from .series import (  # noqa: E402
    AutocovSeq,
    ConfigError,
    FourierGrid,
    InvalidInputError,
    TimeSeries,
    autocov,
    demean,
    fourier_grid,
    read_series_csv,
)
from .windows import WindowSpec, window, window_l2  # noqa: E402
from .spectral import (  # noqa: E402
    CoefMatrix,
    SpectralEstimate,
    coefficients,
    lag_window_estimate,
    smoothed_target,
)
from .longrun import CovKernel, LongRunCov, MultiplierCov, multiplier_cov, sigma_hat  # noqa: E402
from .bands import (  # noqa: E402
    BandResult,
    BootstrapConfig,
    bootstrap_band,
    bootstrap_quantile,
    gumbel_band,
    psd_factor,
)
