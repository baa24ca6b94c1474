"""Time-series container, de-meaning, sample autocovariances and the Fourier grid."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class InvalidInputError(ValueError):
    """Raised for malformed or non-finite input data."""


class ConfigError(ValueError):
    """Raised for invalid configuration values (names, bandwidths, alphas)."""


@dataclass(frozen=True)
class TimeSeries:
    values: np.ndarray
    centered: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise InvalidInputError("time series must be one-dimensional")
        if v.size < 2:
            raise InvalidInputError(f"time series needs at least 2 values, got {v.size}")
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise InvalidInputError(f"non-finite value at position {bad}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class AutocovSeq:
    gamma: np.ndarray
    T: int
    centered_estimator: bool = False

    @property
    def max_lag(self) -> int:
        return self.gamma.size - 1


@dataclass(frozen=True)
class FourierGrid:
    T: int
    frequencies: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.frequencies.size


def as_series(x) -> TimeSeries:
    return x if isinstance(x, TimeSeries) else TimeSeries(np.asarray(x, dtype=float))


def demean(series) -> TimeSeries:
    """Subtract the sample mean. Idempotent on already-centred series."""
    series = as_series(series)
    if series.centered:
        return series
    v = series.values
    return TimeSeries(v - v.mean(), centered=True)


def autocov(series, max_lag: int, *, method: str = "auto") -> AutocovSeq:
    """Sample autocovariances with divisor ``T``.

    ``gamma[j] = (1/T) sum_{t=j+1}^{T} v_t v_{t-j}`` for ``j = 0..max_lag``,
    where ``v`` are the stored values (de-mean first for the centred version).

    Parameters
    ----------
    series : TimeSeries or array-like
    max_lag : int
        Largest lag, ``0 <= max_lag < T``.
    method : {"auto", "direct", "fft"}
        ``auto`` picks the FFT path when ``T * (max_lag + 1)`` is large.
    """
    series = as_series(series)
    v = series.values
    T = v.size
    if not 0 <= max_lag < T:
        raise IndexError(f"max_lag must satisfy 0 <= max_lag < T={T}, got {max_lag}")
    if method == "auto":
        method = "fft" if T * (max_lag + 1) > 200_000 else "direct"
    if method == "direct":
        gamma = np.array([v[j:] @ v[: T - j] for j in range(max_lag + 1)]) / T
    elif method == "fft":
        n = 1 << int(np.ceil(np.log2(2 * T)))
        spec = np.fft.rfft(v, n)
        gamma = np.fft.irfft(spec * spec.conj(), n)[: max_lag + 1] / T
    else:
        raise ConfigError(f"unknown autocovariance method {method!r}")
    return AutocovSeq(gamma=gamma, T=T, centered_estimator=series.centered)


def fourier_grid(T: int) -> FourierGrid:
    """Positive Fourier frequencies ``2 pi k / T`` for ``k = 1..floor(T/2)``."""
    if T < 2:
        raise IndexError(f"T must be at least 2, got {T}")
    k = np.arange(1, T // 2 + 1)
    return FourierGrid(T=T, frequencies=2 * np.pi * k / T)


def read_series_csv(path) -> TimeSeries:
    """Read a single-column CSV (optional header line) into a TimeSeries.

    Parse failures report the 1-based row number.
    """
    values = []
    with open(Path(path), newline="") as fh:
        for row_no, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 1:
                raise InvalidInputError(f"row {row_no}: expected one column, got {len(row)}")
            cell = row[0].strip()
            try:
                value = float(cell)
            except ValueError:
                if row_no == 1 and not values:
                    continue  # header
                raise InvalidInputError(f"row {row_no}: cannot parse {cell!r} as a number") from None
            if not np.isfinite(value):
                raise InvalidInputError(f"row {row_no}: non-finite value {cell!r}")
            values.append(value)
    return TimeSeries(np.array(values))
