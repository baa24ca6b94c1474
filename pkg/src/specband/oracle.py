"""Exact second- and fourth-order quantities for Gaussian linear processes.

Everything here is computed from the true autocovariances, never from data,
so it can serve as an independent check on the estimators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .series import ConfigError, fourier_grid
from .spectral import coefficients
from .windows import window as get_window


class StationarityError(ValueError):
    pass


class UnsupportedOracleError(ValueError):
    pass


@dataclass(frozen=True)
class LinearProcessSpec:
    ar: tuple = ()
    ma: tuple = ()
    sigma2: float = 1.0
    gaussian: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(c) for c in self.ar))
        object.__setattr__(self, "ma", tuple(float(c) for c in self.ma))
        if not self.sigma2 > 0:
            raise ConfigError(f"innovation variance must be positive, got {self.sigma2}")
        if self.ar:
            # roots of 1 - phi_1 z - ... - phi_p z^p
            roots = np.roots(np.r_[-np.array(self.ar)[::-1], 1.0])
            if np.any(np.abs(roots) <= 1.0 + 1e-12):
                raise StationarityError(f"AR polynomial {self.ar} has a root on or inside the unit circle")


def ar1_autocov(phi: float, sigma2: float, j):
    if abs(phi) >= 1:
        raise StationarityError(f"|phi| must be < 1, got {phi}")
    j = np.abs(np.asarray(j))
    return sigma2 * phi**j / (1.0 - phi**2)


def psi_weights(spec: LinearProcessSpec, tol: float = 1e-18, max_terms: int = 1_000_000) -> np.ndarray:
    """MA(infinity) weights, truncated once the geometric tail is below ``tol``."""
    p, q = len(spec.ar), len(spec.ma)
    out = [1.0]
    small_run = 0
    n = 1
    while n < max_terms:
        v = spec.ma[n - 1] if n <= q else 0.0
        for i in range(1, min(p, n) + 1):
            v += spec.ar[i - 1] * out[n - i]
        out.append(v)
        small_run = small_run + 1 if abs(v) < tol else 0
        if n > q and small_run > max(p, 1) + 5:
            break
        n += 1
    return np.array(out)


def autocovariances(spec: LinearProcessSpec, max_lag: int) -> np.ndarray:
    """``gamma(0..max_lag)`` of the ARMA process."""
    if len(spec.ar) == 1 and not spec.ma:
        return ar1_autocov(spec.ar[0], spec.sigma2, np.arange(max_lag + 1))
    psi = psi_weights(spec)
    n = psi.size
    full = np.correlate(psi, psi, mode="full")[n - 1:] * spec.sigma2
    out = np.zeros(max_lag + 1)
    m = min(full.size, max_lag + 1)
    out[:m] = full[:m]
    return out


def ar_spectral_density(spec: LinearProcessSpec, lam):
    """``(sigma2 / 2 pi) |theta(e^{-i lam})|^2 / |phi(e^{-i lam})|^2``."""
    lam = np.asarray(lam, dtype=float)
    z = np.exp(-1j * lam)
    num = np.ones_like(z)
    for k, th in enumerate(spec.ma, start=1):
        num = num + th * z**k
    den = np.ones_like(z)
    for k, ph in enumerate(spec.ar, start=1):
        den = den - ph * z**k
    return spec.sigma2 / (2 * np.pi) * np.abs(num) ** 2 / np.abs(den) ** 2


def _sym(gamma: np.ndarray, h):
    return gamma[np.abs(h)]


def lagged_product_cov(gamma, ell, j1: int, j2: int):
    """Gaussian ``Cov(X_t X_{t-j1}, X_s X_{s-j2})`` at ``t - s = ell``."""
    gamma = np.asarray(gamma, dtype=float)
    ell = np.asarray(ell)
    return _sym(gamma, ell) * _sym(gamma, ell - j1 + j2) + _sym(gamma, ell + j2) * _sym(gamma, ell - j1)


def _require_gaussian(gamma_or_spec):
    if isinstance(gamma_or_spec, LinearProcessSpec) and not gamma_or_spec.gaussian:
        raise UnsupportedOracleError("fourth-moment oracle is exact only for Gaussian processes")


def isserlis_sigma(gamma, T: int, j1: int, j2: int) -> float:
    """Exact long-run covariance of lagged products for a Gaussian process.

    The double sum over ``(t, s)`` collapses to a single sum over
    ``ell = t - s`` weighted by the number of admissible pairs. ``gamma``
    must cover lags ``0..T + max(j1, j2)``.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.size < T + max(j1, j2) + 1:
        raise IndexError(f"gamma must cover lags 0..{T + max(j1, j2)}")
    ell = np.arange(-(T - 1), T)
    lo = np.maximum(j2 + 1, j1 + 1 - ell)
    hi = np.minimum(T, T - ell)
    count = np.clip(hi - lo + 1, 0, None)
    return float(count @ lagged_product_cov(gamma, ell, j1, j2) / T)


def isserlis_sigma_brute(gamma, T: int, j1: int, j2: int) -> float:
    """``O(T**2)`` double loop; reference for :func:`isserlis_sigma`."""
    gamma = np.asarray(gamma, dtype=float)
    total = 0.0
    for t in range(j1 + 1, T + 1):
        for s in range(j2 + 1, T + 1):
            total += float(lagged_product_cov(gamma, t - s, j1, j2))
    return total / T


def isserlis_sigma_matrix(gamma, T: int, M: int) -> np.ndarray:
    S = np.empty((M + 1, M + 1))
    for j1 in range(M + 1):
        for j2 in range(j1, M + 1):
            S[j1, j2] = S[j2, j1] = isserlis_sigma(gamma, T, j1, j2)
    return S


@dataclass(frozen=True)
class OracleCov:
    """Exact covariances for one ``(T, M, window)`` design.

    ``C_unstd`` is the covariance of ``sqrt(T/M) (f_hat - E f_hat)`` over the
    Fourier grid, ``C_true`` its standardisation by the true spectral density,
    and ``z_var`` the diagonal of ``C_unstd``.
    """

    sigma_true: np.ndarray
    C_unstd: np.ndarray
    C_true: np.ndarray
    f_true: np.ndarray
    freqs: np.ndarray = field(repr=False)

    @property
    def z_var(self) -> np.ndarray:
        return np.diag(self.C_unstd).copy()


def true_multiplier_cov(spec: LinearProcessSpec, T: int, M: int, window="parzen") -> OracleCov:
    _require_gaussian(spec)
    grid = fourier_grid(T)
    gamma = autocovariances(spec, T + M + 1)
    sigma = isserlis_sigma_matrix(gamma, T, M)
    A = coefficients(M, window, grid).a
    C_unstd = A @ sigma @ A.T
    C_unstd = 0.5 * (C_unstd + C_unstd.T)
    f = ar_spectral_density(spec, grid.frequencies)
    C_true = C_unstd / np.outer(f, f)
    return OracleCov(sigma_true=sigma, C_unstd=C_unstd, C_true=C_true, f_true=f, freqs=grid.frequencies)


def variance_approximation(f, freqs, M: int, window="parzen") -> np.ndarray:
    """``f**2 (1/M) sum_{|j|<=M} w(j/M)**2 (1 + cos(2 j lambda))``."""
    win = get_window(window)
    j = np.arange(-M, M + 1)
    w2 = win(j / M) ** 2
    freqs = np.asarray(freqs, dtype=float)
    s = (1.0 + np.cos(2.0 * np.outer(freqs, j))) @ w2 / M
    return np.asarray(f) ** 2 * s


def oracle_z_var(spec: LinearProcessSpec, T: int, M: int, window="parzen") -> np.ndarray:
    """Diagonal of ``C_unstd`` without forming the full ``N x N`` matrix."""
    _require_gaussian(spec)
    grid = fourier_grid(T)
    gamma = autocovariances(spec, T + M + 1)
    sigma = isserlis_sigma_matrix(gamma, T, M)
    A = coefficients(M, window, grid).a
    return np.einsum("kj,jl,kl->k", A, sigma, A)


def variance_approx_error(spec: LinearProcessSpec, T: int, M: int, window="parzen") -> float:
    """Sup over the Fourier grid of ``|Var - approximation|``."""
    freqs = fourier_grid(T).frequencies
    zv = oracle_z_var(spec, T, M, window)
    approx = variance_approximation(ar_spectral_density(spec, freqs), freqs, M, window)
    return float(np.max(np.abs(zv - approx)))
