"""Oracle-backed property checks shared by the ``oracle-check`` command and the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal, stats

from . import bands, longrun, oracle
from .series import TimeSeries, autocov, demean, fourier_grid
from .spectral import coefficients, lag_window_estimate, lag_window_values, smoothed_target
from .windows import window, window_l2


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: object
    threshold: object

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: measured={_fmt(self.measured)} threshold={_fmt(self.threshold)}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def simulate_stationary_ar1(phi: float, T: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` exactly stationary Gaussian AR(1) paths with unit innovations."""
    x0 = rng.standard_normal(n) * math.sqrt(1.0 / (1.0 - phi**2))
    eps = rng.standard_normal((n, T))
    out, _ = signal.lfilter([1.0], [1.0, -phi], eps, axis=1, zi=(phi * x0)[:, None])
    return out


def check_parzen_l2(tol: float = 1e-10) -> CheckResult:
    err = abs(window_l2(window("parzen")) - 151 / 280)
    return CheckResult("parzen L2 norm equals 151/280", err <= tol, err, tol)


def check_sigma_banded_vs_full(n_cases: int = 20, seed: int = 11, tol: float = 1e-10) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        T = int(rng.integers(16, 129))
        M = int(rng.integers(1, min(12, T - 1) + 1))
        b = float(rng.uniform(0.3, 8.0))
        ts = TimeSeries(rng.standard_normal(T) * rng.uniform(0.5, 3.0))
        ac = autocov(ts, M)
        kern = longrun.CovKernel("gaussian", b)
        fast = longrun.sigma_hat(ts, ac, M, kern).sigma
        full = longrun.sigma_hat_full(ts, ac, M, kern)
        worst = max(worst, float(np.max(np.abs(fast - full)) / np.max(np.abs(full))))
    return CheckResult("banded sigma_hat vs full double sum (rel)", worst <= tol, worst, tol)


def check_isserlis_vs_brute(tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for phi in (0.0, 0.5, 0.8, -0.6):
        spec = oracle.LinearProcessSpec(ar=(phi,) if phi else ())
        for T in (8, 33, 64):
            gamma = oracle.autocovariances(spec, T + 8)
            for j1, j2 in [(0, 0), (0, 1), (1, 0), (3, 5), (7, 2)]:
                fast = oracle.isserlis_sigma(gamma, T, j1, j2)
                slow = oracle.isserlis_sigma_brute(gamma, T, j1, j2)
                worst = max(worst, abs(fast - slow) / max(1.0, abs(slow)))
    return CheckResult("isserlis_sigma vs O(T^2) brute force", worst <= tol, worst, tol)


def check_isserlis_vs_mc(T: int = 512, n: int = 100_000, phi: float = 0.8, seed: int = 5,
                         n_se: float = 3.0, chunk: int = 5000) -> CheckResult:
    """Compare the exact fourth-moment quantity with a Monte-Carlo average of products."""
    gamma = oracle.ar1_autocov(phi, 1.0, np.arange(T + 3))
    rng = np.random.default_rng(seed)
    pairs = [(0, 0), (0, 1), (1, 0), (1, 1)]
    sums = np.zeros(4)
    sq = np.zeros(4)
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        X = simulate_stationary_ar1(phi, T, m, rng)
        S = [(np.einsum("ij,ij->i", X[:, j:], X[:, : T - j]) - (T - j) * gamma[j]) / math.sqrt(T) for j in (0, 1)]
        prods = np.stack([S[a] * S[b] for a, b in pairs], axis=1)
        sums += prods.sum(axis=0)
        sq += (prods**2).sum(axis=0)
    mean = sums / n
    se = np.sqrt((sq / n - mean**2) / n)
    exact = np.array([oracle.isserlis_sigma(gamma, T, a, b) for a, b in pairs])
    z = np.abs(mean - exact) / se
    return CheckResult(f"isserlis_sigma vs MC ({n} reps), |z| per (j1,j2)", bool(np.all(z <= n_se)),
                       [float(v) for v in z], n_se)


def variance_trend(Ts=(512, 2048, 8192), phi: float = 0.8, window_name: str = "parzen"):
    spec = oracle.LinearProcessSpec(ar=(phi,))
    return [oracle.variance_approx_error(spec, T, math.ceil(T**0.2), window_name) for T in Ts]


def check_variance_trend(Ts=(512, 2048, 8192)) -> CheckResult:
    errs = variance_trend(Ts)
    ok = all(a > b for a, b in zip(errs, errs[1:]))
    return CheckResult(f"variance approximation sup error strictly decreasing over T={list(Ts)}", ok,
                       errs, "strictly decreasing")


def gaussian_approx_distance(T: int = 512, M: int = 14, n_sim: int = 5000, n_gauss: int = 100_000,
                             phi: float = 0.8, seed: int = 3, window_name: str = "parzen") -> float:
    """Kolmogorov distance between simulated and oracle-Gaussian max statistics."""
    spec = oracle.LinearProcessSpec(ar=(phi,))
    oc = oracle.true_multiplier_cov(spec, T, M, window_name)
    grid = fourier_grid(T)
    gamma = oracle.autocovariances(spec, T)
    ef = smoothed_target(gamma, M, T, window_name, grid).values
    rng = np.random.default_rng(seed)
    stat = []
    for start in range(0, n_sim, 1000):
        X = simulate_stationary_ar1(phi, T, min(1000, n_sim - start), rng)
        G = np.stack([np.einsum("ij,ij->i", X[:, j:], X[:, : T - j]) for j in range(M + 1)], axis=1) / T
        fh = lag_window_values(G, M, window_name, grid.frequencies)
        stat.append(np.max(np.abs(fh - ef), axis=1) * math.sqrt(T / M))
    stat = np.concatenate(stat)
    factor = bands.psd_factor(oc.C_unstd)
    gauss = bands.bootstrap_maxima(factor, n_gauss, seed + 1)
    return float(stats.ks_2samp(stat, gauss).statistic)


def check_gaussian_approx(tol: float = 0.10, **kw) -> CheckResult:
    d = gaussian_approx_distance(**kw)
    return CheckResult("Kolmogorov distance, simulated vs Gaussian max statistic", d <= tol, d, tol)


def sigma_consistency_trend(Ts=(256, 1024, 4096), reps: int = 30, phi: float = 0.8, seed: int = 17):
    """Median over replications of ``sup_{1<=j1,j2<=M} |sigma_hat - sigma_T|`` with ``b = T**0.3``."""
    rng = np.random.default_rng(seed)
    medians = []
    for T in Ts:
        M = math.ceil(T**0.2)
        gamma = oracle.ar1_autocov(phi, 1.0, np.arange(T + M + 2))
        exact = oracle.isserlis_sigma_matrix(gamma, T, M)
        kern = longrun.CovKernel("gaussian", T**0.3)
        errs = []
        for x in simulate_stationary_ar1(phi, T, reps, rng):
            ts = TimeSeries(x)
            est = longrun.sigma_hat(ts, autocov(ts, M), M, kern).sigma
            errs.append(float(np.max(np.abs(est[1:, 1:] - exact[1:, 1:]))))
        medians.append(float(np.median(errs)))
    return medians


def check_sigma_consistency(Ts=(256, 1024, 4096), reps: int = 30) -> CheckResult:
    med = sigma_consistency_trend(Ts, reps)
    ok = all(a > b for a, b in zip(med, med[1:]))
    return CheckResult(f"median sup |sigma_hat - sigma_T| strictly decreasing over T={list(Ts)}", ok,
                       med, "strictly decreasing")


def psd_contract(n_runs: int = 100, seed: int = 23, tol: float = 1e-8):
    """Pipeline runs on random small designs; returns per-run ``(min_eig / max_diag, clipped_mass)``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_runs):
        T = int(rng.integers(16, 257))
        M = int(rng.integers(1, min(20, T // 2) + 1))
        b = float(rng.uniform(0.5, 10.0))
        phi = float(rng.uniform(-0.9, 0.9))
        ts = demean(TimeSeries(simulate_stationary_ar1(phi, T, 1, rng)[0]))
        grid = fourier_grid(T)
        ac = autocov(ts, M)
        est = lag_window_estimate(ac, M, "parzen", grid)
        lrc = longrun.sigma_hat(ts, ac, M, longrun.CovKernel("gaussian", b))
        mc = longrun.multiplier_cov(est, coefficients(M, "parzen", grid), lrc)
        fac = bands.psd_factor(mc)
        out.append((fac.min_eig / mc.max_diag, fac.clipped_mass))
    return out


def check_psd_contract(n_runs: int = 100, tol: float = 1e-8) -> CheckResult:
    res = psd_contract(n_runs)
    worst = min(r for r, _ in res)
    mass = sum(m for _, m in res)
    return CheckResult(f"min eigenvalue / max diagonal over {n_runs} runs (clipped mass {mass:.3g})",
                       worst >= -tol, worst, -tol)


def run_all(quick: bool = False):
    """Run the oracle property suite; ``quick`` shrinks Monte-Carlo sizes."""
    if quick:
        return [
            check_parzen_l2(),
            check_sigma_banded_vs_full(n_cases=5),
            check_isserlis_vs_brute(),
            check_isserlis_vs_mc(n=20_000),
            check_variance_trend(),
            check_gaussian_approx(n_sim=1000, n_gauss=20_000, tol=0.15),
            check_sigma_consistency(reps=10),
            check_psd_contract(n_runs=20),
        ]
    return [
        check_parzen_l2(),
        check_sigma_banded_vs_full(),
        check_isserlis_vs_brute(),
        check_isserlis_vs_mc(),
        check_variance_trend(),
        check_gaussian_approx(),
        check_sigma_consistency(),
        check_psd_contract(),
    ]
