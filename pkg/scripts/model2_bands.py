"""Averaged 90% and 95% bootstrap bands for Model II against the smoothed target.

Writes one CSV row per Fourier frequency: target, mean lower and upper limits.
"""

import numpy as np
from _common import emit, parser

from specband import bands, longrun
from specband.series import TimeSeries, autocov, demean, fourier_grid
from specband.sim import STREAM_BOOT, STREAM_DATA, ExperimentConfig, replication_seed, simulate_many, target_curve
from specband.spectral import coefficients, lag_window_estimate


def main():
    p = parser(__doc__)
    p.add_argument("--T", type=int, default=512)
    p.add_argument("--m-lag", type=int, default=14)
    p.add_argument("--bandwidth", type=float, default=10.0)
    args = p.parse_args()
    cfg = ExperimentConfig(model="II", T=args.T, M=args.m_lag, bandwidth=args.bandwidth, R=args.reps, seed=args.seed)
    grid = fourier_grid(cfg.T)
    coefs = coefficients(cfg.M, cfg.window, grid)
    kern = longrun.CovKernel(cfg.cov_kernel, cfg.bandwidth)
    target = target_curve(cfg)
    lo = {a: np.zeros(grid.N) for a in cfg.alphas}
    hi = {a: np.zeros(grid.N) for a in cfg.alphas}
    for i in range(cfg.R):
        x = simulate_many("II", cfg.T, [replication_seed(cfg.seed, STREAM_DATA, i)], cfg.burn_in)[0]
        ts = demean(TimeSeries(x))
        ac = autocov(ts, cfg.M)
        est = lag_window_estimate(ac, cfg.M, cfg.window, grid)
        mc = longrun.multiplier_cov(est, coefs, longrun.sigma_hat(ts, ac, cfg.M, kern))
        maxima = bands.bootstrap_maxima(bands.psd_factor(mc), cfg.B, replication_seed(cfg.seed, STREAM_BOOT, i))
        for a in cfg.alphas:
            band = bands.bootstrap_band(est, bands.empirical_quantile(maxima, a), a)
            lo[a] += band.lower / cfg.R
            hi[a] += band.upper / cfg.R
    rows = [[lam, target[k], lo[0.1][k], hi[0.1][k], lo[0.05][k], hi[0.05][k]] for k, lam in enumerate(grid.frequencies)]
    emit(["lambda", "target", "lower90", "upper90", "lower95", "upper95"], rows, args.output)


if __name__ == "__main__":
    main()
