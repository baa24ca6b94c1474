"""Data-generating processes and Monte-Carlo coverage experiments."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np
from threadpoolctl import threadpool_limits

from . import bands, longrun, oracle
from .series import ConfigError, TimeSeries, autocov, demean, fourier_grid
from .spectral import coefficients, lag_window_estimate, lag_window_values, smoothed_target
from .windows import window as get_window

MODELS = ("iid", "I", "II", "III")
METHODS = ("bootstrap", "gumbel")
TARGET_MODES = ("auto", "analytic", "mc")

# independent seed streams derived from one master seed
STREAM_DATA, STREAM_BOOT, STREAM_TARGET = 0, 1, 2

# Gaussian linear representations, where they exist
LINEAR_MODELS = {
    "iid": oracle.LinearProcessSpec(ar=(), sigma2=1.0),
    "I": oracle.LinearProcessSpec(ar=(0.8,), sigma2=1.0),
}


class GenerationError(RuntimeError):
    pass


class ReplicationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    model: str = "I"
    seed: int = 0
    burn_in: int = 1000

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; valid: {', '.join(MODELS)}")
        if self.burn_in < 0:
            raise ConfigError(f"burn_in must be >= 0, got {self.burn_in}")


def replication_seed(master: int, stream: int, index: int) -> int:
    """Mix ``(master, stream, index)`` into a 64-bit seed via SeedSequence hashing."""
    ss = np.random.SeedSequence([master & (2**64 - 1), stream, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _recursion(model: str, eps: np.ndarray) -> np.ndarray:
    """Run the model recursion along the last axis from zero initial state."""
    n = eps.shape[-1]
    x = np.zeros_like(eps)
    if model == "iid":
        return eps.copy()
    if model == "I":
        x[..., 0] = eps[..., 0]
        for t in range(1, n):
            x[..., t] = 0.8 * x[..., t - 1] + eps[..., t]
        return x
    if model == "II":
        u = np.zeros_like(eps)
        u[..., 0] = eps[..., 0]
        x[..., 0] = u[..., 0]
        for t in range(1, n):
            u[..., t] = eps[..., t] * np.sqrt(1.0 + 0.25 * u[..., t - 1] ** 2)
            x2 = x[..., t - 2] if t >= 2 else 0.0
            x[..., t] = 1.3 * x[..., t - 1] - 0.75 * x2 + u[..., t]
        return x
    if model == "III":
        x[..., 0] = eps[..., 0]
        for t in range(1, n):
            x[..., t] = (0.4 + 0.1 * eps[..., t - 1]) * x[..., t - 1] + eps[..., t]
        return x
    raise ConfigError(f"unknown model {model!r}")


def simulate_many(model: str, T: int, seeds, burn_in: int = 1000) -> np.ndarray:
    """Stack of series, one row per seed; row ``i`` equals ``simulate`` with ``seeds[i]``."""
    eps = np.stack([np.random.default_rng(s).standard_normal(burn_in + T) for s in seeds])
    x = _recursion(model, eps)[:, burn_in:]
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(x), axis=1))[0])
        raise GenerationError(f"non-finite values generated for model {model} with seed {seeds[bad]}")
    return x


def simulate(model: ModelSpec, T: int) -> TimeSeries:
    """Generate ``burn_in + T`` steps from zero initial conditions and drop the burn-in."""
    return TimeSeries(simulate_many(model.model, T, [model.seed], model.burn_in)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "I"
    T: int = 256
    M: int = 10
    bandwidth: float = 1.0
    alphas: tuple = (0.1, 0.05)
    R: int = 200
    B: int = 1000
    window: str = "parzen"
    method: str = "bootstrap"
    target: str = "auto"
    n_target: int = 20_000
    seed: int = 20240607
    burn_in: int = 1000
    demean: bool = True
    cov_kernel: str = "gaussian"
    kernel_scale: float = 1.0
    gumbel_convention: str = "squared"
    eig_clip_tol: float = 1e-10
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; valid: {', '.join(MODELS)}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; valid: {', '.join(METHODS)}")
        if self.target not in TARGET_MODES:
            raise ConfigError(f"unknown target mode {self.target!r}; valid: {', '.join(TARGET_MODES)}")
        if self.R < 1 or self.B < 1:
            raise ConfigError("R and B must be >= 1")
        if not 1 <= self.M < self.T:
            raise ConfigError(f"need 1 <= M < T, got M={self.M}, T={self.T}")
        if self.method == "gumbel" and self.M < 2:
            raise ConfigError("Gumbel band needs M >= 2")
        if not self.alphas:
            raise ConfigError("at least one alpha is required")
        for a in self.alphas:
            bands.check_alpha(a)
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.target == "analytic" and self.model not in LINEAR_MODELS:
            raise ConfigError(f"no analytic target for model {self.model}")
        get_window(self.window)
        longrun.CovKernel(self.cov_kernel, self.bandwidth, self.kernel_scale)
        if self.gumbel_convention not in bands.GUMBEL_CONVENTIONS:
            raise ConfigError(f"unknown Gumbel convention {self.gumbel_convention!r}")

    def grid(self) -> np.ndarray:
        if self.method == "gumbel":
            return bands.coarse_grid(self.M)
        return fourier_grid(self.T).frequencies

    def target_mode(self) -> str:
        if self.target != "auto":
            return self.target
        return "analytic" if self.model in LINEAR_MODELS else "mc"


@dataclass(frozen=True)
class ReportRow:
    model: str
    method: str
    T: int
    M: int
    bandwidth: float
    level: float
    R: int
    B: int
    Cov: float
    ML: float

    def __post_init__(self):
        if not 0 <= self.Cov <= 100 or self.ML < 0:
            raise ValueError(f"invalid report row: Cov={self.Cov}, ML={self.ML}")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list
    log: list = field(default_factory=list)
    target: np.ndarray | None = None


def _batch_autocov(X: np.ndarray, M: int) -> np.ndarray:
    T = X.shape[1]
    return np.stack([np.einsum("ij,ij->i", X[:, j:], X[:, : T - j]) for j in range(M + 1)], axis=1) / T


def mc_target(cfg: ExperimentConfig, chunk: int = 2000):
    """Monte-Carlo mean and standard error of ``f_hat`` over ``n_target`` series."""
    freqs = cfg.grid()
    total = np.zeros(freqs.size)
    total_sq = np.zeros(freqs.size)
    n = cfg.n_target
    with threadpool_limits(1):
        for start in range(0, n, chunk):
            idx = range(start, min(n, start + chunk))
            seeds = [replication_seed(cfg.seed, STREAM_TARGET, i) for i in idx]
            X = simulate_many(cfg.model, cfg.T, seeds, cfg.burn_in)
            if cfg.demean:
                X = X - X.mean(axis=1, keepdims=True)
            vals = lag_window_values(_batch_autocov(X, cfg.M), cfg.M, cfg.window, freqs)
            total += vals.sum(axis=0)
            total_sq += (vals**2).sum(axis=0)
    mean = total / n
    var = np.maximum(total_sq / n - mean**2, 0.0)
    return mean, np.sqrt(var / n)


def target_curve(cfg: ExperimentConfig) -> np.ndarray:
    """``E f_hat`` on the method's grid: exact for linear Gaussian models, MC otherwise."""
    if cfg.target_mode() == "analytic":
        gamma = oracle.autocovariances(LINEAR_MODELS[cfg.model], cfg.T)
        return smoothed_target(gamma, cfg.M, cfg.T, cfg.window, cfg.grid(), demeaned=cfg.demean).values
    return mc_target(cfg)[0]


def _run_one(cfg: ExperimentConfig, index: int, target: np.ndarray) -> dict:
    data_seed = replication_seed(cfg.seed, STREAM_DATA, index)
    x = simulate_many(cfg.model, cfg.T, [data_seed], cfg.burn_in)[0]
    ts = TimeSeries(x)
    if cfg.demean:
        ts = demean(ts)
    acov = autocov(ts, cfg.M)
    rec = {"replication": index, "seed": data_seed}
    if cfg.method == "gumbel":
        est = lag_window_estimate(acov, cfg.M, cfg.window, cfg.grid())
        W2 = float(get_window(cfg.window).closed_l2)
        rec["mean_fhat"] = float(np.mean(est.values))
        for a in cfg.alphas:
            band = bands.gumbel_band(est, cfg.M, cfg.T, a, W2, cfg.gumbel_convention)
            rec[f"halfwidth_{a}"] = band.quantile
            rec[f"covered_{a}"] = band.covers(target)
        return rec
    grid = fourier_grid(cfg.T)
    est = lag_window_estimate(acov, cfg.M, cfg.window, grid)
    kern = longrun.CovKernel(cfg.cov_kernel, cfg.bandwidth, cfg.kernel_scale)
    lrc = longrun.sigma_hat(ts, acov, cfg.M, kern)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", longrun.DivisorClampWarning)
        mc = longrun.multiplier_cov(est, coefficients(cfg.M, cfg.window, grid), lrc)
    factor = bands.psd_factor(mc, cfg.eig_clip_tol)
    maxima = bands.bootstrap_maxima(factor, cfg.B, replication_seed(cfg.seed, STREAM_BOOT, index))
    rec.update(
        mean_fhat=float(np.mean(est.values)),
        min_eig=factor.min_eig,
        max_diag=mc.max_diag,
        clipped_mass=factor.clipped_mass,
        clamped=int(np.sum(mc.clamped)),
    )
    for a in cfg.alphas:
        q = bands.empirical_quantile(maxima, a)
        rec[f"q_{a}"] = q
        rec[f"covered_{a}"] = bands.bootstrap_band(est, q, a).covers(target)
    return rec


def _run_chunk(args):
    cfg, indices, target = args
    out = []
    with threadpool_limits(1):
        for i in indices:
            try:
                out.append(_run_one(cfg, i, target))
            except Exception as exc:  # noqa: BLE001
                seed = replication_seed(cfg.seed, STREAM_DATA, i)
                raise ReplicationError(f"replication {i} (seed {seed}) failed: {exc}") from exc
    return out


def run_replications(cfg: ExperimentConfig, target: np.ndarray) -> list:
    indices = list(range(cfg.R))
    if cfg.threads == 1:
        return _run_chunk((cfg, indices, target))
    n_chunks = min(cfg.R, 4 * cfg.threads)
    chunks = [indices[i::n_chunks] for i in range(n_chunks)]
    with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
        parts = list(pool.map(_run_chunk, [(cfg, c, target) for c in chunks]))
    log = [rec for part in parts for rec in part]
    return sorted(log, key=lambda r: r["replication"])


def summarize(cfg: ExperimentConfig, log: list) -> list:
    rows = []
    R = len(log)
    mean_f = math.fsum(r["mean_fhat"] for r in log) / R
    for a in cfg.alphas:
        cov = 100.0 * sum(bool(r[f"covered_{a}"]) for r in log) / R
        if cfg.method == "bootstrap":
            mean_q = math.fsum(r[f"q_{a}"] for r in log) / R
            ml = 2.0 * math.sqrt(cfg.M / cfg.T) * mean_f * mean_q
        else:
            ml = 2.0 * math.fsum(r[f"halfwidth_{a}"] for r in log) / R
        rows.append(ReportRow(cfg.model, cfg.method, cfg.T, cfg.M, cfg.bandwidth,
                              round(100 * (1 - a), 6), R, cfg.B, cov, ml))
    return rows


def coverage_experiment(cfg: ExperimentConfig, target: np.ndarray | None = None) -> ExperimentResult:
    """Empirical simultaneous coverage and mean band length, one row per alpha.

    Bootstrap mean length is ``2 sqrt(M/T) * mean(f_hat) * mean(q_star)``,
    both means taken over replications (and frequencies for ``f_hat``);
    Gumbel mean length is twice the average half-width.
    """
    if target is None:
        target = target_curve(cfg)
    log = run_replications(cfg, target)
    return ExperimentResult(cfg, summarize(cfg, log), log, target)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["alphas"] = ",".join(repr(a) for a in cfg.alphas)
    return d


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}
_ALIASES = {"m_lag": "M", "m": "M", "t": "T", "alpha": "alphas", "b_t": "bandwidth",
            "bootstrap_reps": "B", "b": "B", "r": "R", "reps": "R", "target_mode": "target"}


def parse_config_text(text: str, **overrides) -> ExperimentConfig:
    """Parse flat ``key = value`` lines (``#`` comments) into an ExperimentConfig."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line_no}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        key = _ALIASES.get(key.lower(), key)
        if key not in types:
            raise ConfigError(f"config line {line_no}: unknown key {key!r}")
        values[key] = _coerce(key, val, types[key], line_no)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


def _coerce(key, val, typ, line_no):
    try:
        if key == "alphas":
            return tuple(float(v) for v in val.split(",") if v.strip())
        if typ == "int":
            return int(val)
        if typ == "float":
            return float(val)
        if typ == "bool":
            return _BOOL[val.lower()]
        return val
    except (ValueError, KeyError):
        raise ConfigError(f"config line {line_no}: bad value {val!r} for {key}") from None


def load_config(path, **overrides) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config_text(fh.read(), **overrides)


def with_alphas(cfg: ExperimentConfig, alphas) -> ExperimentConfig:
    return replace(cfg, alphas=tuple(alphas))
