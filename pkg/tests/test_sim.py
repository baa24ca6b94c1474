import math
from dataclasses import replace

import numpy as np
import pytest

from specband import sim
from specband.series import ConfigError
from specband.sim import ExperimentConfig, ModelSpec


def test_iid_variance_large_sample():
    x = sim.simulate(ModelSpec("iid", seed=1), 1_000_000).values
    assert abs(x.var() - 1.0) <= 0.01


@pytest.mark.slow
def test_model_one_lag_one_autocorrelation():
    x = sim.simulate(ModelSpec("I", seed=2), 1_000_000).values
    x = x - x.mean()
    r1 = np.dot(x[1:], x[:-1]) / np.dot(x, x)
    assert abs(r1 - 0.8) <= 0.01


@pytest.mark.parametrize("model", sim.MODELS)
def test_determinism_and_burn_in(model):
    a = sim.simulate(ModelSpec(model, seed=7), 300).values
    b = sim.simulate(ModelSpec(model, seed=7), 300).values
    assert a.tobytes() == b.tobytes()
    assert np.all(np.isfinite(a))
    c = sim.simulate(ModelSpec(model, seed=8), 300).values
    assert not np.array_equal(a, c)


def test_simulate_many_rows_match_single_calls():
    seeds = [3, 4, 5]
    X = sim.simulate_many("II", 50, seeds, burn_in=100)
    for row, s in zip(X, seeds):
        assert row.tobytes() == sim.simulate(ModelSpec("II", seed=s, burn_in=100), 50).values.tobytes()


def test_recursions_from_zero_state():
    eps = np.array([[1.0, 2.0, -1.0, 0.5]])
    np.testing.assert_allclose(sim._recursion("I", eps)[0], [1.0, 2.8, 1.24, 1.492])
    x3 = sim._recursion("III", eps)[0]
    assert x3[1] == pytest.approx((0.4 + 0.1 * 1.0) * 1.0 + 2.0)
    assert x3[2] == pytest.approx((0.4 + 0.1 * 2.0) * x3[1] - 1.0)
    u1 = 2.0 * math.sqrt(1 + 0.25)
    x2 = sim._recursion("II", eps)[0]
    assert x2[1] == pytest.approx(1.3 * 1.0 + u1)


def test_model_spec_validation():
    with pytest.raises(ConfigError):
        ModelSpec("IV")
    with pytest.raises(ConfigError):
        ModelSpec("I", burn_in=-1)


def test_seed_streams_are_distinct():
    seeds = {sim.replication_seed(1, s, i) for s in range(3) for i in range(50)}
    assert len(seeds) == 150
    assert sim.replication_seed(1, 0, 0) == sim.replication_seed(1, 0, 0)


def test_experiment_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(M=256, T=256)
    with pytest.raises(ConfigError):
        ExperimentConfig(R=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(alphas=(0.0,))
    with pytest.raises(ConfigError):
        ExperimentConfig(model="II", target="analytic")
    with pytest.raises(ConfigError):
        ExperimentConfig(bandwidth=0.0)
    assert ExperimentConfig(model="III").target_mode() == "mc"
    assert ExperimentConfig(model="iid").target_mode() == "analytic"


def test_iid_target_without_demeaning_is_flat():
    cfg = ExperimentConfig(model="iid", T=64, M=5, demean=False)
    np.testing.assert_allclose(sim.target_curve(cfg), 1 / (2 * math.pi), rtol=1e-14)


def test_iid_target_with_demeaning_is_slightly_lower():
    t = sim.target_curve(ExperimentConfig(model="iid", T=64, M=5))
    assert np.all(t < 1 / (2 * math.pi)) and np.all(t > 0.9 / (2 * math.pi))


@pytest.mark.slow
@pytest.mark.parametrize("demean", [True, False])
def test_analytic_target_matches_monte_carlo(demean):
    cfg = ExperimentConfig(model="I", T=512, M=14, n_target=20_000, target="mc", demean=demean)
    mean, se = sim.mc_target(cfg)
    exact = sim.target_curve(ExperimentConfig(model="I", T=512, M=14, demean=demean))
    assert np.max(np.abs(mean - exact) / se) <= 3.0


def test_model_two_target_finite_positive():
    cfg = ExperimentConfig(model="II", T=256, M=10, n_target=2000)
    mean, se = sim.mc_target(cfg)
    peak = int(np.argmax(mean))
    assert np.all(np.isfinite(mean)) and mean[peak] > 0
    assert se[peak] < 0.1 * mean[peak]


@pytest.fixture(scope="module")
def small_bootstrap():
    cfg = ExperimentConfig(model="I", T=128, M=6, bandwidth=1.5, R=30, B=300, alphas=(0.1, 0.05))
    return sim.coverage_experiment(cfg)


def test_coverage_nested_in_level(small_bootstrap):
    log = small_bootstrap.log
    for rec in log:
        assert rec["q_0.05"] >= rec["q_0.1"]
        assert rec["covered_0.05"] or not rec["covered_0.1"]
    r90, r95 = small_bootstrap.rows
    assert r95.Cov >= r90.Cov and r95.ML >= r90.ML
    assert r90.level == 90.0 and r95.level == 95.0


def test_mean_length_identity_from_log(small_bootstrap):
    cfg = small_bootstrap.config
    log = small_bootstrap.log
    for row, a in zip(small_bootstrap.rows, cfg.alphas):
        mean_f = np.mean([r["mean_fhat"] for r in log])
        mean_q = np.mean([r[f"q_{a}"] for r in log])
        assert row.ML == pytest.approx(2 * math.sqrt(cfg.M / cfg.T) * mean_f * mean_q, rel=1e-10)


def test_thread_count_invariance(small_bootstrap):
    cfg = replace(small_bootstrap.config, threads=2)
    res = sim.coverage_experiment(cfg, target=small_bootstrap.target)
    assert res.rows == small_bootstrap.rows
    assert res.log == small_bootstrap.log


def test_gumbel_experiment_rows():
    cfg = ExperimentConfig(model="iid", method="gumbel", T=128, M=6, R=20)
    res = sim.coverage_experiment(cfg)
    for row, a in zip(res.rows, cfg.alphas):
        want = 2 * np.mean([r[f"halfwidth_{a}"] for r in res.log])
        assert row.ML == pytest.approx(want, rel=1e-12)
        assert 0 <= row.Cov <= 100


def test_zero_quantile_gives_zero_coverage(monkeypatch):
    monkeypatch.setattr(sim.bands, "empirical_quantile", lambda s, a: 0.0)
    cfg = ExperimentConfig(model="I", T=64, M=4, R=10, B=50, alphas=(0.999,))
    res = sim.coverage_experiment(cfg)
    assert res.rows[0].Cov == 0.0 and res.rows[0].ML == 0.0


def test_replication_failure_reports_seed(monkeypatch):
    def boom(*a, **k):
        raise FloatingPointError("bad")

    monkeypatch.setattr(sim.longrun, "sigma_hat", boom)
    cfg = ExperimentConfig(model="I", T=64, M=4, R=2, B=20)
    with pytest.raises(sim.ReplicationError, match=r"replication 0 \(seed \d+\)"):
        sim.coverage_experiment(cfg, target=np.zeros(32))


def test_config_parsing(tmp_path):
    text = """
    # Model I cell
    model = I
    T = 256
    m_lag = 10
    bandwidth = 2.0   # b_T
    alpha = 0.1, 0.05
    R = 20
    demean = false
    """
    cfg = sim.parse_config_text(text)
    assert (cfg.model, cfg.T, cfg.M, cfg.bandwidth, cfg.alphas, cfg.R, cfg.demean) == (
        "I", 256, 10, 2.0, (0.1, 0.05), 20, False)
    p = tmp_path / "c.cfg"
    p.write_text(text)
    assert sim.load_config(p, R=5).R == 5
    with pytest.raises(ConfigError, match="line 1"):
        sim.parse_config_text("nonsense")
    with pytest.raises(ConfigError, match="unknown key"):
        sim.parse_config_text("colour = red")
    with pytest.raises(ConfigError, match="bad value"):
        sim.parse_config_text("T = many")


def test_config_round_trip():
    cfg = ExperimentConfig(model="III", alphas=(0.2,), bandwidth=1.5)
    d = sim.config_to_dict(cfg)
    text = "\n".join(f"{k} = {v}" for k, v in d.items())
    assert sim.parse_config_text(text) == cfg
