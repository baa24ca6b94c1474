"""Acceptance criteria, one PASS/FAIL line each at the pinned tolerances.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also repeated in the terminal summary.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from specband import checks, cli
from specband.sim import ExperimentConfig, coverage_experiment

pytestmark = pytest.mark.slow

# reference bootstrap results, Model I, T=256, M=10: (b, level) -> (Cov, ML)
REF_BOOTSTRAP_MODEL_I = {
    (1.0, 90.0): (92.6, 0.56), (1.0, 95.0): (94.0, 0.63),
    (1.5, 90.0): (90.6, 0.47), (1.5, 95.0): (92.4, 0.53),
    (2.0, 90.0): (89.2, 0.43), (2.0, 95.0): (91.4, 0.49),
}
# reference Gumbel results, T=256: (model, M, level) -> (Cov, ML)
REF_GUMBEL = {
    ("iid", 10, 90.0): (84.0, 0.12), ("iid", 10, 95.0): (89.4, 0.13),
    ("iid", 14, 90.0): (79.0, 0.15), ("iid", 14, 95.0): (85.0, 0.16),
    ("I", 10, 90.0): (76.2, 0.25), ("I", 10, 95.0): (84.0, 0.28),
    ("I", 14, 90.0): (74.8, 0.32), ("I", 14, 95.0): (80.8, 0.35),
}
COV_TOL = 5.0

_cache = {}


def _run(**kw):
    key = tuple(sorted(kw.items()))
    if key not in _cache:
        _cache[key] = coverage_experiment(ExperimentConfig(**kw))
    return _cache[key]


def _verdict(ok):
    return "PASS" if ok else "FAIL"


def test_c1_parzen_fingerprint(report):
    t0 = time.perf_counter()
    res = checks.check_parzen_l2(tol=1e-10)
    dt = time.perf_counter() - t0
    ok = res.passed and dt < 1.0
    report(f"{_verdict(ok)} C1 parzen L2: |err|={res.measured:.2e} (tol 1e-10), {dt:.3f}s (< 1s)")
    assert ok


def test_c2_bootstrap_reference(report):
    t0 = time.perf_counter()
    details, ok = [], True
    for b in (1.0, 1.5, 2.0):
        res = _run(model="I", T=256, M=10, bandwidth=b, R=200, B=1000, method="bootstrap")
        for row in res.rows:
            ref_cov, ref_ml = REF_BOOTSTRAP_MODEL_I[(b, row.level)]
            cov_ok = abs(row.Cov - ref_cov) <= COV_TOL
            ml_ok = abs(row.ML / ref_ml - 1) <= 0.20
            ok &= cov_ok and ml_ok
            details.append(f"    b={b} {row.level:.0f}%: Cov {row.Cov:.1f} vs {ref_cov} [{_verdict(cov_ok)}], "
                           f"ML {row.ML:.3f} vs {ref_ml} ({100 * (row.ML / ref_ml - 1):+.1f}%) [{_verdict(ml_ok)}]")
    dt = time.perf_counter() - t0
    ok &= dt < 600
    report(f"{_verdict(ok)} C2 reference grid, Model I bootstrap (Cov +/-5 pts, ML +/-20%), {dt:.1f}s")
    for d in details:
        report(d)
    assert ok


def test_c3_gumbel_reference(report):
    t0 = time.perf_counter()
    details, ok = [], True
    for model in ("iid", "I"):
        for M in (10, 14):
            res = _run(model=model, T=256, M=M, R=200, method="gumbel")
            for row in res.rows:
                ref_cov, ref_ml = REF_GUMBEL[(model, M, row.level)]
                cov_ok = abs(row.Cov - ref_cov) <= COV_TOL
                ml_ok = abs(row.ML / ref_ml - 1) <= 0.10
                ok &= cov_ok and ml_ok
                details.append(f"    {model} M={M} {row.level:.0f}%: Cov {row.Cov:.1f} vs {ref_cov} [{_verdict(cov_ok)}], "
                               f"ML {row.ML:.3f} vs {ref_ml} ({100 * (row.ML / ref_ml - 1):+.1f}%) [{_verdict(ml_ok)}]")
    dt = time.perf_counter() - t0
    ok &= dt < 180
    report(f"{_verdict(ok)} C3 reference grid, Gumbel iid/Model I (Cov +/-5 pts, ML +/-10%), {dt:.1f}s")
    for d in details:
        report(d)
    assert ok


def test_c4_orderings(report):
    boot_i = _run(model="I", T=256, M=10, bandwidth=1.0, R=200, B=1000, method="bootstrap").rows[0]
    gum_i = _run(model="I", T=256, M=10, R=200, method="gumbel").rows[0]
    boot_iii = _run(model="III", T=256, M=10, bandwidth=1.0, R=200, B=1000, method="bootstrap").rows[0]
    a = boot_i.Cov >= gum_i.Cov
    b = boot_iii.Cov < boot_i.Cov
    report(f"{_verdict(a and b)} C4 orderings at 90%: bootstrap {boot_i.Cov:.1f} >= Gumbel {gum_i.Cov:.1f} "
           f"[{_verdict(a)}]; Model III {boot_iii.Cov:.1f} < Model I {boot_i.Cov:.1f} [{_verdict(b)}]")
    assert a and b


def test_c5_oracle_equivalence(report):
    t0 = time.perf_counter()
    ra = checks.check_sigma_banded_vs_full(n_cases=40, tol=1e-10)
    rb = checks.check_isserlis_vs_brute(tol=1e-12)
    rc = checks.check_isserlis_vs_mc(T=512, n=100_000, n_se=3.0)
    dt = time.perf_counter() - t0
    ok = ra.passed and rb.passed and rc.passed and dt < 300
    z = ", ".join(f"{v:.2f}" for v in rc.measured)
    report(f"{_verdict(ok)} C5 oracle equivalence: (a) rel {ra.measured:.1e} <= 1e-10, "
           f"(b) {rb.measured:.1e} <= 1e-12, (c) |z| = [{z}] <= 3, {dt:.1f}s")
    assert ok


def test_c6_variance_approximation_trend(report):
    t0 = time.perf_counter()
    res = checks.check_variance_trend((512, 2048, 8192))
    dt = time.perf_counter() - t0
    ok = res.passed and dt < 300
    errs = ", ".join(f"{v:.4g}" for v in res.measured)
    report(f"{_verdict(ok)} C6 variance approximation sup error over T=512,2048,8192: [{errs}] strictly decreasing, {dt:.1f}s")
    assert ok


def test_c7_gaussian_approximation(report):
    t0 = time.perf_counter()
    res = checks.check_gaussian_approx(tol=0.10, T=512, M=14, n_sim=5000, n_gauss=100_000)
    dt = time.perf_counter() - t0
    ok = res.passed and dt < 900
    report(f"{_verdict(ok)} C7 Kolmogorov distance {res.measured:.4f} <= 0.10, {dt:.1f}s")
    assert ok


def test_c8_sigma_consistency_trend(report):
    t0 = time.perf_counter()
    res = checks.check_sigma_consistency((256, 1024, 4096), reps=30)
    dt = time.perf_counter() - t0
    ok = res.passed and dt < 600
    med = ", ".join(f"{v:.4g}" for v in res.measured)
    report(f"{_verdict(ok)} C8 median sup |sigma_hat - sigma_T| over T=256,1024,4096: [{med}] strictly decreasing, {dt:.1f}s")
    assert ok


def test_c9_determinism(report, tmp_path):
    args = ["simulate", "--model", "I", "--T", "256", "--m-lag", "10", "--bandwidth", "1.0",
            "--reps", "200", "--bootstrap-reps", "1000", "--alpha", "0.1,0.05"]
    outputs = {}
    for threads in (1, 8):
        for run in (0, 1):
            path = tmp_path / f"t{threads}_{run}.csv"
            assert cli.run([*args, "--threads", str(threads), "-o", str(path)]) == 0
            outputs[(threads, run)] = path.read_bytes()
    same = len(set(outputs.values())) == 1
    report(f"{_verdict(same)} C9 determinism: 4 simulate runs (threads 1 and 8, twice each) "
           f"{'bit-identical' if same else 'differ'}")
    assert same


def test_c10_psd_contract(report):
    runs = checks.psd_contract(n_runs=100)
    worst = min(r for r, _ in runs)
    mass = [m for _, m in runs]
    ok = worst >= -1e-8
    report(f"{_verdict(ok)} C10 PSD contract: worst min_eig/max_diag {worst:.2e} >= -1e-8 over 100 runs; "
           f"clipped mass total {sum(mass):.3e}, max {max(mass):.3e}")
    assert ok
