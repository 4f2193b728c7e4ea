"""Acceptance suite: one test per release criterion, each printing a single
PASS/FAIL line.  These are end-to-end statistical checks; every threshold is
computed from the analytic oracles in the estimate module."""

import math
import random
import time

import numpy as np
from scipy import stats

from probminhash import (
    TruncExpParams,
    improvement_factor,
    jaccard_exact,
    jaccard_n_exact,
    jaccard_p_exact,
    jaccard_w_exact,
    new_stream,
    tree_new,
)
from probminhash import _kernels as _k
from probminhash.harness import (
    FIXTURES,
    ExperimentConfig,
    cell_seed,
    mse_sampling_sd,
    run_buffer_experiment,
    run_equivalence_suite,
    run_mse_cell,
    run_mse_experiment,
    run_timing_experiment,
)

SEED = 2024
Z_BAND = 4.9


def _report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" - {detail}" if detail else ""
    print(f"[acceptance] criterion {num:02d} ({name}): {status}{suffix}")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def test_criterion_01_unbiasedness_band():
    # independent-component algorithms: every (fixture, m) cell's empirical
    # MSE within the 4.9-sigma band around jp(1-jp)/m
    t0 = time.monotonic()
    rows = run_mse_experiment(ExperimentConfig(seed=SEED))
    elapsed = time.monotonic() - t0
    worst = max(abs(r.zscore) for r in rows)
    ok = worst <= Z_BAND and elapsed < 300.0
    _report(1, "unbiasedness band", ok,
            f"{len(rows)} cells, worst |z|={worst:.2f}, {elapsed:.0f}s")


def test_criterion_02_correlated_variance_reduction():
    # the strength of the reduction is fixture-dependent; the two documented
    # small multisets show it clearly, the remaining small fixtures must at
    # least be significantly below the independent-component level
    algos = ("probminhash3", "probminhash4")
    strong = [run_mse_cell(a, 256, f, 2000, SEED)
              for a in algos for f in ("skew2", "binary3")]
    worst_rel = max(r.relative_mse for r in strong)
    weak = [run_mse_cell(a, 256, f, 20_000, SEED)
            for a in algos for f in ("inverse2", "half2", "skew4")]
    worst_weak_z = max(r.zscore for r in weak)
    degenerate = [run_mse_cell(a, 256, f, 2000, SEED)
                  for a in algos for f in ("single1", "disjoint2")]
    # for n >> m the reduction shrinks toward the analytic improvement
    # factor of the unweighted law: with union cardinality 64 and m=16 the
    # correct band center is alpha(16, 64), not 1
    big = [run_mse_cell(a, 16, "binary64", 2000, SEED) for a in algos]
    alpha = improvement_factor(16, 64)
    worst_big_z = max(
        abs((r.mse - alpha * r.jp * (1 - r.jp) / 16)
            / mse_sampling_sd(r.jp, 16, r.pairs)) for r in big)
    ok = (worst_rel < 0.85 and worst_weak_z <= -Z_BAND
          and all(r.mse == 0.0 for r in degenerate)
          and worst_big_z <= Z_BAND)
    _report(2, "correlated variance reduction", ok,
            f"documented-fixture worst rel MSE={worst_rel:.3f}, "
            f"other small fixtures worst z={worst_weak_z:.1f}, "
            f"n>>m worst |z| vs alpha={worst_big_z:.2f}")


def test_criterion_03_superminhash_variance_law():
    # binary fixture with J=1/3 (union cardinality 3): relative MSE follows
    # the alpha(m, u) improvement factor
    worst = 0.0
    for algo in ("superminhash", "unweighted4"):
        for m in (16, 64, 256):
            row = run_mse_cell(algo, m, "binary3", 2000, SEED)
            expected = improvement_factor(m, 3) * row.jp * (1 - row.jp) / m
            # binomial-based band width; conservative for the reduced-variance
            # estimators
            z = (row.mse - expected) / mse_sampling_sd(row.jp, m, row.pairs)
            worst = max(worst, abs(z))
    ok = worst <= Z_BAND
    _report(3, "variance improvement law", ok, f"worst |z|={worst:.2f}")


def test_criterion_04_logical_equivalence():
    report = run_equivalence_suite(SEED, trials=1000, max_n=10_000)
    _report(4, "interleaved bit-equivalence", report.ok,
            f"{report.trials} trials, {report.mismatches} mismatches")


def test_criterion_05_truncated_exponential_sampler():
    lams = (math.log(1 + 1 / 255), 0.1, math.log(2.0), 3.0)
    worst_p = 1.0
    for i, lam in enumerate(lams):
        x = new_stream(SEED + i).trunc_exp_batch(
            TruncExpParams.from_rate(lam), 1_000_000)
        denom = -math.expm1(-lam)
        p = stats.kstest(x, lambda v: -np.expm1(-lam * v) / denom).pvalue
        worst_p = min(worst_p, p)
    ctr = np.zeros(8, np.int64)
    new_stream(SEED + 9).trunc_exp_batch(
        TruncExpParams.from_rate(math.log(2.0)), 1_000_000, ctr)
    fast = ctr[1] / ctr[0]
    ok = worst_p > 0.001 and abs(fast - 0.693) <= 0.005
    _report(5, "truncated exponential sampler", ok,
            f"worst KS p={worst_p:.4f}, fast path={fast:.4f}")


def test_criterion_06_coupon_collector_budget():
    m = 64
    hm = sum(1.0 / i for i in range(1, m + 1))
    ids = new_stream(SEED).u64_batch(1000)
    ones = np.ones(1, np.float64)
    total = 0
    for eid in ids:
        _, st = _k._k_probminhash1(np.array([eid], np.uint64), ones, m)
        total += st[0]
    mean = total / 1000
    ok = abs(mean - m * hm) <= 0.1 * m * hm
    _report(6, "coupon collector budget", ok,
            f"mean points={mean:.1f}, m*H_m={m * hm:.1f}")


def test_criterion_07_buffer_plateau():
    m = 256
    hm = sum(1.0 / i for i in range(1, m + 1))
    cfg = ExperimentConfig(algorithms=("probminhash3a",), m_values=(m,),
                           s=100, seed=SEED, n_values=(100_000, 1_000_000))
    rows = run_buffer_experiment(cfg)
    mean5 = next(r.mean for r in rows if r.n == 100_000)
    mean6 = next(r.mean for r in rows if r.n == 1_000_000)
    ok = (abs(mean6 - m * hm) <= 0.15 * m * hm
          and abs(mean6 - mean5) <= 0.05 * mean6)
    _report(7, "buffer plateau", ok,
            f"mean@1e6={mean6:.0f}, mean@1e5={mean5:.0f}, "
            f"m*H_m={m * hm:.0f}")


def test_criterion_08_stop_limit_tree():
    ok = True
    detail = []
    for m in (1, 3, 8, 256):
        rng = random.Random(SEED + m)
        t = tree_new(m)
        leaves = np.full(m + 1, math.inf)
        writes = 0
        count = 100_000
        for _ in range(count):
            k = rng.randrange(1, m + 1)
            # subtractive decreases avoid float underflow over 10^5 steps
            h = rng.random() if leaves[k] == math.inf \
                else leaves[k] - rng.uniform(0.1, 1.0)
            writes += t.update(k, h)
            leaves[k] = h
            if t.max() != leaves[1:].max():
                ok = False
                break
        mean_writes = writes / count
        ok = ok and mean_writes <= 3.0
        detail.append(f"m={m}:{mean_writes:.2f}w")
    _report(8, "stop-limit tree", ok, " ".join(detail))


def test_criterion_09_speedup():
    m, n = 1024, 100_000
    slow = run_timing_experiment(ExperimentConfig(
        algorithms=("pminhash",), m_values=(m,), n_values=(n,), reps=2,
        seed=SEED))[0].mean_ns
    fast_rows = run_timing_experiment(ExperimentConfig(
        algorithms=("probminhash2", "probminhash3a"), m_values=(m,),
        n_values=(n,), reps=20, seed=SEED))
    ratios = {r.algorithm: slow / r.mean_ns for r in fast_rows}
    # break-even: the one-pass algorithm is no slower already at n = 200
    be = run_timing_experiment(ExperimentConfig(
        algorithms=("pminhash", "probminhash2"), m_values=(m,),
        n_values=(200,), reps=50, seed=SEED))
    be_ns = {r.algorithm: r.mean_ns for r in be}
    ok = (all(v >= 50.0 for v in ratios.values())
          and be_ns["probminhash2"] <= be_ns["pminhash"])
    _report(9, "machine-relative speedup", ok,
            f"speedups={{{', '.join(f'{a}:{v:.0f}x' for a, v in ratios.items())}}}, "
            f"break-even@200: {be_ns['probminhash2'] / 1e3:.0f}us vs "
            f"{be_ns['pminhash'] / 1e3:.0f}us")


def test_criterion_10_oracle_coincidence():
    rng = random.Random(SEED)
    ok = True
    for _ in range(1000):
        n = rng.randint(1, 16)
        pairs = [rng.choice([(1, 0), (0, 1), (1, 1)]) for _ in range(n)]
        A = {i for i, (a, _) in enumerate(pairs) if a}
        B = {i for i, (_, b) in enumerate(pairs) if b}
        j = jaccard_exact(A, B)
        ok = ok and abs(jaccard_w_exact(pairs) - j) < 1e-12
        ok = ok and abs(jaccard_p_exact(pairs) - j) < 1e-12
        # J_N reduces to J on binary weights only for equal-cardinality
        # sets (normalization rescales the two sides differently otherwise)
        if len(A) == len(B):
            ok = ok and abs(jaccard_n_exact(pairs) - j) < 1e-12
    for _ in range(1000):
        n = rng.randint(1, 16)
        pairs = [(math.exp(rng.uniform(-5, 5)), math.exp(rng.uniform(-5, 5)))
                 for _ in range(n)]
        ca, cb = math.exp(rng.uniform(-5, 5)), math.exp(rng.uniform(-5, 5))
        scaled = [(a * ca, b * cb) for a, b in pairs]
        for oracle in (jaccard_p_exact, jaccard_n_exact):
            v, w = oracle(pairs), oracle(scaled)
            ok = ok and abs(v - w) <= 1e-9 * max(v, w, 1e-300)
    _report(10, "oracle coincidence and scale invariance", ok)


def test_criterion_11_bbit_calibration():
    m, s = 4096, 2000
    bits = (1, 4, 8)
    worst = 0.0
    for fixture, jp in (("tenth10", 0.1), ("binary8", 0.5),
                        ("ninety10", 0.9)):
        wa, wb = FIXTURES[fixture].arrays()
        sel_a, sel_b = wa > 0, wb > 0
        w_a, w_b = wa[sel_a], wb[sel_b]
        stream = new_stream(cell_seed(SEED, "bbit", fixture))
        sums = {b: 0.0 for b in bits}
        for _ in range(s):
            ids = stream.u64_batch(wa.size)
            sa, _ = _k._k_pminhash(ids[sel_a], w_a, m)
            sb, _ = _k._k_pminhash(ids[sel_b], w_b, m)
            for b in bits:
                c = np.count_nonzero(
                    _k._k_bbit(sa, b) == _k._k_bbit(sb, b)) / m
                p = 2.0 ** -b
                sums[b] += min(1.0, max(0.0, (c - p) / (1.0 - p)))
        for b in bits:
            worst = max(worst, abs(sums[b] / s - jp))
    ok = worst < 0.01
    _report(11, "b-bit estimator calibration", ok,
            f"worst |bias|={worst:.4f}")
