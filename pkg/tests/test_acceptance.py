"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v`` (the verdict lines bypass
capture, so they appear either way).  The heavy benchmark criteria take a
few minutes total.
"""

import itertools
import math
import time
import xml.dom.minidom

import numpy as np

from psbandits import (
    Environment,
    ExperimentConfig,
    GlrBuffer,
    PolicyParams,
    SegmentTable,
    build_hard_instance,
    build_synthetic,
    default_policy_suite,
    delay_bound_d,
    dump_segment_table,
    emit_svg,
    export_csv,
    first_detection_time,
    glr_statistic,
    load_segment_table,
    minimax_lower_bound,
    regret_upper_bound,
    reward,
    run_experiment,
    suboptimality_gaps,
    top_m,
    tuned_params,
)


def _announce(capfd, number, label, ok, detail=""):
    tail = f"  [{detail}]" if detail else ""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {label}{tail}"
    with capfd.disabled():
        print(line, flush=True)
    assert ok, line


def _naive_scan(values):
    """Direct transcription of the split statistic, for cross-checking."""
    def kl(x, y):
        if x in (0.0, 1.0) and x != y and y in (0.0, 1.0):
            return math.inf
        total = 0.0
        if x > 0.0:
            total += x * math.log(x / y)
        if x < 1.0:
            total += (1 - x) * math.log((1 - x) / (1 - y))
        return total

    n = len(values)
    prefix = [0.0]
    for v in values:
        prefix.append(prefix[-1] + v)
    mu_n = prefix[n] / n
    best_value, best_split = -math.inf, None
    for s in range(1, n):
        mu1 = prefix[s] / s
        mu2 = (prefix[n] - prefix[s]) / (n - s)
        if mu_n in (0.0, 1.0):
            stat = 0.0
        else:
            stat = s * kl(mu1, mu_n) + (n - s) * kl(mu2, mu_n)
        if stat > best_value:
            best_value, best_split = stat, s
    return best_value, best_split


def test_criterion_1_statistic_matches_direct_scan(capfd):
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for trial in range(1000):
        n = int(rng.integers(2, 201))
        if trial % 2:
            values = rng.integers(0, 2, size=n).astype(float)
        else:
            values = rng.random(n)
        buf = GlrBuffer()
        for v in values:
            buf.push(float(v))
        got_value, got_split = glr_statistic(buf)
        ref_value, _ = _naive_scan(list(values))
        worst = max(worst, abs(got_value - ref_value))
        # the returned split must achieve the maximum, tie or not
        worst = max(worst, abs(_split_value(values, got_split) - ref_value))
        if worst > 1e-9:
            break
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 10.0
    _announce(capfd, 1, "split statistic matches a direct reference scan",
              ok, f"max |diff| {worst:.2e}, {elapsed:.1f}s")


def _split_value(values, s):
    """Value of the split statistic at one specific split point."""
    def kl(x, y):
        total = 0.0
        if x > 0.0:
            total += x * math.log(x / y)
        if x < 1.0:
            total += (1 - x) * math.log((1 - x) / (1 - y))
        return total

    values = np.asarray(values, dtype=float)
    n = len(values)
    mu_n = float(values.mean())
    if mu_n in (0.0, 1.0):
        return 0.0
    mu1 = float(values[:s].mean())
    mu2 = float(values[s:].mean())
    return s * kl(mu1, mu_n) + (n - s) * kl(mu2, mu_n)


def test_criterion_2_false_alarm_rate_is_controlled(capfd):
    runs, n, delta = 500, 2000, 0.05
    rng = np.random.default_rng(202)
    alarms = 0
    for _ in range(runs):
        values = (rng.random(n) < 0.5).astype(float)
        if first_detection_time(values, delta) is not None:
            alarms += 1
    fraction = alarms / runs
    budget = delta + 3 * math.sqrt(delta * (1 - delta) / runs)
    ok = fraction <= budget
    _announce(capfd, 2, "stationary streams rarely trip the detector",
              ok, f"{alarms}/{runs} alarms, budget {budget:.3f}")


def test_criterion_3_detection_delay_beats_the_bound(capfd):
    runs, horizon, nu, delta = 200, 1200, 500, 0.01
    bound = delay_bound_d(K=1, p=1.0, delta=delta, T=horizon, delta_change=0.6)
    assert bound == 552
    rng = np.random.default_rng(303)
    hits = 0
    for _ in range(runs):
        before = (rng.random(nu) < 0.2).astype(float)
        after = (rng.random(horizon - nu) < 0.8).astype(float)
        detected = first_detection_time(np.concatenate([before, after]), delta)
        if detected is not None and nu < detected <= nu + bound:
            hits += 1
    ok = hits >= 0.95 * runs
    _announce(capfd, 3, "post-change detection lands within the delay bound",
              ok, f"{hits}/{runs} within {bound} steps")


def test_criterion_4_oracle_selection_matches_brute_force(capfd):
    rng = np.random.default_rng(404)
    checked = 0
    ok = True
    for K in range(2, 9):
        for m in range(1, K + 1):
            for _ in range(100):
                mu = rng.random(K)
                best = max(reward(S, mu)
                           for S in itertools.combinations(range(K), m))
                if abs(reward(top_m(mu, m), mu) - best) > 1e-12:
                    ok = False
                checked += 1
    _announce(capfd, 4, "greedy top-m equals exhaustive search",
              ok, f"{checked} instances")


def test_criterion_5_benchmark_ordering_at_desk_scale(capfd):
    start = time.perf_counter()
    T, K, m, N = 5000, 6, 2, 5
    env = build_synthetic(T=T, K=K, m=m, N=N, seed=0)
    cfg = ExperimentConfig(env, m, default_policy_suite(T, K, m, N),
                           replications=100, base_seed=0)
    agg = run_experiment(cfg)
    final = {label: agg.final(label)[0] for label in agg.labels}
    baselines = ("cucb", "cts", "ducb", "mucb")
    checks = [final["glr_cucb"] <= final[b] for b in baselines]
    checks.append(final["glr_cucb"] <= 2 * final["oracle_cucb"])
    checks += [final["lr_glr_cucb"] <= final[b] for b in baselines]
    elapsed = time.perf_counter() - start
    ok = all(checks) and elapsed < 600.0
    summary = " ".join(f"{k}={v:.0f}" for k, v in sorted(final.items()))
    _announce(capfd, 5, "restarting policies beat the static and drifting baselines",
              ok, f"{summary}, {elapsed:.0f}s")


def test_criterion_6_stationary_regret_stays_under_the_bound(capfd):
    T, K, m = 5000, 6, 2
    means = np.array([[0.9, 0.8, 0.5, 0.4, 0.3, 0.2]])
    table = SegmentTable(starts=(1,), means=means, horizon=T)
    env = Environment(table, seed=0)
    delta, p = tuned_params(T, K, N=1)
    params = PolicyParams("glr_cucb", p=p, delta=delta)
    cfg = ExperimentConfig(env, m, (("glr_cucb", params),),
                           replications=100, base_seed=6)
    empirical = run_experiment(cfg).final("glr_cucb")[0]
    dmin, dmax = suboptimality_gaps(table, 0, m)
    L = math.sqrt(m)
    bound = dmax * (6 * L * L * K * K * math.log(T) / dmin ** 2
                    + math.pi ** 2 / 6 + K + p * T + T * K * delta)
    ok = empirical <= bound
    _announce(capfd, 6, "stationary regret sits below the segment bound",
              ok, f"empirical {empirical:.1f} <= bound {bound:.1f}")


def test_criterion_7_no_policy_cheats_the_minimax_floor(capfd):
    K, T, N, m = 6, 5000, 5, 1
    env = build_hard_instance(K=K, T=T, N=N, seed=0)
    floor = minimax_lower_bound(N, K, T)
    suite = tuple((kind, params)
                  for kind, params in default_policy_suite(T, K, m, N)
                  if kind != "oracle_cucb")
    cfg = ExperimentConfig(env, m, suite, replications=100, base_seed=7)
    agg = run_experiment(cfg)
    finals = {label: agg.final(label)[0] for label in agg.labels}
    ok = all(v >= floor for v in finals.values())
    summary = " ".join(f"{k}={v:.0f}" for k, v in sorted(finals.items()))
    _announce(capfd, 7, "adversarial instance keeps regret above the floor",
              ok, f"floor {floor:.1f}, {summary}")


def test_criterion_8_bound_calculators_are_internally_consistent(capfd):
    rng = np.random.default_rng(808)
    ok = True

    # term decomposition always sums to the reported total
    for _ in range(100):
        K = int(rng.integers(2, 7))
        m = int(rng.integers(1, K))
        N = int(rng.integers(1, 5))
        T = int(rng.integers(200, 3000))
        cuts = np.sort(rng.choice(np.arange(2, T), size=N - 1, replace=False))
        starts = tuple([1] + [int(c) for c in cuts])
        means = rng.random((N, K))
        table = SegmentTable(starts=starts, means=means, horizon=T)
        p = float(rng.uniform(0.01, 0.9))
        delta = float(rng.uniform(1e-5, 0.2))
        bd = regret_upper_bound(table, m, 1.0, p, delta)
        parts = bd.ucb_term + bd.uniform_term + bd.delay_term + bd.false_alarm_term
        if abs(parts - bd.total) > 1e-9 * max(1.0, abs(bd.total)):
            ok = False

    # tuning identity: p**2 T / ln T recovers N K below the cap
    for _ in range(100):
        K = int(rng.integers(2, 8))
        N = int(rng.integers(1, 6))
        T = int(rng.integers(10_000, 200_000))
        delta, p = tuned_params(T, K, N)
        if delta != 1.0 / T:
            ok = False
        if p < 1.0 and abs(p * p * T / math.log(T) - N * K) > 1e-6 * N * K:
            ok = False

    # the delay bound moves the right way along every axis
    base = dict(K=6, p=0.05, delta=0.01, T=5000, delta_change=0.5)
    d0 = delay_bound_d(**base)
    grid = [
        (dict(base, K=12), 1), (dict(base, p=0.01), 1),
        (dict(base, T=50_000), 1), (dict(base, delta_change=0.25), 1),
        (dict(base, delta=0.001), 1), (dict(base, p=0.5), -1),
        (dict(base, delta_change=0.9), -1),
    ]
    for kwargs, sign in grid:
        if sign * (delay_bound_d(**kwargs) - d0) < 0:
            ok = False

    _announce(capfd, 8, "bound calculators agree with themselves",
              ok, "decomposition, tuning identity, monotonicity")


def test_criterion_9_everything_reproduces_bit_for_bit(capfd, tmp_path):
    env = build_synthetic(T=400, K=4, m=2, N=2, seed=9)
    cfg = ExperimentConfig(env, 2, default_policy_suite(400, 4, 2, 2)[:3],
                           replications=2, base_seed=9)
    csv_a = export_csv(run_experiment(cfg))
    csv_b = export_csv(run_experiment(cfg))
    same_csv = csv_a.encode() == csv_b.encode()

    svg = emit_svg(run_experiment(cfg), show_band=True)
    try:
        xml.dom.minidom.parseString(svg)
        svg_ok = svg.lstrip().startswith("<svg")
    except Exception:
        svg_ok = False

    text = dump_segment_table(env.table)
    again = dump_segment_table(load_segment_table(text))
    round_trip = text == again

    ok = same_csv and svg_ok and round_trip
    _announce(capfd, 9, "exports are byte-stable and well formed",
              ok, f"csv={same_csv} svg={svg_ok} table={round_trip}")
