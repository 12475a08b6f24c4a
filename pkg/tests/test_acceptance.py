"""Acceptance suite: one test per acceptance criterion, each printing a
pass/fail line. Run with ``pytest tests/test_acceptance.py -v -s``."""

import statistics
import threading
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from trustbench.bench import ablation_report, fit_profile_from_report, run_benchmark
from trustbench.calibration import (
    CalibrationPair,
    apply_calibration,
    expected_calibration_error,
    fit_isotonic,
    isotonic_fitted_values,
)
from trustbench.gating import GatingThresholds, RuntimeWeights, aggregate_runtime, composite_score, gate
from trustbench.metrics import ngram_overlap, timeliness, EvidencePolicy
from trustbench.model import (
    Citation,
    Decision,
    Dimension,
    Severity,
    TrustVector,
    Violation,
    ViolationCode,
)
from trustbench.service import TrustEngine, create_app

from conftest import AS_OF
from test_calibration import brute_force_isotonic
from test_service import confirm_body, make_config, request_body, seed_profile

EPS = 1e-9


def report_line(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


# ---------------------------------------------------------------------------

def test_isotonic_oracle_equivalence():
    rng = np.random.default_rng(2026)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 13))
        xs = np.sort(rng.choice(np.linspace(0, 1, 201), size=n, replace=False))
        ys = np.round(rng.random(n), 6)
        fitted = isotonic_fitted_values(
            [CalibrationPair(float(x), float(y)) for x, y in zip(xs, ys)]
        )
        oracle = brute_force_isotonic(xs, ys)
        worst = max(worst, float(np.max(np.abs(fitted - oracle))))
    elapsed = time.perf_counter() - start
    report_line(
        "isotonic oracle: 200 random instances within 1e-9",
        worst <= 1e-9 and elapsed < 5.0,
        f"max dev {worst:.2e}, {elapsed:.2f}s",
    )


def test_calibration_property_battery():
    rng = np.random.default_rng(99)
    failures = 0
    for _ in range(250):  # monotonicity of fitted curves
        n = int(rng.integers(1, 25))
        pairs = [CalibrationPair(float(c), float(o)) for c, o in rng.random((n, 2))]
        curve = fit_isotonic(pairs)
        ys = [y for _, y in curve.breakpoints]
        a, b = sorted(rng.random(2))
        if apply_calibration(curve, a) > apply_calibration(curve, b) + EPS:
            failures += 1
        if any(y2 < y1 - EPS for y1, y2 in zip(ys, ys[1:])):
            failures += 1
    for _ in range(250):  # clamping / range preservation
        n = int(rng.integers(1, 25))
        pairs = [CalibrationPair(float(c), float(o)) for c, o in rng.random((n, 2))]
        curve = fit_isotonic(pairs)
        ys = [y for _, y in curve.breakpoints]
        x = float(rng.choice([-0.0, 1.0, rng.random()]))
        y = apply_calibration(curve, x)
        if not (min(ys) - EPS <= y <= max(ys) + EPS):
            failures += 1
    for _ in range(250):  # idempotence on monotone inputs
        n = int(rng.integers(1, 25))
        ys = np.sort(rng.random(n))
        xs = np.linspace(0.01, 0.99, n)
        fitted = isotonic_fitted_values(
            [CalibrationPair(float(x), float(y)) for x, y in zip(xs, ys)]
        )
        if not np.allclose(fitted, ys, atol=1e-12):
            failures += 1
    for _ in range(250):  # ECE of the identity pairing is exactly 0
        n = int(rng.integers(1, 50))
        cs = rng.random(n)
        bins = int(rng.integers(1, 30))
        ece = expected_calibration_error(
            [CalibrationPair(float(c), float(c)) for c in cs], bins
        )
        if ece > 1e-12:
            failures += 1
    report_line(
        "calibration properties: 1000 randomized cases", failures == 0,
        f"{failures} failures",
    )


def test_metric_unit_oracles():
    checks = []
    fitted = isotonic_fitted_values(
        [CalibrationPair(0.2, 0.4), CalibrationPair(0.5, 0.3), CalibrationPair(0.8, 0.9)]
    )
    checks.append(np.allclose(fitted, [0.35, 0.35, 0.9], atol=1e-6))

    checks.append(
        abs(ngram_overlap("the cat sat", ["the cat sat down"], "rouge_l") - 6 / 7) <= 1e-6
    )

    from datetime import timedelta

    policy = EvidencePolicy(whitelist={"who.int": 1.0}, max_age_days=365)
    mid = Citation(
        source="https://who.int/x", published_at=AS_OF - timedelta(days=547, hours=12)
    )
    score, _ = timeliness([mid], AS_OF, policy)
    checks.append(abs(score - 0.5) <= 1e-6)

    vector = TrustVector(
        scores={
            Dimension.CITATION_INTEGRITY: 1.0,
            Dimension.TIMELINESS: 0.5,
            Dimension.SAFETY: 1.0,
        }
    )
    checks.append(abs(aggregate_runtime(vector, RuntimeWeights()) - 0.8333333333) <= 1e-6)

    checks.append(abs(composite_score(0.8, 0.6) - 0.66) <= 1e-6)

    report_line(
        "metric unit oracles: PAVA/rouge_l/timeliness/aggregate/composite",
        all(checks),
        f"{checks}",
    )


def _fit_and_ablate(domain, plugins, corpora, replays, judges, plugin_override=None):
    report = run_benchmark(
        replays[domain], corpora[domain], plugins[domain], judges[domain], now=AS_OF
    )
    profile = fit_profile_from_report(report, domain)
    plugin = plugins[plugin_override or domain]
    rows = {
        r.mode: r
        for r in ablation_report(
            corpora[domain], replays[domain], plugin, profile, now=AS_OF
        )
    }
    return rows


def test_ablation_analog(plugins, corpora, replays, judges):
    start = time.perf_counter()
    ok = True
    details = []
    for domain in ("healthcare", "finance", "general"):
        rows = _fit_and_ablate(domain, plugins, corpora, replays, judges)
        base = rows["baseline"].executed_harm_rate
        conf = rows["confidence_only"].executed_harm_rate
        full = rows["full"].executed_harm_rate
        comp = rows["full"].completion_rate
        ok &= full <= 0.15 * base
        ok &= full < conf < base
        ok &= comp >= 0.80
        details.append(f"{domain}: full={full:.3f} conf={conf:.3f} base={base:.3f} compl={comp:.2f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30.0
    report_line(
        "ablation analog: full <= 15% of baseline, confidence-only in between, "
        "completion >= 80%",
        ok,
        "; ".join(details) + f"; {elapsed:.1f}s",
    )


def test_cross_domain_analog(plugins, corpora, replays, judges):
    ok = True
    details = []
    for domain, other in (("healthcare", "finance"), ("finance", "healthcare")):
        in_rows = _fit_and_ablate(domain, plugins, corpora, replays, judges)
        out_rows = _fit_and_ablate(
            domain, plugins, corpora, replays, judges, plugin_override=other
        )
        in_rate = in_rows["full"].executed_harm_rate
        out_rate = out_rows["full"].executed_harm_rate
        increase = (out_rate - in_rate) / in_rate if in_rate > 0 else float("inf")
        ok &= increase >= 0.25
        details.append(
            f"{other} plugin on {domain} corpus: {in_rate:.3f} -> {out_rate:.3f} "
            f"(+{increase * 100:.0f}%)"
        )
    report_line("cross-domain analog: >= 25% relative harm increase", ok, "; ".join(details))


def test_verify_latency_budget(tmp_path):
    seed_profile(tmp_path)
    engine = TrustEngine(make_config(tmp_path))
    client = TestClient(create_app(engine))
    latencies = []
    try:
        for i in range(1000):
            body = request_body(request_id=f"lat-{i}")
            t0 = time.perf_counter()
            resp = client.post("/v1/verify", json=body)
            latencies.append((time.perf_counter() - t0) * 1000.0)
            assert resp.status_code == 200
    finally:
        engine.close()
    p50 = statistics.median(latencies)
    p99 = sorted(latencies)[989]
    report_line(
        "latency: p50 of 1000 sequential verifies < 200 ms",
        p50 < 200.0,
        f"p50={p50:.2f} ms, p99={p99:.2f} ms",
    )


def test_gating_table_boundaries():
    thresholds = GatingThresholds()
    expectations = []
    for boundary, below, at in (
        (0.40, Decision.BLOCK, Decision.CONFIRM),
        (0.60, Decision.CONFIRM, Decision.WARN),
        (0.80, Decision.WARN, Decision.PROCEED),
    ):
        expectations.append(gate(boundary - EPS, [], thresholds) is below)
        expectations.append(gate(boundary, [], thresholds) is at)
        expectations.append(gate(boundary + EPS, [], thresholds) is at)
    hard = Violation(
        code=ViolationCode.SAFETY_DENY_PATTERN,
        message="x",
        severity=Severity.HARD,
        dimension=Dimension.SAFETY,
    )
    for c in (0.0, 0.4 - EPS, 0.4, 0.6, 0.8, 1.0):
        expectations.append(gate(c, [hard], thresholds) is Decision.BLOCK)
    report_line("gating table: boundary values and hard-violation dominance", all(expectations))


def test_service_contracts(tmp_path):
    seed_profile(tmp_path)
    cfg = make_config(tmp_path)
    engine = TrustEngine(cfg)
    client = TestClient(create_app(engine))
    headers = {"Authorization": f"Bearer {cfg.server.token}"}

    client.post("/v1/verify", json=request_body("auto-ok"))
    client.post("/v1/verify", json=confirm_body("race"))
    client.post("/v1/verify", json=confirm_body("stays-pending"))

    statuses = []
    lock = threading.Lock()

    def worker():
        resp = client.post(
            "/v1/pending/race/resolve", json={"resolution": "approve"}, headers=headers
        )
        with lock:
            statuses.append(resp.status_code)

    threads = [threading.Thread(target=worker) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    one_shot_ok = statuses.count(200) == 1 and statuses.count(409) == 15
    engine.close()

    # crash-restart: a fresh engine over the same files
    engine2 = TrustEngine(cfg)
    try:
        pending_ids = [p.request_id for p in engine2.log.pending_items()]
        restart_ok = pending_ids == ["stays-pending"]
        checked = engine2.log.verify_integrity()
        integrity_ok = checked == 2  # auto-ok + resolved race
    finally:
        engine2.close()
    report_line(
        "service contracts: one-shot resolution, crash-restart replay, "
        "composite identity over the log",
        one_shot_ok and restart_ok and integrity_ok,
        f"statuses 200x{statuses.count(200)}/409x{statuses.count(409)}, "
        f"pending after restart={pending_ids}, entries checked={checked}",
    )


def test_bench_determinism(plugins, corpora, replays, judges):
    runs = [
        run_benchmark(
            replays["healthcare"],
            corpora["healthcare"],
            plugins["healthcare"],
            judges["healthcare"],
            now=AS_OF,
        ).to_json()
        for _ in range(2)
    ]
    report_line(
        "determinism: two identical bench runs are byte-identical",
        runs[0] == runs[1],
        f"{len(runs[0])} bytes",
    )
