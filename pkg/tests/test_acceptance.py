"""Acceptance criteria, one test per criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -s` to see the pass/fail lines.
"""

import json
import math
import time

import numpy as np
import pytest

import effectmix as em
from effectmix.scenarios import run_all

from oracles import simulate_fixed
from test_elicitation import walk_to


def report(name: str, ok: bool, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def test_efficacy_scenario():
    start = time.perf_counter()
    got = em.binary_type_ate(em.BinaryTypeModel(0.30, 0.65, 0.0, 0.05))
    elapsed = time.perf_counter() - start
    ok = (abs(got.ate - 0.65) < 1e-12 and abs(got.treat_rate - 0.95) < 1e-12
          and abs(got.control_rate - 0.30) < 1e-12 and elapsed < 1e-3)
    report("efficacy scenario: ATE 0.65, rates 0.95/0.30, <1ms", ok,
           f"ate={got.ate}, {elapsed*1e6:.0f}us")


def test_effectiveness_scenario():
    got = em.binary_type_ate(em.BinaryTypeModel(0.60, 0.20, 0.0, 0.20))
    ok = (abs(got.ate - 0.20) < 1e-12 and abs(got.treat_rate - 0.80) < 1e-12
          and abs(got.control_rate - 0.60) < 1e-12)
    report("effectiveness scenario: ATE 0.20, rates 0.80/0.60", ok, f"ate={got.ate}")


def test_covid_trial():
    se = em.se_conservative_binary(63, 63)
    power = em.power_fixed(0.25, 0.0891, 0.05)
    # ratio at which two-sided power crosses 0.80, by bisection
    lo, hi = 0.0, 10.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if em.power_fixed(mid, 1.0, 0.05) >= 0.80 else (mid, hi)
    ok = abs(se - 0.0891) < 0.0005 and power >= 0.80 and abs(hi - 2.80) < 0.01
    report("covid trial: se 0.0891+/-5e-4, power >= 0.80, crossing 2.80+/-0.01",
           ok, f"se={se:.5f}, power={power:.4f}, crossing={hi:.4f}")


def test_penumbra_mixture():
    dist = em.EffectDistribution([
        (1 / 3, em.Discrete([0.0, 1.0, -1.0], [0.5, 0.4, 0.1])),
        (2 / 3, em.PointMass(0.0)),
    ])
    ate = em.mixture_mean(dist)
    ok = abs(ate - 0.1) < 1e-12
    report("penumbra mixture: ATE 0.1 +/- 1e-12", ok, f"ate={ate!r}")


def test_heuristic_quarter_and_twentieth():
    rng = np.random.default_rng(99)
    ok = True
    for x in rng.uniform(1e-6, 100.0, size=100):
        # exact up to one floating rounding of (1 - p_null)
        if not math.isclose(em.heuristic_ate(x, 0.5), x / 4, rel_tol=5e-16):
            ok = False
        if not math.isclose(em.heuristic_ate(x, 0.9), x / 20, rel_tol=5e-16):
            ok = False
    report("heuristic: X/4 at half nulls, X/20 at 90% nulls, 100 random X", ok)


def test_pilot_report_and_interaction():
    start = time.perf_counter()
    rep = em.pilot_report(em.PilotResult(94, 100, 90, 100), alpha=0.05,
                          candidate_effects=(0.01,))
    mult = rep.n_multipliers[0.01]
    base = em.required_n(0.04, em.ContinuousOutcome(1.0))
    worst = em.required_n(0.005, em.ContinuousOutcome(2.0))
    penalty = worst.n_total / base.n_total
    elapsed = time.perf_counter() - start
    ok = (abs(rep.estimate - 0.04) < 1e-12
          and -0.045 < rep.interval_lo and rep.interval_hi < 0.125
          and abs(mult - 16) <= 16 * 0.02
          and abs(penalty - 256) <= 256 * 0.05
          and elapsed < 1.0)
    report("pilot report: estimate 0.04, interval in (-0.045, 0.125), "
           "16x multiplier, 256x interaction", ok,
           f"interval=({rep.interval_lo:.4f},{rep.interval_hi:.4f}), "
           f"mult={mult:.3f}, penalty={penalty:.1f}, {elapsed:.2f}s")


def test_null_calibration():
    closed = em.power_fixed(0.0, 0.1, 0.05)
    with pytest.warns(UserWarning, match="near zero"):
        mc = em.diagnostics_mixture(em.point_mass_distribution(0.0), 0.1,
                                    draws=10**6, seed=123)
    oracle = simulate_fixed(0.0, 0.1, alpha=0.05, draws=10**6, seed=321)
    ok = (abs(closed - 0.05) < 1e-9
          and abs(mc.power - 0.05) < 0.002
          and abs(oracle.type_s - 0.5) < 0.005)
    report("null calibration: power=alpha (1e-9 closed, 2e-3 MC), type_s 0.5+/-0.005",
           ok, f"closed={closed:.10f}, mc={mc.power:.4f}, type_s={oracle.type_s:.4f}")


@pytest.mark.parametrize("ratio", [0.25, 0.5, 1.0, 1.7, 2.8])
def test_oracle_equivalence(ratio):
    d = em.diagnostics_fixed(ratio, 1.0)
    r = simulate_fixed(ratio, 1.0, draws=10**7, seed=2000 + int(ratio * 100))
    ok = (abs(d.power - r.power) < 3 * r.power_se
          and abs(d.type_s - r.type_s) < max(3 * r.type_s_se, 1e-6)
          and abs(d.exaggeration - r.exaggeration) < 3 * r.exaggeration_se)
    report(f"oracle equivalence at effect/se={ratio}: power/type_s/exaggeration "
           "within 3 MC SE of a 1e7-draw brute-force oracle", ok,
           f"dpower={abs(d.power - r.power):.2e}")


def test_plausibility_grid_and_power_limit():
    dist = em.with_null_mass(em.Normal(0.2, 0.2), 0.5)
    rep = em.retrospective_plausibility(0.42, 0.15, dist, draws=10**5)
    grid_ok = all(
        row.magnitude_needed * (1 - row.p_null) == pytest.approx(0.42, abs=1e-12)
        for row in rep.decomposition
    )
    tiny = em.retrospective_plausibility(
        0.42, 0.1, em.with_null_mass(em.Normal(0.002, 0.0005), 0.5),
        alpha=0.05, draws=10**6, seed=5)
    limit_ok = abs(tiny.implied_power - 0.05) < 0.005
    report("plausibility: magnitude*(1-p_null)=claim exact; power -> alpha as mean -> 0",
           grid_ok and limit_ok,
           f"power@tiny-mean={tiny.implied_power:.4f}")


def test_elicitation_end_to_end():
    ok = True
    for x in np.random.default_rng(7).uniform(0.01, 10, size=20):
        s = walk_to("derived", x=float(x), p_null=0.5)
        if abs(s.ate_post - x / 4) > 1e-12:
            ok = False
    rng = np.random.default_rng(13)
    from effectmix.elicitation import STAGES
    for _ in range(1000):
        stage = STAGES[rng.integers(1, len(STAGES))]
        lower = float(rng.uniform(0.01, 0.99))
        s = walk_to(stage, x=float(rng.uniform(0.01, 50)),
                    allocation=em.MidpointSplit(lower, 1 - lower),
                    p_null=float(rng.uniform(0, 1)))
        doc = json.loads(json.dumps(em.session_to_json(s)))
        if em.session_to_json(em.session_from_json(doc)) != em.session_to_json(s):
            ok = False
            break
    report("elicitation end-to-end: ate_post = X/4 +/- 1e-12; "
           "1000 randomized sessions JSON-lossless", ok)


def test_scenario_registry_all_pass():
    start = time.monotonic()
    outcomes = run_all()
    elapsed = time.monotonic() - start
    ok = all(o.passed for o in outcomes) and elapsed < 30
    names = ", ".join(o.name for o in outcomes)
    report(f"scenario registry: all {len(outcomes)} scenarios pass in {elapsed:.2f}s",
           ok, names)
