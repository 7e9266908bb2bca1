"""Acceptance criteria, one test each, at the stated tolerances and sample sizes.

Every test records a single PASS/FAIL line (measured value, threshold, runtime)
that is printed in the pytest terminal summary.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from conftest import ACCEPTANCE_LINES
from pgbandit import bounds, verify
from pgbandit.core import two_arm_instance, uniform_gap_instance
from pgbandit.experiments import binomial_se, estimate_hitting_prob, lower_bound_instance, run_one
from pgbandit.sde import SdeConfig, run_continuous

pytestmark = pytest.mark.slow


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def report(number, title, passed, measured, threshold, seconds, budget):
    ok = passed and seconds < budget
    ACCEPTANCE_LINES.append(
        f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  measured={measured}  "
        f"required={threshold}  runtime={seconds:.1f}s (< {budget}s)")
    assert passed, f"criterion {number}: measured {measured}, required {threshold}"
    assert seconds < budget, f"criterion {number}: runtime {seconds:.1f}s over {budget}s"


def test_criterion_01_gradient_check():
    with Clock() as c:
        r = verify.check_gradient(samples=1000)
    report(1, "gradient vs central differences", r.passed, f"{r.measured:.3g}", "rel err <= 1e-6", c.seconds, 5)


def test_criterion_02_conservation():
    with Clock() as c:
        r = verify.check_conservation(steps=10**6, seeds=10)
    report(2, "sum of theta after 1e6 steps, both engines", r.passed, f"{r.measured:.3g}", "<= 1e-8",
           c.seconds, 30)


def test_criterion_03_identity_suite():
    with Clock() as c:
        z = verify.check_z_drift(samples=10_000)
        low = verify.check_lower_sde_identities(samples=10_000)
    failures = z.measured + low.measured
    report(3, "closed forms vs inner products, tanh, alpha, sigma sandwich", z.passed and low.passed,
           f"{failures} failures", "0 at 1e-12", c.seconds, 5)


def test_criterion_04_drifted_bm_hitting():
    with Clock() as c:
        p, se = estimate_hitting_prob("drifted-bm", 1.0, 1.0, 20.0, 1e-3, 10_000)
    report(4, "drifted BM a=1 eps=1 hitting rate", 0.105 <= p <= 0.150, f"{p:.4f} (se {se:.4f})",
           "[0.105, 0.150]", c.seconds, 60)


def test_criterion_05_sigmoid_drift_hitting():
    target = 2 * stats.norm.cdf(-1.0)
    with Clock() as c:
        p0, _ = estimate_hitting_prob("sigmoid-drift", 0.0, 1.0, 1.0, 1e-4, 10_000)
        p50, _ = estimate_hitting_prob("sigmoid-drift", 50.0, 1.0, 100.0, 1e-2, 10_000)
    passed = abs(p0 - target) <= 0.015 and p50 == 0.0
    report(5, "sigmoid drift a=0 vs 2Phi(-1), a=50 zero hits", passed, f"a=0: {p0:.4f}, a=50: {p50:.0f}",
           f"|p - {target:.4f}| <= 0.015 and 0 hits", c.seconds, 60)


def test_criterion_06_two_arm_regret_bound():
    seeds = 3000
    bound = bounds.two_arm_regret_bound(0.1, 0.05, 1e4).value
    cfg = SdeConfig(0.01, 1e4, record_stride=10**9)
    inst = two_arm_instance(0.1)
    with Clock() as c:
        reg = np.array([run_continuous(inst, 0.05, cfg, s)[1].regret for s in range(seeds)])
    stat = reg.mean() + 2 * reg.std(ddof=1) / math.sqrt(seeds)
    report(6, f"two-arm mean regret + 2 SE over {seeds} seeds", stat <= 70.2,
           f"{stat:.2f} (mean {reg.mean():.2f})", f"<= 70.2 (bound {bound:.2f})", c.seconds, 600)


def test_criterion_07_z_stays_above_half_gap():
    seeds, n, delta = 500, 100, 0.1
    inst = uniform_gap_instance(5, 0.5)
    eta = bounds.lemma_eta_threshold(inst.delta2, n, delta)
    cfg = SdeConfig(0.01, n, record_stride=10**9)
    with Clock() as c:
        freq = np.mean([run_continuous(inst, eta, cfg, s)[1].min_Z <= -inst.delta2 / 2 for s in range(seeds)])
    thr = delta + 3 * binomial_se(delta, seeds)
    report(7, f"P(inf Z <= -delta2/2) at eta={eta:.3g}", freq <= thr, f"{freq:.3f}", f"<= {thr:.3f}",
           c.seconds, 300)


def test_criterion_08_theta_lower_bound():
    with Clock() as c:
        r = verify.check_lemma_bounds_theta(seeds=500, eta=0.5, n=100, delta=0.2)
    report(8, "P(inf theta <= -log(n/delta)) at eta=0.5", r.passed, f"{r.measured:.3f}",
           f"<= {r.threshold:.3f}", c.seconds, 300)


def test_criterion_09_inverse_pi_bound():
    with Clock() as c:
        r = verify.check_lemma_pi_sweep(samples=100_000)
    report(9, "1/pi_1 bound on admissible states", r.passed, f"{r.measured} violations ({r.detail})", "0",
           c.seconds, 10)


FIG_ETAS = (0.2, 0.1, 0.05, 0.02, 0.01, 0.005)


def _losing_fraction(inst, eta, n, seeds):
    return float(np.mean([run_one(inst, "discrete", eta, n, s, stride=n)[1].final_pi1 < 0.5
                          for s in range(seeds)]))


def test_criterion_10_bimodality():
    inst = lower_bound_instance(20, 0.002)
    n, seeds = 200_000, 100
    with Clock() as c:
        frac = {eta: _losing_fraction(inst, eta, n, seeds) for eta in FIG_ETAS}
    trend = ", ".join(f"{eta:g}:{f:.2f}" for eta, f in frac.items())
    report(10, f"fraction final pi_1 < 1/2 at eta=0.05 (grid {trend})", frac[0.05] >= 0.2,
           f"{frac[0.05]:.2f}", ">= 0.2", c.seconds, 1200)


def test_criterion_11_upper_bound_regime():
    seeds, n, h = 200, 100, 0.01
    inst = uniform_gap_instance(5, 0.5)
    eta = bounds.upper_bound_threshold(inst.delta2, n)
    cfg = SdeConfig(h, n, record_stride=1)
    with Clock() as c:
        curves, collapsed = [], []
        for s in range(seeds):
            traj, summary = run_continuous(inst, eta, cfg, s)
            curves.append(traj.regret)
            collapsed.append(summary.min_Z <= -inst.delta2 / 2)
    mean = np.mean(curves, axis=0)
    t = traj.times
    q = len(t) // 4
    first = (mean[q] - mean[0]) / (t[q] - t[0])
    last = (mean[-1] - mean[-1 - q]) / (t[-1] - t[-1 - q])
    ok_frac = 1 - float(np.mean(collapsed))
    passed = last < 0.5 * first and ok_frac >= 0.85
    report(11, f"sublinear pseudo-regret at eta={eta:.4g}", passed,
           f"slope ratio {last / first:.3f}, no-collapse fraction {ok_frac:.2f}",
           "ratio < 0.5 and fraction >= 0.85", c.seconds, 300)


def test_criterion_12_psi():
    with Clock() as c:
        r = verify.check_psi()
    report(12, "psi inequalities and derivative grid", r.passed, f"{r.measured:.3g} ({r.detail})", "<= 1e-6",
           c.seconds, 1)
