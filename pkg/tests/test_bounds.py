import math

import numpy as np
import pytest

from pgbandit import bounds


def test_two_arm_reference_value():
    r = bounds.two_arm_regret_bound(0.1, 0.05, 1e4)
    assert r.hypotheses_met
    assert r.value == pytest.approx(10 * math.log(151) + 20, rel=1e-12)
    assert r.value == pytest.approx(70.17, abs=0.01)


def test_two_arm_small_n_limit():
    r = bounds.two_arm_regret_bound(0.1, 0.05, 0.0)
    assert r.value == pytest.approx(4 / (2 * 1 * 0.1))


def test_two_arm_vacuous_when_a_at_most_one():
    r = bounds.two_arm_regret_bound(0.1, 0.1, 1e4)
    assert not r.hypotheses_met
    assert r.value == math.inf


def test_two_arm_near_degenerate_flag():
    d2 = 0.1
    r = bounds.two_arm_regret_bound(d2, d2 / (1 + 1e-12), 1e4)
    assert r.hypotheses_met
    assert "near-degenerate" in r.hypothesis_notes
    assert r.value > 1e11


def test_two_arm_monotone_in_n():
    vals = [bounds.two_arm_regret_bound(0.3, 0.1, n).value for n in np.geomspace(1, 1e9, 40)]
    assert np.all(np.diff(vals) >= 0)


def test_upper_bound_threshold_values():
    assert bounds.upper_bound_threshold(0.5, 1e4) == pytest.approx(0.25 / (8 * math.log(2e8)), rel=1e-14)
    assert bounds.upper_bound_threshold(0.5, 1e4) == pytest.approx(1.635e-3, abs=1e-6)
    assert bounds.upper_bound_threshold(1.0, 3) == pytest.approx(0.04325, abs=1e-5)
    assert bounds.upper_bound_threshold(0.4, 100) == pytest.approx(4 * bounds.upper_bound_threshold(0.2, 100))


def test_upper_bound_threshold_warns_for_tiny_n():
    with pytest.warns(UserWarning):
        bounds.upper_bound_threshold(0.5, 2)


def test_upper_bound_regret():
    r = bounds.upper_bound_regret(5, 1.5e-3, 1e4)
    assert r.value == pytest.approx(12 * 5 * math.log(1e8) * math.log(6) / 1.5e-3 + 10, rel=1e-12)
    assert r.value == pytest.approx(1.320e6, rel=1e-3)
    assert bounds.upper_bound_regret(5, math.inf, 1e4).value == 10


def test_hitting_bounds():
    assert bounds.bm_drift_bound(1, 1) == pytest.approx(math.exp(-2))
    assert bounds.bm_drift_bound(3, 0) == 1.0
    a = (math.e + 1) / 2
    assert bounds.bm_less_drift_bound(a, 1, 4) == pytest.approx(2 * math.exp(-1))
    assert bounds.bm_less_drift_bound(a, 1, 0) == pytest.approx(math.exp(-1))
    a_star = bounds.bm_less_drift_sufficient_a(1.0, 100, 0.01)
    assert bounds.bm_less_drift_bound(a_star, 1.0, 100) == pytest.approx(0.01)


def test_s_max():
    assert bounds.s_max(0.05, 1e4, 0.1) == pytest.approx((math.log(8000) + math.log(1e4)) / 0.9)
    assert bounds.s_max(0.05, 1e4, 0.1) == pytest.approx(20.22, abs=0.01)
    assert bounds.s_max(0.05, 1e4, 0.0) == pytest.approx(math.log(400 * 1e4 / 0.05))
    assert bounds.s_max(400, 1, 0.0) == 0.0
    with pytest.raises(ValueError):
        bounds.s_max(0.05, 1e4, 1.0)


def test_z_threshold_examples():
    assert bounds.z_threshold(0.0, 0.04, 0.0) == pytest.approx(2 * math.asinh(0.0375), rel=1e-14)
    assert bounds.z_threshold(0.0, 0.04, 0.0) == pytest.approx(0.07498, abs=1e-5)
    assert bounds.z_threshold(math.log(4), 0.04, 0.1) == pytest.approx(0.0, abs=1e-15)


def test_z_threshold_large_s_is_finite_and_below_relaxation():
    for s in (10.0, 100.0, 1e3, 1e4):
        r = bounds.z_threshold_report(s, 0.05, 0.1)
        assert math.isfinite(r.threshold)
        assert r.argument_negative and r.consistent
    # overflow-safe branch agrees with direct asinh where both are finite
    s = 80.0
    direct = 2 * math.asinh(math.sqrt(0.05) * (math.exp(-s) / 4 - 1 / 16) * math.exp(0.45 * s))
    assert bounds.z_threshold(s, 0.05, 0.1) == pytest.approx(direct, rel=1e-12)


def test_report_row():
    row = bounds.upper_bound_regret(3, 0.1, 100).as_row()
    assert row["name"] == "upper_bound_regret" and row["k"] == 3
