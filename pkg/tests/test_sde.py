import numpy as np
import pytest

from pgbandit.core import BanditInstance, InvalidArgument, PolicyState, instant_regret, two_arm_instance, uniform_gap_instance
from pgbandit.rng import CONTINUOUS, make_rng
from pgbandit.sde import (BLOCK, SdeConfig, default_step, run_continuous, sigmoid_drift, simulate_drifted_bm,
                          simulate_sigmoid_drift_sde, step_euler)
from pgbandit.verify import ode_reference


def test_zero_noise_step_is_gradient_ascent():
    b = BanditInstance(np.array([1.0, 0.0]), np.zeros(2))
    new = step_euler(PolicyState(np.zeros(2)), b, 1.0, 0.01, xi=np.zeros(2))
    np.testing.assert_allclose(new.theta, [0.0025, -0.0025], atol=1e-15)


def test_eta_zero_freezes_theta():
    b = two_arm_instance(0.3)
    new = step_euler(PolicyState(np.array([0.4, -0.4])), b, 0.0, 0.01, rng=make_rng(0))
    np.testing.assert_array_equal(new.theta, [0.4, -0.4])


def test_step_rejects_bad_h():
    with pytest.raises(InvalidArgument):
        step_euler(PolicyState(np.zeros(2)), two_arm_instance(0.1), 0.1, 0.0, xi=np.zeros(2))


@pytest.mark.parametrize("kw", [dict(h=0, horizon=1), dict(h=2, horizon=1), dict(h=0.1, horizon=1, record_stride=0),
                                dict(h=0.1, horizon=1, clamp_floor=-1)])
def test_config_validation(kw):
    with pytest.raises(InvalidArgument):
        SdeConfig(**kw)


def test_default_step():
    assert default_step(0.05) == 0.01
    assert default_step(10.0) == pytest.approx(1e-3)
    assert default_step(10.0, guard=0.5) == pytest.approx(5e-4)


def test_kernel_matches_step_function():
    b = BanditInstance(np.array([1.0, 0.7, 0.1]), np.array([0.9, 1.0, 0.3]))
    eta, h, steps, seed = 0.8, 0.02, 250, 4
    _, summary = run_continuous(b, eta, SdeConfig(h, steps * h), seed)
    xi = make_rng(seed, CONTINUOUS).standard_normal((BLOCK, 3))
    state = PolicyState(np.zeros(3))
    for i in range(steps):
        state = step_euler(state, b, eta, h, xi=xi[i])
    np.testing.assert_allclose(summary.theta, state.theta, rtol=0, atol=1e-12)
    assert summary.regret == pytest.approx(state.cum_regret, abs=1e-12)


def test_regret_is_left_endpoint_sum():
    b = uniform_gap_instance(3, 0.5)
    traj, s = run_continuous(b, 0.0, SdeConfig(0.1, 1.0), 0)
    # eta = 0 keeps pi uniform, so the integral is exact
    assert s.regret == pytest.approx(instant_regret(np.full(3, 1 / 3), b) * 1.0, abs=1e-12)
    assert traj.times[-1] == pytest.approx(1.0)


def test_reproducible_and_stride_independent_summary():
    b = uniform_gap_instance(5, 0.3)
    t1, s1 = run_continuous(b, 0.3, SdeConfig(0.01, 20, 1), 7)
    t2, s2 = run_continuous(b, 0.3, SdeConfig(0.01, 20, 50), 7)
    assert s1.regret == s2.regret
    np.testing.assert_array_equal(t2.pi1, t1.pi1[::50])
    assert t1.equals(run_continuous(b, 0.3, SdeConfig(0.01, 20, 1), 7)[0])


def test_prefix_consistency_across_horizons():
    b = uniform_gap_instance(4, 0.2)
    short, _ = run_continuous(b, 0.5, SdeConfig(0.01, 30), 2)
    long, _ = run_continuous(b, 0.5, SdeConfig(0.01, 80), 2)
    np.testing.assert_array_equal(long.pi1[: short.pi1.size], short.pi1)


def test_noiseless_limit_matches_ode():
    b = BanditInstance(np.array([1.0, 0.5, 0.0]), np.zeros(3))
    ref = ode_reference(b, 1.0, 10.0)
    errs = [np.max(np.abs(run_continuous(b, 1.0, SdeConfig(h, 10.0, 10**9), 0)[1].theta - ref))
            for h in (0.1, 0.05, 0.025)]
    assert 1.7 <= errs[0] / errs[1] <= 2.3
    assert 1.7 <= errs[1] / errs[2] <= 2.3


def test_clamp_floor_changes_only_noise_scale():
    b = two_arm_instance(0.5)
    state = PolicyState(np.array([30.0, -30.0]))
    xi = np.array([0.0, 1.0])
    raw = step_euler(state, b, 1.0, 0.01, xi=xi)
    clamped = step_euler(state, b, 1.0, 0.01, xi=xi, clamp_floor=0.25)
    assert np.abs(clamped.theta - state.theta).max() > 100 * np.abs(raw.theta - state.theta).max()


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_halts_run():
    b = BanditInstance(np.array([1e305, 0.0]), np.ones(2), "permissive")
    _, s = run_continuous(b, 1e10, SdeConfig(0.01, 1.0), 0)
    assert s.diverged
    assert s.final_time < 1.0


def test_drifted_bm_huge_eps_never_hits():
    lowest, hit = simulate_drifted_bm(1.0, 1e6, 5.0, 1e-2, 0)
    assert not hit
    assert np.isfinite(lowest)


def test_sigmoid_drift_values():
    assert sigmoid_drift(0.0, 2.0) == pytest.approx(1.0)
    assert sigmoid_drift(50.0, 2.0) < 1e-20


def test_sigmoid_a0_is_plain_bm():
    # same scalar stream, so a = 0 must reproduce the zero-drift BM path minimum
    for seed in range(5):
        assert simulate_sigmoid_drift_sde(0.0, 1.0, 3.0, 1e-3, seed)[0] == pytest.approx(
            simulate_drifted_bm(0.0, 1.0, 3.0, 1e-3, seed)[0], abs=1e-9)
