import numpy as np
import pytest

from pgbandit.core import BanditInstance, PolicyState, instant_regret, two_arm_instance, uniform_gap_instance
from pgbandit.discrete import BLOCK, run_discrete, sample_action, step_discrete
from pgbandit.rng import DISCRETE, make_rng


def test_forced_update_two_arms():
    new, rec = step_discrete(PolicyState(np.zeros(2)), BanditInstance(np.array([1.0, 0.0]), np.ones(2)), 0.1,
                             action=0, reward=1.0)
    np.testing.assert_allclose(new.theta, [0.05, -0.05], atol=1e-15)
    assert rec.regret_increment == 0.0


def test_zero_reward_leaves_theta():
    theta = np.array([0.2, -0.7, 0.5])
    new, _ = step_discrete(PolicyState(theta), uniform_gap_instance(3, 0.5), 0.3, action=2, reward=0.0)
    np.testing.assert_array_equal(new.theta, theta)


def test_forced_update_three_arms():
    new, rec = step_discrete(PolicyState(np.zeros(3)), uniform_gap_instance(3, 0.5), 1.0, action=1, reward=1.0)
    np.testing.assert_allclose(new.theta, [-1 / 3, 2 / 3, -1 / 3], atol=1e-15)
    assert rec.regret_increment == pytest.approx(0.5)


def test_sample_action_inverse_cdf():
    pi = np.array([0.2, 0.5, 0.3])
    assert sample_action(pi, 0.0) == 0
    assert sample_action(pi, 0.19999) == 0
    assert sample_action(pi, 0.2) == 1
    assert sample_action(pi, 0.69) == 1
    assert sample_action(pi, 0.999999) == 2


def test_one_round_regret_is_a_gap():
    b = uniform_gap_instance(4, 0.3)
    for seed in range(20):
        _, s = run_discrete(b, 0.5, 1, seed)
        assert s.regret in (0.0, pytest.approx(0.3))


def test_kernel_matches_step_function():
    b = BanditInstance(np.array([1.0, 0.6, 0.3, 0.0]), np.array([1.0, 0.5, 0.8, 0.2]))
    eta, n, seed = 0.4, 300, 11
    _, summary = run_discrete(b, eta, n, seed)
    rng = make_rng(seed, DISCRETE)
    u, g = rng.random(BLOCK), rng.standard_normal(BLOCK)
    state = PolicyState(np.zeros(4))
    pseudo = 0.0
    for t in range(n):
        pseudo += instant_regret(state.pi, b)
        a = sample_action(state.pi, u[t])
        state, _ = step_discrete(state, b, eta, action=a, reward=b.mu[a] + b.sigma[a] * g[t])
    np.testing.assert_allclose(summary.theta, state.theta, rtol=0, atol=1e-12)
    assert summary.regret == pytest.approx(state.cum_regret, abs=1e-12)
    assert summary.pseudo_regret == pytest.approx(pseudo, abs=1e-12)


def test_deterministic_and_seed_sensitive():
    b = uniform_gap_instance(5, 0.2)
    t1, s1 = run_discrete(b, 0.2, 5000, 3, stride=7)
    t2, s2 = run_discrete(b, 0.2, 5000, 3, stride=7)
    t3, _ = run_discrete(b, 0.2, 5000, 4, stride=7)
    assert t1.equals(t2)
    assert s1 == s2
    assert not t1.equals(t3)


def test_stride_subsamples_but_summary_uses_every_round():
    b = two_arm_instance(0.1)
    full, s_full = run_discrete(b, 0.1, 1000, 5, stride=1)
    sub, s_sub = run_discrete(b, 0.1, 1000, 5, stride=100)
    np.testing.assert_array_equal(sub.times, np.arange(0, 1001, 100))
    np.testing.assert_array_equal(sub.pi1, full.pi1[::100])
    assert s_full.regret == s_sub.regret
    assert full.times[-1] == 1000


def test_common_noise_across_eta():
    # eta = 0 never moves theta, so actions follow the first uniforms of the stream
    b = two_arm_instance(0.5)
    _, s0 = run_discrete(b, 0.0, 50, 9)
    rng = make_rng(9, DISCRETE)
    u = rng.random(BLOCK)[:50]
    assert s0.regret == pytest.approx(0.5 * np.sum(u >= 0.5))


def test_conservation_long_run():
    _, s = run_discrete(uniform_gap_instance(5, 0.5), 0.1, 10**6, 0, stride=10**6)
    assert abs(s.theta.sum()) <= 1e-8


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_is_flagged():
    # rewards near the float limit push theta to inf on the first update
    b = BanditInstance(np.array([1e300, 1e300]), np.ones(2), "permissive")
    _, s = run_discrete(b, 1e10, 100, 0)
    assert s.diverged
    assert s.final_time < 100


def test_huge_eta_on_bounded_rewards_stays_finite():
    # a deterministic policy stops moving, so theta saturates instead of overflowing
    _, s = run_discrete(BanditInstance(np.array([1.0, 0.0]), np.ones(2)), 1e306, 100, 0)
    assert not s.diverged
    assert np.all(np.isfinite(s.theta))


def test_mean_regret_beats_uniform_policy():
    b = BanditInstance(np.array([1.0, 0.0]), np.ones(2))
    n = 10**4
    reg = np.array([run_discrete(b, 0.1, n, s, stride=n)[1].regret for s in range(500)])
    assert np.isfinite(reg.mean())
    assert reg.mean() < 0.5 * n


def test_frozen_policy_action_frequencies():
    b = uniform_gap_instance(3, 0.4)
    state = PolicyState(np.array([0.4, -0.1, -0.3]))
    rng = make_rng(123)
    draws = 100_000
    counts = np.zeros(3)
    for _ in range(draws):
        _, rec = step_discrete(state, b, 0.0, rng)
        counts[rec.action] += 1
    sd = np.sqrt(state.pi * (1 - state.pi) / draws)
    assert np.all(np.abs(counts / draws - state.pi) <= 3 * sd)
