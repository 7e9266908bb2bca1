"""Discrete-time softmax policy gradient with realized regret accounting."""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .core import BanditInstance, InvalidArgument, PolicyState, softmax
from .records import RunSummary, Trajectory
from .rng import DISCRETE, make_rng

BLOCK = 4096


@dataclass(frozen=True)
class DiscreteStepRecord:
    round: int
    action: int
    reward: float
    theta_after: np.ndarray
    regret_increment: float


def sample_action(pi: np.ndarray, u: float) -> int:
    """Inverse-CDF draw of an arm from `pi` using one uniform `u` in [0, 1)."""
    idx = int(np.searchsorted(np.cumsum(pi), u, side="right"))
    return min(idx, len(pi) - 1)


def step_discrete(state: PolicyState, inst: BanditInstance, eta: float, rng=None,
                  action=None, reward=None):
    """One round: sample an arm, observe its reward and take the REINFORCE step.

    `action` (0-based) and `reward` override the random draws. The uniform is
    always drawn before the Gaussian so streams stay aligned with run_discrete.
    """
    if eta < 0:
        raise InvalidArgument("eta must be non-negative")
    pi = softmax(state.theta)
    if action is None:
        action = sample_action(pi, rng.random())
    if reward is None:
        g = rng.standard_normal() if rng is not None else 0.0
        reward = inst.mu[action] + inst.sigma[action] * g
    e = np.zeros(inst.k)
    e[action] = 1.0
    theta = state.theta + eta * (e - pi) * reward
    inc = inst.mu_star - inst.mu[action]
    new = PolicyState(theta, t=state.t + 1, cum_regret=state.cum_regret + inc, clock_s=state.clock_s)
    return new, DiscreteStepRecord(int(state.t) + 1, int(action), float(reward), theta, float(inc))


def _alloc_records(n_steps, stride, k):
    n_rec = n_steps // stride + 2
    return (np.zeros(n_rec), np.zeros(n_rec), np.zeros((n_rec, k - 1)),
            np.zeros(n_rec), np.zeros(n_rec), np.zeros(n_rec))


def finish_run(theta, pi, acc, mon, recs, stride, seed, eta, horizon_time, time_of, monitor_on):
    """Observe the final grid point and package the trajectory and summary."""
    steps = int(acc[K.STEPS])
    diverged = acc[K.DIVERGED] > 0
    halted = acc[K.HALTED] > 0
    if not diverged and not halted:
        K.observe(steps, time_of(steps), theta, pi, stride, acc, mon, *recs, True)
        if monitor_on and acc[K.TAU_COND] == 0:
            acc[K.TAU_COND] = 1
            acc[K.TAU_TIME] = horizon_time
            acc[K.TAU_S] = acc[K.CLOCK]
    r = int(acc[K.REC_IDX])
    times, pi1, Z, S, s, reg = (x[:r] for x in recs)
    events = []
    if acc[K.TAU_COND] > 0:
        events.append((int(acc[K.TAU_COND]), float(acc[K.TAU_TIME])))
    traj = Trajectory(times.copy(), pi1.copy(), Z.copy(), S.copy(), s.copy(), reg.copy(), events)
    tau = acc[K.TAU_COND] > 0
    summary = RunSummary(
        seed=int(seed),
        eta=float(eta),
        final_pi1=float(softmax(theta)[0]) if not diverged else float("nan"),
        regret=float(acc[K.REGRET]),
        pseudo_regret=float(acc[K.PSEUDO]),
        diverged=bool(diverged),
        tau_condition=int(acc[K.TAU_COND]) if tau else None,
        tau_time=float(acc[K.TAU_TIME]) if tau else None,
        tau_s=float(acc[K.TAU_S]) if tau else None,
        min_Z=float(acc[K.MIN_Z]),
        min_theta=float(acc[K.MIN_THETA]),
        final_time=float(time_of(steps)),
        z_bound_violations=int(acc[K.ZBOUND_VIOL]),
        theta=theta.copy(),
    )
    return traj, summary


def monitor_for(monitor, eta):
    if monitor is None:
        return K.monitor_array(), False
    return K.monitor_array(True, monitor.eps, monitor.s_max, monitor.delta2, monitor.halt, eta), True


def run_discrete(inst: BanditInstance, eta: float, n: int, seed: int, stride: int = 1,
                 monitor=None):
    """Run n rounds from theta = 0.

    Each round consumes one uniform (arm choice) and one Gaussian (reward noise)
    from the seed's stream, so runs with the same seed share noise across eta.
    With a LowerBoundMonitor the clock advances by eta*pibar*(1-pibar) per round.
    """
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    if stride < 1:
        raise InvalidArgument("stride must be at least 1")
    if not eta >= 0:
        raise InvalidArgument("eta must be non-negative")
    rng = make_rng(seed, DISCRETE)
    k = inst.k
    theta = np.zeros(k)
    pi = np.empty(k)
    mu = np.ascontiguousarray(inst.mu)
    sigma = np.ascontiguousarray(inst.sigma)
    acc = K.new_acc()
    mon, monitor_on = monitor_for(monitor, eta)
    recs = _alloc_records(n, stride, k)
    for start in range(0, n, BLOCK):
        u = rng.random(BLOCK)
        g = rng.standard_normal(BLOCK)
        end = min(start + BLOCK, n)
        K.discrete_block(theta, pi, mu, sigma, float(eta), start, end, u, g, stride, acc, mon, *recs)
        if acc[K.DIVERGED] > 0 or acc[K.HALTED] > 0:
            break
    return finish_run(theta, pi, acc, mon, recs, stride, seed, eta, float(n), float, monitor_on)
