"""Euler-Maruyama integration of continuous-time policy gradient and of the
two scalar hitting-time SDEs.

For the k-armed process the observation increment is
    dX = diag(pi) mu dt + diag(sqrt(pi)) Sigma^{1/2} dB
and the parameters move by eta (Id - pi 1^T) dX. The noise is always drawn as
k independent Gaussians and projected, never sampled in k-1 dimensions.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .core import BanditInstance, InvalidArgument, PolicyState, instant_regret, softmax
from .discrete import _alloc_records, finish_run, monitor_for
from .rng import CONTINUOUS, SCALAR, make_rng

BLOCK = 4096
SCALAR_BLOCK = 1 << 16


@dataclass(frozen=True)
class SdeConfig:
    h: float
    horizon: float
    record_stride: int = 1
    clamp_floor: float = 0.0
    halt_on_tau: bool = False

    def __post_init__(self):
        if not (self.h > 0 and np.isfinite(self.h)):
            raise InvalidArgument("h must be positive")
        if not self.horizon > 0:
            raise InvalidArgument("horizon must be positive")
        if self.h > self.horizon:
            raise InvalidArgument("h must not exceed the horizon")
        if self.record_stride < 1:
            raise InvalidArgument("record_stride must be at least 1")
        if self.clamp_floor < 0:
            raise InvalidArgument("clamp_floor must be non-negative")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon / self.h)))


def default_step(eta: float, guard: float = 1.0) -> float:
    """min(0.01, 0.1/eta^2) * guard: keeps the per-step parameter noise eta*sqrt(h) small."""
    if eta <= 0:
        return 0.01 * guard
    return min(0.01, 0.1 / eta**2) * guard


def step_euler(state: PolicyState, inst: BanditInstance, eta: float, h: float, rng=None,
               xi=None, clamp_floor: float = 0.0) -> PolicyState:
    """One Euler-Maruyama step; `xi` (k standard normals) overrides the draw."""
    if h <= 0:
        raise InvalidArgument("h must be positive")
    if eta < 0:
        raise InvalidArgument("eta must be non-negative")
    pi = softmax(state.theta)
    if xi is None:
        xi = rng.standard_normal(inst.k)
    root = np.sqrt(np.maximum(pi, clamp_floor))
    dX = pi * inst.mu * h + root * inst.sigma * np.sqrt(h) * np.asarray(xi, dtype=float)
    theta = state.theta + eta * (dX - pi * dX.sum())
    return PolicyState(theta, t=state.t + h,
                       cum_regret=state.cum_regret + instant_regret(pi, inst) * h,
                       clock_s=state.clock_s)


def run_continuous(inst: BanditInstance, eta: float, cfg: SdeConfig, seed: int, monitor=None):
    """Integrate from theta = 0 to cfg.horizon.

    Regret and (with a LowerBoundMonitor) the clock s(t) are left-endpoint
    Riemann sums. The monitor records the first stopping condition met on the
    grid; it halts the run only when cfg.halt_on_tau is set.
    """
    if not eta >= 0:
        raise InvalidArgument("eta must be non-negative")
    if monitor is not None and monitor.halt != cfg.halt_on_tau:
        monitor.halt = cfg.halt_on_tau
    rng = make_rng(seed, CONTINUOUS)
    k = inst.k
    n_steps = cfg.n_steps
    h = cfg.h
    theta = np.zeros(k)
    pi = np.empty(k)
    mu = np.ascontiguousarray(inst.mu)
    sigma = np.ascontiguousarray(inst.sigma)
    acc = K.new_acc()
    mon, monitor_on = monitor_for(monitor, eta)
    recs = _alloc_records(n_steps, cfg.record_stride, k)
    for start in range(0, n_steps, BLOCK):
        xi = rng.standard_normal((BLOCK, k))
        end = min(start + BLOCK, n_steps)
        K.euler_block(theta, pi, mu, sigma, float(eta), h, start, end, xi, cfg.clamp_floor,
                      cfg.record_stride, acc, mon, *recs)
        if acc[K.DIVERGED] > 0 or acc[K.HALTED] > 0:
            break
    return finish_run(theta, pi, acc, mon, recs, cfg.record_stride, seed, eta,
                      n_steps * h, lambda i: i * h, monitor_on)


def _n_scalar_steps(horizon, h):
    if not (h > 0 and horizon > 0):
        raise InvalidArgument("h and horizon must be positive")
    return max(1, int(round(horizon / h)))


def simulate_drifted_bm(a: float, eps: float, horizon: float, h: float, seed: int):
    """Euler path of dX = a dt + dB from 0; returns (min over the grid after t=0, hit)."""
    n = _n_scalar_steps(horizon, h)
    rng = make_rng(seed, SCALAR)
    x = 0.0
    lowest = np.inf
    sqrt_h = np.sqrt(h)
    for start in range(0, n, SCALAR_BLOCK):
        m = min(SCALAR_BLOCK, n - start)
        path = x + np.cumsum(a * h + sqrt_h * rng.standard_normal(m))
        lowest = min(lowest, float(path.min()))
        x = float(path[-1])
    return lowest, lowest <= -eps


def sigmoid_drift(x: float, a: float) -> float:
    return a / (np.exp(x) + 1.0)


def simulate_sigmoid_drift_sde(a: float, eps: float, horizon: float, h: float, seed: int):
    """Euler path of dX = a/(e^X + 1) dt + dB from 0, drift at the left endpoint."""
    n = _n_scalar_steps(horizon, h)
    rng = make_rng(seed, SCALAR)
    x = 0.0
    lowest = np.inf
    for start in range(0, n, SCALAR_BLOCK):
        m = min(SCALAR_BLOCK, n - start)
        x, lowest = K.sigmoid_drift_block(x, float(a), float(h), rng.standard_normal(m), lowest)
    return float(lowest), bool(lowest <= -eps)
