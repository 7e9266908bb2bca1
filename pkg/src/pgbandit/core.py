"""Bandit instances, the softmax policy and the value/gradient/regret primitives.

Everything here is a pure function of its arguments.
"""

from dataclasses import dataclass, field

import numpy as np

PAPER_STANDARD = "paper-standard"
PERMISSIVE = "permissive"


class InvalidArgument(ValueError):
    pass


@dataclass(frozen=True)
class BanditInstance:
    """k-armed Gaussian bandit with means `mu` and reward standard deviations `sigma`.

    In paper-standard mode arm 1 must be the unique best arm, means are sorted
    non-increasingly inside [0, 1] and every sigma is at most 1. Permissive mode
    only asks for finite values.
    """

    mu: np.ndarray
    sigma: np.ndarray
    mode: str = PAPER_STANDARD
    k: int = field(init=False)

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).copy()
        sigma = np.asarray(self.sigma, dtype=float).copy()
        if mu.ndim != 1 or sigma.shape != mu.shape:
            raise InvalidArgument("mu and sigma must be vectors of equal length")
        if mu.size < 2:
            raise InvalidArgument("need at least two arms")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise InvalidArgument("mu and sigma must be finite")
        if np.any(sigma < 0):
            raise InvalidArgument("sigma must be non-negative")
        if self.mode == PAPER_STANDARD:
            if not (1.0 >= mu[0] > mu[1] and mu[-1] >= 0.0 and np.all(np.diff(mu[1:]) <= 0)):
                raise InvalidArgument(f"means {mu} violate 1 >= mu_1 > mu_2 >= ... >= mu_k >= 0")
            if sigma.max() > 1.0:
                raise InvalidArgument("paper-standard instances need max(sigma) <= 1")
        elif self.mode != PERMISSIVE:
            raise InvalidArgument(f"unknown validation mode {self.mode!r}")
        mu.flags.writeable = False
        sigma.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "k", int(mu.size))

    @property
    def mu_star(self) -> float:
        return float(self.mu.max())

    @property
    def gaps(self) -> np.ndarray:
        """Suboptimality gaps mu_star - mu_a (zero for every tied best arm)."""
        return self.mu_star - self.mu

    @property
    def delta2(self) -> float:
        """Smallest positive gap."""
        g = self.gaps
        pos = g[g > 0]
        return float(pos.min()) if pos.size else 0.0

    @property
    def Sigma(self) -> np.ndarray:
        return np.diag(self.sigma**2)


@dataclass
class PolicyState:
    """Parameter vector with its cached softmax and running accumulators."""

    theta: np.ndarray
    t: float = 0.0
    cum_regret: float = 0.0
    clock_s: float = 0.0
    pi: np.ndarray = field(init=False)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.pi = softmax(self.theta)

    @classmethod
    def initial(cls, k: int) -> "PolicyState":
        return cls(np.zeros(k))


def _check_vector(x, name):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidArgument(f"{name} must be a vector")
    if not np.all(np.isfinite(x)):
        raise InvalidArgument(f"{name} must be finite")
    return x


def _check_length(x, inst):
    if x.shape[0] != inst.k:
        raise InvalidArgument(f"length {x.shape[0]} does not match k={inst.k}")


def softmax(theta) -> np.ndarray:
    theta = _check_vector(theta, "theta")
    z = np.exp(theta - theta.max())
    return z / z.sum()


def value(theta, inst: BanditInstance) -> float:
    theta = _check_vector(theta, "theta")
    _check_length(theta, inst)
    return float(softmax(theta) @ inst.mu)


def policy_gradient(theta, inst: BanditInstance) -> np.ndarray:
    """Exact gradient (diag(pi) - pi pi^T) mu of the value function."""
    theta = _check_vector(theta, "theta")
    _check_length(theta, inst)
    pi = softmax(theta)
    # centring mu first keeps the components summing to zero at round-off level
    return pi * (inst.mu - pi @ inst.mu)


def instant_regret(pi, inst: BanditInstance) -> float:
    pi = _check_vector(pi, "pi")
    _check_length(pi, inst)
    return float(inst.mu_star - pi @ inst.mu)


def two_arm_instance(delta2: float) -> BanditInstance:
    return BanditInstance(np.array([1.0, 1.0 - delta2]), np.ones(2))


def uniform_gap_instance(k: int, delta: float) -> BanditInstance:
    mu = np.full(k, 1.0 - delta)
    mu[0] = 1.0
    return BanditInstance(mu, np.ones(k))
