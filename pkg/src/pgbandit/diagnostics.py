"""Analysis quantities from the regret proofs, each paired with a direct recomputation.

Covers the log-ratio process Z_{t,a} = theta_1 - theta_a, the (S, Z) coordinates
and clock of the lower-bound construction with its stopping conditions, the
psi potential of the upper bound and the 1/pi_1 inequality.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bounds
from .core import BanditInstance, InvalidArgument, instant_regret, policy_gradient, softmax


class DegenerateState(ValueError):
    pass


def _close(x, y, tol=1e-12):
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def z_coefficients(theta, inst: BanditInstance, eta: float, a: int):
    """Drift and diffusion of Z_{t,a} for arm index `a` (0-based, a >= 1).

    The closed-form drift eta[pi_a Delta_a + (pi_1 - pi_a) R] is checked
    against <e_1 - e_a, eta * gradient>.
    """
    if a < 1 or a >= inst.k:
        raise InvalidArgument("Z is defined against arm 1 only for the other arms")
    theta = np.asarray(theta, dtype=float)
    pi = softmax(theta)
    R = instant_regret(pi, inst)
    gap = inst.mu[0] - inst.mu[a]
    drift = eta * (pi[a] * gap + (pi[0] - pi[a]) * R)
    diffusion = eta * math.sqrt(max(pi[0] + pi[a] - (pi[0] - pi[a]) ** 2, 0.0))
    grad = eta * policy_gradient(theta, inst)
    direct = grad[0] - grad[a]
    if not _close(drift, direct):
        raise AssertionError(f"Z drift mismatch: closed form {drift!r} vs gradient {direct!r}")
    return drift, diffusion


def noise_loadings(pi, sigma, eta):
    """Matrix L with d(theta) noise = L dB: eta (Id - pi 1^T) diag(sqrt(pi) sigma)."""
    k = len(pi)
    return eta * (np.eye(k) - np.outer(pi, np.ones(k))) @ np.diag(np.sqrt(pi) * sigma)


@dataclass
class LowerSdeCoefficients:
    C: float
    drift_S: float
    diff_S: float
    alpha: float
    sigma2: float
    G: float
    checks: dict


def lower_sde_coefficients(theta, inst: BanditInstance, eta: float, tol: float = 1e-12):
    """Clock rate, S coefficients and the Z coefficients of the lower-bound analysis.

    The instance must be the lower-bound family: gaps (0, d2, 1, ..., 1) and
    noise only on arms 1 and 2; theta must have equal entries beyond arm 2.
    `checks` maps each cross-check to (lhs, rhs, ok).
    """
    theta = np.asarray(theta, dtype=float)
    k = inst.k
    if k < 3:
        raise InvalidArgument("need at least three arms")
    scale = max(1.0, float(np.abs(theta).max()))
    if abs(theta.sum()) > 1e-8 * scale or np.ptp(theta[2:]) > 1e-9 * scale:
        raise InvalidArgument("theta must be zero-sum with equal entries beyond arm 2")
    pi = softmax(theta)
    pbar = float(pi[2:].sum())
    if not (0.0 < pbar < 1.0) or pbar * (1 - pbar) < 1e-300:
        raise DegenerateState(f"mass on arms 3+ is {pbar!r}")
    m = k - 2
    d2 = inst.mu[0] - inst.mu[1]
    R = instant_regret(pi, inst)
    C = eta * pbar * (1 - pbar)
    drift_S = (1 - pi[1] / (1 - pbar) * d2) * C
    diff_S = math.sqrt(eta * pbar * C)
    alpha = pi[1] * (1 + pi[0] - pi[1]) / (pbar * (1 - pbar))
    ratio = (pi[0] - pi[1]) / (pi[0] + pi[1])
    sigma2 = 1 + 4 * pi[0] * pi[1] / (pbar * (1 - pbar)) - (1 - pbar) * ratio**2
    S = theta[0] + theta[1]
    Z = theta[0] - theta[1]
    G = math.exp((S + Z) / 2 + S / m) / m
    th = math.tanh(Z / 2)

    grad = eta * policy_gradient(theta, inst)
    L = noise_loadings(pi, inst.sigma, eta)
    e_S = np.zeros(k)
    e_S[:2] = 1.0
    e_Z = np.zeros(k)
    e_Z[0], e_Z[1] = 1.0, -1.0
    direct_drift_S = eta * (pi[0] * R + pi[1] * (R - d2))
    z_drift = eta * (pi[1] * d2 + (pi[0] - pi[1]) * R)

    checks = {
        "drift_S": (drift_S, direct_drift_S, _close(drift_S, direct_drift_S, tol)),
        "drift_S_gradient": (drift_S, float(e_S @ grad), _close(drift_S, float(e_S @ grad), tol)),
        "diff_S": (diff_S, eta * pbar * math.sqrt(1 - pbar), _close(diff_S, eta * pbar * math.sqrt(1 - pbar), tol)),
        "diff_S_loadings": (diff_S, float(np.linalg.norm(e_S @ L)), _close(diff_S, float(np.linalg.norm(e_S @ L)), tol)),
        "tanh": (ratio, th, _close(ratio, th, tol)),
        "alpha_le_1_plus_2G": (alpha, 1 + 2 * G, alpha <= 1 + 2 * G * (1 + tol)),
        "sigma2_lower": (1 - th**2, sigma2, 1 - th**2 <= sigma2 * (1 + tol)),
        "sigma2_upper": (sigma2, 1 + 4 * G, sigma2 <= (1 + 4 * G) * (1 + tol)),
        "G_ratio": (G, pi[0] / pbar, _close(G, pi[0] / pbar, 1e-9)),
        "drift_Z_clock": (z_drift, (alpha * d2 + th) * C, _close(z_drift, (alpha * d2 + th) * C, tol)),
        "diff_Z_clock": (float(np.sum((e_Z @ L) ** 2)), eta * sigma2 * C,
                         _close(float(np.sum((e_Z @ L) ** 2)), eta * sigma2 * C, tol)),
    }
    return LowerSdeCoefficients(C, drift_S, diff_S, alpha, sigma2, G, checks)


def g_soft_bounds(G: float, s: float, m: int, eta: float) -> dict:
    """Compare G against 8/m e^{s/2} and 200/(m sqrt(eta)).

    Both bounds only hold before the stopping time and for small s_max/m, so
    the result is advisory: name -> (G, bound, G <= bound).
    """
    exp_bound = 8.0 / m * math.exp(s / 2)
    eta_bound = 200.0 / (m * math.sqrt(eta))
    return {"exp_clock": (G, exp_bound, G <= exp_bound), "inv_sqrt_eta": (G, eta_bound, G <= eta_bound)}


@dataclass
class LowerBoundMonitor:
    """Thresholds of the lower-bound stopping time for one (eta, n, k) triple."""

    k: int
    eta: float
    n: float
    delta2: float
    halt: bool = False
    first_fire: Optional[tuple] = None

    def __post_init__(self):
        self.m = self.k - 2
        if self.m < 3:
            raise InvalidArgument("the stopping time needs eps = 2/(k-2) < 1, i.e. k >= 5")
        self.eps = 2.0 / self.m
        self.s_max = bounds.s_max(self.eta, self.n, self.eps)

    def z_threshold(self, s: float) -> float:
        return bounds.z_threshold(s, self.eta, self.eps)


def check_def_tau(S: float, Z: float, s: float, monitor: LowerBoundMonitor) -> Optional[int]:
    """First stopping condition (2, 3 or 4) met by (S, Z, s), else None.

    Also asserts the implied bound Z <= min(1, log(400/eta) - (1-eps)s) when
    nothing fires.
    """
    if S <= (1 - monitor.delta2) * s - 1 or S >= s + 1:
        return 2
    if Z >= monitor.z_threshold(s):
        return 3
    if s >= monitor.s_max:
        return 4
    relax = bounds.z_relaxation(s, monitor.eta, monitor.eps)
    if Z > relax:
        raise AssertionError(f"Z={Z} exceeds its pre-tau bound {relax} at s={s}")
    return None


@dataclass(frozen=True)
class PsiParams:
    k: int
    n: float
    delta: float

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.n < 3:
            raise ValueError("n must be at least 3")

    @property
    def L(self) -> float:
        return math.log(self.n / self.delta)


def _psi_domain(u, p):
    if not u > -p.L - 1:
        raise ValueError(f"psi is defined only for u > {-p.L - 1}")


def psi(u: float, p: PsiParams) -> float:
    _psi_domain(u, p)
    return 6 * p.k * p.L * math.log((u + 1 + p.L) / (1 + p.L))


def psi_prime(u: float, p: PsiParams) -> float:
    _psi_domain(u, p)
    return 6 * p.k * p.L / (u + 1 + p.L)


def psi_second(u: float, p: PsiParams) -> float:
    _psi_domain(u, p)
    return -6 * p.k * p.L / (u + 1 + p.L) ** 2


@dataclass
class LemmaPiResult:
    applicable: bool
    holds: bool
    lhs: float
    rhs: float


def check_lemma_pi(theta, p: PsiParams) -> LemmaPiResult:
    """1/pi_1 <= 6 k L / (theta_1 + 1 + L) on the box [-L, kL] with theta_1 >= max - 1."""
    theta = np.asarray(theta, dtype=float)
    L = p.L
    applicable = bool(
        abs(theta.sum()) <= 1e-8
        and np.all(theta >= -L)
        and np.all(theta <= len(theta) * L)
        and theta[0] >= theta.max() - 1
    )
    lhs = 1.0 / softmax(theta)[0]
    rhs = 6 * len(theta) * L / (theta[0] + 1 + L)
    return LemmaPiResult(applicable, bool(lhs <= rhs), float(lhs), float(rhs))
