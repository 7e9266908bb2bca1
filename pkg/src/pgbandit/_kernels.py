"""Compiled inner loops for the two engines and the scalar SDEs.

The drivers in discrete.py / sde.py own the random streams and feed the
kernels pre-drawn noise one block at a time, so a kernel is a deterministic
function of its inputs. Scalar accumulators live in a float64 array `acc`.
"""

import math

import numpy as np
from numba import njit

# acc slots
REGRET = 0
PSEUDO = 1
CLOCK = 2
MIN_Z = 3
MIN_THETA = 4
TAU_COND = 5
TAU_TIME = 6
TAU_S = 7
DIVERGED = 8
ZBOUND_VIOL = 9
STEPS = 10
HALTED = 11
REC_IDX = 12
N_ACC = 13

# monitor slots
MON_ACTIVE = 0
MON_EPS = 1
MON_SMAX = 2
MON_DELTA2 = 3
MON_HALT = 4
MON_LOG400 = 5
MON_ETA = 6
N_MON = 7


def new_acc() -> np.ndarray:
    acc = np.zeros(N_ACC)
    acc[MIN_Z] = np.inf
    acc[MIN_THETA] = np.inf
    return acc


def monitor_array(active=False, eps=0.0, s_max=0.0, delta2=0.0, halt=False, eta=0.0) -> np.ndarray:
    mon = np.zeros(N_MON)
    if active:
        mon[MON_ACTIVE] = 1.0
        mon[MON_EPS] = eps
        mon[MON_SMAX] = s_max
        mon[MON_DELTA2] = delta2
        mon[MON_HALT] = 1.0 if halt else 0.0
        mon[MON_LOG400] = math.log(400.0 / eta)
        mon[MON_ETA] = eta
    return mon


@njit(cache=True)
def z_threshold_nb(s, eta, eps):
    c = math.exp(-s) / 4.0 - 1.0 / 16.0
    if c == 0.0:
        return 0.0
    log_abs = 0.5 * math.log(eta) + math.log(abs(c)) + 0.5 * (1.0 - eps) * s
    if log_abs > 20.0:
        # asinh(y) = log(2y) + O(y^-2)
        mag = log_abs + math.log(2.0)
    else:
        mag = math.asinh(math.exp(log_abs))
    return 2.0 * mag if c > 0 else -2.0 * mag


@njit(cache=True)
def softmax_into(theta, pi):
    m = theta[0]
    for a in range(1, theta.shape[0]):
        if theta[a] > m:
            m = theta[a]
    tot = 0.0
    for a in range(theta.shape[0]):
        pi[a] = math.exp(theta[a] - m)
        tot += pi[a]
    for a in range(theta.shape[0]):
        pi[a] /= tot


@njit(cache=True)
def _minima(theta, acc):
    for a in range(theta.shape[0]):
        if theta[a] < acc[MIN_THETA]:
            acc[MIN_THETA] = theta[a]
        if a > 0 and theta[0] - theta[a] < acc[MIN_Z]:
            acc[MIN_Z] = theta[0] - theta[a]


@njit(cache=True)
def _monitor_and_record(i, t, theta, pi, stride, acc, mon, rec_t, rec_pi1, rec_Z, rec_S, rec_s, rec_reg,
                        force_record):
    k = theta.shape[0]
    halt = False
    if mon[MON_ACTIVE] > 0 and acc[TAU_COND] == 0:
        S = theta[0] + theta[1]
        Z = theta[0] - theta[1]
        s = acc[CLOCK]
        cond = 0
        if S <= (1.0 - mon[MON_DELTA2]) * s - 1.0 or S >= s + 1.0:
            cond = 2
        elif Z >= z_threshold_nb(s, mon[MON_ETA], mon[MON_EPS]):
            cond = 3
        elif s >= mon[MON_SMAX]:
            cond = 4
        if cond > 0:
            acc[TAU_COND] = cond
            acc[TAU_TIME] = t
            acc[TAU_S] = s
            halt = mon[MON_HALT] > 0
        else:
            relax = min(1.0, mon[MON_LOG400] - (1.0 - mon[MON_EPS]) * s)
            if Z > relax:
                acc[ZBOUND_VIOL] += 1
    if force_record or halt or i % stride == 0:
        r = int(acc[REC_IDX])
        rec_t[r] = t
        rec_pi1[r] = pi[0]
        for a in range(1, k):
            rec_Z[r, a - 1] = theta[0] - theta[a]
        rec_S[r] = theta[0] + theta[1]
        rec_s[r] = acc[CLOCK]
        rec_reg[r] = acc[REGRET]
        acc[REC_IDX] = r + 1
    return halt


@njit(cache=True)
def observe(i, t, theta, pi, stride, acc, mon, rec_t, rec_pi1, rec_Z, rec_S, rec_s, rec_reg, force_record):
    """Bookkeeping at grid point i: running minima, the tau monitor and recording.

    Returns True if the run must halt here.
    """
    softmax_into(theta, pi)
    _minima(theta, acc)
    return _monitor_and_record(i, t, theta, pi, stride, acc, mon, rec_t, rec_pi1, rec_Z, rec_S, rec_s,
                               rec_reg, force_record)


@njit(cache=True)
def _finite(theta):
    for a in range(theta.shape[0]):
        if not math.isfinite(theta[a]):
            return False
    return True


@njit(cache=True)
def discrete_block(theta, pi, mu, sigma, eta, start, end, u, g, stride, acc, mon,
                   rec_t, rec_pi1, rec_Z, rec_S, rec_s, rec_reg):
    k = theta.shape[0]
    mu_star = mu.max()
    watch = mon[MON_ACTIVE] > 0
    regret = acc[REGRET]
    pseudo = acc[PSEUDO]
    clock = acc[CLOCK]
    min_z = acc[MIN_Z]
    min_theta = acc[MIN_THETA]
    for i in range(start, end):
        softmax_into(theta, pi)
        for a in range(k):
            if theta[a] < min_theta:
                min_theta = theta[a]
            if a > 0 and theta[0] - theta[a] < min_z:
                min_z = theta[0] - theta[a]
        if watch or i % stride == 0:
            acc[REGRET] = regret
            acc[CLOCK] = clock
            if _monitor_and_record(i, float(i), theta, pi, stride, acc, mon,
                                   rec_t, rec_pi1, rec_Z, rec_S, rec_s, rec_reg, False):
                acc[HALTED] = 1.0
                acc[STEPS] = i
                break
        j = i - start
        v = 0.0
        for a in range(k):
            v += pi[a] * mu[a]
        pseudo += mu_star - v
        if watch:
            pb = 0.0
            for a in range(2, k):
                pb += pi[a]
            clock += eta * pb * (1.0 - pb)
        # inverse CDF on one uniform
        A = k - 1
        c = 0.0
        for a in range(k):
            c += pi[a]
            if u[j] < c:
                A = a
                break
        regret += mu_star - mu[A]
        y = mu[A] + sigma[A] * g[j]
        for a in range(k):
            ind = 1.0 if a == A else 0.0
            theta[a] += eta * (ind - pi[a]) * y
        acc[STEPS] = i + 1
        if not _finite(theta):
            acc[DIVERGED] = 1.0
            break
    acc[REGRET] = regret
    acc[PSEUDO] = pseudo
    acc[CLOCK] = clock
    acc[MIN_Z] = min_z
    acc[MIN_THETA] = min_theta


@njit(cache=True)
def euler_block(theta, pi, mu, sigma, eta, h, start, end, xi, clamp_floor, stride, acc, mon,
                rec_t, rec_pi1, rec_Z, rec_S, rec_s, rec_reg):
    k = theta.shape[0]
    mu_star = mu.max()
    sqrt_h = math.sqrt(h)
    dx = np.empty(k)
    watch = mon[MON_ACTIVE] > 0
    regret = acc[REGRET]
    clock = acc[CLOCK]
    min_z = acc[MIN_Z]
    min_theta = acc[MIN_THETA]
    for i in range(start, end):
        softmax_into(theta, pi)
        for a in range(k):
            if theta[a] < min_theta:
                min_theta = theta[a]
            if a > 0 and theta[0] - theta[a] < min_z:
                min_z = theta[0] - theta[a]
        if watch or i % stride == 0:
            acc[REGRET] = regret
            acc[CLOCK] = clock
            if _monitor_and_record(i, i * h, theta, pi, stride, acc, mon,
                                   rec_t, rec_pi1, rec_Z, rec_S, rec_s, rec_reg, False):
                acc[HALTED] = 1.0
                acc[STEPS] = i
                break
        j = i - start
        v = 0.0
        for a in range(k):
            v += pi[a] * mu[a]
        regret += (mu_star - v) * h
        if watch:
            pb = 0.0
            for a in range(2, k):
                pb += pi[a]
            clock += eta * pb * (1.0 - pb) * h
        tot = 0.0
        for a in range(k):
            p = pi[a] if pi[a] > clamp_floor else clamp_floor
            dx[a] = pi[a] * mu[a] * h + math.sqrt(p) * sigma[a] * sqrt_h * xi[j, a]
            tot += dx[a]
        for a in range(k):
            theta[a] += eta * (dx[a] - pi[a] * tot)
        acc[STEPS] = i + 1
        if not _finite(theta):
            acc[DIVERGED] = 1.0
            break
    acc[REGRET] = regret
    acc[PSEUDO] = regret
    acc[CLOCK] = clock
    acc[MIN_Z] = min_z
    acc[MIN_THETA] = min_theta


@njit(cache=True)
def sigmoid_drift_block(x, a, h, g, running_min):
    """Advance dX = a/(e^X + 1) dt + dB over len(g) Euler steps; returns (x, min)."""
    sqrt_h = math.sqrt(h)
    for j in range(g.shape[0]):
        if x > 700.0:
            drift = 0.0
        else:
            drift = a / (math.exp(x) + 1.0)
        x = x + drift * h + sqrt_h * g[j]
        if x < running_min:
            running_min = x
    return x, running_min
