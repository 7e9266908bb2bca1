"""Verification suites run by `pgbandit verify`.

Each check returns a CheckResult with the measured quantity and the threshold
it was held to. Suites: identities (algebra, fast), lemmas (Monte Carlo
statements about the engines), hitting (scalar SDE hitting probabilities).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from . import bounds
from .core import (BanditInstance, PERMISSIVE, PolicyState, instant_regret, policy_gradient, softmax,
                   uniform_gap_instance, value)
from .diagnostics import (LowerBoundMonitor, PsiParams, check_def_tau, check_lemma_pi,
                          lower_sde_coefficients, psi, psi_prime, psi_second, z_coefficients)
from .discrete import run_discrete, step_discrete
from .experiments import binomial_se, estimate_hitting_prob, lower_bound_instance, run_one
from .rng import make_rng
from .sde import SdeConfig, run_continuous, step_euler

SUITES = ("identities", "lemmas", "hitting", "all")


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<38} measured={self.measured:.6g}  threshold={self.threshold:.6g}  {self.detail}"


# ---------------------------------------------------------------- samplers


def random_instance(rng, k) -> BanditInstance:
    mu = np.sort(rng.uniform(0, 1, k))[::-1].copy()
    mu[0] = min(1.0, mu[0] + 1e-3)
    return BanditInstance(mu, rng.uniform(0, 1, k))


def central_difference(f, x, h=1e-5):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def lower_bound_states(rng, k, count):
    """Zero-sum theta with equal entries beyond arm 2 and non-degenerate pibar."""
    m = k - 2
    t1 = rng.uniform(-6, 6, count)
    t2 = rng.uniform(-6, 6, count)
    rest = -(t1 + t2) / m
    theta = np.empty((count, k))
    theta[:, 0], theta[:, 1] = t1, t2
    theta[:, 2:] = rest[:, None]
    return theta


def lemma_pi_states(rng, k, L, count, concentration=1.0):
    """Rejection sampler over {zero-sum theta in [-L, kL]^k, theta_1 >= max - 1}.

    theta_1 = t is drawn first; the others are -L + (t + 1 + L) w with w a scaled
    Dirichlet vector chosen so the total is zero; proposals with some w_a > 1
    leave the region and are rejected.
    """
    out = []
    while sum(len(x) for x in out) < count:
        t = rng.uniform(-(k - 1) / k, (k - 1) * L, count)
        W = ((k - 1) * L - t) / (t + 1 + L)
        w = rng.dirichlet(np.full(k - 1, concentration), count) * W[:, None]
        ok = np.all(w <= 1.0, axis=1)
        th = np.empty((ok.sum(), k))
        th[:, 0] = t[ok]
        th[:, 1:] = -L + (t[ok] + 1 + L)[:, None] * w[ok]
        th[:, 0] = -th[:, 1:].sum(axis=1)
        out.append(th)
    return np.concatenate(out)[:count]


# ---------------------------------------------------------------- identities


def check_gradient(samples=1000, seed=0):
    rng = make_rng(seed)
    worst = 0.0
    for i in range(samples):
        k = (2, 3, 5, 10)[i % 4]
        inst = random_instance(rng, k)
        theta = rng.normal(0, 2, k)
        g = policy_gradient(theta, inst)
        fd = central_difference(lambda x: value(x, inst), theta)
        worst = max(worst, np.max(np.abs(g - fd)) / max(np.max(np.abs(g)), 1e-3))
    return CheckResult("gradient_vs_finite_differences", worst <= 1e-6, worst, 1e-6, f"{samples} samples")


def check_softmax_shift(samples=1000, seed=1):
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(samples):
        theta = rng.normal(0, 5, rng.integers(2, 12))
        c = rng.uniform(-100, 100)
        worst = max(worst, np.max(np.abs(softmax(theta + c) - softmax(theta))))
    return CheckResult("softmax_shift_invariance", worst <= 1e-12, worst, 1e-12)


def check_gradient_orthogonality(samples=1000, seed=2):
    rng = make_rng(seed)
    worst = 0.0
    for i in range(samples):
        k = (2, 3, 5, 10)[i % 4]
        inst = random_instance(rng, k)
        worst = max(worst, abs(policy_gradient(rng.normal(0, 3, k), inst).sum()))
    return CheckResult("gradient_orthogonal_to_ones", worst <= 1e-12, worst, 1e-12)


def check_regret_nonnegative(samples=1000, seed=3):
    rng = make_rng(seed)
    worst = 0.0
    for i in range(samples):
        inst = random_instance(rng, 2 + i % 9)
        worst = min(worst, instant_regret(softmax(rng.normal(0, 3, inst.k)), inst))
    return CheckResult("instant_regret_nonnegative", worst >= 0, worst, 0.0)


def check_z_drift(samples=1000, seed=4):
    rng = make_rng(seed)
    failures = 0
    for i in range(samples):
        k = 2 + i % 8
        inst = random_instance(rng, k)
        try:
            z_coefficients(rng.normal(0, 3, k), inst, rng.uniform(0.01, 1), int(rng.integers(1, k)))
        except AssertionError:
            failures += 1
    return CheckResult("z_drift_closed_form_vs_gradient", failures == 0, failures, 0, "tol 1e-12")


def check_lower_sde_identities(samples=10_000, seed=5):
    rng = make_rng(seed)
    failures = {}
    for i in range(samples):
        k = 5 + i % 16
        inst = lower_bound_instance(k, rng.uniform(1e-3, 0.5))
        theta = lower_bound_states(rng, k, 1)[0]
        coeffs = lower_sde_coefficients(theta, inst, rng.uniform(1e-3, 0.2))
        for name, (_, _, ok) in coeffs.checks.items():
            if not ok:
                failures[name] = failures.get(name, 0) + 1
    total = sum(failures.values())
    return CheckResult("lower_bound_sde_identities", total == 0, total, 0,
                       ", ".join(f"{k}:{v}" for k, v in failures.items()) or f"{samples} states")


def check_psi(seed=6):
    bad_psi = 0
    worst_fd = 0.0
    for k in range(2, 51):
        for n in (10, 1e4):
            for delta in (1 / n, 0.1):
                p = PsiParams(k, n, delta)
                if psi(k * p.L, p) > 6 * k * p.L * math.log1p(k) * (1 + 1e-15):
                    bad_psi += 1
                for u in np.linspace(-p.L + 1e-6, k * p.L, 25):
                    if psi_second(u, p) < -psi_prime(u, p):
                        bad_psi += 1
                    d = 1e-5 * (u + 1 + p.L)
                    fd = (psi_prime(u + d, p) - psi_prime(u - d, p)) / (2 * d)
                    worst_fd = max(worst_fd, abs(fd - psi_second(u, p)) / max(1.0, abs(psi_second(u, p))))
    p = PsiParams(5, 1e4, 1e-4)
    worst_quad = 0.0
    for u in np.linspace(-p.L + 0.5, 5 * p.L, 20):
        q, _ = integrate.quad(lambda v: psi_prime(v, p), 0, u, epsabs=1e-13, epsrel=1e-13)
        worst_quad = max(worst_quad, abs(q - psi(u, p)))
    ok = bad_psi == 0 and worst_fd <= 1e-6 and worst_quad <= 1e-8
    return CheckResult("psi_properties", ok, max(worst_fd, worst_quad), 1e-6,
                       f"inequality violations={bad_psi}, quadrature err={worst_quad:.2g}")


def check_z_threshold_relaxation():
    bad = 0
    count = 0
    for eta in (1e-4, 1e-3, 0.01, 0.05, 0.2, 1.0):
        for eps in (0.0, 0.05, 0.1, 0.2, 0.5):
            for s in np.linspace(0, 60, 241):
                r = bounds.z_threshold_report(s, eta, eps)
                if r.argument_negative:
                    count += 1
                    bad += not r.consistent
    return CheckResult("z_threshold_below_relaxation", bad == 0, bad, 0, f"{count} grid points")


def check_bound_monotonicity():
    bad = 0
    ns = np.geomspace(1, 1e8, 50)
    for d2, eta in ((0.1, 0.05), (0.5, 0.1), (0.3, 0.01)):
        vals = [bounds.two_arm_regret_bound(d2, eta, n).value for n in ns]
        bad += int(np.any(np.diff(vals) < 0))
    d2s = np.linspace(0.01, 1, 50)
    bad += int(np.any(np.diff([bounds.upper_bound_threshold(d, 1e4) for d in d2s]) <= 0))
    bad += int(np.any(np.diff([bounds.upper_bound_regret(5, e, 1e4).value for e in np.geomspace(1e-4, 1, 30)]) >= 0))
    bad += int(np.any(np.diff([bounds.bm_drift_bound(a, 1.0) for a in np.linspace(0.1, 5, 30)]) >= 0))
    bad += int(np.any(np.diff([bounds.bm_less_drift_bound(1.0, 1.0, n) for n in ns]) <= 0))
    bad += int(np.any(np.diff([bounds.s_max(0.05, n, 0.1) for n in ns]) <= 0))
    return CheckResult("bound_monotonicity", bad == 0, bad, 0)


def check_lemma_pi_sweep(samples=100_000, seed=7):
    rng = make_rng(seed)
    violations = 0
    checked = 0
    per_k = samples // 19 + 1
    for k in range(2, 21):
        for n, delta in ((100, 0.1), (1e4, 1e-4)):
            p = PsiParams(k, n, delta)
            conc = (0.3, 1.0, 3.0)[k % 3]
            for theta in lemma_pi_states(rng, k, p.L, per_k // 2 + 1, conc):
                r = check_lemma_pi(theta, p)
                if r.applicable:
                    checked += 1
                    violations += not r.holds
    return CheckResult("lemma_pi_bound", violations == 0 and checked >= samples, violations, 0,
                       f"{checked} admissible states")


def check_def_tau_consistency(seed=8):
    """Z never exceeds its pre-tau bound on states where no stopping condition fired."""
    rng = make_rng(seed)
    bad = 0
    for _ in range(20_000):
        k = int(rng.integers(5, 30))
        mon = LowerBoundMonitor(k, rng.uniform(1e-4, 0.2), 1e4, 0.002)
        s = rng.uniform(0, mon.s_max)
        S = rng.uniform(s - 2, s + 2)
        Z = rng.uniform(-2 * s - 2, 2)
        try:
            check_def_tau(S, Z, s, mon)
        except AssertionError:
            bad += 1
    return CheckResult("no_stop_implies_z_bound", bad == 0, bad, 0)


def identities():
    return [check_gradient(), check_softmax_shift(), check_gradient_orthogonality(), check_regret_nonnegative(),
            check_z_drift(), check_lower_sde_identities(), check_psi(), check_z_threshold_relaxation(),
            check_bound_monotonicity(), check_lemma_pi_sweep(), check_def_tau_consistency()]


# ---------------------------------------------------------------- lemmas (Monte Carlo)


def check_conservation(steps=10**6, seeds=10):
    inst = uniform_gap_instance(5, 0.5)
    worst_c = worst_d = 0.0
    for s in range(seeds):
        for engine in ("continuous", "discrete"):
            n = steps * 0.01 if engine == "continuous" else steps
            theta = final_theta(inst, engine, 0.1, n, s)
            if engine == "continuous":
                worst_c = max(worst_c, abs(theta.sum()))
            else:
                worst_d = max(worst_d, abs(theta.sum()))
    worst = max(worst_c, worst_d)
    return CheckResult("conservation_sum_theta", worst <= 1e-8, worst, 1e-8,
                       f"continuous {worst_c:.2g}, discrete {worst_d:.2g}, {steps} steps x {seeds} seeds")


def final_theta(inst, engine, eta, n, seed, h=0.01):
    if engine == "discrete":
        return run_discrete(inst, eta, int(n), seed, stride=10**9)[1].theta
    return run_continuous(inst, eta, SdeConfig(h, n, record_stride=10**9), seed)[1].theta


def check_action_frequencies(draws=100_000, seed=9):
    inst = uniform_gap_instance(4, 0.3)
    state = PolicyState(np.array([0.5, -0.2, 0.1, -0.4]))
    rng = make_rng(seed)
    counts = np.zeros(inst.k)
    for _ in range(draws):
        _, rec = step_discrete(state, inst, 0.0, rng)
        counts[rec.action] += 1
    pi = state.pi
    z = np.abs(counts / draws - pi) / np.sqrt(pi * (1 - pi) / draws)
    return CheckResult("frozen_policy_action_frequencies", bool(np.all(z <= 3)), float(z.max()), 3.0, "binomial z")


def check_noise_covariance(reps=100_000, seed=10):
    inst = BanditInstance(np.array([1.0, 0.6, 0.2]), np.array([1.0, 0.7, 0.4]))
    eta, h = 0.5, 0.01
    state = PolicyState(np.array([0.3, -0.1, -0.2]))
    pi = state.pi
    rng = make_rng(seed)
    d = np.array([step_euler(state, inst, eta, h, rng).theta - state.theta for _ in range(reps)])
    prod = d[:, :, None] * d[:, None, :] / h
    emp = prod.mean(axis=0)
    se = prod.std(axis=0, ddof=1) / math.sqrt(reps)
    k = inst.k
    P = np.eye(k) - np.outer(pi, np.ones(k))
    target = eta**2 * P @ np.diag(pi * inst.sigma**2) @ P.T
    z = np.abs(emp - target) / se
    return CheckResult("euler_noise_covariance", bool(np.all(z <= 5)), float(z.max()), 5.0, "entrywise SE units")


def check_zero_drift(reps=100_000, seed=11):
    inst = BanditInstance(np.zeros(2), np.ones(2), PERMISSIVE)
    state = PolicyState(np.array([0.4, -0.4]))
    rng = make_rng(seed)
    d = np.array([step_euler(state, inst, 1.0, 0.01, rng).theta for _ in range(reps)]) - state.theta
    z = np.abs(d.mean(axis=0)) / (d.std(axis=0, ddof=1) / math.sqrt(reps))
    return CheckResult("zero_drift_mean_step", bool(np.all(z <= 3)), float(z.max()), 3.0, "SE units")


def ode_reference(inst, eta, T, theta0=None):
    theta0 = np.zeros(inst.k) if theta0 is None else theta0
    sol = integrate.solve_ivp(lambda t, th: eta * policy_gradient(th, inst), (0, T), theta0,
                              method="DOP853", rtol=1e-12, atol=1e-12)
    return sol.y[:, -1]


def check_weak_order(h=0.1, T=10.0):
    inst = BanditInstance(np.array([1.0, 0.5, 0.0]), np.zeros(3))
    ref = ode_reference(inst, 1.0, T)
    errs = [np.max(np.abs(final_theta(inst, "continuous", 1.0, T, 0, hh) - ref)) for hh in (h, h / 2)]
    ratio = errs[0] / errs[1]
    return CheckResult("euler_first_order_convergence", 1.7 <= ratio <= 2.3, ratio, 2.0, "error ratio in [1.7, 2.3]")


def _lemma_runs(inst, eta, n, h, seeds):
    cfg = SdeConfig(h, n, record_stride=10**9)
    return [run_continuous(inst, eta, cfg, s)[1] for s in range(seeds)]


def check_lemma_bounds_theta(seeds=500, eta=0.5, n=100, delta=0.2):
    inst = uniform_gap_instance(5, 0.5)
    runs = _lemma_runs(inst, eta, n, 0.01, seeds)
    level = -math.log(n / delta)
    freq = float(np.mean([r.min_theta <= level for r in runs]))
    thr = delta + 3 * binomial_se(delta, seeds)
    return CheckResult("theta_never_too_negative", freq <= thr, freq, thr, f"{seeds} seeds")


def check_lemma_eta(seeds=500, n=100, delta=0.1):
    inst = uniform_gap_instance(5, 0.5)
    eta = bounds.lemma_eta_threshold(inst.delta2, n, delta)
    runs = _lemma_runs(inst, eta, n, 0.01, seeds)
    freq = float(np.mean([r.min_Z <= -inst.delta2 / 2 for r in runs]))
    thr = delta + 3 * binomial_se(delta, seeds)
    return CheckResult("z_never_below_half_gap", freq <= thr, freq, thr, f"eta={eta:.3g}, {seeds} seeds")


def check_z_bound_on_runs(seeds=20, n=20_000):
    inst = lower_bound_instance(20, 0.002)
    viol = 0
    for s in range(seeds):
        viol += run_one(inst, "discrete", 0.05, n, s, monitor=True, stride=10**9)[1].z_bound_violations
    return CheckResult("z_bound_holds_before_tau", viol == 0, viol, 0, f"{seeds} lower-bound runs")


def check_regret_monotone(seeds=10):
    inst = uniform_gap_instance(5, 0.5)
    bad = 0
    for s in range(seeds):
        traj, _ = run_continuous(inst, 0.3, SdeConfig(0.01, 50, 10), s)
        bad += int(np.any(np.diff(traj.regret) < 0))
        traj, _ = run_discrete(inst, 0.3, 5000, s, 10)
        bad += int(np.any(np.diff(traj.regret) < 0))
    return CheckResult("regret_non_decreasing", bad == 0, bad, 0)


def lemmas(budget=1.0, seeds=500):
    steps = max(1000, int(10**6 * budget))
    return [check_conservation(steps, 10), check_action_frequencies(), check_noise_covariance(),
            check_zero_drift(), check_weak_order(), check_lemma_bounds_theta(seeds), check_lemma_eta(seeds),
            check_z_bound_on_runs(), check_regret_monotone()]


# ---------------------------------------------------------------- hitting


def hitting(seeds=10_000, budget=1.0):
    out = []
    p, se = estimate_hitting_prob("drifted-bm", 1.0, 1.0, 20.0, 1e-3 / budget, seeds)
    out.append(CheckResult("drifted_bm_hitting_rate", 0.105 <= p <= 0.150, p, bounds.bm_drift_bound(1, 1),
                           f"window [0.105, 0.150], se={se:.3g}"))
    p, se = estimate_hitting_prob("sigmoid-drift", 0.0, 1.0, 1.0, 1e-4 / budget, seeds)
    target = 2 * stats.norm.cdf(-1.0)
    out.append(CheckResult("sigmoid_drift_a0_reflection", abs(p - target) <= 0.015, p, target,
                           f"|p - 2Phi(-1)| <= 0.015, se={se:.3g}"))
    p, se = estimate_hitting_prob("sigmoid-drift", 50.0, 1.0, 100.0, 1e-2, seeds)
    out.append(CheckResult("sigmoid_drift_large_a", p == 0.0, p, bounds.bm_less_drift_bound(50, 1, 100),
                           "zero hits expected"))
    return out


def run_suite(name, seeds=None, budget=1.0):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    results = []
    if name in ("identities", "all"):
        results += identities()
    if name in ("lemmas", "all"):
        results += lemmas(budget, seeds or 500)
    if name in ("hitting", "all"):
        results += hitting(seeds or 10_000, budget)
    return results
