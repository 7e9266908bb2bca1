"""Closed-form regret bounds, learning-rate thresholds and hitting bounds.

Functions that come with hypotheses return a BoundReport instead of raising,
so a sweep can tabulate where a bound is vacuous.
"""

import math
import warnings
from dataclasses import dataclass, field

E = math.e


@dataclass
class BoundReport:
    name: str
    inputs: dict
    value: float
    hypotheses_met: bool = True
    hypothesis_notes: str = ""

    def as_row(self) -> dict:
        return {"name": self.name, **self.inputs, "value": self.value,
                "hypotheses_met": self.hypotheses_met, "notes": self.hypothesis_notes}


def two_arm_regret_bound(delta2: float, eta: float, n: float) -> BoundReport:
    """Expected regret bound for two arms when a = delta2/eta > 1."""
    if delta2 <= 0 or eta <= 0 or n < 0:
        raise ValueError("delta2 and eta must be positive and n non-negative")
    a = delta2 / eta
    inputs = {"delta2": delta2, "eta": eta, "n": n}
    if a <= 1:
        return BoundReport("two_arm_regret", inputs, math.inf, False, f"a = delta2/eta = {a:g} <= 1")
    value = (a / (2 * delta2)) * math.log1p(2 * (a + 1) * n * delta2**2 / a**2) \
        + a**2 / (2 * (a - 1) * delta2)
    notes = ""
    if a - 1 < 1e-6:
        notes = f"near-degenerate: a - 1 = {a - 1:.3g}, second term dominates"
    return BoundReport("two_arm_regret", inputs, value, True, notes)


def upper_bound_threshold(delta2: float, n: float) -> float:
    """Largest learning rate covered by the k-arm upper bound: delta2^2 / (8 log(2 n^2))."""
    if n < 3:
        warnings.warn("horizon below 3 is outside the analysed regime", stacklevel=2)
    return delta2**2 / (8 * math.log(2 * n**2))


def lemma_eta_threshold(delta2: float, n: float, delta: float) -> float:
    """Learning rate below which Z_{t,a} stays above -delta2/2 w.p. 1 - delta."""
    return delta2**2 / (8 * math.log(2 * n / delta))


def upper_bound_regret(k: int, eta: float, n: float, delta=None) -> BoundReport:
    """12 k log(n/delta) log(1+k) / eta + 2k, with delta = 1/n unless overridden."""
    if delta is None:
        delta = 1.0 / n
    inputs = {"k": k, "eta": eta, "n": n, "delta": delta}
    if math.isinf(eta):
        return BoundReport("upper_bound_regret", inputs, 2.0 * k)
    value = 12 * k * math.log(n / delta) * math.log1p(k) / eta + 2 * k
    return BoundReport("upper_bound_regret", inputs, value, n >= 3, "" if n >= 3 else "n < 3")


def bm_drift_bound(a: float, eps: float) -> float:
    """P(inf_t X_t <= -eps) for dX = a dt + dB is at most exp(-2 a eps)."""
    return math.exp(-2 * a * eps)


def bm_less_drift_bound(a: float, eps: float, n: float) -> float:
    """Hitting bound for dX = a/(e^X + 1) dt + dB over [0, n]."""
    return (1 + math.sqrt(n) / 2) * math.exp(-2 * a * eps / (E + 1))


def bm_less_drift_sufficient_a(eps: float, n: float, delta: float) -> float:
    """Drift size that pushes the sigmoid-drift hitting bound below delta."""
    return (E + 1) / (2 * eps) * math.log((1 + math.sqrt(n) / 2) / delta)


def s_max(eta: float, n: float, eps: float) -> float:
    """Clock budget of the lower-bound stopping time: (log(400/eta) + log n) / (1 - eps)."""
    if eps >= 1:
        raise ValueError("s_max needs eps < 1 (at least 5 arms)")
    return (math.log(400 / eta) + math.log(n)) / (1 - eps)


def z_relaxation(s: float, eta: float, eps: float) -> float:
    """min(1, log(400/eta) - (1-eps) s), the upper bound on Z before tau."""
    return min(1.0, math.log(400 / eta) - (1 - eps) * s)


def _asinh_signed_log(sign: float, log_abs: float) -> float:
    if log_abs > 20.0:
        return sign * (log_abs + math.log(2.0))
    return math.asinh(sign * math.exp(log_abs))


def z_threshold(s: float, eta: float, eps: float) -> float:
    """2 asinh(sqrt(eta) (e^{-s}/4 - 1/16) e^{(1-eps) s / 2}), safe for large s."""
    c = math.exp(-s) / 4 - 1 / 16
    if c == 0:
        return 0.0
    log_abs = 0.5 * math.log(eta) + math.log(abs(c)) + 0.5 * (1 - eps) * s
    return 2 * _asinh_signed_log(math.copysign(1.0, c), log_abs)


@dataclass
class ZThreshold:
    threshold: float
    relaxation: float
    argument_negative: bool
    consistent: bool = field(default=True)


def z_threshold_report(s: float, eta: float, eps: float) -> ZThreshold:
    """Threshold plus the pre-stopping bound on Z; where the asinh argument is negative
    asinh(x) <= -log(-2x) forces threshold <= relaxation."""
    thr = z_threshold(s, eta, eps)
    rel = z_relaxation(s, eta, eps)
    neg = math.exp(-s) / 4 - 1 / 16 < 0
    return ZThreshold(thr, rel, neg, (not neg) or thr <= rel)
