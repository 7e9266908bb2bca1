"""Instance families, Monte Carlo sweeps, hitting-probability estimators and
the discrete/continuous comparison.

A sweep runs one job per (eta, seed). Jobs are independent; a process pool
executes them and results are always collected in (eta, seed) order, so the
output never depends on the worker count.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__
from .core import BanditInstance, InvalidArgument, two_arm_instance, uniform_gap_instance
from .diagnostics import LowerBoundMonitor
from .discrete import run_discrete
from .rng import PRNG_NAME
from .sde import SdeConfig, run_continuous, simulate_drifted_bm, simulate_sigmoid_drift_sde

CSV_COLUMNS = [
    "seed", "eta", "engine", "k", "delta2", "n", "h", "final_pi1", "regret", "pseudo_regret",
    "diverged", "tau_condition", "tau_time", "tau_s", "min_Z", "min_theta",
]

WORKERS_ENV = "PGBANDIT_WORKERS"


def lower_bound_instance(k: int, delta2: float) -> BanditInstance:
    """Gaps (0, delta2, 1, ..., 1) with mu_1 = 1; only arms 1 and 2 are noisy."""
    if k < 3:
        raise InvalidArgument("the lower-bound family needs k >= 3")
    if not 0 < delta2 < 1:
        raise InvalidArgument("delta2 must lie in (0, 1)")
    mu = np.zeros(k)
    mu[0], mu[1] = 1.0, 1.0 - delta2
    sigma = np.zeros(k)
    sigma[:2] = 1.0
    return BanditInstance(mu, sigma)


def make_instance(family: dict) -> BanditInstance:
    kind = family.get("kind")
    if kind == "two-arm":
        return two_arm_instance(float(family["delta2"]))
    if kind == "uniform-gap":
        return uniform_gap_instance(int(family["k"]), float(family["delta"]))
    if kind == "lower-bound":
        return lower_bound_instance(int(family["k"]), float(family["delta2"]))
    if kind == "custom":
        return BanditInstance(np.asarray(family["mu"], float), np.asarray(family["sigma"], float),
                              family.get("mode", "paper-standard"))
    raise InvalidArgument(f"unknown instance family {kind!r}")


@dataclass
class SweepConfig:
    instance_family: dict
    engine: str
    eta_grid: list
    n: float
    seeds: list
    h: float = 0.01
    record_stride: int = 1
    output_path: str = "sweep-out"
    monitor: bool = False
    write_trajectories: bool = True
    winner_threshold: float = 0.5

    def __post_init__(self):
        if self.engine not in ("discrete", "continuous"):
            raise InvalidArgument(f"engine must be discrete or continuous, got {self.engine!r}")
        if not self.eta_grid:
            raise InvalidArgument("eta_grid is empty")
        if isinstance(self.seeds, dict):
            self.seeds = list(range(int(self.seeds["start"]), int(self.seeds["stop"])))
        self.seeds = [int(s) for s in self.seeds]
        if not self.seeds:
            raise InvalidArgument("seed range is empty")
        if self.engine == "continuous" and not self.h > 0:
            raise InvalidArgument("h must be positive for the continuous engine")
        if self.record_stride < 1:
            raise InvalidArgument("record_stride must be at least 1")
        if any(not e >= 0 for e in self.eta_grid):
            raise InvalidArgument("learning rates must be non-negative")

    @classmethod
    def from_json(cls, path) -> "SweepConfig":
        with open(path) as fh:
            return cls(**json.load(fh))

    def to_json(self) -> dict:
        return asdict(self)


def _instance_delta2(inst: BanditInstance) -> float:
    return inst.delta2


def run_one(inst: BanditInstance, engine: str, eta: float, n: float, seed: int, h: float = 0.01,
            stride: int = 1, monitor: bool = False):
    mon = None
    if monitor and inst.k >= 5 and eta > 0:
        mon = LowerBoundMonitor(inst.k, eta, n, _instance_delta2(inst))
    if engine == "discrete":
        return run_discrete(inst, eta, int(n), seed, stride, mon)
    return run_continuous(inst, eta, SdeConfig(h, n, stride), seed, mon)


def _job(args):
    cfg, eta, seed, traj_dir = args
    inst = make_instance(cfg.instance_family)
    traj, summary = run_one(inst, cfg.engine, eta, cfg.n, seed, cfg.h, cfg.record_stride, cfg.monitor)
    if traj_dir is not None:
        traj.to_csv(Path(traj_dir) / trajectory_name(eta, seed))
    return summary


def trajectory_name(eta: float, seed: int) -> str:
    return f"traj_eta{eta!r}_seed{seed}.csv"


def worker_count() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def summary_row(summary, cfg: SweepConfig, inst: BanditInstance) -> dict:
    return {
        "seed": summary.seed, "eta": summary.eta, "engine": cfg.engine, "k": inst.k,
        "delta2": _instance_delta2(inst), "n": cfg.n, "h": cfg.h if cfg.engine == "continuous" else "",
        "final_pi1": summary.final_pi1, "regret": summary.regret, "pseudo_regret": summary.pseudo_regret,
        "diverged": summary.diverged,
        "tau_condition": "" if summary.tau_condition is None else summary.tau_condition,
        "tau_time": "" if summary.tau_time is None else summary.tau_time,
        "tau_s": "" if summary.tau_s is None else summary.tau_s,
        "min_Z": summary.min_Z, "min_theta": summary.min_theta,
    }


def aggregate(summaries, threshold: float = 0.5) -> dict:
    """Per-eta mean/quantiles of regret and the fraction of runs with final pi_1 < threshold."""
    out = {}
    for eta in sorted({s.eta for s in summaries}):
        rows = [s for s in summaries if s.eta == eta]
        reg = np.array([s.regret for s in rows])
        pi1 = np.array([s.final_pi1 for s in rows])
        out[repr(eta)] = {
            "runs": len(rows),
            "mean_regret": float(reg.mean()),
            "se_regret": float(reg.std(ddof=1) / math.sqrt(len(reg))) if len(reg) > 1 else 0.0,
            "regret_quantiles": {q: float(np.quantile(reg, q)) for q in (0.1, 0.5, 0.9)},
            "mean_final_pi1": float(np.nanmean(pi1)),
            "frac_final_pi1_below": float(np.mean(pi1 < threshold)),
            "diverged": int(sum(s.diverged for s in rows)),
        }
    return out


def _prepare_output(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write-probe"
    with open(probe, "w") as fh:
        fh.write("")
    probe.unlink()
    return out


def run_sweep(cfg: SweepConfig, workers=None):
    """Run every (eta, seed) job; write results.csv, config.json and trajectories.

    Returns (summaries, aggregates). Fails with OSError before simulating
    anything if the output directory is not writable.
    """
    out = _prepare_output(cfg.output_path)
    traj_dir = None
    if cfg.write_trajectories:
        traj_dir = out / "trajectories"
        traj_dir.mkdir(exist_ok=True)
    inst = make_instance(cfg.instance_family)
    jobs = [(cfg, float(eta), seed, traj_dir) for eta in sorted(cfg.eta_grid, reverse=True)
            for seed in sorted(cfg.seeds)]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) == 1:
        summaries = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    with open(out / "results.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for s in summaries:
            w.writerow({k: (repr(v) if isinstance(v, float) else v)
                        for k, v in summary_row(s, cfg, inst).items()})
    agg = aggregate(summaries, cfg.winner_threshold)
    sidecar = {"config": cfg.to_json(), "version": __version__, "prng": PRNG_NAME, "aggregates": agg}
    with open(out / "config.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
    return summaries, agg


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n)


def estimate_hitting_prob(kind: str, a: float, eps: float, horizon: float, h: float, num_seeds: int,
                          first_seed: int = 0):
    """Fraction of seeds whose Euler path dips to -eps, with its binomial standard error."""
    if kind == "drifted-bm":
        sim = simulate_drifted_bm
    elif kind == "sigmoid-drift":
        sim = simulate_sigmoid_drift_sde
    else:
        raise InvalidArgument(f"unknown process {kind!r}")
    hits = sum(sim(a, eps, horizon, h, s)[1] for s in range(first_seed, first_seed + num_seeds))
    p = hits / num_seeds
    return p, binomial_se(p, num_seeds)


@dataclass
class ConsistencyReport:
    ks_statistic: float
    p_value: float
    discrete_final_pi1: np.ndarray = field(repr=False)
    continuous_final_pi1: np.ndarray = field(repr=False)


def discrete_continuous_consistency(inst, eta: float, n: int, h: float, num_seeds: int,
                                    inst_continuous=None) -> ConsistencyReport:
    """Two-sample KS statistic between the final pi_1 of n discrete rounds and
    of the diffusion run to time n. Informational only."""
    other = inst if inst_continuous is None else inst_continuous
    if other.k != inst.k:
        raise InvalidArgument("both engines must see the same number of arms")
    if h > 0.1:
        raise InvalidArgument("use h <= 0.1 for the comparison")
    d = np.array([run_discrete(inst, eta, n, s, stride=n)[1].final_pi1 for s in range(num_seeds)])
    c = np.array([run_continuous(other, eta, SdeConfig(h, n, max(1, int(n / h))), s)[1].final_pi1
                  for s in range(num_seeds)])
    if np.ptp(d) == 0 and np.ptp(c) == 0 and d[0] == c[0]:
        return ConsistencyReport(0.0, 1.0, d, c)
    res = stats.ks_2samp(d, c)
    return ConsistencyReport(float(res.statistic), float(res.pvalue), d, c)
