"""Trajectories and per-run summaries shared by both engines."""

import csv
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

TAU_CONDITIONS = {1: "horizon", 2: "S-window", 3: "Z-threshold", 4: "s-max"}

TRAJECTORY_COLUMNS = ["t", "pi1", "Z_min", "S", "s", "regret"]


@dataclass
class Trajectory:
    times: np.ndarray
    pi1: np.ndarray
    Z: np.ndarray  # (len(times), k-1), column a-2 holds theta_1 - theta_a
    S: np.ndarray
    clock_s: np.ndarray
    regret: np.ndarray
    stop_events: list = field(default_factory=list)

    @property
    def Z_min(self) -> np.ndarray:
        return self.Z.min(axis=1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRAJECTORY_COLUMNS)
            for row in zip(self.times, self.pi1, self.Z_min, self.S, self.clock_s, self.regret):
                w.writerow([repr(float(v)) for v in row])

    def equals(self, other: "Trajectory") -> bool:
        return (
            all(
                np.array_equal(getattr(self, f), getattr(other, f))
                for f in ("times", "pi1", "Z", "S", "clock_s", "regret")
            )
            and self.stop_events == other.stop_events
        )


def read_trajectory_csv(path) -> dict:
    """Column name -> float array."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


@dataclass
class RunSummary:
    seed: int
    eta: float
    final_pi1: float
    regret: float
    pseudo_regret: float
    diverged: bool = False
    tau_condition: Optional[int] = None
    tau_time: Optional[float] = None
    tau_s: Optional[float] = None
    min_Z: float = 0.0
    min_theta: float = 0.0
    final_time: float = 0.0
    z_bound_violations: int = 0
    theta: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "theta"}
