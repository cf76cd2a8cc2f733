"""Crossing Waiting Time (CWT) and Traffic Waiting Time (TWT) accounting.

Both metrics count whole steps (1 step = 1 s) in which a vehicle waited,
i.e. moved less than ``wait_speed_threshold * dt``.  A waiting step is
charged to exactly one of them:

* CWT -- the vehicle is the lane leader in the approach zone, holds no
  grant, its intersection was idle when the strategy decided, and the
  vehicle could have cleared the box had it been granted.  This is time
  lost to the coordination mechanism itself rather than to other traffic.
  A CWT timer opens the first time an ungranted lane leader waits in the
  zone and produces one event when the vehicle is granted its crossing.
* TWT -- every other waiting step: queued behind other vehicles, held at
  the stop line while somebody else occupies the intersection, or held
  because the exit edge is full.  Consecutive TWT steps form one episode,
  which closes when the vehicle is back at free speed or enters the
  intersection.  Creeping forward inside a queue does not close it.

Timers still open when the run ends are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Sequence


class RunMetrics:
    def __init__(self, n_vehicles: int = 0):
        self.cwt_events: list[int] = []
        self.twt_episodes: list[int] = []
        self.cwt_open = [False] * n_vehicles
        self.cwt_acc = [0] * n_vehicles
        self.twt_acc = [0] * n_vehicles

    def on_grant(self, vid: int) -> None:
        if self.cwt_open[vid]:
            self.cwt_events.append(self.cwt_acc[vid])
            self.cwt_open[vid] = False
            self.cwt_acc[vid] = 0

    def record_wait(self, vid: int, lead_idle: bool, lead_blocked: bool) -> None:
        """Account one waiting step.

        ``lead_idle``: ungranted lane leader at an idle intersection.
        ``lead_blocked``: ungranted lane leader at a busy intersection.
        """
        if lead_idle or lead_blocked:
            self.cwt_open[vid] = True
        if lead_idle:
            self.cwt_acc[vid] += 1
        else:
            self.twt_acc[vid] += 1

    def on_enter(self, vid: int) -> None:
        self._close_twt(vid)

    def _close_twt(self, vid: int) -> None:
        if self.twt_acc[vid]:
            self.twt_episodes.append(self.twt_acc[vid])
            self.twt_acc[vid] = 0

    def on_step(self, world) -> None:
        """Update timers from the world state after motion."""
        L = world.grid.edge_length
        zone_start = L - world.cfg.approach_radius
        free = world.cfg.v_max - 1e-9
        servable = world.servable
        for q in world.edge_q:
            if not q:
                continue
            lead = q[0]
            for v in q:
                if not v.waited:
                    if v.speed >= free and self.twt_acc[v.id]:
                        self._close_twt(v.id)
                    continue
                if v is lead and not v.granted and v.pos >= zone_start:
                    idle = v.id in servable
                    self.record_wait(v.id, idle, not idle)
                else:
                    self.record_wait(v.id, False, False)

    def summary(self) -> "RunSummary":
        return run_summary(self)


@dataclass(frozen=True)
class RunSummary:
    cwt_mean: float
    twt_mean: float
    cwt_events: int = 0
    twt_episodes: int = 0
    cwt_std: float = 0.0
    twt_std: float = 0.0


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs) if xs else 0.0


def _sample_std(xs: Sequence[float]) -> float:
    if len(xs) < 2:
        return 0.0
    m = _mean(xs)
    return math.sqrt(math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1))


def run_summary(m: RunMetrics) -> RunSummary:
    return RunSummary(
        cwt_mean=_mean(m.cwt_events),
        twt_mean=_mean(m.twt_episodes),
        cwt_events=len(m.cwt_events),
        twt_episodes=len(m.twt_episodes),
        cwt_std=_sample_std(m.cwt_events),
        twt_std=_sample_std(m.twt_episodes),
    )


@dataclass(frozen=True)
class BatchStats:
    cwt_mean: float
    cwt_std: float
    twt_mean: float
    twt_std: float
    n_runs: int
    sigma_valid: bool

    @property
    def total_mean(self) -> float:
        return self.cwt_mean + self.twt_mean


def batch_stats(runs: Sequence[RunSummary]) -> BatchStats:
    """Across-run mean and sample (n-1) standard deviation of each metric."""
    if not runs:
        raise ValueError("batch_stats needs at least one run")
    cwt = [r.cwt_mean for r in runs]
    twt = [r.twt_mean for r in runs]
    return BatchStats(
        cwt_mean=_mean(cwt),
        cwt_std=_sample_std(cwt),
        twt_mean=_mean(twt),
        twt_std=_sample_std(twt),
        n_runs=len(runs),
        sigma_valid=len(runs) >= 2,
    )
