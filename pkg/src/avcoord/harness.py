"""Seeded batch execution and CSV output."""
from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
import io
import logging
from typing import Iterable, Sequence

from .config import ExperimentConfig
from .engine import make_world
from .metrics import BatchStats, RunSummary, batch_stats, run_summary
from .strategies import make_strategy

log = logging.getLogger(__name__)

COLUMNS = ["approach", "run", "seed", "vs", "steps", "cp", "mca", "enhancement",
           "bidding", "sponsorship", "routes", "if", "df", "spread", "ic", "dc", "sr",
           "dm", "cwt_mean", "cwt_events", "twt_mean", "twt_episodes",
           "cwt_std", "twt_std", "sigma_flag"]


@dataclass
class RunResult:
    run: int
    seed: int
    summary: RunSummary
    completed_edges: int = 0
    min_edges_per_vehicle: int = 0


@dataclass
class ExperimentResult:
    cfg: ExperimentConfig
    runs: list[RunResult]
    stats: BatchStats

    def rows(self) -> list[dict]:
        return [_row(self.cfg, r) for r in self.runs] + [_agg_row(self.cfg, self)]


def simulate(cfg: ExperimentConfig, seed: int, check: bool = False, trace=None) -> RunResult:
    """One full run; ``check`` asserts every engine invariant after each step."""
    strategy = make_strategy(cfg)
    world = make_world(cfg.engine, cfg.vehicles, seed, strategy)
    world.check = check
    world.trace = trace
    if check:
        world.check_invariants()
    world.run(strategy, cfg.steps)
    done = [v.edges_done for v in world.vehicles]
    return RunResult(run=-1, seed=seed, summary=run_summary(world.metrics),
                     completed_edges=sum(done), min_edges_per_vehicle=min(done))


def _simulate_indexed(args) -> RunResult:
    cfg, run = args
    res = simulate(cfg, cfg.seed + run)
    res.run = run
    return res


def run_experiment(cfg: ExperimentConfig, run_indices: Iterable[int] | None = None) -> ExperimentResult:
    """Run ``cfg.runs`` simulations with seeds ``seed .. seed + runs - 1``."""
    cfg.validate()
    indices = list(range(cfg.runs) if run_indices is None else run_indices)
    jobs = [(cfg, i) for i in indices]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_simulate_indexed, jobs))
    else:
        results = []
        for job in jobs:
            results.append(_simulate_indexed(job))
            log.info("%s vs=%d run %d: cwt=%.2f twt=%.2f", cfg.approach, cfg.vehicles,
                     job[1], results[-1].summary.cwt_mean, results[-1].summary.twt_mean)
    results.sort(key=lambda r: r.run)
    return ExperimentResult(cfg, results, batch_stats([r.summary for r in results]))


def run_sweep(cfg: ExperimentConfig, vehicles: Sequence[int]) -> list[ExperimentResult]:
    return [run_experiment(replace(cfg, vehicles=n)) for n in vehicles]


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _params(cfg: ExperimentConfig) -> dict:
    p = dict.fromkeys(COLUMNS, "")
    p.update(approach=cfg.approach, vs=cfg.vehicles, steps=cfg.steps, routes=cfg.engine.routes)
    if cfg.approach == "eb":
        e = cfg.eb
        p.update({"if": e.inc_fn, "df": e.dec_fn, "spread": e.spread_fn,
                  "ic": e.ic, "dc": e.dc, "sr": e.sr, "dm": e.dm})
    elif cfg.approach in ("coop", "comp"):
        a = cfg.auction
        p.update(cp=a.cp, mca=a.mca, enhancement="y" if a.enhancement else "n",
                 bidding=a.bidding, sponsorship=a.sponsorship)
    else:
        p.update(bidding=cfg.dauction.bidding)
    return p


def _row(cfg: ExperimentConfig, r: RunResult) -> dict:
    row = _params(cfg)
    s = r.summary
    row.update(run=r.run, seed=r.seed, cwt_mean=_fmt(s.cwt_mean), cwt_events=s.cwt_events,
               twt_mean=_fmt(s.twt_mean), twt_episodes=s.twt_episodes,
               cwt_std=_fmt(s.cwt_std), twt_std=_fmt(s.twt_std))
    return row


def _agg_row(cfg: ExperimentConfig, res: ExperimentResult) -> dict:
    row = _params(cfg)
    st = res.stats
    row.update(run="agg", cwt_mean=_fmt(st.cwt_mean), twt_mean=_fmt(st.twt_mean),
               cwt_events=sum(r.summary.cwt_events for r in res.runs),
               twt_episodes=sum(r.summary.twt_episodes for r in res.runs),
               cwt_std=_fmt(st.cwt_std), twt_std=_fmt(st.twt_std),
               sigma_flag="" if st.sigma_valid else "single_run")
    return row


def write_csv(results: Sequence[ExperimentResult], fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for res in results:
        writer.writerows(res.rows())


def to_csv(results: Sequence[ExperimentResult]) -> str:
    buf = io.StringIO()
    write_csv(results, buf)
    return buf.getvalue()
