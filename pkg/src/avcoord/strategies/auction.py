"""Centralized intersection auctions, Cooperative and Competitive.

An auctioneer at each intersection collects one bid per lane leader.  The
Cooperative variant turns the bid ranking into a crossing schedule that is
served to completion; the Competitive variant lets only the winner through
and auctions again once the intersection clears.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
import math
import random

from ..config import AuctionConfig


def compute_bid(budget: float, remaining: int, bidding: str, rng: random.Random) -> float:
    if bidding == "balanced":
        return budget / max(1, remaining)
    if bidding == "random":
        return rng.uniform(0.0, budget) if budget > 0 else 0.0
    raise ValueError(f"unknown bidding strategy {bidding!r}")


def effective_bid(base_bid: float, lane_queue_len: int, enhancement: bool,
                  sponsor_contribs: float = 0.0) -> float:
    """Bid used for ranking; enhancement scales by ``1 + ln(queue length)``."""
    bid = base_bid + sponsor_contribs
    if enhancement:
        bid *= 1.0 + math.log(lane_queue_len)
    return bid


def sponsorship_contributions(followers, pct: int, bidding: str,
                              rng: random.Random) -> list[tuple[int, float]]:
    """Each queued follower chips in ``pct`` percent of what it would bid."""
    out = []
    for f in followers:
        b = compute_bid(f.budget, f.remaining_intersections, bidding, rng)
        out.append((f.id, b * pct / 100.0))
    return out


@dataclass
class Participant:
    vid: int
    bid: float
    queue_len: int = 1
    sponsors: list[tuple[int, float]] = field(default_factory=list)


@dataclass
class AuctionOutcome:
    ordering: list[int]
    charges: dict[int, float]
    bids: dict[int, float]

    @property
    def winner(self) -> int:
        return self.ordering[0]


def run_auction(participants: list[Participant], cp: str,
                enhancement: bool = False) -> AuctionOutcome:
    """Rank lane leaders by effective bid (ties: lowest id) and work out charges."""
    if not participants:
        raise ValueError("auction without participants")
    eff = {p.vid: effective_bid(p.bid, p.queue_len, enhancement,
                                sum(c for _, c in p.sponsors))
           for p in participants}
    ordering = sorted(eff, key=lambda vid: (-eff[vid], vid))
    by_id = {p.vid: p for p in participants}
    if cp == "avp":
        payers = participants
    elif cp == "owp":
        payers = [by_id[ordering[0]]]
    else:
        raise ValueError(f"unknown crossing policy {cp!r}")
    charges: dict[int, float] = {}
    for p in payers:
        charges[p.vid] = charges.get(p.vid, 0.0) + p.bid
        for sid, c in p.sponsors:
            charges[sid] = charges.get(sid, 0.0) + c
    return AuctionOutcome(ordering=ordering, charges=charges, bids=eff)


def settle(outcome: AuctionOutcome, vehicles) -> None:
    for vid, amount in outcome.charges.items():
        v = vehicles[vid]
        v.budget = max(0.0, v.budget - amount)


class CentralAuction:
    """Cooperative (``variant='coop'``) or Competitive (``'comp'``) auctions."""

    def __init__(self, variant: str, cfg: AuctionConfig | None = None):
        if variant not in ("coop", "comp"):
            raise ValueError(f"unknown auction variant {variant!r}")
        self.variant = variant
        self.name = variant
        self.cfg = cfg or AuctionConfig()
        self.cfg.validate(variant)
        self.initial_budget = self.cfg.budget
        self.schedules: list[deque] = []
        self.pending: list[tuple[int, int] | None] = []  # (ready clock, winner)
        self.outcomes: list[tuple[int, int, AuctionOutcome]] = []
        self.keep_outcomes = False

    def attach(self, world) -> None:
        self.schedules = [deque() for _ in world.grid.nodes]
        self.pending = [None] * world.grid.n_nodes

    def participants(self, world, leaders) -> list[Participant]:
        cfg = self.cfg
        rng = world.rng
        zone = world.grid.edge_length - world.cfg.approach_radius
        out = []
        for v in leaders:
            q = world.edge_q[v.edge]
            lane = [f for f in q if f.pos >= zone]
            p = Participant(v.id, compute_bid(v.budget, v.remaining_intersections, cfg.bidding, rng),
                            queue_len=len(lane))
            if self.variant == "comp" and cfg.sponsorship:
                p.sponsors = sponsorship_contributions(lane[1:], cfg.sponsorship, cfg.bidding, rng)
            out.append(p)
        return out

    def decide(self, world) -> dict[int, list[int]]:
        cfg = self.cfg
        grants = {}
        for inter in world.intersections:
            if inter.occupied:
                continue
            node = inter.node
            if self.pending[node] is not None:
                ready, winner = self.pending[node]
                if world.clock < ready:
                    continue
                self.pending[node] = None
                grants[node] = [winner]
                continue
            sched = self.schedules[node]
            if sched:
                # schedule members stay lane leaders until served; one whose
                # exit is blocked lets the next entry go first
                for vid in sched:
                    if world.can_clear(world.vehicles[vid]):
                        sched.remove(vid)
                        grants[node] = [vid]
                        break
                continue
            leaders = [v for v in world.lane_leaders(node) if world.can_clear(v)]
            if not leaders:
                continue
            if len(world.zone_vehicles(node)) < cfg.mca:
                first = max(leaders, key=lambda v: (v.pos, -v.id))
                grants[node] = [first.id]
                continue
            outcome = run_auction(self.participants(world, leaders), cfg.cp, cfg.enhancement)
            settle(outcome, world.vehicles)
            if self.keep_outcomes:
                self.outcomes.append((world.clock, node, outcome))
            if self.variant == "coop":
                sched.extend(outcome.ordering[1:])
            if cfg.auction_steps:
                self.pending[node] = (world.clock + cfg.auction_steps, outcome.winner)
            else:
                grants[node] = [outcome.winner]
        return grants

    def post_step(self, world) -> None:
        pass
