"""Auctioneer-free auction.

A vehicle entering the broadcast radius of an intersection announces a bid
once.  All vehicles near the intersection keep the same ranked list, and the
intersection is served strictly in that order; a late arrival with a higher
bid is slotted in ahead of lower bidders without re-running anything.
"""
from __future__ import annotations

import bisect

from ..config import DAuctionConfig
from .auction import compute_bid


class ContentionList:
    """Bids for one intersection, highest first, ties to the lowest id."""

    def __init__(self):
        self._keys: list[tuple[float, int]] = []

    def join(self, vid: int, bid: float) -> None:
        if vid in self:
            raise ValueError(f"vehicle {vid} already in contention list")
        bisect.insort(self._keys, (-bid, vid))

    def remove(self, vid: int) -> float:
        for i, (neg, v) in enumerate(self._keys):
            if v == vid:
                del self._keys[i]
                return -neg
        raise KeyError(vid)

    def entries(self) -> list[tuple[int, float]]:
        return [(v, -neg) for neg, v in self._keys]

    def __contains__(self, vid: int) -> bool:
        return any(v == vid for _, v in self._keys)

    def __len__(self) -> int:
        return len(self._keys)

    def __iter__(self):
        return iter(self.entries())


def broadcast_join(lst: ContentionList, vid: int, bid: float) -> ContentionList:
    lst.join(vid, bid)
    return lst


class DecentralAuction:
    name = "dauction"

    def __init__(self, cfg: DAuctionConfig | None = None):
        self.cfg = cfg or DAuctionConfig()
        self.initial_budget = self.cfg.budget
        self.lists: list[ContentionList] = []
        self.joined: dict[int, int] = {}
        self.grant_log: list[tuple[int, int, int, float]] = []  # (clock, node, vid, charge)
        self.keep_log = False

    def attach(self, world) -> None:
        self.lists = [ContentionList() for _ in world.grid.nodes]
        self.joined = {}

    def _radius(self, world) -> float:
        return self.cfg.radius if self.cfg.radius is not None else world.cfg.approach_radius

    def _join_newcomers(self, world) -> None:
        radius = self._radius(world)
        rng = world.rng
        bidding = self.cfg.bidding
        for inter in world.intersections:
            for v in world.zone_vehicles(inter.node, radius):
                if v.granted or v.id in self.joined:
                    continue
                bid = compute_bid(v.budget, v.remaining_intersections, bidding, rng)
                self.lists[inter.node].join(v.id, bid)
                self.joined[v.id] = inter.node

    def decide(self, world) -> dict[int, list[int]]:
        self._join_newcomers(world)
        grants = {}
        for inter in world.intersections:
            lst = self.lists[inter.node]
            if inter.occupied or not lst:
                continue
            candidates = lst.entries() if self.cfg.skip_absent_head else lst.entries()[:1]
            for vid, _ in candidates:
                # a ranked vehicle stuck behind lower bidders pulls its lane leader through
                target = world.edge_q[world.vehicles[vid].edge][0]
                if world.at_stop_line(target) and world.can_clear(target):
                    charge = lst.remove(target.id)
                    del self.joined[target.id]
                    target.budget = max(0.0, target.budget - charge)
                    grants[inter.node] = [target.id]
                    if self.keep_log:
                        self.grant_log.append((world.clock, inter.node, target.id, charge))
                    break
        return grants

    def post_step(self, world) -> None:
        pass
