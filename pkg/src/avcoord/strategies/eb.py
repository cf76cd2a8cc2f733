"""Emergent Behavior coordination driven by per-vehicle hurry.

Vehicles raise their hurry while waiting and lower it in free motion.  Same
lane neighbours pull lower hurry values up towards higher ones, so a queue
converges to a common value and is granted the intersection as a platoon.
At each free intersection the lane leader with the highest hurry crosses.
"""
from __future__ import annotations

import math
from typing import Iterable

from ..config import EbConfig


def hurry_update(h: float, fn: str, c: float) -> float:
    """One increasing (``c > 0``) or decreasing (``c < 0``) hurry update."""
    if fn == "lin":
        h = h + c
    elif fn == "log":
        h = h + c * math.log(h + 2.0)
    elif fn == "gro":
        h = h + max(h * c / 100.0, c)
    else:
        raise ValueError(f"unknown hurry function {fn!r}")
    return h if h > 0.0 else 0.0


def spreading_delta(h_v: float, neighbors: Iterable[tuple[float, float]], fn: str,
                    dm: float, sr: float) -> float:
    """Hurry gained by a vehicle from its higher-hurry neighbours.

    ``neighbors`` holds ``(hurry, distance)`` pairs.  Each term is capped at
    the hurry difference, so a vehicle never overtakes the neighbour pulling
    it.
    """
    total = 0.0
    for h_n, dist in neighbors:
        diff = h_n - h_v
        if diff <= 0.0 or dist > sr:
            continue
        if dist <= 0.0:
            raise ValueError("neighbour distance must be positive")
        if fn == "std":
            term = diff * dm / dist
        elif fn == "dbl":
            term = math.log(diff + 1.0) * dm / dist
        elif fn == "rbl":
            term = math.log(diff + 1.0) * sr * dm / dist
        else:
            raise ValueError(f"unknown spreading function {fn!r}")
        total += term if term < diff else diff
    return total


class EmergentBehavior:
    name = "eb"
    initial_budget = 0.0

    def __init__(self, cfg: EbConfig | None = None):
        self.cfg = cfg or EbConfig()

    def attach(self, world) -> None:
        pass

    def decide(self, world) -> dict[int, list[int]]:
        eps = self.cfg.platoon_eps
        zone = world.grid.edge_length - world.cfg.approach_radius
        grants = {}
        for inter in world.intersections:
            if inter.occupied:
                continue
            leaders = [v for v in world.lane_leaders(inter.node) if world.can_clear(v)]
            if not leaders:
                continue
            best = leaders[0]
            for v in leaders[1:]:
                if v.hurry > best.hurry or (v.hurry == best.hurry and v.id < best.id):
                    best = v
            group = [best]
            q = world.edge_q[best.edge]
            for f in q[1:]:
                if f.pos < zone or abs(f.hurry - best.hurry) > eps:
                    break
                group.append(f)
            grants[inter.node] = [v.id for v in world.clearable_prefix(group)]
        return grants

    def post_step(self, world) -> None:
        cfg = self.cfg
        inc, dec, ic, dc = cfg.inc_fn, cfg.dec_fn, cfg.ic, -cfg.dc
        for v in world.vehicles:
            if v.waited:
                v.hurry = hurry_update(v.hurry, inc, ic)
            else:
                v.hurry = hurry_update(v.hurry, dec, dc)

        fn, dm, sr = cfg.spread_fn, cfg.dm, cfg.sr
        for q in world.edge_q:
            if len(q) < 2:
                continue
            snap = [(v.hurry, v.pos) for v in q]
            for i, v in enumerate(q):
                h, p = snap[i]
                nbrs = [(hn, abs(pn - p)) for j, (hn, pn) in enumerate(snap)
                        if j != i and hn > h]
                if nbrs:
                    v.hurry = h + spreading_delta(h, nbrs, fn, dm, sr)
