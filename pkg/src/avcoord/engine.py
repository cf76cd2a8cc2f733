"""Time-stepped vehicle kinematics and intersection occupancy.

One step is one second.  Each step runs, in order:

1. the strategy inspects the world and returns grants, keyed by node;
2. every granted group takes its intersection (one token per node);
3. vehicles move at ``min(v_max, gap)`` where the obstacle is the rear of
   the vehicle ahead (plus ``min_gap``) or the stop line.  A granted vehicle
   standing on the stop line enters the intersection when it is empty;
4. vehicles inside an intersection dwell ``t_cross`` steps, then leave onto
   their next edge if its entry is clear.  The token is released when the
   last member of the granted group has left;
5. waiting-time metrics are updated;
6. the strategy's post-step hook runs.

A platoon of k vehicles therefore holds its intersection for at least
``k * t_cross`` steps: members enter one at a time.
"""
from __future__ import annotations

from collections import deque
import random
from typing import Callable, Protocol, TextIO

from .config import EngineConfig
from .metrics import RunMetrics
from .network import (Grid, build_grid, continue_route, sample_cyclic_route,
                      sample_route)

APPROACHING, QUEUED, GRANTED, CROSSING = "approaching", "queued", "granted", "crossing"
EPS = 1e-9


class Vehicle:
    __slots__ = ("id", "route", "ridx", "edge", "pos", "speed", "length",
                 "budget", "hurry", "state", "granted", "waited", "dwell",
                 "next_edge", "next_route", "edges_done", "routes_done")

    def __init__(self, vid: int, route: list[int], pos: float, length: float,
                 budget: float = 0.0):
        self.id = vid
        self.route = route
        self.ridx = 0
        self.edge = route[0]
        self.pos = pos
        self.speed = 0.0
        self.length = length
        self.budget = budget
        self.hurry = 0.0
        self.state = APPROACHING
        self.granted = False
        self.waited = False
        self.dwell = 0
        self.next_edge = -1
        self.next_route: list[int] | None = None
        self.edges_done = 0
        self.routes_done = 0

    @property
    def remaining_intersections(self) -> int:
        return len(self.route) - self.ridx

    @property
    def upcoming_edge(self) -> int:
        """Edge this vehicle will take after its next crossing."""
        if self.ridx + 1 < len(self.route):
            return self.route[self.ridx + 1]
        return self.next_route[0]

    def __repr__(self) -> str:
        return (f"Vehicle(id={self.id}, edge={self.edge}, pos={self.pos:.2f}, "
                f"state={self.state}, hurry={self.hurry:.2f}, budget={self.budget:.2f})")


class Intersection:
    __slots__ = ("node", "group", "inside")

    def __init__(self, node: int):
        self.node = node
        self.group: deque[Vehicle] = deque()  # granted, not yet entered
        self.inside: Vehicle | None = None

    @property
    def occupied(self) -> bool:
        return self.inside is not None or bool(self.group)


class Strategy(Protocol):
    name: str
    initial_budget: float

    def attach(self, world: "World") -> None: ...

    def decide(self, world: "World") -> dict[int, list[int]]: ...

    def post_step(self, world: "World") -> None: ...


class InvariantError(AssertionError):
    pass


class World:
    """Mutable state of one simulation run."""

    def __init__(self, cfg: EngineConfig | None = None, seed: int = 0,
                 grid: Grid | None = None):
        self.cfg = cfg or EngineConfig()
        self.grid = grid or build_grid(self.cfg.width, self.cfg.height, self.cfg.edge_length)
        self.rng = random.Random(seed)
        self.clock = 0
        self.vehicles: list[Vehicle] = []
        self.edge_q: list[list[Vehicle]] = [[] for _ in self.grid.edges]
        self.edge_dst = [e.dst for e in self.grid.edges]
        self.intersections = [Intersection(n) for n in self.grid.nodes]
        self.busy = [False] * self.grid.n_nodes
        self.servable: set[int] = set()  # idle-node leaders that could have been granted
        self.metrics = RunMetrics()
        self.initial_budget = 0.0
        self.check = False
        self.trace: TextIO | None = None
        self.on_grant: list[Callable[[Vehicle], None]] = []

    # -- setup -------------------------------------------------------------

    def slots_per_edge(self) -> int:
        c = self.cfg
        return int((self.grid.edge_length - c.vehicle_length) // (c.vehicle_length + c.min_gap)) + 1

    def capacity(self) -> int:
        return len(self.grid.edges) * self.slots_per_edge()

    def new_route(self, start_edge: int) -> list[int]:
        if self.cfg.routes == "s":
            return sample_cyclic_route(self.grid, start_edge, self.cfg.route_length, self.rng)
        return sample_route(self.grid, start_edge, self.cfg.route_length, self.rng)

    def spawn_vehicles(self, count: int, budget: float = 0.0) -> None:
        """Place ``count`` vehicles on distinct random slots across all edges."""
        if count < 1:
            raise ValueError("vehicle count must be >= 1")
        c = self.cfg
        per_edge = self.slots_per_edge()
        if count > self.capacity():
            raise ValueError(
                f"cannot place {count} vehicles: network holds at most {self.capacity()}")
        self.initial_budget = budget
        start = len(self.vehicles)
        picks = self.rng.sample(range(len(self.grid.edges) * per_edge), count)
        for k, slot in enumerate(picks):
            edge, i = divmod(slot, per_edge)
            pos = c.vehicle_length + i * (c.vehicle_length + c.min_gap)
            v = Vehicle(start + k, self.new_route(edge), pos, c.vehicle_length, budget)
            self._plan_next_trip(v)
            self.vehicles.append(v)
            self.edge_q[edge].append(v)
        for q in self.edge_q:
            q.sort(key=lambda v: -v.pos)
        self.metrics = RunMetrics(len(self.vehicles))

    def add_vehicle(self, edge: int, pos: float, route: list[int] | None = None,
                    budget: float = 0.0, hurry: float = 0.0) -> Vehicle:
        """Place one vehicle by hand (scenario building and tests)."""
        if route is None:
            route = self.new_route(edge)
        if route[0] != edge:
            raise ValueError("route must start on the vehicle's edge")
        v = Vehicle(len(self.vehicles), route, pos, self.cfg.vehicle_length, budget)
        v.hurry = hurry
        self._plan_next_trip(v)
        self.vehicles.append(v)
        q = self.edge_q[edge]
        q.append(v)
        q.sort(key=lambda x: -x.pos)
        m = self.metrics
        m.cwt_open.append(False)
        m.cwt_acc.append(0)
        m.twt_acc.append(0)
        return v

    # -- queries -----------------------------------------------------------

    def lane_leaders(self, node: int) -> list[Vehicle]:
        """Front vehicle of each incoming edge, if inside the approach zone."""
        zone = self.grid.edge_length - self.cfg.approach_radius
        out = []
        for e in self.grid.in_edges[node]:
            q = self.edge_q[e]
            if q and q[0].pos >= zone:
                out.append(q[0])
        return out

    def zone_vehicles(self, node: int, radius: float | None = None) -> list[Vehicle]:
        """Every vehicle on an incoming edge within ``radius`` of the stop line."""
        zone = self.grid.edge_length - (self.cfg.approach_radius if radius is None else radius)
        out = []
        for e in self.grid.in_edges[node]:
            for v in self.edge_q[e]:
                if v.pos < zone:
                    break
                out.append(v)
        return out

    def entry_room(self, edge: int) -> int:
        """How many more vehicles can currently be let onto ``edge``."""
        q = self.edge_q[edge]
        if not q:
            return self.slots_per_edge()
        return int((q[-1].pos + EPS) // (self.cfg.vehicle_length + self.cfg.min_gap))

    def can_clear(self, v: Vehicle) -> bool:
        """True when ``v`` would find room on its next edge after crossing."""
        return self.entry_room(v.upcoming_edge) > 0

    def clearable_prefix(self, group: list[Vehicle]) -> list[Vehicle]:
        """Longest prefix of ``group`` whose members all fit downstream."""
        need: dict[int, int] = {}
        out = []
        for v in group:
            e = v.upcoming_edge
            need[e] = need.get(e, 0) + 1
            if need[e] > self.entry_room(e):
                break
            out.append(v)
        return out

    def at_stop_line(self, v: Vehicle) -> bool:
        return v.state != CROSSING and v.pos >= self.grid.edge_length - EPS

    def followers(self, v: Vehicle) -> list[Vehicle]:
        q = self.edge_q[v.edge]
        i = q.index(v)
        return q[i + 1:]

    # -- stepping ----------------------------------------------------------

    def grant(self, node: int, group: list[Vehicle]) -> None:
        inter = self.intersections[node]
        if inter.occupied:
            raise InvariantError(f"grant at occupied intersection {node}")
        if not group:
            return
        q = self.edge_q[group[0].edge]
        if self.edge_dst[group[0].edge] != node or q[:len(group)] != group:
            raise InvariantError(
                f"grant at {node} is not a lane-leader prefix: {[v.id for v in group]}")
        for v in group:
            v.granted = True
            v.state = GRANTED
            self.metrics.on_grant(v.id)
            for hook in self.on_grant:
                hook(v)
        inter.group.extend(group)

    def step(self, strategy: Strategy) -> None:
        decision = strategy.decide(self)
        by_id = self.vehicles
        for node in sorted(decision):
            self.grant(node, [by_id[i] for i in decision[node]])
        servable = self.servable
        servable.clear()
        for inter in self.intersections:
            occupied = inter.occupied
            self.busy[inter.node] = occupied
            if not occupied:
                for v in self.lane_leaders(inter.node):
                    if self.can_clear(v):
                        servable.add(v.id)
        self._move()
        self._release()
        self.metrics.on_step(self)
        strategy.post_step(self)
        if self.trace is not None:
            self._write_trace()
        if self.check:
            self.check_invariants()
        self.clock += 1

    def run(self, strategy: Strategy, steps: int) -> RunMetrics:
        for _ in range(steps):
            self.step(strategy)
        return self.metrics

    def _move(self) -> None:
        c = self.cfg
        L = self.grid.edge_length
        v_max = c.v_max
        spacing = c.vehicle_length + c.min_gap
        thr = c.wait_speed_threshold
        stop = L - EPS
        inters = self.intersections
        for e, q in enumerate(self.edge_q):
            if not q:
                continue
            front = q[0]
            if front.granted and front.pos >= stop:
                inter = inters[self.edge_dst[e]]
                if (inter.inside is None and inter.group[0] is front
                        and self.can_clear(front)):
                    inter.group.popleft()
                    inter.inside = front
                    self._enter(front)
                    del q[0]
            ahead = L
            for v in q:
                new = v.pos + v_max
                if new > ahead:
                    new = ahead if ahead > v.pos else v.pos
                d = new - v.pos
                v.pos = new
                v.speed = d
                if d < thr:
                    v.waited = True
                    if not v.granted:
                        v.state = QUEUED
                else:
                    v.waited = False
                    if not v.granted:
                        v.state = APPROACHING
                ahead = new - spacing

    def _plan_next_trip(self, v: Vehicle) -> None:
        # sampled while the vehicle drives the last edge of its current route
        if v.ridx == len(v.route) - 1:
            if self.cfg.routes == "s":
                v.next_route = v.route
            else:
                v.next_route = continue_route(self.grid, v.route[-1], self.cfg.route_length, self.rng)

    def _enter(self, v: Vehicle) -> None:
        v.state = CROSSING
        v.dwell = self.cfg.t_cross
        v.waited = False
        v.speed = 0.0
        v.edges_done += 1
        self.metrics.on_enter(v.id)
        v.next_edge = v.upcoming_edge
        if v.ridx + 1 >= len(v.route):
            v.route = v.next_route
            v.next_route = None
            v.ridx = -1
            v.budget = self.initial_budget
            v.routes_done += 1

    def _release(self) -> None:
        spacing = self.cfg.vehicle_length + self.cfg.min_gap
        for inter in self.intersections:
            v = inter.inside
            if v is None:
                continue
            if v.dwell > 0:
                v.dwell -= 1
            if v.dwell > 0:
                continue
            q = self.edge_q[v.next_edge]
            if q and q[-1].pos < spacing - EPS:
                continue  # spillback: wait inside until the entry clears
            v.ridx += 1
            v.edge = v.next_edge
            v.next_edge = -1
            v.pos = 0.0
            v.granted = False
            v.state = APPROACHING
            q.append(v)
            inter.inside = None
            self._plan_next_trip(v)

    # -- diagnostics -------------------------------------------------------

    def check_invariants(self) -> None:
        c = self.cfg
        L = self.grid.edge_length
        seen = 0
        for inter in self.intersections:
            if inter.inside is not None:
                seen += 1
                if inter.inside.state != CROSSING:
                    raise InvariantError(f"non-crossing vehicle inside {inter.node}")
            if len({v.edge for v in inter.group}) > 1:
                raise InvariantError(f"intersection {inter.node} granted to two lanes")
        for e, q in enumerate(self.edge_q):
            prev = None
            for v in q:
                seen += 1
                if v.edge != e or not (-EPS <= v.pos <= L + EPS):
                    raise InvariantError(f"bad position {v}")
                if prev is not None and prev.pos - prev.length - v.pos < c.min_gap - 1e-6:
                    raise InvariantError(f"collision on edge {e}: {prev} / {v}")
                prev = v
        if seen != len(self.vehicles):
            raise InvariantError(f"vehicle count {seen} != {len(self.vehicles)}")
        for v in self.vehicles:
            if v.hurry < 0 or v.budget < 0:
                raise InvariantError(f"negative hurry/budget: {v}")
            if not (0.0 <= v.speed <= c.v_max + EPS):
                raise InvariantError(f"speed out of range: {v}")

    def _write_trace(self) -> None:
        for v in self.vehicles:
            self.trace.write(f"{self.clock} {v.id} {v.edge} {v.pos:.3f} {v.speed:.3f} {v.state}\n")


def make_world(cfg: EngineConfig, vehicles: int, seed: int, strategy: Strategy) -> World:
    world = World(cfg, seed)
    world.spawn_vehicles(vehicles, budget=strategy.initial_budget)
    strategy.attach(world)
    return world
