"""Small scenario-building helpers shared by the tests."""
from __future__ import annotations

from avcoord.config import EngineConfig
from avcoord.engine import World
from avcoord.network import build_grid, feasible_successors


class GrantAll:
    """Grants the lowest-id ready lane leader at every free intersection."""
    name = "grant_all"
    initial_budget = 0.0

    def attach(self, world):
        pass

    def decide(self, world):
        grants = {}
        for inter in world.intersections:
            if inter.occupied:
                continue
            leaders = [v for v in world.lane_leaders(inter.node) if world.can_clear(v)]
            if leaders:
                grants[inter.node] = [min(leaders, key=lambda v: v.id).id]
        return grants

    def post_step(self, world):
        pass


class GrantNothing(GrantAll):
    def decide(self, world):
        return {}


def small_world(width=3, height=3, seed=0, **engine) -> World:
    cfg = EngineConfig(width=width, height=height, **engine)
    return World(cfg, seed, build_grid(width, height, cfg.edge_length))


def straight_route(world, edge, length=None):
    """Route that goes straight on where it can and otherwise takes the first successor."""
    grid = world.grid
    length = length or world.cfg.route_length
    route = [edge]
    while len(route) < length:
        e = grid.edges[route[-1]]
        ahead = 2 * e.dst - e.src
        (x0, y0), (x1, y1) = grid.coords(e.src), grid.coords(e.dst)
        inside = 0 <= 2 * x1 - x0 < grid.width and 0 <= 2 * y1 - y0 < grid.height
        route.append(grid.edge_between(e.dst, ahead) if inside
                     else feasible_successors(grid, route[-1])[0])
    return route


def crossing_order(bids, approach, cp="avp", steps=60):
    """Grant order at the centre of a 3x3 grid for lane leaders bidding ``bids``.

    Leaders wait at the stop lines of the four approaches with Balanced bids
    that equal ``bids`` exactly; nobody else is on the network.
    """
    from avcoord.config import AuctionConfig, DAuctionConfig
    from avcoord.strategies.auction import CentralAuction
    from avcoord.strategies.dauction import DecentralAuction

    world = small_world(3, 3)
    g = world.grid
    for src, bid in zip((1, 3, 5, 7), bids):
        e = g.edge_between(src, 4)
        route = straight_route(world, e)
        world.add_vehicle(e, 100.0, route, budget=bid * len(route))
    if approach == "dauction":
        strategy = DecentralAuction(DAuctionConfig(bidding="balanced"))
    else:
        strategy = CentralAuction(approach, AuctionConfig(bidding="balanced", cp=cp))
    strategy.attach(world)
    order = []
    world.on_grant.append(lambda v: order.append(v.id) if world.edge_dst[v.edge] == 4 else None)
    for _ in range(steps):
        world.step(strategy)
        if len(order) == len(bids):
            break
    return order
