"""Manhattan grid road network and random route sampling.

Nodes are intersections on a ``width x height`` lattice, numbered row-major
(``node = y * width + x``).  Every road between two lattice neighbours is a
pair of directed single-lane edges.  Edge ids are assigned in ``(src, dst)``
order so that everything downstream can rely on a stable total order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import random
from typing import Sequence

DEFAULT_EDGE_LENGTH = 100.0
DEFAULT_ROUTE_LENGTH = 12


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    dst: int
    length: float


@dataclass(frozen=True)
class Grid:
    width: int
    height: int
    edge_length: float
    edges: tuple[Edge, ...]
    out_edges: tuple[tuple[int, ...], ...]
    in_edges: tuple[tuple[int, ...], ...]
    reverse: tuple[int, ...]
    _by_pair: dict = field(repr=False, compare=False)

    @property
    def n_nodes(self) -> int:
        return self.width * self.height

    @property
    def nodes(self) -> range:
        return range(self.width * self.height)

    def coords(self, node: int) -> tuple[int, int]:
        return node % self.width, node // self.width

    def edge_between(self, src: int, dst: int) -> int:
        return self._by_pair[(src, dst)]

    def dump(self) -> str:
        """Plain-text adjacency listing, one ``from to length`` line per edge."""
        return "".join(f"{e.src} {e.dst} {e.length:g}\n" for e in self.edges)


def build_grid(width: int = 5, height: int = 5,
               edge_length: float = DEFAULT_EDGE_LENGTH) -> Grid:
    if width < 2 or height < 2:
        raise ValueError(f"grid must be at least 2x2, got {width}x{height}")
    if not edge_length > 0:
        raise ValueError(f"edge_length must be positive, got {edge_length}")

    pairs = []
    for y in range(height):
        for x in range(width):
            a = y * width + x
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height:
                    pairs.append((a, ny * width + nx))
    pairs.sort()

    edges = tuple(Edge(i, a, b, float(edge_length)) for i, (a, b) in enumerate(pairs))
    by_pair = {(e.src, e.dst): e.id for e in edges}
    n = width * height
    out_edges = [[] for _ in range(n)]
    in_edges = [[] for _ in range(n)]
    for e in edges:
        out_edges[e.src].append(e.id)
        in_edges[e.dst].append(e.id)
    reverse = tuple(by_pair[(e.dst, e.src)] for e in edges)
    return Grid(
        width=width,
        height=height,
        edge_length=float(edge_length),
        edges=edges,
        out_edges=tuple(tuple(sorted(o)) for o in out_edges),
        in_edges=tuple(tuple(sorted(i)) for i in in_edges),
        reverse=reverse,
        _by_pair=by_pair,
    )


def feasible_successors(grid: Grid, incoming: int) -> tuple[int, ...]:
    """Outgoing edges at the end of ``incoming``, U-turn excluded when avoidable."""
    e = grid.edges[incoming]
    outs = grid.out_edges[e.dst]
    back = grid.reverse[incoming]
    succ = tuple(o for o in outs if o != back)
    return succ if succ else outs


def sample_route(grid: Grid, start_edge: int, length: int = DEFAULT_ROUTE_LENGTH,
                 rng: random.Random | None = None) -> list[int]:
    """Random walk of ``length`` edges starting with ``start_edge``.

    Each continuation is one uniform draw over :func:`feasible_successors`,
    so exactly ``length - 1`` draws are consumed from ``rng``.
    """
    if length < 1:
        raise ValueError("route length must be >= 1")
    if rng is None:
        rng = random.Random()
    route = [start_edge]
    for _ in range(length - 1):
        succ = feasible_successors(grid, route[-1])
        route.append(succ[rng.randrange(len(succ))])
    return route


def continue_route(grid: Grid, last_edge: int, length: int,
                   rng: random.Random) -> list[int]:
    """Fresh route of ``length`` edges that follows on from ``last_edge``."""
    return sample_route(grid, last_edge, length + 1, rng)[1:]


def is_cyclic(grid: Grid, route: Sequence[int]) -> bool:
    return route[0] in feasible_successors(grid, route[-1])


def sample_cyclic_route(grid: Grid, start_edge: int,
                        length: int = DEFAULT_ROUTE_LENGTH,
                        rng: random.Random | None = None,
                        attempts: int = 500) -> list[int]:
    """Route that can be driven repeatedly (its first edge follows its last).

    Rejection-samples random walks; falls back to looping around a block
    adjacent to ``start_edge`` when ``length`` is a multiple of 4.
    """
    if rng is None:
        rng = random.Random()
    for _ in range(attempts):
        route = sample_route(grid, start_edge, length, rng)
        if is_cyclic(grid, route):
            return route
    if length % 4 == 0:
        return _block_loop(grid, start_edge) * (length // 4)
    raise ValueError(f"no cyclic route of length {length} through edge {start_edge}")


def _block_loop(grid: Grid, edge_id: int) -> list[int]:
    e = grid.edges[edge_id]
    (x0, y0), (x1, y1) = grid.coords(e.src), grid.coords(e.dst)
    dx, dy = x1 - x0, y1 - y0
    for px, py in ((-dy, dx), (dy, -dx)):  # left-hand then right-hand square
        corners = [(x0, y0), (x1, y1), (x1 + px, y1 + py), (x0 + px, y0 + py)]
        if all(0 <= cx < grid.width and 0 <= cy < grid.height for cx, cy in corners):
            nodes = [cy * grid.width + cx for cx, cy in corners]
            return [grid.edge_between(nodes[i], nodes[(i + 1) % 4]) for i in range(4)]
    raise AssertionError("every lattice edge borders at least one block")
