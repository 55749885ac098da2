"""Finite truncations of lazy graphs.

A truncation is the closed ball of a requested radius around the root,
materialized by layered BFS.  Two mechanisms keep it finite and reproducible:

* ``branching_cap`` limits how many *new* vertices one expansion may add
  (this is what tames infinite-degree vertices), and
* a global node budget; when the next layer would overflow it, the ball is
  clamped to the last complete layer.  Clamping is only permitted when a
  branching cap is set; without one the overflow is an error, never a silent
  cut.

Edges are recorded between ball vertices seen during (possibly capped)
stream enumeration, restricted to BFS-consistent pairs (layer difference
at most one), so distances recomputed on the materialized edge set agree
with the discovery layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .families import LazyGraph, StructureHints

DEFAULT_BUDGET = 50_000


class BudgetExceededError(RuntimeError):
    """Ball outgrew the node budget and no branching cap authorized clamping."""


class TruncationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteTruncation:
    family: str
    params: tuple[tuple[str, int], ...]
    root: int
    requested_radius: int
    radius: int
    branching_cap: int | None
    budget: int
    order: tuple[int, ...]
    dist: dict[int, int]
    adj: dict[int, tuple[int, ...]]
    bfs_parent: dict[int, int]
    boundary: frozenset[int]
    budget_limited: bool
    capped_vertices: frozenset[int]
    hints: StructureHints
    label: object = field(default=None, repr=False)

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.dist)

    @property
    def n_vertices(self) -> int:
        return len(self.dist)

    @property
    def cap_hit(self) -> bool:
        return bool(self.capped_vertices)

    @property
    def graph_exhausted(self) -> bool:
        """True when the ball provably equals the whole (finite) graph."""
        return not self.boundary and not self.cap_hit and not self.budget_limited

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self):
        for u in self.order:
            for w in self.adj[u]:
                if u < w:
                    yield (u, w)

    def n_edges(self) -> int:
        return sum(1 for _ in self.edges())

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj.get(u, ())

    def full_degree_known(self, v: int) -> bool:
        """Whether adj(v) provably lists every G-neighbor of v."""
        return self.dist[v] < self.radius and v not in self.capped_vertices

    def label_of(self, v: int) -> str:
        return self.label(v) if callable(self.label) else str(v)


def truncate(
    g: LazyGraph,
    radius: int,
    branching_cap: int | None = None,
    budget: int | None = None,
) -> FiniteTruncation:
    """Materialize the closed ball of ``radius`` around ``g.root``."""
    if radius < 0:
        raise TruncationError("radius must be >= 0")
    cap = branching_cap if branching_cap is not None else g.hints.branching_cap
    limit = budget if budget is not None else DEFAULT_BUDGET
    if limit < 1:
        raise TruncationError("budget must be >= 1")

    dist: dict[int, int] = {g.root: 0}
    order: list[int] = [g.root]
    parent: dict[int, int] = {}
    edges: set[tuple[int, int]] = set()
    capped: set[int] = set()
    frontier: list[int] = [g.root]
    r = 0
    budget_limited = False

    def record(u: int, w: int) -> None:
        if abs(dist[u] - dist[w]) <= 1:
            edges.add((u, w) if u < w else (w, u))

    while r < radius and frontier:
        nxt: list[int] = []
        overflow = False
        for u in frontier:
            new_here = 0
            enumerated = 0
            for w in g.neighbors(u):
                enumerated += 1
                if w in dist:
                    record(u, w)
                    continue
                if cap is not None and new_here >= cap:
                    capped.add(u)
                    break
                if len(dist) >= limit:
                    overflow = True
                    break
                if cap is None and enumerated > limit:
                    raise BudgetExceededError(
                        f"{g.family}: stream of vertex {u} exceeded budget {limit} "
                        "with no branching_cap set"
                    )
                dist[w] = r + 1
                parent[w] = u
                order.append(w)
                nxt.append(w)
                edges.add((u, w) if u < w else (w, u))
                new_here += 1
            if overflow:
                break
        if overflow:
            if cap is None:
                raise BudgetExceededError(
                    f"{g.family}: radius-{radius} ball exceeds budget {limit} "
                    "and no branching_cap is set"
                )
            for w in nxt:
                del dist[w]
                del parent[w]
            order = order[: len(dist)]
            edges = {e for e in edges if e[0] in dist and e[1] in dist}
            budget_limited = True
            break
        frontier = nxt
        r += 1

    effective = r if budget_limited else radius
    boundary = frozenset(v for v, d in dist.items() if d == effective)

    # Boundary vertices were never expanded; sweep their streams for edges
    # back into the ball so same-layer adjacency is not lost.
    for u in sorted(boundary):
        new_seen = 0
        enumerated = 0
        for w in g.neighbors(u):
            enumerated += 1
            if w in dist:
                record(u, w)
            else:
                new_seen += 1
                if cap is not None and new_seen >= cap:
                    break
            if cap is None and enumerated > limit:
                raise BudgetExceededError(
                    f"{g.family}: boundary stream of vertex {u} exceeded budget {limit}"
                )

    adj: dict[int, list[int]] = {v: [] for v in dist}
    for u, w in edges:
        adj[u].append(w)
        adj[w].append(u)

    return FiniteTruncation(
        family=g.family,
        params=g.params,
        root=g.root,
        requested_radius=radius,
        radius=effective,
        branching_cap=cap,
        budget=limit,
        order=tuple(order),
        dist=dist,
        adj={v: tuple(sorted(ns)) for v, ns in adj.items()},
        bfs_parent=parent,
        boundary=boundary,
        budget_limited=budget_limited,
        capped_vertices=frozenset(capped),
        hints=g.hints,
        label=g.label,
    )


def distance_classes(trunc: FiniteTruncation) -> list[list[int]]:
    """D_k = vertices at distance exactly k from the root, k = 0..radius."""
    classes: list[list[int]] = [[] for _ in range(trunc.radius + 1)]
    for v in trunc.order:
        classes[trunc.dist[v]].append(v)
    return [sorted(c) for c in classes]


def truncation_to_json(trunc: FiniteTruncation) -> dict:
    return {
        "family": trunc.family,
        "params": {k: v for k, v in trunc.params},
        "root": trunc.root,
        "requested_radius": trunc.requested_radius,
        "radius": trunc.radius,
        "branching_cap": trunc.branching_cap,
        "budget_limited": trunc.budget_limited,
        "vertices": sorted(trunc.dist),
        "edges": sorted([u, v] for u, v in trunc.edges()),
        "boundary": sorted(trunc.boundary),
    }


def truncation_to_dot(trunc: FiniteTruncation) -> str:
    lines = [f'graph "{trunc.family}" {{']
    for v in sorted(trunc.dist):
        shape = " shape=box" if v in trunc.boundary else ""
        lines.append(f'  {v} [label="{trunc.label_of(v)}"{shape}];')
    for u, v in sorted(trunc.edges()):
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
