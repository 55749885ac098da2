"""Vertex-disjoint path routing via unit-capacity max flow.

Menger-exact on a truncation: internal vertices carry capacity one (node
splitting), sources emit, targets absorb.  Deterministic given the host's
sorted adjacency.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .truncation import FiniteTruncation


@dataclass
class RoutingResult:
    paths: list[tuple[int, ...]]
    complete: bool  # False when the expansion budget cut the search short
    expansions: int


class _Net:
    def __init__(self) -> None:
        self.to: list[int] = []
        self.cap: list[int] = []
        self.head: dict[int, list[int]] = {}

    def add(self, a: int, b: int, cap: int) -> None:
        self.head.setdefault(a, []).append(len(self.to))
        self.to.append(b)
        self.cap.append(cap)
        self.head.setdefault(b, []).append(len(self.to))
        self.to.append(a)
        self.cap.append(0)


def route_disjoint_paths(
    h: FiniteTruncation,
    source_caps: dict[int, int],
    targets: frozenset[int],
    k: int,
    banned: frozenset[int] = frozenset(),
    budget: int | None = None,
) -> RoutingResult:
    """Up to k paths source->target, pairwise vertex-disjoint except that a
    source vertex s may start ``source_caps[s]`` of them.

    Paths avoid `banned` and all source/target vertices internally; each
    target ends at most one path.  Sources and targets must be disjoint.
    """
    if source_caps.keys() & targets:
        raise ValueError("sources and targets must be disjoint")
    limit = budget if budget is not None else 10**9

    S, T = 0, 1
    idx: dict[tuple[str, int], int] = {}

    def node(side: str, v: int) -> int:
        key = (side, v)
        if key not in idx:
            idx[key] = len(idx) + 2
        return idx[key]

    eligible = h.vertex_set - banned
    internal = eligible - source_caps.keys() - targets

    net = _Net()
    for s in sorted(source_caps):
        if s in eligible:
            net.add(S, node("out", s), source_caps[s])
    for t in sorted(targets):
        if t in eligible:
            net.add(node("in", t), T, 1)
    for v in sorted(internal):
        net.add(node("in", v), node("out", v), 1)
    for u, w in h.edges():
        if u not in eligible or w not in eligible:
            continue
        for a, b in ((u, w), (w, u)):
            if a in targets or b in source_caps:
                continue
            net.add(node("out", a), node("in", b), 1)

    flow_value = 0
    expansions = 0
    complete = True
    while flow_value < k:
        prev_arc: dict[int, int] = {S: -1}
        queue = deque([S])
        reached = False
        while queue and not reached:
            a = queue.popleft()
            expansions += 1
            if expansions > limit:
                complete = False
                break
            for ai in net.head.get(a, ()):
                if net.cap[ai] <= 0:
                    continue
                b = net.to[ai]
                if b in prev_arc:
                    continue
                prev_arc[b] = ai
                if b == T:
                    reached = True
                    break
                queue.append(b)
        if not complete:
            break
        if not reached:
            break
        a = T
        while a != S:
            ai = prev_arc[a]
            net.cap[ai] -= 1
            net.cap[ai ^ 1] += 1
            a = net.to[ai ^ 1]
        flow_value += 1

    paths = _decompose(net, idx, S, T)
    return RoutingResult(paths, complete, expansions)


def _decompose(net: _Net, idx, S: int, T: int) -> list[tuple[int, ...]]:
    label: dict[int, tuple[str, int]] = {n: key for key, n in idx.items()}
    # Flow on a forward arc (even index) equals the residual on its twin.
    out_arcs: dict[int, list[int]] = {}
    for ai in range(0, len(net.to), 2):
        f = net.cap[ai ^ 1]
        if f > 0:
            tail = net.to[ai ^ 1]
            for _ in range(f):
                out_arcs.setdefault(tail, []).append(ai)
    for lst in out_arcs.values():
        lst.sort(key=lambda ai: net.to[ai])
    paths: list[tuple[int, ...]] = []
    while out_arcs.get(S):
        at = S
        seq: list[int] = []
        while at != T:
            ai = out_arcs[at].pop(0)
            at = net.to[ai]
            if at == T:
                break
            _, v = label[at]
            if not seq or seq[-1] != v:
                seq.append(v)
        paths.append(tuple(seq))
    paths.sort()
    return paths
