"""Budgeted, deterministic searches for star/comb/fan certificates.

Outcomes are three-valued: ``Found`` carries a certificate that re-checks
against the host, ``Exhausted`` reports a search that ended without one (with
a flag saying whether it was cut short by the expansion budget), and
``ImpossibleByBound`` is reserved for finite structural bounds that rule the
object out regardless of budget (degree bounds, rayless depth hints, or an
attachment set smaller than the scale).

Every tie is broken toward the lowest vertex id; searches share no code with
the certificate validators.
"""

from __future__ import annotations

from dataclasses import dataclass

from .certificates import CombCert, DominatedCombCert, FanCert, StarCert
from .flow import route_disjoint_paths
from .trees import RootedTree
from .truncation import DEFAULT_BUDGET, FiniteTruncation


@dataclass(frozen=True)
class Found:
    cert: object

    @property
    def is_found(self) -> bool:
        return True


@dataclass(frozen=True)
class Exhausted:
    expansions: int
    limit: int
    complete: bool
    note: str = ""

    @property
    def is_found(self) -> bool:
        return False


@dataclass(frozen=True)
class ImpossibleByBound:
    reason: str

    @property
    def is_found(self) -> bool:
        return False


SearchOutcome = Found | Exhausted | ImpossibleByBound

MAX_SPINE_TRIES = 24
FLOW_HOST_CAP = 5_000


def outcome_to_json(outcome: SearchOutcome) -> dict:
    if isinstance(outcome, Found):
        return {"outcome": "found", "certificate": outcome.cert.to_json()}
    if isinstance(outcome, Exhausted):
        return {
            "outcome": "exhausted",
            "expansions": outcome.expansions,
            "limit": outcome.limit,
            "complete": outcome.complete,
            "note": outcome.note,
        }
    return {"outcome": "impossible_by_bound", "reason": outcome.reason}


def bfs_spanning_tree(h: FiniteTruncation) -> RootedTree:
    t = RootedTree(h.root)
    for v in h.order[1:]:
        t.add_child(h.bfs_parent[v], v)
    return t


def _subtree_counts(t: RootedTree, u: frozenset[int]) -> dict[int, int]:
    counts: dict[int, int] = {}
    for v in sorted(t.level, key=lambda x: -t.level[x]):
        counts[v] = (1 if v in u else 0) + sum(counts[c] for c in t.children[v])
    return counts


def _descend_to_u(t: RootedTree, counts: dict[int, int], u: frozenset[int], start: int, via: int) -> tuple[int, ...]:
    """Tree path start -> via -> ... -> first u-vertex below (greedy, lowest id)."""
    seq = [start, via]
    cur = via
    while cur not in u:
        nxt = None
        for c in sorted(t.children[cur]):
            if counts[c] > 0:
                nxt = c
                break
        assert nxt is not None, "positive count without a u-vertex below"
        seq.append(nxt)
        cur = nxt
    return tuple(seq)


# ---------------------------------------------------------------------------
# stars


def find_star(
    h: FiniteTruncation, u: frozenset[int], k: int, budget: int | None = None
) -> SearchOutcome:
    """Subdivided star with k leaves in u, searched center by center with an
    exact disjoint-path routing per candidate."""
    if k < 2:
        raise ValueError("a star search needs k >= 2")
    limit = budget if budget is not None else DEFAULT_BUDGET
    u = frozenset(u) & h.vertex_set
    bound = h.hints.degree_bound
    if bound is not None and k > bound:
        return ImpossibleByBound(
            f"a subdivided star with {k} leaves needs a center of degree >= {k}, "
            f"but the family degree bound is {bound}"
        )
    if len(u) < k:
        return ImpossibleByBound(f"only {len(u)} attachment candidates for scale {k}")
    spent = 0
    candidates = sorted(
        (c for c in h.vertex_set if h.degree(c) >= k), key=lambda c: (-h.degree(c), c)
    )
    for c in candidates:
        targets = u - {c}
        if len(targets) < k:
            continue
        if spent >= limit:
            return Exhausted(spent, limit, False, "budget ran out scanning centers")
        result = route_disjoint_paths(h, {c: k}, targets, k, budget=limit - spent)
        spent += result.expansions
        if len(result.paths) >= k:
            return Found(StarCert(c, tuple(result.paths[:k])))
        if not result.complete:
            return Exhausted(spent, limit, False, f"budget ran out at center {c}")
    return Exhausted(spent, limit, True, "no center admits k disjoint paths into u")


def rayless_tree_star(
    t: RootedTree, u: frozenset[int], k: int
) -> SearchOutcome:
    """Star extraction inside a rayless (finite-depth) tree: pigeonhole over
    child subtrees; guaranteed to fire once |u| is large relative to depth."""
    if not u:
        raise ValueError("u must be nonempty")
    for v in u:
        if v not in t.level:
            raise ValueError(f"u-vertex {v} not in the tree")
    if k < 2:
        raise ValueError("a star search needs k >= 2")
    if len(u) < k:
        return ImpossibleByBound(f"only {len(u)} attachment candidates for scale {k}")
    counts = _subtree_counts(t, u)
    for v in sorted(t.level):
        fruitful = [c for c in sorted(t.children[v]) if counts[c] > 0]
        if len(fruitful) >= k:
            paths = tuple(_descend_to_u(t, counts, u, v, c) for c in fruitful[:k])
            return Found(StarCert(v, paths))
    return Exhausted(len(t.level), len(t.level), True, "no vertex has k fruitful child subtrees")


# ---------------------------------------------------------------------------
# combs


def _harvest_teeth(
    t: RootedTree,
    counts: dict[int, int],
    u: frozenset[int],
    spine: tuple[int, ...],
) -> list[tuple[int, ...]]:
    spine_set = set(spine)
    teeth: list[tuple[int, ...]] = []
    for s in spine:
        if s in u:
            teeth.append((s,))
            continue
        for c in sorted(t.children[s]):
            if c not in spine_set and counts[c] > 0:
                teeth.append(_descend_to_u(t, counts, u, s, c))
                break
    return teeth


def _max_count_descent(t: RootedTree, counts: dict[int, int]) -> tuple[int, ...]:
    seq = [t.root]
    cur = t.root
    while t.children[cur]:
        cur = max(sorted(t.children[cur]), key=lambda c: (counts[c], -c))
        seq.append(cur)
    return tuple(seq)


def find_comb(
    h: FiniteTruncation, u: frozenset[int], k: int, budget: int | None = None
) -> SearchOutcome:
    """Comb with k teeth in u: spine = a boundary-reaching path, teeth first
    harvested along the BFS spanning tree, then routed by disjoint paths."""
    if k < 1:
        raise ValueError("a comb search needs k >= 1")
    limit = budget if budget is not None else DEFAULT_BUDGET
    u = frozenset(u) & h.vertex_set
    if h.hints.finite_depth is not None:
        return ImpossibleByBound(
            f"family has depth <= {h.hints.finite_depth}, hence no ray and no comb"
        )
    if len(u) < k:
        return ImpossibleByBound(f"only {len(u)} attachment candidates for scale {k}")
    if not h.boundary:
        if h.graph_exhausted:
            return ImpossibleByBound(
                "the whole graph materialized inside the radius; it is finite and rayless"
            )
        return Exhausted(0, limit, True, "no boundary-reaching spine in the capped truncation")

    t = bfs_spanning_tree(h)
    counts = _subtree_counts(t, u)

    spines: list[tuple[int, ...]] = []
    descent = _max_count_descent(t, counts)
    if descent[-1] in h.boundary:
        spines.append(descent)
    for b in sorted(h.boundary)[:MAX_SPINE_TRIES]:
        chain = t.down_closure(b)
        if chain not in spines:
            spines.append(chain)

    for spine in spines:
        teeth = _harvest_teeth(t, counts, u, spine)
        if len(teeth) >= k:
            return Found(CombCert(spine, tuple(teeth[:k])))

    if h.n_vertices > FLOW_HOST_CAP:
        return Exhausted(0, limit, False, "host too large for flow-based teeth routing")

    spent = 0
    for spine in spines:
        outcome, spent = _route_comb(h, spine, u, k, spent, limit)
        if outcome is not None:
            return outcome
        if spent >= limit:
            return Exhausted(spent, limit, False, "budget ran out during teeth routing")
    complete = len(h.boundary) <= MAX_SPINE_TRIES
    return Exhausted(spent, limit, complete, "no spine candidate admits k disjoint teeth")


def _route_comb(
    h: FiniteTruncation,
    spine: tuple[int, ...],
    u: frozenset[int],
    k: int,
    spent: int,
    limit: int,
) -> tuple[SearchOutcome | None, int]:
    spine_set = frozenset(spine)
    trivial = [(s,) for s in spine if s in u]
    routed: list[tuple[int, ...]] = []
    need = k - len(trivial)
    if need > 0:
        sources = {s: 1 for s in spine if s not in u}
        targets = u - spine_set
        if sources and targets:
            result = route_disjoint_paths(h, sources, targets, need, budget=limit - spent)
            spent += result.expansions
            routed = result.paths
            if not result.complete:
                return Exhausted(spent, limit, False, "budget ran out routing teeth"), spent
    teeth = trivial + routed
    if len(teeth) >= k:
        pos = {v: i for i, v in enumerate(spine)}
        teeth.sort(key=lambda p: (pos[p[0]], p))
        return Found(CombCert(tuple(spine), tuple(tuple(p) for p in teeth[:k]))), spent
    return None, spent


def comb_along_ray(
    h: FiniteTruncation,
    prefix: tuple[int, ...],
    u: frozenset[int],
    k: int,
    budget: int | None = None,
) -> SearchOutcome:
    """Comb search with a fixed spine (used for closure-of-U style checks
    along catalogued canonical rays)."""
    limit = budget if budget is not None else DEFAULT_BUDGET
    _require_path(h, prefix)
    u = frozenset(u) & h.vertex_set
    if len(u) < k:
        return ImpossibleByBound(f"only {len(u)} attachment candidates for scale {k}")
    outcome, _ = _route_comb(h, tuple(prefix), u, k, 0, limit)
    if outcome is None:
        return Exhausted(0, limit, True, "fixed spine does not admit k disjoint teeth")
    return outcome


# ---------------------------------------------------------------------------
# fans


def _require_path(h: FiniteTruncation, prefix: tuple[int, ...]) -> None:
    if not prefix:
        raise ValueError("empty path")
    if len(set(prefix)) != len(prefix):
        raise ValueError("path repeats a vertex")
    for v in prefix:
        if v not in h.dist:
            raise ValueError(f"path vertex {v} not in host")
    for a, b in zip(prefix, prefix[1:]):
        if not h.has_edge(a, b):
            raise ValueError(f"({a},{b}) is not a host edge")


def find_fan(
    h: FiniteTruncation,
    v: int,
    prefix: tuple[int, ...],
    k: int,
    budget: int | None = None,
) -> SearchOutcome:
    """k internally disjoint v -> prefix paths, computed exactly by routing."""
    if k < 1:
        raise ValueError("a fan search needs k >= 1")
    limit = budget if budget is not None else DEFAULT_BUDGET
    _require_path(h, prefix)
    if v in prefix[1:-1]:
        raise ValueError("fan apex must not be an interior vertex of the prefix")
    bound = h.hints.degree_bound
    if bound is not None and k > bound:
        return ImpossibleByBound(f"{k} disjoint paths cannot leave a vertex of degree <= {bound}")
    if h.full_degree_known(v) and h.degree(v) < k:
        return ImpossibleByBound(f"vertex {v} has degree {h.degree(v)} < {k} in the full graph")
    targets = frozenset(prefix) - {v}
    if len(targets) < k:
        return ImpossibleByBound(f"prefix offers only {len(targets)} distinct endpoints")
    result = route_disjoint_paths(h, {v: k}, targets, k, budget=limit)
    if len(result.paths) >= k:
        return Found(FanCert(v, tuple(prefix), tuple(result.paths[:k])))
    return Exhausted(
        result.expansions,
        limit,
        result.complete,
        f"maximum fan at {v} into the prefix has size {len(result.paths)}",
    )


# ---------------------------------------------------------------------------
# dominated combs and the dichotomy


def catalogued_ray_prefix(h: FiniteTruncation, end) -> tuple[int, ...] | None:
    """Longest prefix of a catalogued canonical ray that is a path in the ball."""
    out: list[int] = []
    n = 1
    while True:
        nxt = end.ray_prefix(n)
        if len(nxt) < n:
            break
        v = nxt[-1]
        if v not in h.dist or (out and not h.has_edge(out[-1], v)):
            break
        out.append(v)
        n += 1
    return tuple(out) if len(out) >= 2 else None


def _pair_comb_and_star(
    h: FiniteTruncation, comb_out: SearchOutcome, k: int, limit: int
) -> SearchOutcome | None:
    if not isinstance(comb_out, Found):
        return None
    comb: CombCert = comb_out.cert
    star_out = find_star(h, frozenset(comb.teeth), k, budget=limit)
    if isinstance(star_out, Found):
        star: StarCert = star_out.cert
        return Found(DominatedCombCert(comb, star, tuple(sorted(star.attachment))))
    return None


def find_dominated_comb(
    h: FiniteTruncation, u: frozenset[int], k: int, budget: int | None = None
) -> SearchOutcome:
    """Comb-and-star pair with >= k shared tooth/leaf vertices.

    Strategies, in order: combs along catalogued canonical rays, then a free
    comb at scale 2k with a star into its teeth, then a star into u at scale
    2k with a comb into its leaves.
    """
    if k < 2:
        raise ValueError("a dominated-comb search needs k >= 2")
    limit = budget if budget is not None else DEFAULT_BUDGET
    if h.hints.locally_finite:
        return ImpossibleByBound(
            "locally finite graphs admit no infinite fans, hence no dominated combs"
        )
    if h.hints.finite_depth is not None:
        return ImpossibleByBound(
            f"family has depth <= {h.hints.finite_depth}, hence no comb at all"
        )
    u = frozenset(u) & h.vertex_set
    if len(u) < 2 * k:
        return ImpossibleByBound(f"only {len(u)} attachment candidates for scale 2k = {2 * k}")

    notes: list[str] = []
    for end in h.hints.end_catalogue:
        prefix = catalogued_ray_prefix(h, end)
        if prefix is None or prefix[-1] not in h.boundary:
            continue
        paired = _pair_comb_and_star(h, comb_along_ray(h, prefix, u, 2 * k, limit), k, limit)
        if paired is not None:
            return paired
        notes.append(f"canonical ray {end.name}: no comb/star pair")

    comb_out = find_comb(h, u, 2 * k, budget=limit)
    if isinstance(comb_out, ImpossibleByBound):
        return comb_out
    paired = _pair_comb_and_star(h, comb_out, k, limit)
    if paired is not None:
        return paired
    if isinstance(comb_out, Found):
        notes.append("free comb found at scale 2k, but no dominating star into its teeth")
    else:
        notes.append(f"free comb search: {comb_out.note}")

    star_out = find_star(h, u, 2 * k, budget=limit)
    if isinstance(star_out, Found):
        comb2_out = find_comb(h, frozenset(star_out.cert.attachment), k, budget=limit)
        if isinstance(comb2_out, Found):
            comb2: CombCert = comb2_out.cert
            return Found(
                DominatedCombCert(comb2, star_out.cert, tuple(sorted(comb2.teeth)))
            )
        notes.append("star found at scale 2k, but no comb into its leaves")

    complete = not isinstance(comb_out, Exhausted) or comb_out.complete
    return Exhausted(0, limit, complete, "; ".join(notes))


def star_comb_dichotomy(
    h: FiniteTruncation, u: frozenset[int], k: int, budget: int | None = None
) -> SearchOutcome:
    """Star-or-comb at scale k: pigeonhole over the BFS spanning tree, with
    the comb side falling back to the general comb search."""
    if k < 2:
        raise ValueError("the dichotomy needs k >= 2")
    u = frozenset(u) & h.vertex_set
    if not u:
        raise ValueError("u must be nonempty")
    if len(u) < 2 or len(u) < k:
        return ImpossibleByBound(
            f"|u| = {len(u)}: a star needs 2 leaves and scale {k} needs {k} attachments"
        )
    t = bfs_spanning_tree(h)
    counts = _subtree_counts(t, u)
    for v in sorted(t.level):
        fruitful = [c for c in sorted(t.children[v]) if counts[c] > 0]
        if len(fruitful) >= k:
            paths = tuple(_descend_to_u(t, counts, u, v, c) for c in fruitful[:k])
            return Found(StarCert(v, paths))
    return find_comb(h, u, k, budget=budget)
