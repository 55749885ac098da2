"""Dispersedness testing, normal-tree construction, and the duality pipeline.

The pipeline realizes the two-branch duality at certificate scale k:

* scan the distance classes of U for a comb whose teeth can be upgraded to a
  dominating star inside the layered (rayless) subgraph of the first n
  classes -- success certifies a dominated comb;
* otherwise build a normal tree over the classes by iterated normal
  extension, prune to the down-closure of U, and collect fan evidence that
  its boundary-reaching rays are undominated at scale k.  A fan hit flips
  the run to the dominated-comb branch (with a searched certificate pair);
  if no certificate pair can be assembled the run is inconclusive rather
  than forced into either branch.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .certificates import CombCert, DominatedCombCert, validate
from .families import LazyGraph
from .search import (
    Exhausted,
    Found,
    ImpossibleByBound,
    SearchOutcome,
    catalogued_ray_prefix,
    find_comb,
    find_dominated_comb,
    find_fan,
    rayless_tree_star,
)
from .trees import (
    NormalTreeCert,
    RootedTree,
    certify_normal_tree,
    host_components_off_tree,
    is_normal,
    prune_to_down_closure,
)
from .truncation import DEFAULT_BUDGET, FiniteTruncation, distance_classes, truncate

FAN_CANDIDATE_CAP = 64
RAY_PREFIX_CAP = 128


class NormalExtensionError(RuntimeError):
    """Normal extension failed; carries the violating path.  Extension from
    the top of a chain neighbourhood is always possible, so this is a bug."""


# ---------------------------------------------------------------------------
# dispersedness


@dataclass(frozen=True)
class DispersednessReport:
    set_label: str
    outcome: str  # "exact_dispersed" | "no_comb_found" | "comb_found"
    reason: str
    certificate: CombCert | None = None
    complete: bool = True


def is_dispersed(
    g: LazyGraph,
    w,
    radius: int,
    k: int,
    branching_cap: int | None = None,
    budget: int | None = None,
    label: str = "w",
) -> DispersednessReport:
    """Budgeted comb search against w; structure hints short-circuit.

    ``w`` is either an explicit vertex set (then taken to be the whole
    attachment set, so finiteness is decisive) or a predicate
    ``(truncation, vertex) -> bool``.
    """
    if g.hints.finite_depth is not None:
        return DispersednessReport(
            label, "exact_dispersed", f"family depth <= {g.hints.finite_depth}: rayless"
        )
    h = truncate(g, radius, branching_cap, budget)
    return is_dispersed_on(h, w, k, budget, label)


def is_dispersed_on(
    h: FiniteTruncation, w, k: int, budget: int | None = None, label: str = "w"
) -> DispersednessReport:
    if h.hints.finite_depth is not None:
        return DispersednessReport(
            label, "exact_dispersed", f"family depth <= {h.hints.finite_depth}: rayless"
        )
    if isinstance(w, (set, frozenset)):
        w_set = frozenset(w)
        if w_set <= h.vertex_set and not (w_set & h.boundary):
            return DispersednessReport(
                label,
                "exact_dispersed",
                "finite attachment set strictly inside the ball: a comb needs "
                "infinitely many teeth",
            )
        w_set &= h.vertex_set
    else:
        w_set = frozenset(v for v in h.order if w(h, v))
    outcome = find_comb(h, w_set, k, budget=budget)
    if isinstance(outcome, Found):
        check = validate(h, outcome.cert, w_set, k)
        if not check.ok:
            raise AssertionError(f"comb searcher returned invalid cert: {check.problems}")
        return DispersednessReport(label, "comb_found", f"comb at scale {k}", outcome.cert)
    if isinstance(outcome, ImpossibleByBound):
        return DispersednessReport(label, "no_comb_found", outcome.reason)
    return DispersednessReport(label, "no_comb_found", outcome.note, None, outcome.complete)


# ---------------------------------------------------------------------------
# normal-tree construction (Jung-style iterated normal extension)


def build_normal_tree_on(
    h: FiniteTruncation, target_sets: list[frozenset[int]]
) -> RootedTree:
    """Absorb the target sets in order, each in (distance, id) order, always
    attaching below the top of the chain neighbourhood of the component the
    target lives in; validates normality of the result."""
    t = RootedTree(h.root)
    in_tree = {h.root}
    for targets in target_sets:
        for v in sorted(targets & h.vertex_set, key=lambda x: (h.dist[x], x)):
            if v in in_tree:
                continue
            comp, nbhd = _component_with_nbhd(h, in_tree, v)
            chain = sorted(nbhd, key=lambda x: t.level[x])
            for a, b in zip(chain, chain[1:]):
                if not t.is_ancestor(a, b):
                    raise NormalExtensionError(
                        f"neighbourhood of component at {v} is not a chain: {a} vs {b}"
                    )
            x = chain[-1]
            path = _shortest_inside(h, comp, x, v)
            for a, b in zip(path, path[1:]):
                t.add_child(a, b)
                in_tree.add(b)
    report = is_normal(h, t)
    if not report.ok:
        raise NormalExtensionError(f"extension produced a non-normal tree: {report.witness}")
    return t


def _component_with_nbhd(
    h: FiniteTruncation, in_tree: set[int], v: int
) -> tuple[set[int], set[int]]:
    comp: set[int] = {v}
    nbhd: set[int] = set()
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for w in h.adj[x]:
            if w in in_tree:
                nbhd.add(w)
            elif w not in comp:
                comp.add(w)
                queue.append(w)
    return comp, nbhd


def _shortest_inside(h: FiniteTruncation, comp: set[int], x: int, v: int) -> tuple[int, ...]:
    """Shortest x->v path with interior in comp; BFS over sorted adjacency."""
    prev: dict[int, int | None] = {x: None}
    queue = deque([x])
    while queue:
        a = queue.popleft()
        if a == v:
            path = [v]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return tuple(reversed(path))
        for w in h.adj[a]:
            if (w in comp) and w not in prev:
                prev[w] = a
                queue.append(w)
    raise AssertionError(f"target {v} not reachable from {x} inside its component")


def build_normal_tree(
    g: LazyGraph,
    dispersed_seq: list,
    radius: int,
    branching_cap: int | None = None,
    budget: int | None = None,
) -> NormalTreeCert:
    """Normal tree containing the union of the given (dispersed) sets."""
    h = truncate(g, radius, branching_cap, budget)
    sets = []
    for s in dispersed_seq:
        if isinstance(s, (set, frozenset)):
            sets.append(frozenset(s))
        else:
            sets.append(frozenset(v for v in h.order if s(h, v)))
    tree = build_normal_tree_on(h, sets)
    cofinal = frozenset().union(*sets) & frozenset(tree.level) if sets else frozenset()
    return certify_normal_tree(h, tree, cofinal)


# ---------------------------------------------------------------------------
# component neighbourhood report


@dataclass(frozen=True)
class ComponentInfo:
    representative: int
    size: int
    neighbourhood: tuple[int, ...]
    is_chain: bool
    max_neighbour: int | None
    touches_boundary: bool


def component_neighbourhood_report(
    h: FiniteTruncation, t: RootedTree
) -> tuple[ComponentInfo, ...]:
    """Per component of h - t: its tree neighbourhood, whether that is a
    chain (it must be, under a normal tree), and boundary contact."""
    infos = []
    for comp, nbhd in host_components_off_tree(h, frozenset(t.level)):
        chain = sorted(nbhd, key=lambda x: t.level[x])
        ok = all(t.is_ancestor(a, b) for a, b in zip(chain, chain[1:]))
        infos.append(
            ComponentInfo(
                representative=comp[0],
                size=len(comp),
                neighbourhood=tuple(chain),
                is_chain=ok,
                max_neighbour=chain[-1] if (ok and chain) else None,
                touches_boundary=any(v in h.boundary for v in comp),
            )
        )
    return tuple(infos)


# ---------------------------------------------------------------------------
# the pipeline


@dataclass(frozen=True)
class ClassReport:
    n: int
    size: int
    outcome: str  # "exact_dispersed" | "below_scale" | "no_comb" | "comb_not_dominating" | "comb_upgraded"
    detail: str = ""
    complete: bool = True


@dataclass(frozen=True)
class FanEvidence:
    ray_kind: str  # "tree" | "catalogue"
    ray_name: str
    prefix_len: int
    candidates_checked: int
    impossible_by_bound: int
    summary: str
    found_center: int | None = None


@dataclass(frozen=True)
class Theorem1Result:
    branch: str  # "dominated_comb" | "normal_tree" | "inconclusive"
    truncation: FiniteTruncation = field(repr=False)
    u_set: frozenset[int]
    class_reports: tuple[ClassReport, ...]
    dominated_comb: DominatedCombCert | None
    normal: NormalTreeCert | None
    components: tuple[ComponentInfo, ...]
    fan_evidence: tuple[FanEvidence, ...]
    notes: tuple[str, ...]


def _layered_spanning_tree(h: FiniteTruncation, classes: list[list[int]], n: int) -> RootedTree:
    """Spanning tree of G[D_0 | ... | D_n] whose k-th level is D_k: every
    vertex hangs under its lowest-id neighbour in the previous class."""
    t = RootedTree(h.root)
    for j in range(1, n + 1):
        for v in classes[j]:
            parent = min(w for w in h.adj[v] if h.dist[w] == j - 1)
            t.add_child(parent, v)
    return t


def _try_class_upgrade(
    h: FiniteTruncation,
    classes: list[list[int]],
    n: int,
    comb: CombCert,
    k: int,
) -> DominatedCombCert | None:
    layered = _layered_spanning_tree(h, classes, n)
    teeth = frozenset(comb.teeth)
    star_out = rayless_tree_star(layered, teeth, k)
    if isinstance(star_out, Found):
        common = tuple(sorted(set(star_out.cert.attachment)))
        return DominatedCombCert(comb, star_out.cert, common)
    return None


def _fan_stage(
    h: FiniteTruncation, tree: RootedTree, k: int, budget: int
) -> tuple[list[FanEvidence], tuple[int, tuple[int, ...]] | None]:
    """Fan searches along catalogued rays and boundary-reaching tree rays.

    Candidates run in declared-dominating-first, then degree order; a vertex
    whose ball degree is below k cannot host a k-fan in the ball, so the
    scan stops at the degree cutoff and reports the rest as ruled out.
    Returns the evidence rows and the first (center, prefix) hit, if any.
    """
    evidence: list[FanEvidence] = []
    prefixes: list[tuple[str, str, tuple[int, ...]]] = []
    for end in h.hints.end_catalogue:
        p = catalogued_ray_prefix(h, end)
        if p is not None and p[-1] in h.boundary:
            prefixes.append(("catalogue", end.name, p))
    for leaf in tree.leaves():
        if leaf in h.boundary:
            prefixes.append(("tree", f"leaf:{leaf}", tree.down_closure(leaf)))
    prefixes = prefixes[:RAY_PREFIX_CAP]

    declared = []
    for end in h.hints.end_catalogue:
        declared.extend(v for v in end.dominating_vertices if v in h.dist)
    by_degree = sorted(h.vertex_set, key=lambda v: (-h.degree(v), v))

    bound = h.hints.degree_bound
    spent = 0
    for kind, name, prefix in prefixes:
        if bound is not None and bound < k:
            evidence.append(
                FanEvidence(
                    kind,
                    name,
                    len(prefix),
                    len(h.dist),
                    len(h.dist),
                    f"every vertex impossible by degree bound {bound} < k = {k}",
                )
            )
            continue
        interior = set(prefix[1:-1])
        checked = impossible = 0
        hit = None
        seen: set[int] = set()
        for c in declared + by_degree:
            if c in interior or c in seen:
                continue
            seen.add(c)
            if h.degree(c) < k and c not in declared:
                # Degree-sorted tail: nothing below the cutoff can host a k-fan.
                impossible += len(h.dist) - len(seen) + 1
                break
            if checked >= FAN_CANDIDATE_CAP or spent >= budget:
                break
            checked += 1
            out = find_fan(h, c, prefix, k, budget=budget - spent)
            if isinstance(out, Exhausted):
                spent += out.expansions
            if isinstance(out, ImpossibleByBound):
                impossible += 1
                continue
            if isinstance(out, Found):
                hit = c
                break
        summary = (
            f"fan found at {hit}" if hit is not None else f"no fan among {checked} candidates"
        )
        evidence.append(FanEvidence(kind, name, len(prefix), checked, impossible, summary, hit))
        if hit is not None:
            return evidence, (hit, prefix)
        if spent >= budget:
            break
    return evidence, None


def theorem1_pipeline(
    g: LazyGraph,
    u,
    radius: int,
    k: int = 10,
    branching_cap: int | None = None,
    budget: int | None = None,
) -> Theorem1Result:
    limit = budget if budget is not None else DEFAULT_BUDGET
    h = truncate(g, radius, branching_cap, limit)
    if isinstance(u, (set, frozenset)):
        u_set = frozenset(u) & h.vertex_set
    else:
        u_set = frozenset(v for v in h.order if u(h, v))
    classes = distance_classes(h)
    notes: list[str] = []
    if h.budget_limited:
        notes.append(
            f"truncation clamped to radius {h.radius} (requested {h.requested_radius}) "
            f"by node budget {limit}"
        )

    class_reports: list[ClassReport] = []
    for n, cls in enumerate(classes):
        w = frozenset(cls) & u_set
        if not w:
            continue
        if h.hints.finite_depth is not None:
            class_reports.append(
                ClassReport(n, len(w), "exact_dispersed", f"depth <= {h.hints.finite_depth}")
            )
            continue
        if len(w) < k:
            class_reports.append(
                ClassReport(n, len(w), "below_scale", f"{len(w)} candidates < k = {k}")
            )
            continue
        comb_out = find_comb(h, w, k, budget=limit)
        if isinstance(comb_out, Found):
            upgraded = _try_class_upgrade(h, classes, n, comb_out.cert, k)
            if upgraded is not None:
                check = validate(h, upgraded, u_set, k)
                if not check.ok:
                    raise AssertionError(f"invalid dominated-comb upgrade: {check.problems}")
                class_reports.append(
                    ClassReport(n, len(w), "comb_upgraded", "dominated comb certified")
                )
                return Theorem1Result(
                    "dominated_comb",
                    h,
                    u_set,
                    tuple(class_reports),
                    upgraded,
                    None,
                    (),
                    (),
                    tuple(notes),
                )
            class_reports.append(
                ClassReport(
                    n,
                    len(w),
                    "comb_not_dominating",
                    "scale-k comb found but no star into its teeth in the layered subgraph",
                )
            )
        elif isinstance(comb_out, ImpossibleByBound):
            class_reports.append(ClassReport(n, len(w), "no_comb", comb_out.reason))
        else:
            class_reports.append(
                ClassReport(n, len(w), "no_comb", comb_out.note, comb_out.complete)
            )

    tree_hat = build_normal_tree_on(h, [frozenset(c) & u_set for c in classes])
    tree = prune_to_down_closure(tree_hat, u_set & frozenset(tree_hat.level))
    cert = certify_normal_tree(h, tree, u_set)
    comps = component_neighbourhood_report(h, tree)

    evidence, hit = _fan_stage(h, tree, k, limit)
    if hit is not None:
        center, prefix = hit
        notes.append(f"fan of scale {k} found at vertex {center}; upgrading")
        dc_out = find_dominated_comb(h, u_set, k, budget=limit)
        if isinstance(dc_out, Found):
            check = validate(h, dc_out.cert, u_set, k)
            if not check.ok:
                raise AssertionError(f"invalid dominated-comb cert: {check.problems}")
            return Theorem1Result(
                "dominated_comb",
                h,
                u_set,
                tuple(class_reports),
                dc_out.cert,
                None,
                comps,
                tuple(evidence),
                tuple(notes),
            )
        notes.append(
            "fan evidence indicates domination but no comb/star pair was assembled: "
            + (dc_out.note if isinstance(dc_out, Exhausted) else dc_out.reason)
        )
        return Theorem1Result(
            "inconclusive",
            h,
            u_set,
            tuple(class_reports),
            None,
            cert,
            comps,
            tuple(evidence),
            tuple(notes),
        )

    return Theorem1Result(
        "normal_tree",
        h,
        u_set,
        tuple(class_reports),
        None,
        cert,
        comps,
        tuple(evidence),
        tuple(notes),
    )


# ---------------------------------------------------------------------------
# surrogates used by the invariant suite


def closure_agreement(
    h: FiniteTruncation, t: RootedTree, u_set: frozenset[int], k: int
) -> list[tuple[str, bool, bool]]:
    """Per catalogued end: comb-attachability to U versus to V(tree) along
    the canonical ray (the truncation surrogate of closure equality)."""
    from .search import comb_along_ray

    out = []
    tv = frozenset(t.level)
    for end in h.hints.end_catalogue:
        prefix = catalogued_ray_prefix(h, end)
        if prefix is None or prefix[-1] not in h.boundary:
            continue
        to_u = isinstance(comb_along_ray(h, prefix, u_set, k), Found)
        to_t = isinstance(comb_along_ray(h, prefix, tv, k), Found)
        out.append((end.name, to_u, to_t))
    return out


def normal_ray_chain_for_end(
    h: FiniteTruncation, t: RootedTree, end
) -> tuple[int, ...] | None:
    """Down-closure chain of the deepest canonical-ray vertex inside the
    tree: the truncation surrogate of the unique normal ray in the end."""
    prefix = catalogued_ray_prefix(h, end)
    if prefix is None:
        return None
    inside = [v for v in prefix if v in t.level]
    if not inside:
        return None
    return t.down_closure(inside[-1])


def dispersed_decomposition(
    g: LazyGraph,
    radius: int,
    k: int,
    branching_cap: int | None = None,
    budget: int | None = None,
) -> tuple[list[frozenset[int]], list[DispersednessReport]]:
    """Candidate dispersed decomposition of the ball: the level sets of a
    constructed normal tree, each re-tested by the dispersedness check."""
    h = truncate(g, radius, branching_cap, budget)
    tree = build_normal_tree_on(h, [frozenset(c) for c in distance_classes(h)])
    by_level: dict[int, set[int]] = {}
    for v, lv in tree.level.items():
        by_level.setdefault(lv, set()).add(v)
    levels = [frozenset(by_level[j]) for j in sorted(by_level)]
    reports = [
        is_dispersed_on(h, lv, k, budget, label=f"tree-level-{j}")
        for j, lv in enumerate(levels)
    ]
    return levels, reports
