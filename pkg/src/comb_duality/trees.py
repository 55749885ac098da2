"""Rooted trees embedded in a host truncation.

Tree-order queries work off parent pointers and levels (no preprocessing, so
trees may keep growing).  Bracket conventions used throughout the package:
``down_closure`` = ancestors including the vertex (a chain), ``up_closure`` =
descendants including the vertex, ``generalized_up_closure`` = up-closure plus
the host components hanging off it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .truncation import FiniteTruncation


class NotInTreeError(KeyError):
    pass


class EmbeddingError(ValueError):
    pass


class RootedTree:
    """Rooted tree as root + parent map; levels derived."""

    def __init__(self, root: int, parent: dict[int, int] | None = None):
        self.root = root
        self.parent: dict[int, int] = {}
        self.level: dict[int, int] = {root: 0}
        self.children: dict[int, list[int]] = {root: []}
        if parent:
            pending = dict(parent)
            # Insert in an order that respects ancestry.
            while pending:
                progressed = False
                for v in sorted(pending):
                    if pending[v] in self.level:
                        self.add_child(pending[v], v)
                        del pending[v]
                        progressed = True
                if not progressed:
                    raise ValueError(f"parent map does not reach root: {sorted(pending)}")

    def add_child(self, parent: int, v: int) -> None:
        if parent not in self.level:
            raise NotInTreeError(parent)
        if v in self.level:
            raise ValueError(f"vertex {v} already in tree")
        self.parent[v] = parent
        self.level[v] = self.level[parent] + 1
        self.children[parent].append(v)
        self.children[v] = []

    def __contains__(self, v: int) -> bool:
        return v in self.level

    def __len__(self) -> int:
        return len(self.level)

    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.level))

    def edges(self) -> list[tuple[int, int]]:
        return sorted((min(v, p), max(v, p)) for v, p in self.parent.items())

    def leaves(self) -> list[int]:
        return sorted(v for v, cs in self.children.items() if not cs)

    def is_ancestor(self, a: int, b: int) -> bool:
        """a <= b in tree order."""
        if a not in self.level or b not in self.level:
            raise NotInTreeError((a, b))
        while self.level[b] > self.level[a]:
            b = self.parent[b]
        return a == b

    def comparable(self, a: int, b: int) -> bool:
        return self.is_ancestor(a, b) or self.is_ancestor(b, a)

    def down_closure(self, v: int) -> tuple[int, ...]:
        """Ancestors of v including v, root first (a chain)."""
        if v not in self.level:
            raise NotInTreeError(v)
        chain = [v]
        while v != self.root:
            v = self.parent[v]
            chain.append(v)
        return tuple(reversed(chain))

    def up_closure(self, v: int) -> frozenset[int]:
        """Descendants of v including v."""
        if v not in self.level:
            raise NotInTreeError(v)
        out = set()
        stack = [v]
        while stack:
            x = stack.pop()
            out.add(x)
            stack.extend(self.children[x])
        return frozenset(out)

    def tree_path(self, a: int, b: int) -> tuple[int, ...]:
        """The unique a-b path, endpoints comparable required for callers."""
        da, db = self.down_closure(a), self.down_closure(b)
        if a in db:
            i = db.index(a)
            return db[i:]
        if b in da:
            i = da.index(b)
            return tuple(reversed(da[i:]))
        raise ValueError(f"{a} and {b} are incomparable")

    def chains_to_leaves(self) -> list[tuple[int, ...]]:
        return [self.down_closure(leaf) for leaf in self.leaves()]

    def to_json(self) -> dict:
        return {"root": self.root, "parent": {str(v): p for v, p in sorted(self.parent.items())}}

    @classmethod
    def from_json(cls, data: dict) -> "RootedTree":
        return cls(data["root"], {int(v): p for v, p in data["parent"].items()})


def check_embedded(h: FiniteTruncation, t: RootedTree) -> None:
    for v in t.level:
        if v not in h.dist:
            raise EmbeddingError(f"tree vertex {v} not in host")
    for v, p in t.parent.items():
        if not h.has_edge(v, p):
            raise EmbeddingError(f"tree edge ({p},{v}) not a host edge")


def host_components_off_tree(
    h: FiniteTruncation, tree_vertices: frozenset[int]
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Components of h - tree_vertices with their tree neighbourhoods.

    Returns [(component vertices sorted, neighbourhood sorted)], ordered by
    least component vertex.
    """
    seen: set[int] = set()
    comps: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for start in h.order:
        if start in tree_vertices or start in seen:
            continue
        comp: list[int] = []
        nbhd: set[int] = set()
        queue = deque([start])
        seen.add(start)
        while queue:
            x = queue.popleft()
            comp.append(x)
            for w in h.adj[x]:
                if w in tree_vertices:
                    nbhd.add(w)
                elif w not in seen:
                    seen.add(w)
                    queue.append(w)
        comps.append((tuple(sorted(comp)), tuple(sorted(nbhd))))
    comps.sort(key=lambda c: c[0][0])
    return comps


def chords(h: FiniteTruncation, t: RootedTree) -> list[tuple[int, int]]:
    """Host edges between tree vertices that are not tree edges."""
    tree_edges = {(min(v, p), max(v, p)) for v, p in t.parent.items()}
    out = []
    for u, v in h.edges():
        if u in t.level and v in t.level and (u, v) not in tree_edges:
            out.append((u, v))
    return out


@dataclass(frozen=True)
class NormalityReport:
    ok: bool
    # A violating T-path (vertex sequence) when not normal.
    witness: tuple[int, ...] | None = None


def is_normal(h: FiniteTruncation, t: RootedTree) -> NormalityReport:
    """Endpoints of every T-path of h must be tree-comparable.

    T-paths are chords plus paths routed through components of h - t; for the
    latter the endpoints of some violating path exist iff some component
    neighbourhood is not a chain.
    """
    check_embedded(h, t)
    for u, v in chords(h, t):
        if not t.comparable(u, v):
            return NormalityReport(False, (u, v))
    tv = frozenset(t.level)
    for comp, nbhd in host_components_off_tree(h, tv):
        bad = _first_incomparable(t, nbhd)
        if bad is not None:
            x, y = bad
            path = _path_through(h, set(comp), x, y)
            return NormalityReport(False, path)
    return NormalityReport(True, None)


def _first_incomparable(t: RootedTree, vertices: tuple[int, ...]) -> tuple[int, int] | None:
    by_level = sorted(vertices, key=lambda v: (t.level[v], v))
    for a, b in zip(by_level, by_level[1:]):
        if not t.comparable(a, b):
            return (a, b)
    return None


def _path_through(h: FiniteTruncation, interior: set[int], x: int, y: int) -> tuple[int, ...]:
    """Shortest x-y path with all interior vertices inside `interior`."""
    starts = sorted(w for w in h.adj[x] if w in interior)
    prev: dict[int, int] = {}
    queue = deque()
    for s in starts:
        prev[s] = x
        queue.append(s)
    while queue:
        u = queue.popleft()
        if h.has_edge(u, y):
            path = [y, u]
            while path[-1] != x:
                path.append(prev[path[-1]])
            return tuple(reversed(path))
        for w in h.adj[u]:
            if w in interior and w not in prev:
                prev[w] = u
                queue.append(w)
    raise AssertionError("endpoints not connected through the component")


def generalized_up_closure(h: FiniteTruncation, t: RootedTree, x: int) -> frozenset[int]:
    """up_closure(x) plus every component of h - t attached to it."""
    up = set(t.up_closure(x))
    for comp, nbhd in host_components_off_tree(h, frozenset(t.level)):
        if any(w in up for w in nbhd):
            up.update(comp)
    return frozenset(up)


@dataclass(frozen=True)
class SeparationPropertyReport:
    ok: bool
    witness_pair: tuple[int, int] | None = None
    witness_path: tuple[int, ...] | None = None


def check_separation_property(h: FiniteTruncation, t: RootedTree) -> SeparationPropertyReport:
    """Every incomparable pair x,y is separated by down(x) & down(y)."""
    report = is_normal(h, t)
    if not report.ok:
        raise ValueError(f"precondition violated: tree not normal, witness {report.witness}")
    verts = t.vertices()
    for i, x in enumerate(verts):
        down_x = set(t.down_closure(x))
        for y in verts[i + 1 :]:
            sep = down_x & set(t.down_closure(y))
            if x in sep or y in sep:
                continue
            path = _connecting_path_avoiding(h, x, y, sep)
            if path is not None:
                return SeparationPropertyReport(False, (x, y), path)
    return SeparationPropertyReport(True)


def _connecting_path_avoiding(
    h: FiniteTruncation, x: int, y: int, banned: set[int]
) -> tuple[int, ...] | None:
    if x in banned or y in banned:
        return None
    prev: dict[int, int | None] = {x: None}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        if u == y:
            path = [y]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return tuple(reversed(path))
        for w in h.adj[u]:
            if w not in banned and w not in prev:
                prev[w] = u
                queue.append(w)
    return None


@dataclass(frozen=True)
class ComponentClassification:
    component: tuple[int, ...]
    kind: str  # "avoids_tree" | "meets_tree"
    minimal_vertex: int | None
    spanned_ok: bool | None


@dataclass(frozen=True)
class ClassificationReport:
    ok: bool
    entries: tuple[ComponentClassification, ...]
    witness: str | None = None


def classify_components(
    h: FiniteTruncation, t: RootedTree, w: frozenset[int]
) -> ClassificationReport:
    """Components of h - w: either avoid the tree, or are spanned by the
    generalized up-closure of the unique minimal tree vertex they contain."""
    for v in w:
        if v not in t.level:
            raise NotInTreeError(v)
        if v != t.root and t.parent[v] not in w:
            raise ValueError(f"set not down-closed: {v} in w but parent {t.parent[v]} not")
    entries = []
    ok = True
    witness = None
    seen: set[int] = set()
    for start in h.order:
        if start in w or start in seen:
            continue
        comp = set()
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            comp.add(u)
            for nb in h.adj[u]:
                if nb not in w and nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        in_tree = sorted(v for v in comp if v in t.level)
        if not in_tree:
            entries.append(ComponentClassification(tuple(sorted(comp)), "avoids_tree", None, None))
            continue
        minimals = [v for v in in_tree if not any(t.is_ancestor(u, v) and u != v for u in in_tree)]
        if len(minimals) != 1:
            ok = False
            witness = f"component {sorted(comp)[:6]}... has minimal vertices {minimals}"
            entries.append(
                ComponentClassification(tuple(sorted(comp)), "meets_tree", None, False)
            )
            continue
        x = minimals[0]
        spanned = generalized_up_closure(h, t, x) == frozenset(comp)
        if not spanned:
            ok = False
            witness = f"component at minimal vertex {x} not spanned by its generalized up-closure"
        entries.append(ComponentClassification(tuple(sorted(comp)), "meets_tree", x, spanned))
    return ClassificationReport(ok, tuple(entries), witness)


@dataclass(frozen=True)
class CofinalityReport:
    status: str  # "holds" | "holds_up_to_boundary" | "fails"
    witness: int | None = None
    exempt: tuple[int, ...] = ()

    @property
    def ok_away_from_boundary(self) -> bool:
        return self.status in ("holds", "holds_up_to_boundary")


def contains_cofinally(
    t: RootedTree, u: frozenset[int], boundary: frozenset[int] = frozenset()
) -> CofinalityReport:
    """Every tree vertex must have a u-vertex weakly above it; subtrees cut
    off by the truncation boundary are exempt and reported."""
    for v in u:
        if v not in t.level:
            raise NotInTreeError(v)
    has_u: dict[int, bool] = {}
    all_leaves_boundary: dict[int, bool] = {}
    for v in sorted(t.level, key=lambda x: -t.level[x]):
        kids = t.children[v]
        has_u[v] = v in u or any(has_u[c] for c in kids)
        if not kids:
            all_leaves_boundary[v] = v in boundary
        else:
            all_leaves_boundary[v] = all(all_leaves_boundary[c] for c in kids)
    failing = sorted(v for v in t.level if not has_u[v])
    exempt = tuple(v for v in failing if all_leaves_boundary[v])
    hard = [v for v in failing if not all_leaves_boundary[v]]
    if hard:
        return CofinalityReport("fails", hard[0], exempt)
    if exempt:
        return CofinalityReport("holds_up_to_boundary", None, exempt)
    return CofinalityReport("holds")


def prune_to_down_closure(t: RootedTree, targets: frozenset[int]) -> RootedTree:
    """Subtree induced by the union of down-closures of `targets`."""
    keep: set[int] = set()
    for v in targets:
        keep.update(t.down_closure(v))
    pruned = RootedTree(t.root)
    for v in sorted(keep - {t.root}, key=lambda x: (t.level[x], x)):
        pruned.add_child(t.parent[v], v)
    return pruned


@dataclass(frozen=True)
class NormalTreeCert:
    """A tree certified normal on a host truncation, with cofinality data."""

    tree: RootedTree
    host_radius: int
    cofinal_for: frozenset[int]
    boundary_flags: frozenset[int]
    normality: NormalityReport = field(default=NormalityReport(True))
    cofinality: CofinalityReport = field(default=CofinalityReport("holds"))


def certify_normal_tree(
    h: FiniteTruncation, t: RootedTree, cofinal_for: frozenset[int]
) -> NormalTreeCert:
    normality = is_normal(h, t)
    boundary_flags = frozenset(v for v in t.leaves() if v in h.boundary)
    cof = contains_cofinally(t, cofinal_for & frozenset(t.level), h.boundary)
    return NormalTreeCert(t, h.radius, cofinal_for, boundary_flags, normality, cof)


def tree_to_dot(h: FiniteTruncation, t: RootedTree) -> str:
    lines = ["graph tree {"]
    for v in t.vertices():
        lines.append(f'  {v} [label="{h.label_of(v)}"];')
    tree_edges = {(min(a, b), max(a, b)) for a, b in t.edges()}
    for u, v in sorted(tree_edges):
        lines.append(f"  {u} -- {v};")
    for u, v in sorted(h.edges()):
        if (u, v) not in tree_edges and u in t.level and v in t.level:
            lines.append(f"  {u} -- {v} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
