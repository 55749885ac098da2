"""Tree-decompositions and separation-labelled rooted trees, with checkers.

Decomposition-tree nodes are fresh ids (never host vertices); provenance
labels make artifacts diffable.  All predicates return small report objects
with explicit witnesses so a failed check is inspectable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .trees import RootedTree
from .truncation import FiniteTruncation


@dataclass(frozen=True)
class Separation:
    side_a: frozenset[int]
    side_b: frozenset[int]

    @property
    def separator(self) -> frozenset[int]:
        return self.side_a & self.side_b

    def reversed(self) -> "Separation":
        return Separation(self.side_b, self.side_a)

    def violations(self, h: FiniteTruncation) -> list[str]:
        out = []
        if self.side_a | self.side_b != h.vertex_set:
            missing = sorted(h.vertex_set - (self.side_a | self.side_b))[:4]
            out.append(f"sides do not cover the host, e.g. {missing}")
        sep = self.separator
        for u, v in h.edges():
            ua, va = u in self.side_a and u not in sep, v in self.side_a and v not in sep
            ub, vb = u in self.side_b and u not in sep, v in self.side_b and v not in sep
            if (ua and vb) or (ub and va):
                out.append(f"edge ({u},{v}) crosses the separation")
                break
        return out


@dataclass(frozen=True, eq=False)
class SNTree:
    """Rooted decomposition tree with separations on oriented edges.

    ``alpha`` maps each away-from-root edge (parent, child) to its
    separation; the reverse orientation is the swapped separation.
    """

    tree: RootedTree
    alpha: dict[tuple[int, int], Separation]
    labels: dict[int, str] = field(default_factory=dict)
    frontier: frozenset[int] = frozenset()
    # Construction provenance: node -> (y, z, separator path) host vertices.
    sep_paths: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def away_edges(self) -> list[tuple[int, int]]:
        return sorted((p, c) for c, p in self.tree.parent.items())

    def separation(self, edge: tuple[int, int]) -> Separation:
        if edge in self.alpha:
            return self.alpha[edge]
        rev = (edge[1], edge[0])
        if rev in self.alpha:
            return self.alpha[rev].reversed()
        raise KeyError(edge)

    def separator(self, edge: tuple[int, int]) -> frozenset[int]:
        return self.separation(edge).separator

    def parts(self, h: FiniteTruncation) -> dict[int, frozenset[int]]:
        """W_t = intersection of the incoming B-side with all outgoing A-sides."""
        out: dict[int, frozenset[int]] = {}
        for t in self.tree.vertices():
            part = h.vertex_set
            if t != self.tree.root:
                part = part & self.alpha[(self.tree.parent[t], t)].side_b
            for c in self.tree.children[t]:
                part = part & self.alpha[(t, c)].side_a
            out[t] = part
        return out

    def to_tree_decomposition(self, h: FiniteTruncation) -> "TreeDecomposition":
        return TreeDecomposition(
            tree=self.tree,
            parts=self.parts(h),
            labels=dict(self.labels),
            frontier=self.frontier,
        )


@dataclass(frozen=True, eq=False)
class TreeDecomposition:
    tree: RootedTree
    parts: dict[int, frozenset[int]]
    labels: dict[int, str] = field(default_factory=dict)
    f_witness: frozenset[tuple[int, int]] | None = None
    frontier: frozenset[int] = frozenset()

    def separator_of(self, edge: tuple[int, int]) -> frozenset[int]:
        a, b = edge
        return self.parts[a] & self.parts[b]

    def node_label(self, t: int) -> str:
        return self.labels.get(t, str(t))

    def non_leaf_nodes(self) -> list[int]:
        return sorted(t for t in self.tree.vertices() if self.tree.children[t])

    def to_json(self) -> dict:
        data = {
            "tree": self.tree.to_json(),
            "labels": {str(t): self.labels.get(t, str(t)) for t in self.tree.vertices()},
            "parts": {str(t): sorted(p) for t, p in sorted(self.parts.items())},
            "frontier": sorted(self.frontier),
        }
        if self.f_witness is not None:
            data["F"] = sorted([a, b] for a, b in self.f_witness)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "TreeDecomposition":
        tree = RootedTree.from_json(data["tree"])
        parts = {int(t): frozenset(vs) for t, vs in data["parts"].items()}
        f = None
        if "F" in data:
            f = frozenset((a, b) for a, b in data["F"])
        labels = {int(t): s for t, s in data.get("labels", {}).items()}
        return cls(tree=tree, parts=parts, labels=labels, f_witness=f,
                   frontier=frozenset(data.get("frontier", ())))


def separator_of(td: TreeDecomposition, edge: tuple[int, int]) -> frozenset[int]:
    return td.separator_of(edge)


# ---------------------------------------------------------------------------
# axioms and separator predicates


@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    vertex_witness: int | None = None
    edge_witness: tuple[int, int] | None = None
    connectivity_witness: int | None = None


def verify_td_axioms(h: FiniteTruncation, td: TreeDecomposition) -> AxiomReport:
    covered: set[int] = set()
    node_index: dict[int, list[int]] = {}
    for t, part in td.parts.items():
        for v in part:
            covered.add(v)
            node_index.setdefault(v, []).append(t)
    vertex_witness = next((v for v in sorted(h.vertex_set) if v not in covered), None)

    edge_witness = None
    for u, v in h.edges():
        if not any(u in td.parts[t] for t in node_index.get(v, ())):
            edge_witness = (u, v)
            break

    connectivity_witness = None
    for v in sorted(node_index):
        nodes = set(node_index[v])
        roots = sum(
            1
            for t in nodes
            if t == td.tree.root or td.tree.parent[t] not in nodes
        )
        if roots != 1:
            connectivity_witness = v
            break

    ok = vertex_witness is None and edge_witness is None and connectivity_witness is None
    return AxiomReport(ok, vertex_witness, edge_witness, connectivity_witness)


@dataclass(frozen=True)
class PredicateReport:
    ok: bool
    witness: tuple | None = None
    note: str = ""


def check_upwards_disjoint(snt: SNTree) -> PredicateReport:
    """Separators of comparable away-edges must be disjoint."""
    stack: list[tuple[tuple[int, int], frozenset[int]]] = []

    def dfs(t: int) -> PredicateReport | None:
        for c in sorted(snt.tree.children[t]):
            edge = (t, c)
            sep = snt.separator(edge)
            for anc_edge, anc_sep in stack:
                shared = anc_sep & sep
                if shared:
                    return PredicateReport(False, (anc_edge, edge, min(shared)))
            stack.append((edge, sep))
            bad = dfs(c)
            if bad:
                return bad
            stack.pop()
        return None

    bad = dfs(snt.tree.root)
    return bad if bad else PredicateReport(True)


def pairwise_disjoint_separators(td: TreeDecomposition) -> PredicateReport:
    """Strict check over ALL edge pairs of the decomposition tree."""
    edges = [(p, c) for c, p in sorted(td.tree.parent.items())]
    seps = [td.separator_of(e) for e in edges]
    seen: dict[int, tuple[int, int]] = {}
    for e, sep in zip(edges, seps):
        for v in sep:
            if v in seen and seen[v] != e:
                return PredicateReport(False, (seen[v], e, v))
            seen[v] = e
    return PredicateReport(True)


def _connected_in(h: FiniteTruncation, vertices: frozenset[int]) -> bool:
    if len(vertices) <= 1:
        return True
    start = min(vertices)
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in h.adj[u]:
            if w in vertices and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(vertices)


def check_connected_separators(h: FiniteTruncation, td: TreeDecomposition) -> PredicateReport:
    for c, p in sorted(td.tree.parent.items()):
        sep = td.separator_of((p, c))
        if not _connected_in(h, sep):
            return PredicateReport(False, ((p, c), tuple(sorted(sep))), "disconnected separator")
    return PredicateReport(True)


def check_upwards_connected(h: FiniteTruncation, snt: SNTree) -> PredicateReport:
    for edge in snt.away_edges():
        b = snt.separation(edge).side_b
        if not _connected_in(h, b):
            return PredicateReport(False, (edge,), "disconnected B-side")
    return PredicateReport(True)


def separators_are_ascending_paths(snt: SNTree, t_nt: RootedTree) -> PredicateReport:
    """Every separator must equal the vertex set of an ascending path of the
    normal tree (condition (i) of the recursive construction)."""
    for edge in snt.away_edges():
        sep = snt.separator(edge)
        chain = sorted(sep, key=lambda v: t_nt.level[v])
        for a, b in zip(chain, chain[1:]):
            if t_nt.parent.get(b) != a:
                return PredicateReport(False, (edge, tuple(chain)), "separator not an ascending path")
    return PredicateReport(True)


def snt_td_separator_consistency(
    h: FiniteTruncation, snt: SNTree, td: TreeDecomposition
) -> PredicateReport:
    """parts-based separators of the derived decomposition must equal alpha's."""
    for edge in snt.away_edges():
        if edge[1] in snt.frontier or edge[0] in snt.frontier:
            continue
        if td.separator_of(edge) != snt.separator(edge):
            return PredicateReport(False, (edge, tuple(sorted(td.separator_of(edge)))))
    return PredicateReport(True)


def td_to_dot(h: FiniteTruncation, td: TreeDecomposition) -> str:
    lines = ["graph decomposition {", "  node [shape=box];"]
    f = td.f_witness or frozenset()
    for t in td.tree.vertices():
        part = ",".join(h.label_of(v) for v in sorted(td.parts[t]))
        style = ' color=gray style=dashed' if t in td.frontier else ""
        lines.append(f'  {t} [label="{td.node_label(t)}\\n{{{part}}}"{style}];')
    for c, p in sorted(td.tree.parent.items()):
        sep = ",".join(h.label_of(v) for v in sorted(td.separator_of((p, c))))
        attr = f' [label="{sep}"'
        if (p, c) in f or (c, p) in f:
            attr += " color=red penwidth=2"
        attr += "]"
        lines.append(f"  {p} -- {c}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
