"""Registry of built-in countable graph families.

Each family is a :class:`LazyGraph`: a root vertex, a deterministic neighbor
oracle (a finite or infinite stream per vertex), and analytic structure hints
that make otherwise-infinitary questions (local finiteness, depth bounds,
catalogued ends) decidable for the built-ins.

Vertex ids are unsigned integers under a per-family injective encoding of the
family's natural coordinates, so certificates are stable across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator


class UnknownFamilyError(ValueError):
    pass


class InvalidParamsError(ValueError):
    pass


@dataclass(frozen=True)
class EndDescriptor:
    """A catalogued end: a canonical ray plus its domination status.

    ``ray_prefix(n)`` returns the first ``n`` vertices of the canonical ray;
    prefixes are nested by construction.
    """

    name: str
    ray_prefix: Callable[[int], tuple[int, ...]]
    dominated: bool = False
    dominating_vertices: tuple[int, ...] = ()


@dataclass(frozen=True)
class StructureHints:
    locally_finite: bool = False
    degree_bound: int | None = None
    branching_cap: int | None = None
    # Every vertex lies within this distance of the root; implies rayless.
    finite_depth: int | None = None
    end_catalogue: tuple[EndDescriptor, ...] = ()


@dataclass(frozen=True, eq=False)
class LazyGraph:
    """A countable connected graph given by root + neighbor oracle.

    The oracle must be pure and symmetric: u appears in neighbors(v) iff
    v appears in neighbors(u).  Stream order is fixed per family and acts
    as the tie-breaking order for everything downstream.
    """

    family: str
    params: tuple[tuple[str, int], ...]
    root: int
    neighbors: Callable[[int], Iterator[int]]
    hints: StructureHints
    label: Callable[[int], str] = field(default=lambda v: str(v))

    def describe(self) -> str:
        if not self.params:
            return self.family
        inner = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.family}({inner})"


# ---------------------------------------------------------------------------
# encodings


def _pair(x: int, y: int) -> int:
    # Cantor pairing; injective N x N -> N.
    return (x + y) * (x + y + 1) // 2 + y


def _unpair(z: int) -> tuple[int, int]:
    w = int(((8 * z + 1) ** 0.5 - 1) // 2)
    while (w + 1) * (w + 2) // 2 <= z:
        w += 1
    while w * (w + 1) // 2 > z:
        w -= 1
    y = z - w * (w + 1) // 2
    return w - y, y


def _zigzag(z: int) -> int:
    return 2 * z if z >= 0 else -2 * z - 1


def _unzigzag(n: int) -> int:
    return n // 2 if n % 2 == 0 else -(n + 1) // 2


# ---------------------------------------------------------------------------
# family builders


def _ray(params: dict[str, int]) -> LazyGraph:
    def neighbors(v: int) -> Iterator[int]:
        if v > 0:
            yield v - 1
        yield v + 1

    end = EndDescriptor("forward", lambda n: tuple(range(n)))
    return LazyGraph(
        family="ray",
        params=(),
        root=0,
        neighbors=neighbors,
        hints=StructureHints(locally_finite=True, degree_bound=2, end_catalogue=(end,)),
        label=lambda v: f"v{v}",
    )


def _double_ray(params: dict[str, int]) -> LazyGraph:
    def neighbors(v: int) -> Iterator[int]:
        z = _unzigzag(v)
        yield _zigzag(z - 1)
        yield _zigzag(z + 1)

    right = EndDescriptor("right", lambda n: tuple(_zigzag(i) for i in range(n)))
    left = EndDescriptor("left", lambda n: tuple(_zigzag(-i) for i in range(n)))
    return LazyGraph(
        family="double_ray",
        params=(),
        root=0,
        neighbors=neighbors,
        hints=StructureHints(locally_finite=True, degree_bound=2, end_catalogue=(right, left)),
        label=lambda v: f"z{_unzigzag(v)}",
    )


def _comb(params: dict[str, int]) -> LazyGraph:
    # Spine vertex i -> 2i, its pendant tooth -> 2i+1.
    def neighbors(v: int) -> Iterator[int]:
        if v % 2 == 0:
            i = v // 2
            if i > 0:
                yield 2 * (i - 1)
            yield 2 * i + 1
            yield 2 * (i + 1)
        else:
            yield v - 1

    end = EndDescriptor("spine", lambda n: tuple(2 * i for i in range(n)))
    return LazyGraph(
        family="comb",
        params=(),
        root=0,
        neighbors=neighbors,
        hints=StructureHints(locally_finite=True, degree_bound=3, end_catalogue=(end,)),
        label=lambda v: (f"s{v // 2}" if v % 2 == 0 else f"t{v // 2}"),
    )


def _star_inf(params: dict[str, int]) -> LazyGraph:
    def neighbors(v: int) -> Iterator[int]:
        if v == 0:
            yield from itertools.count(1)
        else:
            yield 0

    return LazyGraph(
        family="star_inf",
        params=(),
        root=0,
        neighbors=neighbors,
        hints=StructureHints(finite_depth=1),
        label=lambda v: ("c" if v == 0 else f"l{v - 1}"),
    )


def _grid(params: dict[str, int]) -> LazyGraph:
    # Quarter grid N x N; stream order: right, up, left, down.
    def neighbors(v: int) -> Iterator[int]:
        x, y = _unpair(v)
        yield _pair(x + 1, y)
        yield _pair(x, y + 1)
        if x > 0:
            yield _pair(x - 1, y)
        if y > 0:
            yield _pair(x, y - 1)

    end = EndDescriptor("plane", lambda n: tuple(_pair(i, 0) for i in range(n)))
    return LazyGraph(
        family="grid",
        params=(),
        root=_pair(0, 0),
        neighbors=neighbors,
        hints=StructureHints(locally_finite=True, degree_bound=4, end_catalogue=(end,)),
        label=lambda v: "({},{})".format(*_unpair(v)),
    )


def _ladder(params: dict[str, int]) -> LazyGraph:
    # Rung r of rail j -> 2r + j.
    def neighbors(v: int) -> Iterator[int]:
        r, j = divmod(v, 2)
        if r > 0:
            yield 2 * (r - 1) + j
        yield 2 * r + (1 - j)
        yield 2 * (r + 1) + j

    end = EndDescriptor("forward", lambda n: tuple(2 * i for i in range(n)))
    return LazyGraph(
        family="ladder",
        params=(),
        root=0,
        neighbors=neighbors,
        hints=StructureHints(locally_finite=True, degree_bound=3, end_catalogue=(end,)),
        label=lambda v: f"({v // 2},{v % 2})",
    )


def _tree_children(v: int, d: int) -> range:
    return range(d * v + 1, d * v + d + 1)


def _tree_parent(v: int, d: int) -> int:
    return (v - 1) // d


def _leftmost_ray(d: int, offset: int = 0) -> Callable[[int], tuple[int, ...]]:
    def prefix(n: int) -> tuple[int, ...]:
        out, v = [], 0
        for _ in range(n):
            out.append(v + offset)
            v = d * v + 1
        return tuple(out)

    return prefix


def _rightmost_ray(d: int, offset: int = 0) -> Callable[[int], tuple[int, ...]]:
    def prefix(n: int) -> tuple[int, ...]:
        out, v = [], 0
        for _ in range(n):
            out.append(v + offset)
            v = d * v + d
        return tuple(out)

    return prefix


def _regular_tree(params: dict[str, int]) -> LazyGraph:
    # Rooted tree in which every vertex has exactly d children (heap encoding).
    d = int(params.get("d", 2))
    if d < 1:
        raise InvalidParamsError("regular_tree requires d >= 1")

    def neighbors(v: int) -> Iterator[int]:
        if v > 0:
            yield _tree_parent(v, d)
        yield from _tree_children(v, d)

    ends = (
        EndDescriptor("leftmost", _leftmost_ray(d)),
        EndDescriptor("rightmost", _rightmost_ray(d)),
    )
    return LazyGraph(
        family="regular_tree",
        params=(("d", d),),
        root=0,
        neighbors=neighbors,
        hints=StructureHints(locally_finite=True, degree_bound=d + 1, end_catalogue=ends),
        label=lambda v: f"n{v}",
    )


def _taleph0_3levels(params: dict[str, int]) -> LazyGraph:
    # Depth-3 tree, every vertex on levels 0..2 with countably many children.
    # Encoding: level-L vertex with code c -> 1 + 4*c + (L-1); root -> 0.
    def decode(v: int) -> tuple[int, int]:
        if v == 0:
            return 0, 0
        return (v - 1) % 4 + 1, (v - 1) // 4

    def encode(level: int, code: int) -> int:
        if level == 0:
            return 0
        return 1 + 4 * code + (level - 1)

    def neighbors(v: int) -> Iterator[int]:
        level, code = decode(v)
        if level == 1:
            yield 0
        elif level >= 2:
            parent_code, _ = _unpair(code)
            yield encode(level - 1, parent_code)
        if level == 0:
            for a in itertools.count(0):
                yield encode(1, a)
        elif level < 3:
            for a in itertools.count(0):
                yield encode(level + 1, _pair(code, a))

    def label(v: int) -> str:
        level, code = decode(v)
        coords: list[int] = []
        for _ in range(level):
            code, a = _unpair(code)
            coords.append(a)
        return "(" + ",".join(str(a) for a in reversed(coords)) + ")"

    return LazyGraph(
        family="taleph0_3levels",
        params=(),
        root=0,
        neighbors=neighbors,
        hints=StructureHints(finite_depth=3),
        label=label,
    )


def _dominated_comb_gadget(params: dict[str, int]) -> LazyGraph:
    # Comb plus an apex adjacent to every tooth.  apex -> 0, spine i -> 2i+1,
    # tooth i -> 2i+2.  Rooted at the first spine vertex.
    def neighbors(v: int) -> Iterator[int]:
        if v == 0:
            for i in itertools.count(0):
                yield 2 * i + 2
        elif v % 2 == 1:
            i = (v - 1) // 2
            if i > 0:
                yield 2 * (i - 1) + 1
            yield 2 * i + 2
            yield 2 * (i + 1) + 1
        else:
            i = (v - 2) // 2
            yield 0
            yield 2 * i + 1

    end = EndDescriptor(
        "spine",
        lambda n: tuple(2 * i + 1 for i in range(n)),
        dominated=True,
        dominating_vertices=(0,),
    )
    return LazyGraph(
        family="dominated_comb_gadget",
        params=(),
        root=1,
        neighbors=neighbors,
        hints=StructureHints(end_catalogue=(end,)),
        label=lambda v: ("apex" if v == 0 else (f"s{(v - 1) // 2}" if v % 2 else f"t{(v - 2) // 2}")),
    )


def _dominated_tree(params: dict[str, int]) -> LazyGraph:
    # regular_tree(d) plus an apex adjacent to every tree vertex.
    # apex -> 0, tree vertex with heap code h -> h + 1.
    d = int(params.get("d", 2))
    if d < 1:
        raise InvalidParamsError("dominated_tree requires d >= 1")

    def apex_stream() -> Iterator[int]:
        # Interleave the leftmost branch with plain id order so that shallow
        # capped truncations keep apex edges onto a full ray.
        seen: set[int] = set()
        h = 0
        counter = itertools.count(1)
        while True:
            v = h + 1
            if v not in seen:
                seen.add(v)
                yield v
            h = d * h + 1
            while True:
                w = next(counter)
                if w not in seen:
                    seen.add(w)
                    yield w
                    break

    def neighbors(v: int) -> Iterator[int]:
        if v == 0:
            yield from apex_stream()
        else:
            h = v - 1
            yield 0
            if h > 0:
                yield _tree_parent(h, d) + 1
            for c in _tree_children(h, d):
                yield c + 1

    ends = (
        EndDescriptor("leftmost", _leftmost_ray(d, offset=1), dominated=True, dominating_vertices=(0,)),
        EndDescriptor("rightmost", _rightmost_ray(d, offset=1), dominated=True, dominating_vertices=(0,)),
    )
    return LazyGraph(
        family="dominated_tree",
        params=(("d", d),),
        root=1,
        neighbors=neighbors,
        hints=StructureHints(end_catalogue=ends),
        label=lambda v: ("apex" if v == 0 else f"n{v - 1}"),
    )


_BUILDERS: dict[str, Callable[[dict[str, int]], LazyGraph]] = {
    "ray": _ray,
    "double_ray": _double_ray,
    "comb": _comb,
    "star_inf": _star_inf,
    "grid": _grid,
    "ladder": _ladder,
    "regular_tree": _regular_tree,
    "taleph0_3levels": _taleph0_3levels,
    "dominated_comb_gadget": _dominated_comb_gadget,
    "dominated_tree": _dominated_tree,
}

FAMILY_NAMES = tuple(sorted(_BUILDERS))


def family(name: str, params: dict[str, int] | None = None, **kw: int) -> LazyGraph:
    """Instantiate a registered family by name."""
    if name not in _BUILDERS:
        raise UnknownFamilyError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")
    merged = dict(params or {})
    merged.update(kw)
    known_keys = {"d"}
    bad = set(merged) - known_keys
    if bad:
        raise InvalidParamsError(f"unsupported params for {name}: {sorted(bad)}")
    return _BUILDERS[name](merged)
