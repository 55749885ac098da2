"""Finite, re-checkable witnesses for stars, combs, fans and dominated combs.

Validators here are deliberately independent of the searchers: they only walk
the stored vertex lists against the host truncation.  A comb's spine prefix
must end on the truncation boundary -- that is the finite stand-in for "the
spine is a ray", and it is what keeps rayless hosts comb-free at every scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from .truncation import FiniteTruncation


@dataclass(frozen=True)
class StarCert:
    """Subdivided star at certificate scale: k paths sharing only the center."""

    center: int
    leaf_paths: tuple[tuple[int, ...], ...]

    @property
    def attachment(self) -> tuple[int, ...]:
        return tuple(p[-1] for p in self.leaf_paths)

    @property
    def scale(self) -> int:
        return len(self.leaf_paths)

    def to_json(self) -> dict:
        return {
            "kind": "star",
            "center": self.center,
            "leaf_paths": [list(p) for p in self.leaf_paths],
        }


@dataclass(frozen=True)
class CombCert:
    """Comb at certificate scale: a boundary-reaching spine prefix plus k
    disjoint (possibly trivial) teeth paths rooted on it."""

    spine_prefix: tuple[int, ...]
    teeth_paths: tuple[tuple[int, ...], ...]

    @property
    def teeth(self) -> tuple[int, ...]:
        return tuple(p[-1] for p in self.teeth_paths)

    @property
    def scale(self) -> int:
        return len(self.teeth_paths)

    def to_json(self) -> dict:
        return {
            "kind": "comb",
            "spine_prefix": list(self.spine_prefix),
            "teeth_paths": [list(p) for p in self.teeth_paths],
        }


@dataclass(frozen=True)
class FanCert:
    """k paths from one vertex into a ray prefix, disjoint except at the apex."""

    apex: int
    target_ray_prefix: tuple[int, ...]
    fan_paths: tuple[tuple[int, ...], ...]

    @property
    def scale(self) -> int:
        return len(self.fan_paths)

    def to_json(self) -> dict:
        return {
            "kind": "fan",
            "apex": self.apex,
            "target_ray_prefix": list(self.target_ray_prefix),
            "fan_paths": [list(p) for p in self.fan_paths],
        }


@dataclass(frozen=True)
class DominatedCombCert:
    comb: CombCert
    star: StarCert
    common: tuple[int, ...]

    @property
    def scale(self) -> int:
        return len(self.common)

    def to_json(self) -> dict:
        return {
            "kind": "dominated_comb",
            "comb": self.comb.to_json(),
            "star": self.star.to_json(),
            "common": list(self.common),
        }


def cert_from_json(data: dict):
    kind = data.get("kind")
    if kind == "star":
        return StarCert(data["center"], tuple(tuple(p) for p in data["leaf_paths"]))
    if kind == "comb":
        return CombCert(
            tuple(data["spine_prefix"]), tuple(tuple(p) for p in data["teeth_paths"])
        )
    if kind == "fan":
        return FanCert(
            data["apex"],
            tuple(data["target_ray_prefix"]),
            tuple(tuple(p) for p in data["fan_paths"]),
        )
    if kind == "dominated_comb":
        return DominatedCombCert(
            cert_from_json(data["comb"]),
            cert_from_json(data["star"]),
            tuple(data["common"]),
        )
    raise ValueError(f"unknown certificate kind {kind!r}")


@dataclass(frozen=True)
class CertCheck:
    ok: bool
    problems: tuple[str, ...] = ()


def _path_ok(h: FiniteTruncation, path: tuple[int, ...]) -> str | None:
    if not path:
        return "empty path"
    if len(set(path)) != len(path):
        return f"repeated vertex in path {path}"
    for v in path:
        if v not in h.dist:
            return f"vertex {v} not in host"
    for a, b in zip(path, path[1:]):
        if not h.has_edge(a, b):
            return f"({a},{b}) not a host edge"
    return None


def validate_star(
    h: FiniteTruncation, cert: StarCert, u: frozenset[int] | None = None, k: int | None = None
) -> CertCheck:
    problems: list[str] = []
    if len(cert.leaf_paths) < 2:
        problems.append("a star needs at least 2 leaf paths")
    if k is not None and len(cert.leaf_paths) < k:
        problems.append(f"only {len(cert.leaf_paths)} leaf paths at scale {k}")
    used: set[int] = set()
    for p in cert.leaf_paths:
        err = _path_ok(h, p)
        if err:
            problems.append(err)
            continue
        if p[0] != cert.center:
            problems.append(f"path {p} does not start at center {cert.center}")
        if len(p) < 2:
            problems.append(f"leaf path {p} is trivial")
        body = set(p[1:])
        if body & used:
            problems.append(f"paths overlap at {sorted(body & used)}")
        used |= body
    leaves = cert.attachment
    if len(set(leaves)) != len(leaves):
        problems.append("duplicate leaves")
    if u is not None:
        outside = [x for x in leaves if x not in u]
        if outside:
            problems.append(f"leaves outside attachment set: {outside}")
    return CertCheck(not problems, tuple(problems))


def validate_comb(
    h: FiniteTruncation, cert: CombCert, u: frozenset[int] | None = None, k: int | None = None
) -> CertCheck:
    problems: list[str] = []
    err = _path_ok(h, cert.spine_prefix)
    if err:
        problems.append(f"spine: {err}")
    elif cert.spine_prefix[-1] not in h.boundary:
        problems.append("spine prefix does not reach the truncation boundary")
    if k is not None and len(cert.teeth_paths) < k:
        problems.append(f"only {len(cert.teeth_paths)} teeth at scale {k}")
    if not cert.teeth_paths:
        problems.append("no teeth")
    spine = set(cert.spine_prefix)
    used: set[int] = set()
    for p in cert.teeth_paths:
        err = _path_ok(h, p)
        if err:
            problems.append(err)
            continue
        if p[0] not in spine:
            problems.append(f"tooth path {p} does not start on the spine")
        if any(v in spine for v in p[1:]):
            problems.append(f"tooth path {p} re-enters the spine")
        if set(p) & used:
            problems.append(f"teeth paths overlap at {sorted(set(p) & used)}")
        used |= set(p)
    if u is not None:
        outside = [x for x in cert.teeth if x not in u]
        if outside:
            problems.append(f"teeth outside attachment set: {outside}")
    return CertCheck(not problems, tuple(problems))


def validate_fan(h: FiniteTruncation, cert: FanCert, k: int | None = None) -> CertCheck:
    problems: list[str] = []
    err = _path_ok(h, cert.target_ray_prefix)
    if err:
        problems.append(f"ray prefix: {err}")
    prefix = set(cert.target_ray_prefix)
    interior = set(cert.target_ray_prefix[1:-1])
    if cert.apex in interior:
        problems.append("apex is an interior vertex of the prefix")
    if k is not None and len(cert.fan_paths) < k:
        problems.append(f"only {len(cert.fan_paths)} fan paths at scale {k}")
    used: set[int] = set()
    ends: set[int] = set()
    for p in cert.fan_paths:
        err = _path_ok(h, p)
        if err:
            problems.append(err)
            continue
        if p[0] != cert.apex:
            problems.append(f"fan path {p} does not start at the apex")
        if len(p) < 2 or p[-1] not in prefix or p[-1] == cert.apex:
            problems.append(f"fan path {p} does not end on the prefix")
            continue
        if any(v in prefix or v == cert.apex for v in p[1:-1]):
            problems.append(f"fan path {p} passes through the prefix")
        if p[-1] in ends:
            problems.append(f"two fan paths end at {p[-1]}")
        ends.add(p[-1])
        body = set(p[1:])
        if body & used:
            problems.append(f"fan paths overlap at {sorted(body & used)}")
        used |= body
    return CertCheck(not problems, tuple(problems))


def validate_dominated_comb(
    h: FiniteTruncation,
    cert: DominatedCombCert,
    u: frozenset[int] | None = None,
    k: int | None = None,
) -> CertCheck:
    problems: list[str] = []
    comb_check = validate_comb(h, cert.comb, u=u)
    star_check = validate_star(h, cert.star)
    problems.extend(f"comb: {p}" for p in comb_check.problems)
    problems.extend(f"star: {p}" for p in star_check.problems)
    teeth = set(cert.comb.teeth)
    leaves = set(cert.star.attachment)
    for v in cert.common:
        if v not in teeth or v not in leaves:
            problems.append(f"common vertex {v} is not both a tooth and a leaf")
    if k is not None and len(set(cert.common)) < k:
        problems.append(f"only {len(set(cert.common))} common vertices at scale {k}")
    return CertCheck(not problems, tuple(problems))


def validate(h: FiniteTruncation, cert, u=None, k=None) -> CertCheck:
    if isinstance(cert, StarCert):
        return validate_star(h, cert, u, k)
    if isinstance(cert, CombCert):
        return validate_comb(h, cert, u, k)
    if isinstance(cert, FanCert):
        return validate_fan(h, cert, k)
    if isinstance(cert, DominatedCombCert):
        return validate_dominated_comb(h, cert, u, k)
    raise TypeError(f"not a certificate: {cert!r}")
