"""Hypergraph encodings of the extremal problems (copies, APs, Schur triples)
and the target families that the stability distances are measured against."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Any, Sequence

from .hypercore import UniformHypergraph, VertexSubset

MAX_VERTICES = 100_000


class GuardError(ValueError):
    """Instance is beyond the exact-computation guard for this operation."""


class UnsupportedGroupError(ValueError):
    pass


# --- indexing of k-sets -------------------------------------------------------


def colex_rank(subset: Sequence[int]) -> int:
    """Colexicographic rank of a set of non-negative integers.

    For a pair ``a < b`` this is ``b(b-1)/2 + a``.
    """
    return sum(math.comb(c, j + 1) for j, c in enumerate(sorted(subset)))


def colex_unrank(rank: int, size: int) -> tuple[int, ...]:
    out = []
    for j in range(size, 0, -1):
        c = j - 1
        while math.comb(c + 1, j) <= rank:
            c += 1
        out.append(c)
        rank -= math.comb(c, j)
    return tuple(reversed(out))


# --- groups -------------------------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    """Direct product of cyclic groups; elements are mixed-radix integers with
    the first factor least significant."""

    cyclic_orders: tuple[int, ...]

    def __init__(self, cyclic_orders: Sequence[int]) -> None:
        orders = tuple(int(m) for m in cyclic_orders)
        if not orders or any(m < 2 for m in orders):
            raise ValueError("cyclic orders must be integers >= 2")
        object.__setattr__(self, "cyclic_orders", orders)

    @classmethod
    def cyclic(cls, n: int) -> GroupSpec:
        return cls((n,))

    @property
    def order(self) -> int:
        return math.prod(self.cyclic_orders)

    def digits(self, x: int) -> tuple[int, ...]:
        out = []
        for m in self.cyclic_orders:
            x, r = divmod(x, m)
            out.append(r)
        return tuple(out)

    def from_digits(self, digits: Sequence[int]) -> int:
        x, scale = 0, 1
        for d, m in zip(digits, self.cyclic_orders):
            x += (d % m) * scale
            scale *= m
        return x

    def add(self, x: int, y: int) -> int:
        return self.from_digits([a + b for a, b in zip(self.digits(x), self.digits(y))])

    def label(self) -> str:
        return "x".join(f"Z{m}" for m in self.cyclic_orders)


def _prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def group_type_I(group: GroupSpec) -> int | None:
    """Smallest prime divisor of the group order that is 2 mod 3, if any."""
    for p in _prime_divisors(group.order):
        if p % 3 == 2:
            return p
    return None


def mu_max_sumfree_density(group: GroupSpec) -> Fraction:
    """Maximum sum-free density 1/3 + 1/(3q) of a type I(q) group."""
    q = group_type_I(group)
    if q is None:
        raise UnsupportedGroupError(f"{group.label()} is not of type I")
    return Fraction(1, 3) + Fraction(1, 3 * q)


# --- target families ----------------------------------------------------------


@dataclass(frozen=True)
class ExplicitSets:
    sets: tuple[VertexSubset, ...]

    def __post_init__(self) -> None:
        sizes = {s.universe_size for s in self.sets}
        if len(sizes) > 1:
            raise ValueError("all sets of a family must share a universe")

    def __len__(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class PartitionDefined:
    """Sets of base objects whose points are spread over ``parts`` classes in an
    allowed way, one set per partition of the point set.

    A pattern is the multiset of per-part point counts of one base object,
    written as a descending tuple of length ``parts``.
    """

    parts: int
    allowed_patterns: frozenset[tuple[int, ...]]
    arity: int
    n_points: int

    def __post_init__(self) -> None:
        if self.parts < 2:
            raise ValueError("need at least 2 parts")
        if not self.allowed_patterns:
            raise ValueError("allowed_patterns must be nonempty")
        for pat in self.allowed_patterns:
            if len(pat) != self.parts or sum(pat) != self.arity or list(pat) != sorted(pat, reverse=True):
                raise ValueError(f"pattern {pat} is not a descending {self.parts}-tuple summing to {self.arity}")

    def pattern_of(self, points: Sequence[int], labels: Sequence[int]) -> tuple[int, ...]:
        counts = [0] * self.parts
        for p in points:
            counts[labels[p]] += 1
        return tuple(sorted(counts, reverse=True))

    def is_good(self, points: Sequence[int], labels: Sequence[int]) -> bool:
        return self.pattern_of(points, labels) in self.allowed_patterns


TargetFamily = ExplicitSets | PartitionDefined


def _count_patterns(parts: int, total: int) -> list[tuple[int, ...]]:
    """All descending ``parts``-tuples of non-negative ints summing to ``total``."""
    out = []

    def rec(prefix: list[int], remaining: int, cap: int) -> None:
        if len(prefix) == parts:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for c in range(min(cap, remaining), -1, -1):
            rec(prefix + [c], remaining - c, c)

    rec([], total, total)
    return out


def target_family_partite(n: int, r: int, allowed_patterns: Sequence[Sequence[int]], arity: int) -> PartitionDefined:
    """Family indexed by partitions of ``n`` points into ``r`` classes."""
    if r < 2:
        raise ValueError("r must be at least 2")
    if n < 1:
        raise ValueError("n must be positive")
    pats = set()
    for p in allowed_patterns:
        p = tuple(sorted((int(c) for c in p), reverse=True))
        p = p + (0,) * (r - len(p))
        if len(p) != r or sum(p) != arity:
            raise ValueError(f"pattern {p} inconsistent with r={r}, arity={arity}")
        pats.add(p)
    return PartitionDefined(r, frozenset(pats), arity, n)


def graph_partite_family(n: int, r: int) -> PartitionDefined:
    """Complete r-partite graphs: an edge is kept iff its ends lie in different parts."""
    return target_family_partite(n, r, [p for p in _count_patterns(r, 2) if max(p) <= 1], 2)


def book3_family(n: int) -> PartitionDefined:
    return target_family_partite(n, 3, [(1, 1, 1)], 3)


def book4_family(n: int) -> PartitionDefined:
    return target_family_partite(n, 2, [(2, 2)], 4)


def fano_family(n: int) -> PartitionDefined:
    """Bipartitions where no triple lies inside a single part."""
    return target_family_partite(n, 2, [p for p in _count_patterns(2, 3) if p != (3, 0)], 3)


# --- encodings ----------------------------------------------------------------


@dataclass(frozen=True)
class Encoding:
    hypergraph: UniformHypergraph
    label: str
    base: dict[str, Any]
    vertex_meaning: tuple[Any, ...]
    degenerate_constraints: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def kind(self) -> str:
        return self.base["kind"]

    @property
    def n_points(self) -> int | None:
        """Size of the underlying point set for copy encodings."""
        return self.base.get("n") if self.kind in ("graph_copies", "hypergraph_copies") else None

    def group(self) -> GroupSpec:
        if self.kind != "schur":
            raise TypeError(f"{self.label} is not a Schur encoding")
        return GroupSpec(self.base["group"])

    def sidecar(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "base": self.base,
            "vertex_meaning": [list(m) if isinstance(m, tuple) else m for m in self.vertex_meaning],
            "degenerate_constraints": [list(c) for c in self.degenerate_constraints],
        }

    def dump(self) -> tuple[str, str]:
        """Hypergraph text and JSON sidecar."""
        return self.hypergraph.to_text(), json.dumps(self.sidecar(), sort_keys=True)

    @classmethod
    def load(cls, text: str, sidecar_json: str) -> Encoding:
        side = json.loads(sidecar_json)
        return cls(
            hypergraph=UniformHypergraph.from_text(text),
            label=side["label"],
            base=side["base"],
            vertex_meaning=tuple(tuple(m) if isinstance(m, list) else m for m in side["vertex_meaning"]),
            degenerate_constraints=tuple(tuple(c) for c in side["degenerate_constraints"]),
        )


def _copy_edge_sets(pattern: UniformHypergraph, n: int) -> list[tuple[int, ...]]:
    """Distinct images of the pattern's edge set under injections into [n],
    each edge mapped to the colex rank of its image."""
    v = pattern.n_vertices
    found: set[tuple[int, ...]] = set()
    for chosen in combinations(range(n), v):
        local: set[tuple[int, ...]] = set()
        for perm in permutations(chosen):
            img = tuple(sorted(colex_rank([perm[x] for x in e]) for e in pattern.edges))
            local.add(img)
        found |= local
    return sorted(found)


def _check_copy_args(pattern: UniformHypergraph, n: int, ell: int, max_vertices: int) -> int:
    if len(pattern.edges) == 0:
        raise ValueError("pattern must have at least one edge")
    if n < pattern.n_vertices:
        raise ValueError(f"n={n} is smaller than the pattern order {pattern.n_vertices}")
    nv = math.comb(n, ell)
    if nv > max_vertices:
        raise GuardError(f"C({n},{ell}) = {nv} vertices exceeds the guard {max_vertices}")
    return nv


def encode_graph_copies(pattern: UniformHypergraph, n: int, *, label: str | None = None,
                        max_vertices: int = MAX_VERTICES) -> Encoding:
    """Vertices are the edges of K_n (colex order), edges are copies of ``pattern``."""
    if pattern.k != 2:
        raise ValueError("graph pattern must be 2-uniform")
    nv = _check_copy_args(pattern, n, 2, max_vertices)
    edges = _copy_edge_sets(pattern, n)
    H = UniformHypergraph(len(pattern.edges), nv, edges)
    meaning = tuple(colex_unrank(r, 2) for r in range(nv))
    return Encoding(H, label or f"graph-copies(n={n})", {
        "kind": "graph_copies", "n": n, "ell": 2,
        "pattern": [list(e) for e in pattern.edges], "pattern_order": pattern.n_vertices,
    }, meaning)


def encode_hypergraph_copies(pattern: UniformHypergraph, n: int, *, label: str | None = None,
                             max_vertices: int = MAX_VERTICES) -> Encoding:
    """Vertices are the ell-subsets of [n] (colex order), edges are copies of ``pattern``."""
    ell = pattern.k
    nv = _check_copy_args(pattern, n, ell, max_vertices)
    edges = _copy_edge_sets(pattern, n)
    H = UniformHypergraph(len(pattern.edges), nv, edges)
    meaning = tuple(colex_unrank(r, ell) for r in range(nv))
    return Encoding(H, label or f"hypergraph-copies(ell={ell}, n={n})", {
        "kind": "hypergraph_copies", "n": n, "ell": ell,
        "pattern": [list(e) for e in pattern.edges], "pattern_order": pattern.n_vertices,
    }, meaning)


def encode_aps(n: int, ap_length: int) -> Encoding:
    """Vertex ``v`` stands for the integer ``v + 1`` of [n]; edges are the APs."""
    if ap_length < 3:
        raise ValueError("ap_length must be at least 3")
    if n < ap_length:
        raise ValueError("n must be at least ap_length")
    edges = []
    for d in range(1, (n - 1) // (ap_length - 1) + 1):
        for a in range(0, n - (ap_length - 1) * d):
            edges.append([a + j * d for j in range(ap_length)])
    H = UniformHypergraph(ap_length, n, edges)
    return Encoding(H, f"aps(n={n}, length={ap_length})",
                    {"kind": "aps", "n": n, "ap_length": ap_length}, tuple(range(1, n + 1)))


def encode_schur(group: GroupSpec) -> Encoding:
    """Schur triples {x, y, z} with x + y = z and pairwise distinct entries.

    Solutions with repeated entries are recorded as degenerate constraints:
    pairs {x, 2x} and the singleton {0}.
    """
    n = group.order
    if n < 2:
        raise ValueError("group order must be at least 2")
    edges: set[tuple[int, ...]] = set()
    degenerate: set[tuple[int, ...]] = set()
    for x in range(n):
        for y in range(n):
            z = group.add(x, y)
            if len({x, y, z}) == 3:
                edges.add(tuple(sorted((x, y, z))))
        z = group.add(x, x)
        if z == x:
            degenerate.add((x,))
        else:
            degenerate.add(tuple(sorted((x, z))))
    H = UniformHypergraph(3, n, edges)
    meaning = tuple(group.digits(x) for x in range(n))
    return Encoding(H, f"schur({group.label()})",
                    {"kind": "schur", "n": n, "group": list(group.cyclic_orders)},
                    meaning, tuple(sorted(degenerate, key=lambda c: (len(c), c))))


def is_strictly_sum_free(group: GroupSpec, members: Sequence[int]) -> bool:
    A = set(members)
    return not any(group.add(x, y) in A for x in A for y in A)


def target_family_sumfree_max(group: GroupSpec, *, max_order: int = 30, override: bool = False) -> ExplicitSets:
    """All sum-free subsets of maximum size (x + x = z counts as a violation)."""
    n = group.order
    if n > max_order and not override:
        raise GuardError(f"group order {n} exceeds the exhaustive guard {max_order}")
    add = [[group.add(x, y) for y in range(n)] for x in range(n)]

    best = [0]
    found: list[int] = []

    # Depth-first search; ``cand`` holds undecided elements c such that
    # ``chosen | {c}`` is still sum-free, so |chosen| + |cand| bounds the size.
    def extend(chosen: int, size: int, cand: int) -> None:
        if size + cand.bit_count() < best[0]:
            return
        if not cand:
            if size > best[0]:
                best[0] = size
                found.clear()
            found.append(chosen)
            return
        x = (cand & -cand).bit_length() - 1
        rest = cand & ~(1 << x)
        new = chosen | (1 << x)
        keep = 0
        for c in _bits(rest):
            # triples that involve both x and c
            bad = (
                new >> add[c][x] & 1
                or add[c][c] == x
                or add[x][x] == c
                or any(new >> y & 1 for y in range(n) if add[c][y] == x)
                or any(new >> y & 1 for y in range(n) if add[x][y] == c)
            )
            if not bad:
                keep |= 1 << c
        extend(new, size + 1, keep)
        extend(chosen, size, rest)

    start = 0
    for x in range(n):
        if add[x][x] != x:
            start |= 1 << x
    extend(0, 0, start)
    sets = sorted((VertexSubset(n, m) for m in found), key=lambda s: s.sorted_members())
    return ExplicitSets(tuple(sets))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
