"""k-uniform hypergraphs over dense integer vertex ids, plus the degree functionals.

Vertex subsets are Python ints used as bitmasks, wrapped in :class:`VertexSubset`
so the universe size travels with them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


class SizeMismatchError(ValueError):
    """A vertex subset was used with a hypergraph of a different order."""


class ContainmentError(ValueError):
    """A subset that must lie inside another one does not."""


@dataclass(frozen=True)
class VertexSubset:
    universe_size: int
    mask: int = 0

    def __post_init__(self) -> None:
        if self.universe_size < 0:
            raise ValueError("universe_size must be non-negative")
        if self.mask < 0 or self.mask >> self.universe_size:
            raise ValueError("members must lie in range(universe_size)")

    @classmethod
    def from_members(cls, universe_size: int, members: Iterable[int]) -> VertexSubset:
        mask = 0
        for v in members:
            if not 0 <= v < universe_size:
                raise ValueError(f"vertex {v} outside universe of size {universe_size}")
            mask |= 1 << v
        return cls(universe_size, mask)

    @classmethod
    def full(cls, universe_size: int) -> VertexSubset:
        return cls(universe_size, (1 << universe_size) - 1)

    @classmethod
    def empty(cls, universe_size: int) -> VertexSubset:
        return cls(universe_size, 0)

    @classmethod
    def from_bool_array(cls, flags: np.ndarray) -> VertexSubset:
        flags = np.asarray(flags, dtype=bool)
        packed = np.packbits(flags, bitorder="little")
        return cls(len(flags), int.from_bytes(packed.tobytes(), "little"))

    def to_bool_array(self) -> np.ndarray:
        nbytes = (self.universe_size + 7) // 8
        raw = np.frombuffer(self.mask.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.universe_size].astype(bool)

    @property
    def members(self) -> frozenset[int]:
        return frozenset(self)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __contains__(self, v: object) -> bool:
        return isinstance(v, int) and v >= 0 and bool(self.mask >> v & 1)

    def _check(self, other: VertexSubset) -> None:
        if other.universe_size != self.universe_size:
            raise SizeMismatchError(
                f"universe sizes differ: {self.universe_size} vs {other.universe_size}"
            )

    def __or__(self, other: VertexSubset) -> VertexSubset:
        self._check(other)
        return VertexSubset(self.universe_size, self.mask | other.mask)

    def __and__(self, other: VertexSubset) -> VertexSubset:
        self._check(other)
        return VertexSubset(self.universe_size, self.mask & other.mask)

    def __sub__(self, other: VertexSubset) -> VertexSubset:
        self._check(other)
        return VertexSubset(self.universe_size, self.mask & ~other.mask)

    def issubset(self, other: VertexSubset) -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def sorted_members(self) -> list[int]:
        return list(self)


class UniformHypergraph:
    """Immutable k-uniform hypergraph on vertices ``0 .. n_vertices-1``.

    Edges are stored canonically: each edge is a strictly increasing tuple and
    the edge list is sorted lexicographically. Duplicate edges are rejected.
    """

    __slots__ = ("k", "n_vertices", "edges", "edge_masks", "incidence")

    def __init__(self, k: int, n_vertices: int, edges: Iterable[Sequence[int]]) -> None:
        if k < 1:
            raise ValueError("uniformity must be positive")
        if n_vertices < 0:
            raise ValueError("n_vertices must be non-negative")
        canon = []
        for e in edges:
            t = tuple(sorted(int(v) for v in e))
            if len(t) != k or len(set(t)) != k:
                raise ValueError(f"edge {tuple(e)} does not have {k} distinct vertices")
            if t[0] < 0 or t[-1] >= n_vertices:
                raise ValueError(f"edge {t} has a vertex outside range({n_vertices})")
            canon.append(t)
        canon.sort()
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise ValueError(f"duplicate edge {a}")
        self.k = k
        self.n_vertices = n_vertices
        self.edges: tuple[tuple[int, ...], ...] = tuple(canon)
        self.edge_masks: tuple[int, ...] = tuple(sum(1 << v for v in e) for e in canon)
        inc: list[list[int]] = [[] for _ in range(n_vertices)]
        for idx, e in enumerate(canon):
            for v in e:
                inc[v].append(idx)
        self.incidence: tuple[tuple[int, ...], ...] = tuple(tuple(x) for x in inc)

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniformHypergraph):
            return NotImplemented
        return (self.k, self.n_vertices, self.edges) == (other.k, other.n_vertices, other.edges)

    def __hash__(self) -> int:
        return hash((self.k, self.n_vertices, self.edges))

    def __repr__(self) -> str:
        return f"UniformHypergraph(k={self.k}, n_vertices={self.n_vertices}, m={len(self.edges)})"

    def vertex_set(self) -> VertexSubset:
        return VertexSubset.full(self.n_vertices)

    def subset(self, members: Iterable[int]) -> VertexSubset:
        return VertexSubset.from_members(self.n_vertices, members)

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, k)`` int array (``(0, k)`` when empty)."""
        return np.array(self.edges, dtype=np.int64).reshape(len(self.edges), self.k)

    def to_text(self) -> str:
        lines = [f"{self.k} {self.n_vertices} {len(self.edges)}"]
        lines.extend(" ".join(map(str, e)) for e in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> UniformHypergraph:
        rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 3:
            raise ValueError("header must be 'k n m'")
        k, n, m = (int(x) for x in rows[0])
        if len(rows) - 1 != m:
            raise ValueError(f"header announces {m} edges, found {len(rows) - 1}")
        return cls(k, n, [[int(x) for x in r] for r in rows[1:]])


def _check_universe(H: UniformHypergraph, *subsets: VertexSubset) -> None:
    for S in subsets:
        if S.universe_size != H.n_vertices:
            raise SizeMismatchError(
                f"subset universe {S.universe_size} != hypergraph order {H.n_vertices}"
            )


def _check_vertex(H: UniformHypergraph, v: int) -> None:
    if not 0 <= v < H.n_vertices:
        raise ValueError(f"vertex {v} out of range({H.n_vertices})")


def _check_level(H: UniformHypergraph, i: int) -> None:
    if not 0 <= i <= H.k:
        raise ValueError(f"level i={i} outside 0..{H.k}")


def _check_inside(W: VertexSubset, U: VertexSubset) -> None:
    if W.mask & ~U.mask:
        raise ContainmentError("W must be a subset of U")


def induced_edge_count(H: UniformHypergraph, U: VertexSubset) -> int:
    """Number of edges of ``H`` lying entirely inside ``U``."""
    _check_universe(H, U)
    outside = ~U.mask
    return sum(1 for em in H.edge_masks if not em & outside)


def deg(H: UniformHypergraph, v: int, U: VertexSubset) -> int:
    """Degree of ``v`` in the induced hypergraph ``H[U]``."""
    _check_universe(H, U)
    _check_vertex(H, v)
    outside = ~U.mask
    return sum(1 for idx in H.incidence[v] if not H.edge_masks[idx] & outside)


def deg_i(H: UniformHypergraph, v: int, i: int, U: VertexSubset) -> int:
    """Edges through ``v`` with at least ``i`` further vertices in ``U``.

    The edge itself need not lie inside ``U``; see :func:`deg_i_inside` for the
    variant that also requires containment.
    """
    _check_universe(H, U)
    _check_vertex(H, v)
    _check_level(H, i)
    others = U.mask & ~(1 << v)
    return sum(1 for idx in H.incidence[v] if (H.edge_masks[idx] & others).bit_count() >= i)


def deg_i_inside(H: UniformHypergraph, u: int, i: int, W: VertexSubset, U: VertexSubset) -> int:
    """Edges ``e`` through ``u`` with ``e`` inside ``U`` and ``|e & (W - {u})| >= i``."""
    _check_universe(H, W, U)
    _check_vertex(H, u)
    _check_level(H, i)
    _check_inside(W, U)
    outside = ~U.mask
    others = W.mask & ~(1 << u)
    total = 0
    for idx in H.incidence[u]:
        em = H.edge_masks[idx]
        if not em & outside and (em & others).bit_count() >= i:
            total += 1
    return total


def count_E_U_i(H: UniformHypergraph, U: VertexSubset, W: VertexSubset, i: int) -> int:
    """Size of the set of edges of ``H[U]`` with at least ``i`` vertices in ``W``."""
    _check_universe(H, U, W)
    _check_level(H, i)
    _check_inside(W, U)
    outside = ~U.mask
    w = W.mask
    return sum(1 for em in H.edge_masks if not em & outside and (em & w).bit_count() >= i)


def rich_vertices(
    H: UniformHypergraph, U: VertexSubset, W: VertexSubset, i: int, threshold: float
) -> VertexSubset:
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    _check_universe(H, U, W)
    _check_inside(W, U)
    mask = 0
    for u in U:
        if deg_i_inside(H, u, i, W, U) >= threshold:
            mask |= 1 << u
    return VertexSubset(H.n_vertices, mask)
