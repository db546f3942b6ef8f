"""Small forbidden configurations used as patterns (graphs are 2-uniform hypergraphs)."""

from __future__ import annotations

from itertools import combinations

from .hypercore import UniformHypergraph


def complete_graph(n: int) -> UniformHypergraph:
    return UniformHypergraph(2, n, combinations(range(n), 2))


def cycle(n: int) -> UniformHypergraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return UniformHypergraph(2, n, [(i, (i + 1) % n) for i in range(n)])


def path(n_edges: int) -> UniformHypergraph:
    return UniformHypergraph(2, n_edges + 1, [(i, i + 1) for i in range(n_edges)])


def empty_graph(n: int) -> UniformHypergraph:
    return UniformHypergraph(2, n, [])


def fano_plane() -> UniformHypergraph:
    """Points and lines of the projective plane of order 2."""
    lines = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    return UniformHypergraph(3, 7, lines)


def book_3_2() -> UniformHypergraph:
    """3-book with 2 pages: edges 123, 124, 345 (here 0-based)."""
    return UniformHypergraph(3, 5, [(0, 1, 2), (0, 1, 3), (2, 3, 4)])


def book_4_3() -> UniformHypergraph:
    """4-book with 3 pages: edges 1234, 1235, 1236, 4567 (here 0-based)."""
    return UniformHypergraph(4, 7, [(0, 1, 2, 3), (0, 1, 2, 4), (0, 1, 2, 5), (3, 4, 5, 6)])


NAMED = {
    "K3": lambda: complete_graph(3),
    "K4": lambda: complete_graph(4),
    "K5": lambda: complete_graph(5),
    "C4": lambda: cycle(4),
    "C5": lambda: cycle(5),
    "P2": lambda: path(2),
    "P3": lambda: path(3),
    "fano": fano_plane,
    "book3": book_3_2,
    "book4": book_4_3,
}

# Turan densities quoted from the literature; not computed here.
TURAN_DENSITY = {"fano": (3, 4), "book3": (2, 9), "book4": (3, 8)}


def by_name(name: str) -> UniformHypergraph:
    try:
        return NAMED[name]()
    except KeyError:
        raise ValueError(f"unknown pattern {name!r}; known: {sorted(NAMED)}") from None
