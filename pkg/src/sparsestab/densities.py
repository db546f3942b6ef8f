"""Exact densities, chromatic numbers and the deterministic extremal baselines."""

from __future__ import annotations

from fractions import Fraction

from .encodings import GuardError
from .hypercore import UniformHypergraph

MAX_CHROMATIC_ORDER = 16


def _induced_counts(pattern: UniformHypergraph) -> list[int]:
    """Number of induced edges for every vertex subset, indexed by bitmask."""
    n = pattern.n_vertices
    counts = [0] * (1 << n)
    for em in pattern.edge_masks:
        # add 1 to every superset of the edge mask
        rest = ((1 << n) - 1) & ~em
        sub = rest
        while True:
            counts[sub | em] += 1
            if sub == 0:
                break
            sub = (sub - 1) & rest
    return counts


def _density_profile(pattern: UniformHypergraph, ell: int) -> dict[int, Fraction]:
    if pattern.k != ell:
        raise ValueError(f"pattern is {pattern.k}-uniform, expected {ell}")
    n = pattern.n_vertices
    if n < ell + 1:
        raise ValueError(f"density needs at least {ell + 1} vertices, pattern has {n}")
    counts = _induced_counts(pattern)
    return {
        mask: Fraction(counts[mask] - 1, mask.bit_count() - ell)
        for mask in range(1 << n)
        if mask.bit_count() >= ell + 1
    }


def ell_density(pattern: UniformHypergraph, ell: int) -> Fraction:
    """max (e(K) - 1) / (v(K) - ell) over sub-hypergraphs K with v(K) >= ell + 1.

    For a fixed vertex set the ratio is largest with all induced edges, so the
    maximum runs over vertex subsets only.
    """
    return max(_density_profile(pattern, ell).values())


def two_density(pattern: UniformHypergraph) -> Fraction:
    return ell_density(pattern, 2)


def is_strictly_balanced(pattern: UniformHypergraph, ell: int) -> bool:
    """Every proper sub-hypergraph has strictly smaller ell-density."""
    profile = _density_profile(pattern, ell)
    full = (1 << pattern.n_vertices) - 1
    whole = profile[full]
    # proper subgraphs on the full vertex set lose edges and hence density
    return all(d < whole for mask, d in profile.items() if mask != full)


def chromatic_number(pattern: UniformHypergraph) -> int:
    """Exact chromatic number of a small graph by backtracking over colourings."""
    if pattern.k != 2:
        raise ValueError("chromatic number is implemented for graphs only")
    n = pattern.n_vertices
    if n > MAX_CHROMATIC_ORDER:
        raise GuardError(f"order {n} exceeds the exact colouring guard {MAX_CHROMATIC_ORDER}")
    if n == 0:
        return 0
    adj = [0] * n
    for a, b in pattern.edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    order = sorted(range(n), key=lambda v: -adj[v].bit_count())

    def colourable(c: int) -> bool:
        colour = [-1] * n

        def place(idx: int, used: int) -> bool:
            if idx == n:
                return True
            v = order[idx]
            taken = {colour[u] for u in range(n) if adj[v] >> u & 1}
            # a fresh colour is interchangeable with any other unused one
            for col in range(min(used + 1, c)):
                if col not in taken:
                    colour[v] = col
                    if place(idx + 1, max(used, col + 1)):
                        return True
            colour[v] = -1
            return False

        return place(0, 0)

    c = 1
    while not colourable(c):
        c += 1
    return c


def turan_lower_bound(edge_count: int, chi: int) -> Fraction:
    """(1 - 1/(chi - 1)) * e(G), the size of the best (chi-1)-partite subgraph on average."""
    if chi < 2:
        raise ValueError("chi must be at least 2")
    return (1 - Fraction(1, chi - 1)) * edge_count


def threshold_p(pattern: UniformHypergraph, ell: int, n: int) -> float:
    """n ** (-1 / m_ell(pattern))."""
    m = ell_density(pattern, ell)
    if m <= 0:
        raise ValueError("threshold needs a positive density")
    return float(n) ** (-1.0 / float(m))
