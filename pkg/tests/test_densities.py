from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import density_brute, strictly_balanced_brute
from sparsestab import patterns
from sparsestab.densities import (
    chromatic_number,
    ell_density,
    is_strictly_balanced,
    threshold_p,
    turan_lower_bound,
    two_density,
)
from sparsestab.encodings import GuardError
from sparsestab.hypercore import UniformHypergraph


@pytest.mark.parametrize("name,value", [
    ("K3", Fraction(2)), ("K4", Fraction(5, 2)), ("K5", Fraction(3)), ("C4", Fraction(3, 2)),
    ("C5", Fraction(4, 3)), ("P2", Fraction(1)),
])
def test_two_density(name, value):
    assert two_density(patterns.by_name(name)) == value


def test_hypergraph_densities():
    assert ell_density(patterns.fano_plane(), 3) == Fraction(3, 2)
    assert ell_density(patterns.book_3_2(), 3) == 1
    assert ell_density(patterns.book_4_3(), 4) == 1


@pytest.mark.parametrize("name,ell,expected", [
    ("fano", 3, True), ("K3", 2, True), ("K4", 2, True), ("C5", 2, True),
    ("book3", 3, False), ("book4", 4, False), ("P3", 2, False),
])
def test_strict_balance(name, ell, expected):
    assert is_strictly_balanced(patterns.by_name(name), ell) is expected


def test_density_errors():
    with pytest.raises(ValueError):
        ell_density(patterns.fano_plane(), 2)
    with pytest.raises(ValueError):
        two_density(UniformHypergraph(2, 2, [(0, 1)]))


@pytest.mark.parametrize("name,chi", [("K3", 3), ("K4", 4), ("C4", 2), ("C5", 3), ("P3", 2), ("K5", 5)])
def test_chromatic_number(name, chi):
    assert chromatic_number(patterns.by_name(name)) == chi


def test_chromatic_guard_and_petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    assert chromatic_number(UniformHypergraph(2, 10, outer + inner + spokes)) == 3
    with pytest.raises(GuardError):
        chromatic_number(patterns.empty_graph(17))


def test_turan_lower_bound_and_threshold():
    assert turan_lower_bound(10, 3) == 5
    assert turan_lower_bound(10, 4) == Fraction(20, 3)
    with pytest.raises(ValueError):
        turan_lower_bound(3, 1)
    assert threshold_p(patterns.complete_graph(3), 2, 100) == pytest.approx(0.1)


@st.composite
def small_pattern(draw):
    k = draw(st.integers(2, 3))
    n = draw(st.integers(k + 1, 6))
    pool = st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True).map(lambda e: tuple(sorted(e)))
    edges = draw(st.lists(pool, min_size=1, max_size=7, unique=True))
    return UniformHypergraph(k, n, edges)


@settings(max_examples=60, deadline=None)
@given(small_pattern())
def test_density_matches_edge_subset_oracle(H):
    assert ell_density(H, H.k) == density_brute(H.n_vertices, list(H.edges), H.k)


@settings(max_examples=40, deadline=None)
@given(small_pattern())
def test_strict_balance_matches_oracle(H):
    assert is_strictly_balanced(H, H.k) == strictly_balanced_brute(H.n_vertices, list(H.edges), H.k)
