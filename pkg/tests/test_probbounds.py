from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import chernoff_decimal, mu_brute
from sparsestab import patterns
from sparsestab.encodings import encode_graph_copies
from sparsestab.hypercore import UniformHypergraph, VertexSubset, deg_i
from sparsestab.probbounds import (
    boundedness_report,
    chernoff_lower,
    chernoff_upper,
    chernoff_upper_small,
    greedy_deletion,
    mu_i_exact,
    mu_i_mc,
    squared_degree_sums,
    upper_tail_probe,
)


def test_chernoff_formulas_against_decimal():
    for n, p, a in [(50, 0.3, 2.0), (1000, 0.01, 3.5), (10, 0.5, 1.0)]:
        lo, up, sm = chernoff_decimal(n, p, a)
        assert chernoff_lower(n, p, a) == pytest.approx(float(lo), rel=1e-15)
        assert chernoff_upper(n, p, a) == pytest.approx(float(up), rel=1e-15)
        assert chernoff_upper_small(n, p, a) == pytest.approx(float(sm), rel=1e-15)


def test_chernoff_errors_and_degenerate(caplog):
    with pytest.raises(ValueError):
        chernoff_upper_small(50, 0.3, 8.0)
    with pytest.raises(ValueError):
        chernoff_lower(0, 0.3, 1.0)
    with pytest.raises(ValueError):
        chernoff_lower(10, 1.5, 1.0)
    with pytest.raises(ValueError):
        chernoff_lower(10, 0.5, 0.0)
    assert chernoff_lower(10, 0.0, 1.0) == 0.0
    assert chernoff_upper(10, 0.0, 1.0) == 0.0
    assert "degenerate" in caplog.text


def test_mu_single_edge():
    H = UniformHypergraph(3, 3, [(0, 1, 2)])
    assert mu_i_exact(H, 0.5, 1) == pytest.approx(9 / 4, abs=1e-15)
    # i = 0: every degree is the plain degree
    assert mu_i_exact(H, 0.3, 0) == pytest.approx(3.0)


@st.composite
def small_hypergraph(draw):
    k = draw(st.integers(2, 4))
    n = draw(st.integers(k, 9))
    pool = st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True).map(lambda e: tuple(sorted(e)))
    edges = draw(st.lists(pool, max_size=10, unique=True))
    return UniformHypergraph(k, n, edges)


@settings(max_examples=40, deadline=None)
@given(small_hypergraph(), st.floats(0.0, 1.0), st.integers(0, 4))
def test_mu_matches_enumeration(H, q, i):
    i = min(i, H.k)
    assert mu_i_exact(H, q, i) == pytest.approx(mu_brute(H.n_vertices, list(H.edges), q, i), abs=1e-9)


def test_squared_degree_sums_match_definition():
    H = encode_graph_copies(patterns.complete_graph(3), 6).hypergraph
    rng = np.random.default_rng(3)
    flags = rng.random((5, H.n_vertices)) < 0.5
    got = squared_degree_sums(H, flags, 1)
    for row, value in zip(flags, got):
        S = VertexSubset.from_bool_array(row)
        assert value == sum(deg_i(H, v, 1, S) ** 2 for v in range(H.n_vertices))


def test_mu_mc_agrees_and_is_seeded():
    H = encode_graph_copies(patterns.complete_graph(3), 6).hypergraph
    exact = mu_i_exact(H, 0.4, 2)
    mean, se = mu_i_mc(H, 0.4, 2, trials=4000, seed=7)
    assert abs(mean - exact) < 5 * se
    assert mu_i_mc(H, 0.4, 2, trials=100, seed=7) == mu_i_mc(H, 0.4, 2, trials=100, seed=7)
    # chunking does not change the draws
    assert mu_i_mc(H, 0.4, 2, trials=100, seed=7, chunk=7) == mu_i_mc(H, 0.4, 2, trials=100, seed=7)
    with pytest.raises(ValueError):
        mu_i_mc(H, 0.4, 2, trials=0, seed=7)


def test_mu_errors():
    H = UniformHypergraph(2, 3, [(0, 1)])
    with pytest.raises(ValueError):
        mu_i_exact(H, 1.2, 1)
    with pytest.raises(ValueError):
        mu_i_exact(H, 0.5, 3)


def test_boundedness_report():
    H = encode_graph_copies(patterns.complete_graph(3), 6).hypergraph
    rep = boundedness_report(H, 0.2, 1, [0.2, 0.5, 1.0])
    m, nv = len(H), H.n_vertices
    for q, mu, r, ratio in zip(rep.q_grid, rep.mu_exact, rep.rhs_unit, rep.ratios):
        assert r == pytest.approx(q * q * m * m / nv)
        assert ratio == pytest.approx(mu / r)
    assert rep.K_min == max(rep.ratios)
    assert not rep.degenerate and len(rep.rows()) == 3
    empty = boundedness_report(UniformHypergraph(2, 4, []), 0.1, 1, [0.5])
    assert empty.degenerate and empty.K_min is None
    with pytest.raises(ValueError):
        boundedness_report(H, 0.5, 1, [0.2])
    with pytest.raises(ValueError):
        boundedness_report(H, 0.5, 1, [])


def _sq_sum(H, mask, i):
    S = VertexSubset(H.n_vertices, mask)
    return sum(deg_i(H, v, i, S) ** 2 for v in range(H.n_vertices))


def test_greedy_deletion_takes_best_single_removal():
    # the sum runs over all of V, so deleting the centre of a star does not
    # lower its own degree; deleting a leaf is strictly better
    H = UniformHypergraph(2, 5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    full = (1 << 5) - 1
    survivor, removed = greedy_deletion(H, full, 1, budget=1, target=0)
    best = min(_sq_sum(H, full & ~(1 << u), 1) for u in range(5))
    assert removed == 1 and _sq_sum(H, survivor, 1) == best == 13
    survivor, removed = greedy_deletion(H, full, 1, budget=10, target=100)
    assert removed == 0 and survivor == full


def test_upper_tail_probe():
    H = encode_graph_copies(patterns.complete_graph(3), 6).hypergraph
    res = upper_tail_probe(H, 0.5, 1, eta=0.1, K=1.0, trials=20, seed=1)
    assert 0 <= res.successes <= 20
    lo, hi = res.wilson_interval()
    assert 0 <= lo <= res.frequency <= hi <= 1
    again = upper_tail_probe(H, 0.5, 1, eta=0.1, K=1.0, trials=20, seed=1)
    assert again == res
    zero = upper_tail_probe(H, 0.5, 0, eta=0.1, K=1.0, trials=5, seed=1)
    assert zero.mean_deleted == 0
    with pytest.raises(ValueError):
        upper_tail_probe(H, 0.5, 1, eta=0.0, K=1.0, trials=5, seed=1)
    assert math.isclose(res.target, 4**3 * 9 * 0.25 * len(H) ** 2 / H.n_vertices)
