from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import max_free_brute, partition_distance_brute, turan_count
from sparsestab import patterns
from sparsestab.encodings import (
    Encoding,
    ExplicitSets,
    GroupSpec,
    encode_graph_copies,
    encode_schur,
    graph_partite_family,
    target_family_sumfree_max,
)
from sparsestab.extremal import (
    family_distance,
    greedy_free_set,
    max_free_subset,
    partite_warm_start,
    partition_distance,
    partition_sets,
    run_length_decode,
    run_length_encode,
    sample_and_solve,
    sample_subset,
    schur_count,
    stability_probe,
)
from sparsestab.hypercore import UniformHypergraph, VertexSubset


def _wrap(H: UniformHypergraph) -> Encoding:
    return Encoding(H, "test", {"kind": "aps", "n": H.n_vertices}, tuple(range(H.n_vertices)))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_triangle_free_turan(n):
    res = max_free_subset(encode_graph_copies(patterns.complete_graph(3), n))
    assert res.exact and res.size == turan_count(n)
    assert res.edge_violations_remaining == 0


@st.composite
def random_instance(draw):
    k = draw(st.integers(2, 4))
    n = draw(st.integers(k, 12))
    pool = st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True).map(lambda e: tuple(sorted(e)))
    edges = draw(st.lists(pool, max_size=25, unique=True))
    avail = draw(st.integers(0, (1 << n) - 1))
    return UniformHypergraph(k, n, edges), avail


@settings(max_examples=80, deadline=None)
@given(random_instance())
def test_branch_and_bound_matches_brute_force(data):
    H, avail = data
    res = max_free_subset(_wrap(H), VertexSubset(H.n_vertices, avail))
    assert res.exact
    assert res.size == max_free_brute(H.n_vertices, list(H.edges), avail)
    assert res.witness.issubset(VertexSubset(H.n_vertices, avail)) and len(res.witness) == res.size
    assert res.edge_violations_remaining == 0


@pytest.mark.parametrize("n,size", [(5, 2), (8, 4), (11, 4), (14, 7), (20, 10)])
def test_strict_schur(n, size):
    enc = encode_schur(GroupSpec.cyclic(n))
    res = max_free_subset(enc, strict=True)
    assert res.exact and res.size == size
    assert schur_count(enc, res.witness) == 0


def test_non_strict_schur_allows_degenerate():
    enc = encode_schur(GroupSpec.cyclic(5))
    loose = max_free_subset(enc).size
    assert loose >= max_free_subset(enc, strict=True).size
    # without degenerate constraints {1, 2} is fine even though 1 + 1 = 2
    forbidden = [tuple(e) for e in enc.hypergraph.edges]
    assert loose == max_free_brute(5, forbidden)


def test_budget_exhaustion_flags_inexact():
    enc = encode_graph_copies(patterns.complete_graph(3), 9)
    res = max_free_subset(enc, budget=3)
    assert not res.exact and res.nodes_explored == 3
    assert res.edge_violations_remaining == 0


def test_initial_set_must_be_free():
    enc = encode_graph_copies(patterns.complete_graph(3), 4)
    with pytest.raises(ValueError):
        max_free_subset(enc, initial=VertexSubset.full(6))


def test_greedy_free_set_is_free():
    enc = encode_graph_copies(patterns.complete_graph(3), 6)
    masks = list(enc.hypergraph.edge_masks)
    got = greedy_free_set(15, masks, (1 << 15) - 1)
    assert all(m & got != m for m in masks)


def test_run_length_round_trip():
    xs = [0, 1, 2, 5, 7, 8]
    assert run_length_encode(xs) == [[0, 3], [5, 1], [7, 2]]
    assert run_length_decode(run_length_encode(xs)) == xs
    assert run_length_encode([]) == []


def test_sample_subset_deterministic():
    a = sample_subset(100, 0.3, 11)
    assert a == sample_subset(100, 0.3, 11)
    assert a != sample_subset(100, 0.3, 12)
    with pytest.raises(ValueError):
        sample_subset(10, 1.5, 1)


def test_sample_and_solve_record():
    enc = encode_graph_copies(patterns.complete_graph(3), 8)
    rec, res = sample_and_solve(enc, 0.5, seed=4, keep_witness=True)
    assert rec.sampled_size == len(sample_subset(enc.hypergraph.n_vertices, 0.5, 4))
    assert rec.extremal_size == res.size and rec.exact
    assert rec.ratio == pytest.approx(res.size / rec.sampled_size)
    assert run_length_decode(rec.witness) == res.witness.sorted_members()
    warm = partite_warm_start(lambda e: graph_partite_family(8, 2))
    rec2, _ = sample_and_solve(enc, 0.5, seed=4, warm_start=warm)
    assert rec2.extremal_size == rec.extremal_size


def test_partition_distance_matches_brute_force():
    n = 6
    enc = encode_graph_copies(patterns.complete_graph(3), n)
    fam = graph_partite_family(n, 2)
    for seed in range(5):
        W = sample_subset(enc.hypergraph.n_vertices, 0.7, seed)
        pts = [enc.vertex_meaning[v] for v in W]
        ref = partition_distance_brute(pts, n, 2, fam.is_good)
        d = partition_distance(W, enc, fam, seed=seed)
        assert d.exact and d.distance == ref


def test_partition_distance_of_bipartite_set_is_zero():
    n = 7
    enc = encode_graph_copies(patterns.complete_graph(3), n)
    left = {0, 1, 2}
    members = [v for v, (a, b) in enumerate(enc.vertex_meaning) if (a in left) != (b in left)]
    W = VertexSubset.from_members(enc.hypergraph.n_vertices, members)
    assert partition_distance(W, enc, graph_partite_family(n, 2)).distance == 0


def test_family_distance():
    enc = encode_schur(GroupSpec.cyclic(5))
    fam = target_family_sumfree_max(GroupSpec.cyclic(5))
    W = VertexSubset.from_members(5, [1, 2, 3])
    d = family_distance(W, fam)
    assert d.exact and d.distance == 1
    with pytest.raises(ValueError):
        family_distance(W, ExplicitSets(()))
    with pytest.raises(TypeError):
        partition_distance(W, enc, fam)


def test_partition_sets_small():
    enc = encode_graph_copies(patterns.complete_graph(3), 4)
    sets = partition_sets(enc, graph_partite_family(4, 2))
    sizes = sorted(m.bit_count() for m in sets)
    # empty cut, four stars K_{1,3}, three K_{2,2}
    assert sizes == [0, 3, 3, 3, 3, 4, 4, 4]


def test_stability_probe_exhaustive():
    enc = encode_schur(GroupSpec.cyclic(5))
    fam = target_family_sumfree_max(GroupSpec.cyclic(5))
    # a large near-free set far from every maximum sum-free set cannot exist at
    # these parameters, so no violator is reported
    res = stability_probe(enc, fam, alpha=0.4, eps=0.05, delta=0.5)
    assert res.violator is None and res.exact and res.examined > 0
    # with a loose distance requirement some set qualifies
    loose = stability_probe(enc, fam, alpha=0.4, eps=1.0, delta=0.0)
    assert loose.violator is not None and loose.distance > 0


def test_stability_probe_anneal_and_guards():
    enc = encode_graph_copies(patterns.complete_graph(3), 8)
    fam = graph_partite_family(8, 2)
    with pytest.raises(ValueError):
        stability_probe(enc, fam, 0.5, 0.1, 0.1, mode="exhaustive")
    res = stability_probe(enc, fam, 0.5, 0.2, 0.05, mode="anneal", budget=500, seed=2)
    assert not res.exact
    again = stability_probe(enc, fam, 0.5, 0.2, 0.05, mode="anneal", budget=500, seed=2)
    assert (res.induced_edges, res.distance) == (again.induced_edges, again.distance)
    with pytest.raises(ValueError):
        stability_probe(enc, fam, 0.5, 0.1, 0.1, mode="nope")


def test_schur_count():
    enc = encode_schur(GroupSpec.cyclic(5))
    assert schur_count(enc, VertexSubset.from_members(5, [1, 4])) == 0
    # 1 + 1 = 2 and 1 + 2 = 3 style solutions, ordered
    assert schur_count(enc, VertexSubset.from_members(5, [1, 2])) == 1
