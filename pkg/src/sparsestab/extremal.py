"""Solvers for the finite extremal quantities: largest configuration-free
subsets, distances to target families, and stability probes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .encodings import Encoding, ExplicitSets, PartitionDefined
from .hypercore import UniformHypergraph, VertexSubset, induced_edge_count
from .seeding import derive_seed, rng_for

EXACT_PARTITION_GUARD = 2_000_000
EXHAUSTIVE_PROBE_GUARD = 22


@dataclass
class ExtremalResult:
    size: int
    witness: VertexSubset
    exact: bool
    nodes_explored: int
    edge_violations_remaining: int = 0


@dataclass
class StabilityDistance:
    distance: int
    nearest: object
    exact: bool


# --- largest free subset ------------------------------------------------------


def forbidden_sets(enc: Encoding, available: VertexSubset, strict: bool) -> list[int]:
    """Masks of constraints lying inside ``available``: hyperedges, plus the
    degenerate constraints in strict mode."""
    outside = ~available.mask
    masks = [em for em in enc.hypergraph.edge_masks if not em & outside]
    if strict:
        for c in enc.degenerate_constraints:
            m = sum(1 << v for v in c)
            if not m & outside:
                masks.append(m)
    return masks


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def greedy_free_set(n: int, constraints: Sequence[int], available: int, start: int = 0) -> int:
    """Extend ``start`` by scanning vertices in order of increasing constraint
    degree, adding each one that completes no constraint."""
    by_vertex: dict[int, list[int]] = {}
    for c in constraints:
        for v in _bits(c):
            by_vertex.setdefault(v, []).append(c)
    chosen = start
    order = sorted(_bits(available & ~start), key=lambda v: (len(by_vertex.get(v, ())), v))
    for v in order:
        bit = 1 << v
        if all(c & ~(chosen | bit) for c in by_vertex.get(v, ())):
            chosen |= bit
    return chosen


def _packing(free_parts: list[int]) -> int:
    """Greedy count of pairwise disjoint sets, smallest first."""
    used, count = 0, 0
    for f in sorted(free_parts, key=int.bit_count):
        if not f & used:
            used |= f
            count += 1
    return count


class BudgetExhausted(Exception):
    pass


def max_free_subset(enc: Encoding, available: VertexSubset | None = None, strict: bool = False,
                    budget: int | None = None, initial: VertexSubset | None = None) -> ExtremalResult:
    """Largest subset of ``available`` containing no constraint, by branch and bound.

    Each node fixes some vertices as included (``I``) and keeps the undecided
    ones in ``F``. A constraint is live while it misses no vertex of ``I | F``;
    a live constraint with one undecided vertex forces that vertex out, and a
    family of live constraints with pairwise disjoint undecided parts costs at
    least one vertex each, which gives the bound.

    ``budget`` caps the number of nodes; when it runs out the best set found is
    returned with ``exact=False``.
    """
    H = enc.hypergraph
    n = H.n_vertices
    if available is None:
        available = VertexSubset.full(n)
    if available.universe_size != n:
        raise ValueError("available set has the wrong universe")
    constraints = forbidden_sets(enc, available, strict)
    forced_out = 0
    rest = []
    for c in constraints:
        if c.bit_count() == 1:
            forced_out |= c
        else:
            rest.append(c)
    avail = available.mask & ~forced_out
    rest = [c for c in rest if not c & forced_out]

    start = 0
    if initial is not None:
        start = initial.mask & avail
        if any(not c & ~start for c in rest):
            raise ValueError("initial set contains a forbidden configuration")
    best_mask = greedy_free_set(n, rest, avail, start)
    best = [best_mask.bit_count(), best_mask]
    nodes = 0

    stack: list[tuple[int, int, list[int]]] = [(0, avail, rest)]
    exact = True
    while stack:
        if budget is not None and nodes >= budget:
            exact = False
            break
        I, F, live = stack.pop()
        nodes += 1
        # unit propagation
        dead = False
        while True:
            keep = I | F
            live = [c for c in live if not c & ~keep]
            forced = 0
            for c in live:
                f = c & F
                if f == 0:
                    dead = True
                    break
                if f & (f - 1) == 0:
                    forced |= f
            if dead or not forced:
                break
            F &= ~forced
        if dead:
            continue
        base = I.bit_count()
        if not live:
            size = base + F.bit_count()
            if size > best[0]:
                best[:] = [size, I | F]
            continue
        parts = [c & F for c in live]
        if base + F.bit_count() - _packing(parts) <= best[0]:
            continue
        smallest = min(parts, key=int.bit_count)
        counts = {v: 0 for v in _bits(smallest)}
        for f in parts:
            for v in counts:
                if f >> v & 1:
                    counts[v] += 1
        v = max(counts, key=lambda u: (counts[u], -u))
        bit = 1 << v
        stack.append((I, F & ~bit, live))
        stack.append((I | bit, F & ~bit, live))

    witness = VertexSubset(n, best[1])
    violations = sum(1 for c in constraints if not c & ~best[1])
    return ExtremalResult(best[0], witness, exact, nodes, violations)


# --- random trials ------------------------------------------------------------


@dataclass
class TrialRecord:
    encoding: str
    n: int | None
    p: float
    seed: int
    sampled_size: int
    extremal_size: int
    exact: bool
    ratio: float | None
    distance: int | None = None
    distance_exact: bool | None = None
    witness: list[list[int]] | None = None
    extra: dict = field(default_factory=dict)


def run_length_encode(members: Sequence[int]) -> list[list[int]]:
    runs: list[list[int]] = []
    for v in sorted(members):
        if runs and runs[-1][0] + runs[-1][1] == v:
            runs[-1][1] += 1
        else:
            runs.append([v, 1])
    return runs


def run_length_decode(runs: Sequence[Sequence[int]]) -> list[int]:
    return [start + j for start, length in runs for j in range(length)]


def sample_subset(n: int, p: float, seed: int) -> VertexSubset:
    """p-random subset of range(n) drawn from the stream of ``seed``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return VertexSubset.from_bool_array(rng_for(seed).random(n) < p)


def sample_and_solve(enc: Encoding, p: float, seed: int, strict: bool = False, budget: int | None = None,
                     warm_start: Callable[[Encoding, VertexSubset, int], VertexSubset] | None = None,
                     keep_witness: bool = False) -> tuple[TrialRecord, ExtremalResult]:
    """Draw V_p, solve the free-subset problem on it, and record the outcome."""
    sampled = sample_subset(enc.hypergraph.n_vertices, p, seed)
    initial = warm_start(enc, sampled, seed) if warm_start is not None and len(sampled) else None
    res = max_free_subset(enc, sampled, strict=strict, budget=budget, initial=initial)
    m = len(sampled)
    record = TrialRecord(
        encoding=enc.label,
        n=enc.base.get("n"),
        p=p,
        seed=seed,
        sampled_size=m,
        extremal_size=res.size,
        exact=res.exact,
        ratio=res.size / m if m else None,
        witness=run_length_encode(res.witness) if keep_witness else None,
    )
    return record, res


# --- distances ----------------------------------------------------------------


def _members_as_points(W: VertexSubset, enc: Encoding, family: PartitionDefined) -> list[tuple[int, ...]]:
    if enc.kind not in ("graph_copies", "hypergraph_copies"):
        raise TypeError(f"encoding {enc.label} has no underlying point set")
    if enc.base["ell"] != family.arity:
        raise ValueError(f"family arity {family.arity} differs from base arity {enc.base['ell']}")
    if family.n_points != enc.base["n"]:
        raise ValueError("family and encoding disagree on the number of points")
    return [tuple(enc.vertex_meaning[v]) for v in W]


class _PartitionCost:
    """Bad-member counting for labelings of the point set."""

    def __init__(self, members: list[tuple[int, ...]], family: PartitionDefined, n_points: int):
        self.members = members
        self.family = family
        self.n_points = n_points
        self.by_point: list[list[int]] = [[] for _ in range(n_points)]
        for idx, pts in enumerate(members):
            for p in pts:
                self.by_point[p].append(idx)

    def bad(self, idx: int, labels: Sequence[int]) -> int:
        return 0 if self.family.is_good(self.members[idx], labels) else 1

    def total(self, labels: Sequence[int]) -> int:
        return sum(self.bad(i, labels) for i in range(len(self.members)))

    def local_search(self, rng: np.random.Generator) -> tuple[int, list[int]]:
        r = self.family.parts
        labels = [int(x) for x in rng.integers(0, r, self.n_points)]
        cost = self.total(labels)
        improved = True
        while improved and cost > 0:
            improved = False
            for p in range(self.n_points):
                inc = self.by_point[p]
                if not inc:
                    continue
                old = labels[p]
                here = sum(self.bad(i, labels) for i in inc)
                best_lab, best_here = old, here
                for lab in range(r):
                    if lab == old:
                        continue
                    labels[p] = lab
                    there = sum(self.bad(i, labels) for i in inc)
                    if there < best_here:
                        best_lab, best_here = lab, there
                labels[p] = best_lab
                if best_lab != old:
                    cost += best_here - here
                    improved = True
        return cost, labels

    def exhaustive(self, upper: int, upper_labels: list[int]) -> tuple[int, list[int]]:
        """Exact minimum by depth-first assignment with canonical part labels."""
        n, r = self.n_points, self.family.parts
        order = sorted(range(n), key=lambda p: -len(self.by_point[p]))
        pos = {p: j for j, p in enumerate(order)}
        finishing: list[list[int]] = [[] for _ in range(n)]
        for idx, pts in enumerate(self.members):
            finishing[max(pos[p] for p in pts)].append(idx)
        labels = [0] * n
        best = [upper, list(upper_labels)]

        def rec(depth: int, used: int, cost: int) -> None:
            if cost >= best[0]:
                return
            if depth == n:
                best[:] = [cost, list(labels)]
                return
            p = order[depth]
            for lab in range(min(used + 1, r)):
                labels[p] = lab
                extra = sum(self.bad(i, labels) for i in finishing[depth])
                rec(depth + 1, max(used, lab + 1), cost + extra)
            labels[p] = 0

        rec(0, 0, 0)
        return best[0], best[1]


def partition_distance(W: VertexSubset, enc: Encoding, family: PartitionDefined, budget: int | None = None,
                       restarts: int = 32, seed: int = 0) -> StabilityDistance:
    """Fewest members of ``W`` whose point pattern is disallowed, minimised over
    partitions of the point set into ``family.parts`` classes.

    Exact when ``parts ** points`` is within the guard (or ``budget``), else the
    best of ``restarts`` hill-climbing runs with ``exact=False``.
    """
    if not isinstance(family, PartitionDefined):
        raise TypeError("partition_distance needs a partition-defined family")
    members = _members_as_points(W, enc, family)
    n_points = family.n_points
    if not members:
        return StabilityDistance(0, tuple([0] * n_points), True)
    cost = _PartitionCost(members, family, n_points)
    best_cost, best_labels = math.inf, [0] * n_points
    for r in range(restarts):
        c, labels = cost.local_search(rng_for(seed, r))
        if c < best_cost:
            best_cost, best_labels = c, labels
        if best_cost == 0:
            return StabilityDistance(0, tuple(best_labels), True)
    guard = EXACT_PARTITION_GUARD if budget is None else budget
    if family.parts**n_points <= guard:
        c, labels = cost.exhaustive(int(best_cost) + 1, best_labels)
        return StabilityDistance(c, tuple(labels), True)
    return StabilityDistance(int(best_cost), tuple(best_labels), False)


def family_distance(W: VertexSubset, family: ExplicitSets) -> StabilityDistance:
    """min over B of |W - B|, with the index of the minimiser."""
    if not isinstance(family, ExplicitSets):
        raise TypeError("family_distance needs an explicit family")
    if len(family) == 0:
        raise ValueError("family is empty")
    dists = [len(W - B) for B in family.sets]
    j = min(range(len(dists)), key=dists.__getitem__)
    return StabilityDistance(dists[j], j, True)


def partition_sets(enc: Encoding, family: PartitionDefined, limit: int = 200_000) -> list[int]:
    """Every member set of a partition-defined family as a vertex mask
    (deduplicated), for small point sets."""
    n_points, r = family.n_points, family.parts
    if r ** (n_points - 1) > limit:
        raise ValueError("point set too large to list the family")
    points = [tuple(m) for m in enc.vertex_meaning]
    out = set()
    for tail in product(range(r), repeat=n_points - 1):
        labels = (0,) + tail
        mask = 0
        for v, pts in enumerate(points):
            if family.is_good(pts, labels):
                mask |= 1 << v
        out.add(mask)
    return sorted(out)


def family_masks(enc: Encoding, family: ExplicitSets | PartitionDefined) -> list[int]:
    if isinstance(family, ExplicitSets):
        return [B.mask for B in family.sets]
    return partition_sets(enc, family)


# --- stability probe ----------------------------------------------------------


@dataclass
class ProbeResult:
    violator: VertexSubset | None
    induced_edges: int | None
    distance: int | None
    exact: bool
    examined: int


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a)


def stability_probe(enc: Encoding, family: ExplicitSets | PartitionDefined, alpha: float, eps: float,
                    delta: float, mode: str = "exhaustive", budget: int = 20_000, seed: int = 0,
                    restarts: int = 8) -> ProbeResult:
    """Look for U with |U| >= (alpha - eps)|V|, fewer than eps*|H| induced edges,
    and |U - B| > delta*|V| for every B in the family.

    The strongest violator has the fewest induced edges, then the largest
    distance. ``exhaustive`` scans every subset (|V| <= 22); ``anneal`` runs
    simulated annealing on sets of the minimum admissible size.
    """
    H = enc.hypergraph
    nv = H.n_vertices
    size_min = max(0, math.ceil((alpha - eps) * nv - 1e-12))
    edge_cap = eps * len(H)
    dist_cap = delta * nv
    Bs = family_masks(enc, family)
    if not Bs:
        raise ValueError("family is empty")
    if mode == "exhaustive":
        if nv > EXHAUSTIVE_PROBE_GUARD:
            raise ValueError(f"exhaustive probe refuses |V| = {nv} > {EXHAUSTIVE_PROBE_GUARD}")
        return _probe_exhaustive(H, Bs, size_min, edge_cap, dist_cap)
    if mode == "anneal":
        return _probe_anneal(H, Bs, size_min, edge_cap, dist_cap, budget, seed, restarts)
    raise ValueError(f"unknown probe mode {mode!r}")


def _probe_exhaustive(H: UniformHypergraph, Bs: list[int], size_min: int, edge_cap: float,
                      dist_cap: float) -> ProbeResult:
    nv = H.n_vertices
    best = None
    examined = 0
    edges = np.array(H.edge_masks, dtype=np.int64)
    comps = np.array([((1 << nv) - 1) & ~b for b in Bs], dtype=np.int64)
    chunk = 1 << 16
    for start in range(0, 1 << nv, chunk):
        U = np.arange(start, min(start + chunk, 1 << nv), dtype=np.int64)
        U = U[_popcount(U) >= size_min]
        if U.size == 0:
            continue
        examined += U.size
        induced = np.zeros(U.size, dtype=np.int64)
        for e in edges:
            induced += (U & e) == e
        ok = induced < edge_cap
        if not ok.any():
            continue
        U, induced = U[ok], induced[ok]
        dist = np.full(U.size, np.iinfo(np.int64).max)
        for c in comps:
            np.minimum(dist, _popcount(U & c).astype(np.int64), out=dist)
        ok = dist > dist_cap
        if not ok.any():
            continue
        U, induced, dist = U[ok], induced[ok], dist[ok]
        j = np.lexsort((U, -dist, induced))[0]
        cand = (int(induced[j]), -int(dist[j]), int(U[j]))
        if best is None or cand < best:
            best = cand
    if best is None:
        return ProbeResult(None, None, None, True, examined)
    return ProbeResult(VertexSubset(nv, best[2]), best[0], -best[1], True, examined)


def _probe_anneal(H: UniformHypergraph, Bs: list[int], size: int, edge_cap: float, dist_cap: float,
                  budget: int, seed: int, restarts: int) -> ProbeResult:
    nv = H.n_vertices
    if size > nv:
        return ProbeResult(None, None, None, False, 0)
    weight = nv + 1  # one induced edge outweighs any distance gain

    def score(mask: int) -> tuple[int, int]:
        e = sum(1 for em in H.edge_masks if not em & ~mask)
        d = min((mask & ~b).bit_count() for b in Bs)
        return e, d

    best = None
    examined = 0
    for r in range(restarts):
        rng = rng_for(seed, r)
        members = list(rng.permutation(nv)[:size])
        mask = sum(1 << int(v) for v in members)
        e, d = score(mask)
        energy = e * weight - d
        temp = 2.0
        for step in range(budget):
            examined += 1
            if (e < edge_cap and d > dist_cap) and (best is None or (e, -d, mask) < best):
                best = (e, -d, mask)
            if size in (0, nv):
                break
            inside = [v for v in _bits(mask)]
            outside = [v for v in range(nv) if not mask >> v & 1]
            a = inside[int(rng.integers(len(inside)))]
            b = outside[int(rng.integers(len(outside)))]
            new = (mask & ~(1 << a)) | (1 << b)
            e2, d2 = score(new)
            energy2 = e2 * weight - d2
            if energy2 <= energy or rng.random() < math.exp((energy - energy2) / temp):
                mask, e, d, energy = new, e2, d2, energy2
            temp = max(1e-3, temp * 0.999)
        if e < edge_cap and d > dist_cap and (best is None or (e, -d, mask) < best):
            best = (e, -d, mask)
    if best is None:
        return ProbeResult(None, None, None, False, examined)
    return ProbeResult(VertexSubset(nv, best[2]), best[0], -best[1], False, examined)


# --- Schur triples ------------------------------------------------------------


def schur_count(enc: Encoding, A: VertexSubset) -> int:
    """Ordered triples (x, y, z) in A^3 with x + y = z, repeats allowed."""
    if enc.kind != "schur":
        raise TypeError(f"{enc.label} is not a Schur encoding")
    G = enc.group()
    members = list(A)
    return sum(1 for x in members for y in members if G.add(x, y) in A)


# --- warm starts --------------------------------------------------------------


def partite_warm_start(family_for: Callable[[Encoding], PartitionDefined], restarts: int = 8):
    """Warm start taking the members of the sample that a locally optimal
    partition keeps; such a set is free whenever the family's sets are."""

    def start(enc: Encoding, sampled: VertexSubset, seed: int) -> VertexSubset:
        family = family_for(enc)
        members = _members_as_points(sampled, enc, family)
        cost = _PartitionCost(members, family, family.n_points)
        best = None
        for r in range(restarts):
            c, labels = cost.local_search(rng_for(derive_seed(seed, 0xC0FFEE), r))
            if best is None or c < best[0]:
                best = (c, labels)
        # maximise kept members: local search minimised the complement count
        labels = best[1]
        keep = [v for v, pts in zip(sampled, members) if family.is_good(pts, labels)]
        return VertexSubset.from_members(enc.hypergraph.n_vertices, keep)

    return start
