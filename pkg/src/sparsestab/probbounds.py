"""Binomial tail bounds, the squared-degree moments mu_i(H, q), and finite-n
diagnostics for (K, p)-boundedness and the deleted-set upper-tail estimate."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

from .hypercore import UniformHypergraph, VertexSubset
from .seeding import rng_for

log = logging.getLogger(__name__)


# --- Chernoff -----------------------------------------------------------------


def _check_binomial(n: int, p: float, a: float) -> float:
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if a <= 0:
        raise ValueError("a must be positive")
    return n * p


def chernoff_lower(n: int, p: float, a: float) -> float:
    """Bound on P(X < np - a) for X ~ Bin(n, p): exp(-a^2 / (2np))."""
    mean = _check_binomial(n, p, a)
    if mean == 0:
        log.warning("degenerate binomial (np = 0): the lower tail is empty")
        return 0.0
    return math.exp(-a * a / (2 * mean))


def chernoff_upper(n: int, p: float, a: float) -> float:
    """Bound on P(X > np + a): exp(-a^2/(2np) + a^3/(2(np)^2))."""
    mean = _check_binomial(n, p, a)
    if mean == 0:
        log.warning("degenerate binomial (np = 0): X > a never happens")
        return 0.0
    return math.exp(-a * a / (2 * mean) + a**3 / (2 * mean * mean))


def chernoff_upper_small(n: int, p: float, a: float) -> float:
    """Bound on P(X > np + a) valid for a <= np/2: exp(-a^2 / (4np))."""
    mean = _check_binomial(n, p, a)
    if a > mean / 2:
        raise ValueError(f"a={a} exceeds np/2={mean / 2}; the small-deviation bound does not apply")
    return math.exp(-a * a / (4 * mean))


# --- mu_i ---------------------------------------------------------------------


def _tail(m: int, t: int, q: float) -> float:
    """P(Bin(m, q) >= t)."""
    if t <= 0:
        return 1.0
    if t > m:
        return 0.0
    return math.fsum(math.comb(m, j) * q**j * (1 - q) ** (m - j) for j in range(t, m + 1))


def _pair_probability(a: int, b: int, s: int, i: int, q: float) -> float:
    """P(|A & V_q| >= i and |B & V_q| >= i) where A, B share s elements and have
    a, b private ones; conditioned on the number t of shared elements present."""
    return math.fsum(
        math.comb(s, t) * q**t * (1 - q) ** (s - t) * _tail(a, i - t, q) * _tail(b, i - t, q)
        for t in range(s + 1)
    )


def _pair_signatures(H: UniformHypergraph) -> Counter:
    """Multiset of (private_e, private_f, shared) over ordered edge pairs through a
    common vertex v, counted once per v, with v itself removed from both edges."""
    sig: Counter = Counter()
    k = H.k
    for v in range(H.n_vertices):
        inc = H.incidence[v]
        if not inc:
            continue
        bit = 1 << v
        masks = [H.edge_masks[idx] & ~bit for idx in inc]
        for x in masks:
            for y in masks:
                s = (x & y).bit_count()
                sig[(k - 1 - s, k - 1 - s, s)] += 1
    return sig


def mu_i_exact(H: UniformHypergraph, q: float, i: int) -> float:
    """E[sum_v deg_i(v, V_q)^2] by summing exact pair probabilities."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    if not 0 <= i <= H.k:
        raise ValueError(f"i must lie in 0..{H.k}")
    terms = [cnt * _pair_probability(a, b, s, i, q) for (a, b, s), cnt in _pair_signatures(H).items()]
    return math.fsum(terms)


def _incidence_matrix(H: UniformHypergraph) -> sparse.csr_matrix:
    """(m*k, n) matrix sending the (edge, slot) indicator to the slot's vertex."""
    m, k = len(H.edges), H.k
    cols = H.edge_array().ravel()
    rows = np.arange(m * k)
    return sparse.csr_matrix((np.ones(m * k), (rows, cols)), shape=(m * k, H.n_vertices))


def squared_degree_sums(H: UniformHypergraph, present: np.ndarray, i: int) -> np.ndarray:
    """sum_v deg_i(v, S)^2 for each row ``S`` of a boolean (trials, n) array."""
    present = np.atleast_2d(np.asarray(present, dtype=bool))
    if len(H.edges) == 0:
        return np.zeros(present.shape[0])
    E = H.edge_array()
    slots = present[:, E]                         # (T, m, k)
    others = slots.sum(axis=2, keepdims=True) - slots
    hit = (others >= i).reshape(present.shape[0], -1).astype(np.float64)
    degs = np.asarray(hit @ _incidence_matrix(H))  # (T, n)
    return (degs * degs).sum(axis=1)


def mu_i_mc(H: UniformHypergraph, q: float, i: int, trials: int, seed: int,
            chunk: int = 4096) -> tuple[float, float]:
    """Monte Carlo estimate of mu_i(H, q) and its standard error.

    Trial ``t`` draws its subset from the substream ``(seed, t)``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    values = np.empty(trials)
    n = H.n_vertices
    for start in range(0, trials, chunk):
        stop = min(trials, start + chunk)
        block = np.stack([rng_for(seed, t).random(n) < q for t in range(start, stop)])
        values[start:stop] = squared_degree_sums(H, block, i)
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, se


# --- (K, p)-boundedness -------------------------------------------------------


@dataclass
class BoundednessReport:
    i: int
    q_grid: list[float]
    mu_exact: list[float]
    rhs_unit: list[float]
    ratios: list[float | None]
    K_min: float | None
    degenerate: bool

    def rows(self) -> list[dict]:
        return [
            {"i": self.i, "q": q, "mu": mu, "rhs_unit": r, "ratio": ratio}
            for q, mu, r, ratio in zip(self.q_grid, self.mu_exact, self.rhs_unit, self.ratios)
        ]


def boundedness_report(H: UniformHypergraph, p: float, i: int, q_grid: Sequence[float]) -> BoundednessReport:
    """Pointwise mu_i(H, q) / (q^{2i} |H|^2 / |V|) over ``q_grid`` and its maximum."""
    if len(q_grid) == 0:
        raise ValueError("q_grid must be nonempty")
    if any(q < p or q > 1 for q in q_grid):
        raise ValueError("every q must satisfy p <= q <= 1")
    m, nv = len(H.edges), H.n_vertices
    mus = [mu_i_exact(H, q, i) for q in q_grid]
    rhs = [q ** (2 * i) * m * m / nv if nv else 0.0 for q in q_grid]
    ratios = [mu / r if r > 0 else None for mu, r in zip(mus, rhs)]
    degenerate = any(r is None for r in ratios)
    K_min = None if degenerate else max(ratios)
    return BoundednessReport(i, list(q_grid), mus, rhs, ratios, K_min, degenerate)


# --- upper-tail probe ---------------------------------------------------------


@dataclass
class TailProbeResult:
    successes: int
    trials: int
    target: float
    mean_deleted: float

    @property
    def frequency(self) -> float:
        return self.successes / self.trials

    def wilson_interval(self, z: float = 1.96) -> tuple[float, float]:
        n, f = self.trials, self.frequency
        denom = 1 + z * z / n
        centre = (f + z * z / (2 * n)) / denom
        half = z * math.sqrt(f * (1 - f) / n + z * z / (4 * n * n)) / denom
        return max(0.0, centre - half), min(1.0, centre + half)


def _degrees_i(H: UniformHypergraph, present: int, i: int) -> list[int]:
    out = [0] * H.n_vertices
    for v in range(H.n_vertices):
        others = present & ~(1 << v)
        out[v] = sum(1 for idx in H.incidence[v] if (H.edge_masks[idx] & others).bit_count() >= i)
    return out


def greedy_deletion(H: UniformHypergraph, present: int, i: int, budget: int, target: float) -> tuple[int, int]:
    """Delete up to ``budget`` vertices of ``present``, each time the one whose
    removal lowers sum_v deg_i(v, .)^2 the most, stopping once at or below
    ``target``. Returns the surviving mask and the number deleted."""
    removed = 0
    while removed < budget:
        degs = _degrees_i(H, present, i)
        total = sum(d * d for d in degs)
        if total <= target:
            break
        best_u, best_total = -1, total
        for u in VertexSubset(H.n_vertices, present):
            trial = present & ~(1 << u)
            t = sum(d * d for d in _degrees_i(H, trial, i))
            if t < best_total:
                best_u, best_total = u, t
        if best_u < 0:
            break
        present &= ~(1 << best_u)
        removed += 1
    return present, removed


def upper_tail_probe(H: UniformHypergraph, q: float, i: int, eta: float, K: float,
                     trials: int, seed: int) -> TailProbeResult:
    """Frequency with which a greedily chosen X of size <= eta*q*|V| brings
    sum_v deg_i(v, V_q - X)^2 down to 4^k k^2 K q^{2i} |H|^2 / |V|."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    nv, k, m = H.n_vertices, H.k, len(H.edges)
    target = 4**k * k * k * K * q ** (2 * i) * m * m / nv
    budget = math.floor(eta * q * nv)
    successes, deleted = 0, 0
    for t in range(trials):
        flags = rng_for(seed, t).random(nv) < q
        present = VertexSubset.from_bool_array(flags).mask
        if i == 0:
            survivor, removed = present, 0
        else:
            survivor, removed = greedy_deletion(H, present, i, budget, target)
        total = sum(d * d for d in _degrees_i(H, survivor, i))
        successes += total <= target
        deleted += removed
    return TailProbeResult(successes, trials, target, deleted / trials)
