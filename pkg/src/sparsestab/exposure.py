"""Multiple exposure: splitting a q-random subset into R independent rounds
with geometrically growing probabilities."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .hypercore import UniformHypergraph, VertexSubset
from .seeding import derive_seed, rng_for

RESIDUAL_TOL = 1e-12


class InfeasibleScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class ExposureSchedule:
    q: float
    R: int
    L: float
    qs: tuple[float, ...]

    def residual(self) -> float:
        return abs((1 - self.q) - math.prod(1 - x for x in self.qs))

    def validate(self) -> None:
        if len(self.qs) != self.R:
            raise InfeasibleScheduleError("wrong number of rounds")
        if self.residual() > RESIDUAL_TOL:
            raise InfeasibleScheduleError(f"product residual {self.residual():.3e} too large")
        if not all(0 < x < 1 for x in self.qs):
            raise InfeasibleScheduleError("round probabilities must lie in (0, 1)")
        if sum(self.qs) < self.q * (1 - 1e-12):
            raise InfeasibleScheduleError("round probabilities sum below q")
        if self.qs[0] < self.q / (self.R * self.L**self.R):
            raise InfeasibleScheduleError("q_1 below q / (R L^R)")

    def to_dict(self) -> dict:
        return {"q": self.q, "R": self.R, "L": self.L, "qs": list(self.qs)}


def _survival(x: float, R: int, L: float) -> float:
    return math.prod(1 - L**s * x for s in range(R))


def solve_schedule(q: float, R: int, L: float, max_iter: int = 200) -> ExposureSchedule:
    """Find q_1 with prod_s (1 - L^{s-1} q_1) = 1 - q by bisection.

    The product is strictly decreasing in q_1 on [0, L^{1-R}], running from 1
    to 0, so the root is unique.
    """
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    if R < 1:
        raise ValueError("R must be at least 1")
    if L < 1:
        raise ValueError("L must be at least 1")
    if R == 1:
        return ExposureSchedule(q, 1, L, (q,))
    target = 1 - q
    lo, hi = 0.0, min(q, L ** (1 - R))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _survival(mid, R, L) > target:
            lo = mid
        else:
            hi = mid
    # pick the endpoint with the smaller residual
    q1 = min((lo, hi), key=lambda x: abs(_survival(x, R, L) - target))
    qs = tuple(q1 * L**s for s in range(R))
    if any(not 0 < x < 1 for x in qs):
        raise InfeasibleScheduleError(f"round probability outside (0, 1): {qs}")
    sched = ExposureSchedule(q, R, L, qs)
    sched.validate()
    return sched


def sample_multiround(universe_size: int, schedule: ExposureSchedule | Sequence[float], seed: int,
                      within: VertexSubset | None = None) -> tuple[list[VertexSubset], VertexSubset]:
    """Independent Bernoulli subsets, one per round, and their union.

    When ``within`` is given, rounds are random subsets of it.
    """
    qs = schedule.qs if isinstance(schedule, ExposureSchedule) else tuple(schedule)
    rng = rng_for(seed)
    draws = rng.random((len(qs), universe_size)) < np.asarray(qs)[:, None]
    if within is not None:
        draws &= within.to_bool_array()[None, :]
    rounds = [VertexSubset.from_bool_array(row) for row in draws]
    return rounds, VertexSubset.from_bool_array(draws.any(axis=0))


def union_membership_probability(schedule: ExposureSchedule) -> float:
    return 1 - math.prod(1 - x for x in schedule.qs)


def conditional_round_probability(schedule: ExposureSchedule, s: int) -> float:
    """P(element lies in round s | it lies in the union) = q_s / q (s is 1-based)."""
    if not 1 <= s <= schedule.R:
        raise ValueError(f"round {s} outside 1..{schedule.R}")
    return schedule.qs[s - 1] / schedule.q


def round_pattern_law(qs: Sequence[float]) -> dict[tuple[bool, ...], float]:
    """Probability of each of the 2^R round-membership patterns of one element."""
    law = {}
    for pattern in itertools.product((False, True), repeat=len(qs)):
        law[pattern] = math.prod(x if hit else 1 - x for x, hit in zip(qs, pattern))
    return law


def verify_conditional(schedule: ExposureSchedule, tol: float = 1e-12) -> list[dict]:
    """Recompute every q_s / q by enumerating round patterns; raise on mismatch."""
    law = round_pattern_law(schedule.qs)
    in_union = math.fsum(p for pat, p in law.items() if any(pat))
    out = []
    for s in range(1, schedule.R + 1):
        joint = math.fsum(p for pat, p in law.items() if pat[s - 1])
        enumerated = joint / in_union
        closed = conditional_round_probability(schedule, s)
        if abs(enumerated - closed) > tol:
            raise AssertionError(f"round {s}: enumerated {enumerated!r} != q_s/q {closed!r}")
        out.append({"s": s, "enumerated": enumerated, "closed_form": closed})
    return out


def verify_measure(schedule: ExposureSchedule, tol: float = 1e-12) -> dict:
    """Per-element law of the union versus Bernoulli(q)."""
    law = round_pattern_law(schedule.qs)
    p_out = law[(False,) * schedule.R]
    p_in = math.fsum(p for pat, p in law.items() if any(pat))
    ok = abs(p_in - schedule.q) <= tol and abs(p_out - (1 - schedule.q)) <= tol
    if not ok:
        raise AssertionError(f"union law ({p_out}, {p_in}) differs from Bernoulli({schedule.q})")
    return {"p_absent": p_out, "p_present": p_in, "q": schedule.q}


# --- Claim-star probe ---------------------------------------------------------


@dataclass
class ClaimStarResult:
    hits: int
    trials: int

    @property
    def frequency(self) -> float:
        return self.hits / self.trials if self.trials else float("nan")

    def standard_error(self) -> float:
        f = self.frequency
        return math.sqrt(f * (1 - f) / self.trials) if self.trials else float("nan")


def claim_star_probe(
    H: UniformHypergraph,
    U: VertexSubset,
    schedule: ExposureSchedule,
    W_selector: Callable[[VertexSubset], VertexSubset],
    gamma_star: float,
    delta_star: float,
    distance: Callable[[VertexSubset], float] | None,
    trials: int,
    seed: int,
) -> ClaimStarResult:
    """How often the round slices W_s = W & U_{q_s} of a selected W keep
    |W_s| >= gamma* q_s |U| and min_B |W_s - B| >= delta* q_s |V| in every round.

    ``distance`` returns min over the target family of |W_s - B|; ``None`` means
    an empty family, for which the distance condition is vacuous.
    """
    nv, size_u = H.n_vertices, len(U)
    hits = 0
    for t in range(trials):
        rounds, union = sample_multiround(nv, schedule, seed=derive_seed(seed, t), within=U)
        W = W_selector(union)
        if not W.issubset(union):
            raise ValueError("selector must return a subset of the sampled set")
        ok = True
        for q_s, round_set in zip(schedule.qs, rounds):
            W_s = W & round_set
            if len(W_s) < gamma_star * q_s * size_u:
                ok = False
                break
            if distance is not None and delta_star > 0 and distance(W_s) < delta_star * q_s * nv:
                ok = False
                break
        hits += ok
    return ClaimStarResult(hits, trials)

