"""Explicit constants of the level-by-level induction, evaluated in log space.

Level ``i`` works at accuracy ``delta_i = delta / 4^(k-i)``. Level 0 is fixed
directly; each step ``i -> i+1`` takes the previous level's (xi', b', C') and
produces (xi, b, C) together with the intermediates eta, b_hat, R, b*, L.

Values quickly leave double range, so every magnitude is a :mod:`lognum`
real. ``R`` is also kept as an exact integer while it is small enough for that
to be meaningful.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Callable, Sequence

from . import lognum as ln
from .lognum import Real

DEFAULT_TOL = 1e-9

ETA_TERMS = ("xi'/4", "delta/8")
B_STAR_TERMS = ("beta*xi'^2/256", "b'/4", "b_hat/4")
B_TERMS = ("xi'^2/256", "b*/(40*R*L^R)")


class LedgerInconsistency(ValueError):
    """A defining equation or inequality of the ledger does not hold."""

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        super().__init__(f"{name}: {detail}" if detail else name)


def _exact(x) -> Fraction:
    # decimal reading of a float, so 0.1 means 1/10
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def eq_R(k: int, K, xi_prime: Real) -> tuple[Real, int | None]:
    """R = ceil(4^(k+1) k^2 K / xi'^2 + 1).

    Returns the value and, when xi' is an ordinary float, the exact integer.
    For towers the ceiling is below working precision and ``None`` is returned.
    """
    xi_prime = ln.normalize(xi_prime)
    if ln.sign(xi_prime) <= 0:
        raise ValueError("xi' must be positive")
    if isinstance(xi_prime, float):
        x = Fraction(4 ** (k + 1) * k * k) * _exact(K) / _exact(xi_prime) ** 2
        r = math.ceil(x + 1)
        return ln.normalize(r), r
    x = ln.div(ln.mul(4.0 ** (k + 1) * k * k, K), ln.mul(xi_prime, xi_prime))
    return ln.add(x, 1.0), None


@dataclass(frozen=True)
class Level:
    i: int
    delta: Real
    xi: Real
    b: Real
    C: Real


@dataclass(frozen=True)
class Step:
    """Intermediates of the passage from level ``i`` to ``i + 1``."""

    i: int
    delta: Real  # delta_{i+1}
    xi_prime: Real
    b_prime: Real
    C_prime: Real
    eta: Real
    eta_term: str
    b_hat: Real
    R: Real
    R_exact: int | None
    R_capped: bool
    b_star: Real
    b_star_term: str
    L: Real
    RLR: Real  # R * L^R
    xi: Real
    b: Real
    b_term: str
    C: Real
    gamma_star: str = ""
    delta_star: str = "delta/2"


@dataclass
class ConstantsLedger:
    k: int
    K: float
    alpha: float
    delta_target: float
    beta_floor: float
    r_cap: int | None
    levels: list[Level] = field(default_factory=list)
    steps: list[Step] = field(default_factory=list)

    def to_dict(self) -> dict:
        def enc(obj) -> dict:
            out = {}
            for f in fields(obj):
                v = getattr(obj, f.name)
                if isinstance(v, (float, ln.LogReal)) and f.name not in ("i",):
                    out[f.name] = ln.to_json(v)
                elif isinstance(v, int) and f.name == "R_exact" and v.bit_length() > 60:
                    out[f.name] = str(v)
                else:
                    out[f.name] = v
            return out

        return {
            "k": self.k,
            "K": self.K,
            "alpha": self.alpha,
            "delta_target": self.delta_target,
            "beta_floor": self.beta_floor,
            "r_cap": self.r_cap,
            "levels": [enc(lv) for lv in self.levels],
            "steps": [enc(st) for st in self.steps],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def ledger(
    k: int,
    K: float,
    alpha: float,
    delta: float,
    eps_stab: Callable[[Real], Real],
    b_hat_fn: Callable[[Real], Real],
    beta_floor: float,
    r_cap: int | None = None,
) -> ConstantsLedger:
    """Evaluate the constants for levels 0..k.

    ``r_cap`` replaces R by min(R, r_cap); it exists so small variants can be
    cross-checked in exact arithmetic.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if K <= 0:
        raise ValueError("K must be positive")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if not 0 < beta_floor <= 1:
        raise ValueError("beta_floor must lie in (0, 1]")
    if r_cap is not None and r_cap < 2:
        raise ValueError("r_cap must be at least 2")

    deltas = [delta / 4 ** (k - i) for i in range(k + 1)]
    xi0 = ln.normalize(eps_stab(deltas[0] / 2))
    if ln.sign(xi0) <= 0:
        raise ValueError("eps_stab must return a positive value")
    out = ConstantsLedger(k, K, alpha, delta, beta_floor, r_cap)
    out.levels.append(Level(0, deltas[0], xi0, deltas[0] / 32, 1.0))

    for i in range(k):
        prev = out.levels[-1]
        xp, bp, Cp = prev.xi, prev.b, prev.C
        d = deltas[i + 1]
        eta, j_eta = ln.minimum(ln.div(xp, 4.0), d / 8)
        b_hat = ln.normalize(b_hat_fn(eta))
        if ln.sign(b_hat) <= 0:
            raise ValueError("b_hat_fn must return a positive value")
        R, R_exact = eq_R(k, K, xp)
        capped = False
        if r_cap is not None and ln.compare(R, r_cap) > 0:
            R, R_exact, capped = float(r_cap), r_cap, True
        xp2 = ln.mul(xp, xp)
        b_star, j_bs = ln.minimum(ln.mul(beta_floor, ln.div(xp2, 256.0)), ln.div(bp, 4.0), ln.div(b_hat, 4.0))
        L = ln.div(3.0, b_star)
        RLR = ln.mul(R, ln.power(L, R))
        xi = ln.div(xp2, ln.mul(8.0 * k, ln.power(RLR, i + 1)))
        b, j_b = ln.minimum(ln.div(xp2, 256.0), ln.div(b_star, ln.mul(40.0, RLR)))
        C = ln.mul(RLR, Cp)
        out.steps.append(Step(
            i=i, delta=d, xi_prime=xp, b_prime=bp, C_prime=Cp,
            eta=eta, eta_term=ETA_TERMS[j_eta], b_hat=b_hat,
            R=R, R_exact=R_exact, R_capped=capped,
            b_star=b_star, b_star_term=B_STAR_TERMS[j_bs], L=L, RLR=RLR,
            xi=xi, b=b, b_term=B_TERMS[j_b], C=C,
            gamma_star=f"gamma - {ln.to_str(ln.div(xp, 4.0))}",
        ))
        out.levels.append(Level(i + 1, d, xi, b, C))
    return out


@dataclass
class ConstraintReport:
    checked: int
    binding: list[dict]


def _expect(name: str, got: Real, want: Real, tol: float) -> None:
    if not ln.close(got, want, tol):
        raise LedgerInconsistency(name, f"stored {ln.to_str(got)} but recomputed {ln.to_str(want)}")


def _expect_le(name: str, lhs: Real, rhs: Real, tol: float) -> None:
    if ln.compare(lhs, rhs) > 0 and not ln.close(lhs, rhs, tol):
        raise LedgerInconsistency(name, f"{ln.to_str(lhs)} > {ln.to_str(rhs)}")


def check_constraints(L: ConstantsLedger, tol: float = DEFAULT_TOL,
                      b_hat_fn: Callable[[Real], Real] | None = None) -> ConstraintReport:
    """Recompute every defining relation of the ledger; raise on the first failure.

    Passing ``b_hat_fn`` also re-evaluates b_hat = b_hat_fn(eta).
    """
    k = L.k
    n = 0

    def eq(name, got, want):
        nonlocal n
        n += 1
        _expect(name, got, want, tol)

    def le(name, lhs, rhs):
        nonlocal n
        n += 1
        _expect_le(name, lhs, rhs, tol)

    if len(L.levels) != k + 1 or len(L.steps) != k:
        raise LedgerInconsistency("shape", "expected k+1 levels and k steps")
    for lv in L.levels:
        eq(f"delta_{lv.i} = delta/4^(k-{lv.i})", lv.delta, L.delta_target / 4 ** (k - lv.i))
    lv0 = L.levels[0]
    eq("b_0 = delta_0/32", lv0.b, ln.div(lv0.delta, 32.0))
    eq("C_0 = 1", lv0.C, 1.0)

    binding = []
    for st in L.steps:
        i = st.i
        lo, hi = L.levels[i], L.levels[i + 1]
        tag = f"[step {i}->{i + 1}]"
        eq(f"{tag} xi' = xi_{i}", st.xi_prime, lo.xi)
        eq(f"{tag} b' = b_{i}", st.b_prime, lo.b)
        eq(f"{tag} C' = C_{i}", st.C_prime, lo.C)
        eq(f"{tag} delta = delta_{i + 1}", st.delta, hi.delta)

        eta, j = ln.minimum(ln.div(st.xi_prime, 4.0), ln.div(st.delta, 8.0))
        eq(f"{tag} eta = min(xi'/4, delta/8)", st.eta, eta)
        if st.eta_term != ETA_TERMS[j]:
            raise LedgerInconsistency(f"{tag} eta binding term", f"{st.eta_term} != {ETA_TERMS[j]}")
        if b_hat_fn is not None:
            eq(f"{tag} b_hat = b_hat_fn(eta)", st.b_hat, b_hat_fn(st.eta))

        R, R_exact = eq_R(k, L.K, st.xi_prime)
        if L.r_cap is not None and ln.compare(R, L.r_cap) > 0:
            R, R_exact = float(L.r_cap), L.r_cap
        name = f"{tag} R = ceil(4^(k+1) k^2 K / xi'^2 + 1)"
        eq(name, st.R, R)
        if R_exact is not None and st.R_exact != R_exact:
            raise LedgerInconsistency(name, f"stored {st.R_exact} but recomputed {R_exact}")
        if ln.compare(st.R, 2.0) < 0:
            raise LedgerInconsistency(f"{tag} R >= 2", ln.to_str(st.R))

        xp2 = ln.mul(st.xi_prime, st.xi_prime)
        b_star, j = ln.minimum(ln.mul(L.beta_floor, ln.div(xp2, 256.0)),
                               ln.div(st.b_prime, 4.0), ln.div(st.b_hat, 4.0))
        eq(f"{tag} b* = min(beta xi'^2/256, b'/4, b_hat/4)", st.b_star, b_star)
        if st.b_star_term != B_STAR_TERMS[j]:
            raise LedgerInconsistency(f"{tag} b* binding term", f"{st.b_star_term} != {B_STAR_TERMS[j]}")
        eq(f"{tag} L = 3/b*", st.L, ln.div(3.0, st.b_star))
        eq(f"{tag} RL^R = R * L^R", st.RLR, ln.mul(st.R, ln.power(st.L, st.R)))
        eq(f"{tag} xi = xi'^2/(8k (R L^R)^(i+1))", st.xi,
           ln.div(xp2, ln.mul(8.0 * k, ln.power(st.RLR, i + 1))))
        b, j = ln.minimum(ln.div(xp2, 256.0), ln.div(st.b_star, ln.mul(40.0, st.RLR)))
        eq(f"{tag} b = min(xi'^2/256, b*/(40 R L^R))", st.b, b)
        if st.b_term != B_TERMS[j]:
            raise LedgerInconsistency(f"{tag} b binding term", f"{st.b_term} != {B_TERMS[j]}")
        eq(f"{tag} C = R L^R C'", st.C, ln.mul(st.RLR, st.C_prime))
        eq(f"{tag} xi_{i + 1} = xi", hi.xi, st.xi)
        eq(f"{tag} b_{i + 1} = b", hi.b, st.b)
        eq(f"{tag} C_{i + 1} = C", hi.C, st.C)

        le(f"{tag} xi_{i + 1} <= xi'", hi.xi, st.xi_prime)
        le(f"{tag} C' <= C_{i + 1}", st.C_prime, hi.C)
        le(f"{tag} b_{i + 1} <= b'", hi.b, st.b_prime)
        # doubly exponential decay: log xi_{i+1} <= 2 log xi' whenever xi' < 1
        if ln.compare(st.xi_prime, 1.0) < 0:
            le(f"{tag} log10 xi_{i + 1} <= 2 log10 xi'", ln.log10abs(hi.xi), ln.mul(2.0, ln.log10abs(st.xi_prime)))
        binding.append({"step": i, "eta": st.eta_term, "b_star": st.b_star_term, "b": st.b_term})
    return ConstraintReport(n, binding)


@dataclass(frozen=True)
class StepTable:
    """Nondecreasing step function given by sorted (x, y) breakpoints.

    ``lookup(x)`` returns the y of the largest breakpoint not exceeding x.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("table must have at least one point")
        xs = [p[0] for p in self.points]
        if xs != sorted(xs) or len(set(xs)) != len(xs):
            raise ValueError("table x values must be strictly increasing")
        if any(y <= 0 for _, y in self.points):
            raise ValueError("table values must be positive")

    @classmethod
    def constant(cls, y: float) -> "StepTable":
        return cls(((0.0, y),))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "StepTable":
        return cls(tuple((float(x), float(y)) for x, y in pairs))

    @classmethod
    def load(cls, path) -> "StepTable":
        with open(path) as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            data = data["points"]
        return cls.from_pairs(data)

    def __call__(self, x: Real) -> float:
        best = None
        for px, py in self.points:
            if ln.compare(px, x) <= 0:
                best = py
            else:
                break
        if best is None:
            raise ValueError(f"argument {ln.to_str(x)} lies below the table's first breakpoint")
        return best
