"""Treat each conjugate-exponent slot as a one-parameter bound family.

Profiles evaluate the bound over an exponent grid; the optimizer brackets the
grid minimum and refines it by golden-section search on the log of the
exponent (profiles change fastest just above 1, so log spacing resolves that
region).  A boundary minimizer is reported as such rather than extrapolated:
the limits at both ends of the domain coincide with the max- and sum-selector
variants that already exist in the catalog.

Rankings evaluate a set of variants on one instance, with every exponent slot
independently optimized, and order them by right-hand side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .bounds import (
    DEFAULT_POLICY,
    EvalContext,
    IncompatibleInstanceError,
    TolerancePolicy,
    _coarse_offdiag_value,
    _cor32_rhs_factor,
    _diag_value,
    _eval_on_context,
    _fourier_rhs,
    _offdiag_value,
)
from .space import ProblemInstance
from .variants import EXPONENT_MAX, Variant, VariantError, holder

__all__ = [
    "PROFILE_FAMILIES",
    "DEFAULT_INTERVAL",
    "ExponentProfile",
    "profile_exponent",
    "optimize_exponent",
    "RankEntry",
    "TightnessRanking",
    "rank_variants",
]

PROFILE_FAMILIES = ("lemma21:diag", "lemma21:offdiag", "coarse", "cor32:3", "bb:4.3")

# The exponent domain is open at 1; this is the working lower endpoint.
EXPONENT_MIN = 1.0 + 2.0**-10

DEFAULT_INTERVAL = (EXPONENT_MIN, EXPONENT_MAX)

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

VALUE_REL_TOL = 1e-6
MAX_REFINE_STEPS = 64
COARSE_GRID_POINTS = 8


@dataclass(frozen=True)
class ExponentProfile:
    family: str
    grid: tuple[tuple[float, float], ...]   # (exponent, value), exponents increasing
    minimizer: tuple[float, float]
    at_boundary: bool


class RankEntry(NamedTuple):
    variant: str
    rhs: float
    rel_slack: float


@dataclass(frozen=True)
class TightnessRanking:
    """Variants ordered by rhs, tightest first; ties break lexicographically."""

    entries: tuple[RankEntry, ...]

    def to_csv(self) -> str:
        lines = ["rank,variant,rhs,rel_slack"]
        for i, e in enumerate(self.entries, start=1):
            lines.append(f"{i},{e.variant},{repr(e.rhs)},{repr(e.rel_slack)}")
        return "\n".join(lines) + "\n"


def _check_domain(p: float) -> float:
    p = float(p)
    if not (1.0 < p <= EXPONENT_MAX) or not math.isfinite(p):
        raise VariantError(f"exponent {p!r} outside (1, {EXPONENT_MAX:g}]")
    return p


def _family_fn(family: str, ctx: EvalContext) -> Callable[[float], float]:
    """The profiled quantity as a function of the free exponent."""
    if family == "lemma21:diag":
        cs, gs = ctx.coeff_stats, ctx.gram_stats
        return lambda t: _diag_value(cs, gs, holder(t))
    if family == "lemma21:offdiag":
        cs, gs = ctx.coeff_stats, ctx.gram_stats
        return lambda t: _offdiag_value(cs, gs, holder(t))
    if family == "coarse":
        # Both slots share the exponent, matching the aligned special form.
        cs, gs = ctx.coeff_stats, ctx.gram_stats
        return lambda t: (
            _diag_value(cs, gs, holder(t)) + _coarse_offdiag_value(cs, gs, holder(t))
        )
    if family == "cor32:3":
        cs, gs = ctx.coeff_stats, ctx.gram_stats
        x2 = ctx.x_norm_sq
        return lambda t: x2 * _cor32_rhs_factor(cs, gs, 3, t)
    if family == "bb:4.3":
        fs, gs = ctx.fourier_stats, ctx.gram_stats
        x2 = ctx.x_norm_sq
        return lambda t: _fourier_rhs(Variant.fourier_43(t), fs, gs, x2)
    raise VariantError(f"unknown profile family {family!r}; expected one of {PROFILE_FAMILIES}")


def _golden_refine(
    fn: Callable[[float], float], lo: float, hi: float
) -> tuple[float, float]:
    """Golden-section minimum of fn over [lo, hi] in log-exponent space.

    Stops once the best value stalls within VALUE_REL_TOL (relative) or after
    MAX_REFINE_STEPS contractions; returns the best point seen, including the
    endpoints, so the result never exceeds any evaluated value.
    """
    a, b = math.log(lo), math.log(hi)
    evaluate = lambda u: fn(math.exp(u))
    best_u, best_v = a, evaluate(a)
    for u in (b,):
        v = evaluate(u)
        if v < best_v:
            best_u, best_v = u, v
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = evaluate(c), evaluate(d)
    for u, v in ((c, fc), (d, fd)):
        if v < best_v:
            best_u, best_v = u, v
    # individual contractions often fail to improve the best point, so the
    # value-based stop waits for a run of stagnant steps
    stagnant = 0
    for _ in range(MAX_REFINE_STEPS):
        previous_best = best_v
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = evaluate(c)
            if fc < best_v:
                best_u, best_v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = evaluate(d)
            if fd < best_v:
                best_u, best_v = d, fd
        if previous_best - best_v <= VALUE_REL_TOL * max(abs(best_v), 1e-300):
            stagnant += 1
            if stagnant >= 10:
                break
        else:
            stagnant = 0
    return math.exp(best_u), best_v


def _coarse_grid(lo: float, hi: float, points: int = COARSE_GRID_POINTS) -> list[float]:
    return [float(t) for t in np.geomspace(lo, hi, points)]


def _minimize(
    fn: Callable[[float], float], interval: tuple[float, float]
) -> tuple[float, float, bool]:
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise VariantError(f"invalid search interval {interval}")
    _check_domain(lo)
    _check_domain(hi)
    grid = _coarse_grid(lo, hi)
    values = [fn(t) for t in grid]
    k = min(range(len(grid)), key=lambda i: (values[i], i))
    best_t, best_v = grid[k], values[k]
    bracket_lo = grid[max(k - 1, 0)]
    bracket_hi = grid[min(k + 1, len(grid) - 1)]
    if bracket_lo < bracket_hi:
        t, v = _golden_refine(fn, bracket_lo, bracket_hi)
        if v < best_v:
            best_t, best_v = t, v
    at_boundary = abs(best_t - lo) <= 1e-9 * lo or abs(best_t - hi) <= 1e-9 * hi
    return best_t, best_v, at_boundary


def optimize_exponent(
    family: str,
    inst: ProblemInstance,
    coeffs=None,
    interval: tuple[float, float] = DEFAULT_INTERVAL,
) -> tuple[float, float, bool]:
    """Tightest exponent for one family on one instance.

    Returns ``(exponent, value, at_boundary)``.  ``at_boundary`` means the
    minimizer sits at an interval endpoint, i.e. the max- or sum-selector
    limit form is at least as tight.  The returned value never exceeds any
    coarse-grid value (the grid points are candidates themselves).
    """
    ctx = EvalContext(inst, coeffs)
    return _minimize(_family_fn(family, ctx), interval)


def profile_exponent(
    family: str,
    inst: ProblemInstance,
    coeffs=None,
    grid: Iterable[float] = (),
) -> ExponentProfile:
    """Evaluate one bound family over an exponent grid and refine its minimum.

    The minimizer is the best of the grid values and a golden-section
    refinement bracketed around the grid argmin.
    """
    ctx = EvalContext(inst, coeffs)
    fn = _family_fn(family, ctx)
    exps = sorted({_check_domain(t) for t in grid})
    if not exps:
        exps = _coarse_grid(*DEFAULT_INTERVAL)
    values = [fn(t) for t in exps]
    if any(not math.isfinite(v) for v in values):
        raise ArithmeticError(f"non-finite profile value for family {family}")
    k = min(range(len(exps)), key=lambda i: (values[i], i))
    best_t, best_v = exps[k], values[k]
    lo, hi = exps[max(k - 1, 0)], exps[min(k + 1, len(exps) - 1)]
    if lo < hi:
        t, v = _golden_refine(fn, lo, hi)
        if v < best_v:
            best_t, best_v = t, v
    at_boundary = abs(best_t - exps[0]) <= 1e-9 * exps[0] or abs(best_t - exps[-1]) <= 1e-9 * exps[-1]
    return ExponentProfile(
        family=family,
        grid=tuple(zip(exps, values)),
        minimizer=(best_t, best_v),
        at_boundary=at_boundary,
    )


# ---------------------------------------------------------------------------
# Ranking
# ---------------------------------------------------------------------------


def _optimized_rhs(variant: Variant, ctx: EvalContext) -> tuple[float, float]:
    """(lhs, rhs) with each conjugate-exponent slot independently minimized.

    Slots pinned to max or sum selectors are kept as given; only holder
    selectors and p parameters are tuned.  Each evaluated point is itself a
    valid bound, so minimization cannot break soundness.
    """
    k = variant.kind
    if k in ("lemma21", "coarse", "thm31"):
        cs, gs = ctx.coeff_stats, ctx.gram_stats
        off_fn = _offdiag_value if k in ("lemma21", "thm31") else _coarse_offdiag_value
        if variant.diag.kind == "holder":
            _, dval, _ = _minimize(lambda t: _diag_value(cs, gs, holder(t)), DEFAULT_INTERVAL)
        else:
            dval = _diag_value(cs, gs, variant.diag)
        if variant.offdiag.kind == "holder":
            _, oval, _ = _minimize(lambda t: off_fn(cs, gs, holder(t)), DEFAULT_INTERVAL)
        else:
            oval = off_fn(cs, gs, variant.offdiag)
        rhs = dval + oval
        if k == "thm31":
            return ctx.lhs_weighted, ctx.x_norm_sq * rhs
        return ctx.lhs_combination, rhs
    if k == "special_212":
        cs, gs = ctx.coeff_stats, ctx.gram_stats
        _, rhs, _ = _minimize(
            lambda t: _diag_value(cs, gs, holder(t)) + _coarse_offdiag_value(cs, gs, holder(t)),
            DEFAULT_INTERVAL,
        )
        return ctx.lhs_combination, rhs
    if k == "cor32" and variant.branch == 3:
        cs, gs = ctx.coeff_stats, ctx.gram_stats
        x2 = ctx.x_norm_sq
        _, rhs, _ = _minimize(lambda t: x2 * _cor32_rhs_factor(cs, gs, 3, t), DEFAULT_INTERVAL)
        return ctx.lhs_weighted, rhs
    if k in ("bb_43", "ortho_44"):
        if variant.orthonormal_only and not ctx.is_orthonormal:
            raise IncompatibleInstanceError("orthonormality gate")
        fs, gs = ctx.fourier_stats, ctx.gram_stats
        x2 = ctx.x_norm_sq
        ctor = Variant.fourier_43 if k == "bb_43" else Variant.ortho_44
        _, rhs, _ = _minimize(lambda t: _fourier_rhs(ctor(t), fs, gs, x2), DEFAULT_INTERVAL)
        return ctx.lhs_fourier, rhs
    return _eval_on_context(variant, ctx)


def _relative_slack(lhs: float, rhs: float) -> float:
    if lhs > 0.0:
        return (rhs - lhs) / lhs
    return 0.0 if rhs == 0.0 else math.inf


def rank_variants(
    inst: ProblemInstance,
    coeffs,
    variants: Iterable[Variant],
    policy: TolerancePolicy = DEFAULT_POLICY,
    optimize_exponents: bool = True,
) -> TightnessRanking:
    """Order a variant set by rhs on one instance, tightest first.

    Exponent slots are optimized per term by default, so two holder variants
    differing only in their pinned exponent rank identically (ties then break
    by name).  All variants must be compatible with the instance; an
    orthonormal-only variant on a general family raises.
    """
    ctx = EvalContext(inst, coeffs)
    entries = []
    for variant in tuple(variants):
        if optimize_exponents:
            lhs, rhs = _optimized_rhs(variant, ctx)
        else:
            lhs, rhs = _eval_on_context(variant, ctx)
        entries.append(RankEntry(variant.name, rhs, _relative_slack(lhs, rhs)))
    entries.sort(key=lambda e: (e.rhs, e.variant))
    return TightnessRanking(tuple(entries))
