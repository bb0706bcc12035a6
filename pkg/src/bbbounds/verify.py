"""Seeded instance generation and catalog-wide inequality checking.

The harness contract is determinism: an instance is a pure function of
``(master_seed, index)``, every check is a pure function of its inputs, and a
suite report is a pure function of ``(config, variants, policy)``.  Violations
are collected with full instance payloads rather than raised; a violated
inequality is the most valuable output the suite can produce, since every
bound in the catalog is a theorem.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .bounds import (
    BoundEvaluation,
    DEFAULT_POLICY,
    EvalContext,
    IncompatibleInstanceError,
    TolerancePolicy,
    _eval_on_context,
    _evaluation,
    remark4_quantities,
)
from .space import ProblemInstance, instance_to_jsonable
from .variants import Variant

__all__ = [
    "GenConfig",
    "generate_instance",
    "VerificationResult",
    "check_variant",
    "VariantTotals",
    "SuiteReport",
    "run_suite",
    "RemarkWitness",
    "SearchBudgetError",
    "search_incomparability",
    "remark_comparison_rows",
]


@dataclass(frozen=True)
class GenConfig:
    """Parameters of the seeded instance stream."""

    n_range: tuple[int, int] = (1, 8)
    d_range: tuple[int, int] = (1, 8)
    field_mode: str = "both"          # "real" | "complex" | "both"
    scale: float = 1.0
    structured_families: bool = False
    master_seed: int = 0
    count: int = 1

    def __post_init__(self) -> None:
        n_lo, n_hi = self.n_range
        d_lo, d_hi = self.d_range
        if not (0 <= n_lo <= n_hi):
            raise ValueError(f"empty n_range {self.n_range}")
        if not (1 <= d_lo <= d_hi):
            raise ValueError(f"empty or invalid d_range {self.d_range}")
        if self.field_mode not in ("real", "complex", "both"):
            raise ValueError(f"unknown field_mode {self.field_mode!r}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if not (0 <= self.master_seed < 2**64):
            raise ValueError("master_seed must fit in 64 unsigned bits")


def _rng_for(config: GenConfig, index: int) -> np.random.Generator:
    # Counter-mode derivation: hashing (seed, index) makes any instance
    # reproducible in isolation, so evaluation order and parallelism cannot
    # change the stream.
    return np.random.default_rng(np.random.SeedSequence([config.master_seed, index]))


def _draw(rng: np.random.Generator, shape, complex_field: bool, scale: float) -> np.ndarray:
    re = rng.standard_normal(shape)
    if complex_field:
        return (re + 1j * rng.standard_normal(shape)) * scale
    return (re * scale).astype(np.complex128)


def _structured_triple(rng: np.random.Generator, index: int, scale: float) -> tuple[float, float, float]:
    if index == 0:
        return (1.0, 1.0, 1.0)
    if index == 1:
        return (1.0, 0.5, 1.0)
    return tuple(float(abs(v)) * scale for v in rng.standard_normal(3))


def generate_instance(config: GenConfig, index: int) -> tuple[ProblemInstance, np.ndarray]:
    """The instance and coefficient vector at position ``index`` of the stream.

    Components are standard normal per real/imaginary part, times
    ``config.scale``.  With structured families enabled, indices 0 and 1 are
    the two canonical positive scalar triples (1, 1, 1) and (1, 1/2, 1), and
    every later even index is a random positive scalar triple; odd indices
    stay generic so the stream keeps covering the full shape space.
    """
    if not 0 <= index < config.count:
        raise ValueError(f"index {index} outside [0, {config.count})")
    rng = _rng_for(config, index)
    if config.structured_families and (index < 2 or index % 2 == 0):
        triple = _structured_triple(rng, index, config.scale)
        x = (rng.standard_normal(1) * config.scale).astype(np.complex128)
        fam = np.array([[v] for v in triple], dtype=np.complex128)
        coeffs = (rng.standard_normal(3) * config.scale).astype(np.complex128)
        inst = ProblemInstance.from_vectors(x, fam, field_mode="real")
        return inst, coeffs
    n_lo, n_hi = config.n_range
    d_lo, d_hi = config.d_range
    n = int(rng.integers(n_lo, n_hi + 1))
    d = int(rng.integers(d_lo, d_hi + 1))
    if config.field_mode == "both":
        field_mode = "complex" if rng.integers(0, 2) else "real"
    else:
        field_mode = config.field_mode
    complex_field = field_mode == "complex"
    x = _draw(rng, d, complex_field, config.scale)
    fam = _draw(rng, (n, d), complex_field, config.scale)
    coeffs = _draw(rng, n, complex_field, config.scale)
    inst = ProblemInstance.from_vectors(x, fam, field_mode=field_mode)
    return inst, coeffs


class VerificationResult(NamedTuple):
    instance_id: int
    variant: str
    evaluation: BoundEvaluation | None  # None when the variant was skipped
    skip_reason: str | None
    elapsed: float

    @property
    def skipped(self) -> bool:
        return self.evaluation is None


def check_variant(
    variant: Variant,
    inst: ProblemInstance,
    coeffs=None,
    policy: TolerancePolicy = DEFAULT_POLICY,
    instance_id: int = 0,
) -> VerificationResult:
    """Evaluate one variant on one instance; incompatibilities become skips.

    A skip (missing coefficients, or an orthonormal-only variant on a
    non-orthonormal family) is recorded with its reason, never as a violation.
    """
    start = time.perf_counter()
    ctx = EvalContext(inst, coeffs)
    try:
        lhs, rhs = _eval_on_context(variant, ctx)
    except IncompatibleInstanceError as exc:
        return VerificationResult(instance_id, variant.name, None, exc.reason, time.perf_counter() - start)
    ev = _evaluation(variant, lhs, rhs, policy)
    return VerificationResult(instance_id, variant.name, ev, None, time.perf_counter() - start)


@dataclass
class VariantTotals:
    checked: int = 0
    held: int = 0
    violated: int = 0
    skipped: int = 0
    min_slack: float = float("nan")
    min_rel_slack: float = float("nan")

    def record(self, lhs: float, rhs: float, slack: float, holds: bool) -> None:
        self.checked += 1
        if holds:
            self.held += 1
        else:
            self.violated += 1
        rel = slack / max(lhs, rhs, 1e-300)
        if not (self.min_slack <= slack):      # also true on the first sample
            self.min_slack = slack
        if not (self.min_rel_slack <= rel):
            self.min_rel_slack = rel


@dataclass
class SuiteReport:
    """Totals per variant plus the full payload of every violation."""

    config: GenConfig
    policy: TolerancePolicy
    variant_names: tuple[str, ...]
    totals: dict[str, VariantTotals] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)

    @property
    def checked(self) -> int:
        return sum(t.checked for t in self.totals.values())

    @property
    def violated(self) -> int:
        return sum(t.violated for t in self.totals.values())

    def to_csv(self) -> str:
        lines = ["variant,checked,held,violated,min_slack,min_rel_slack"]
        for name in sorted(self.totals):
            t = self.totals[name]
            lines.append(
                f"{name},{t.checked},{t.held},{t.violated},"
                f"{repr(t.min_slack)},{repr(t.min_rel_slack)}"
            )
        return "\n".join(lines) + "\n"

    def to_jsonable(self) -> dict:
        return {
            "config": {
                "n_range": list(self.config.n_range),
                "d_range": list(self.config.d_range),
                "field_mode": self.config.field_mode,
                "scale": self.config.scale,
                "structured_families": self.config.structured_families,
                "master_seed": self.config.master_seed,
                "count": self.config.count,
            },
            "policy": {"tol_abs": self.policy.tol_abs, "tol_rel": self.policy.tol_rel},
            "variants": {
                name: {
                    "checked": t.checked,
                    "held": t.held,
                    "violated": t.violated,
                    "skipped": t.skipped,
                    "min_slack": None if t.checked == 0 else t.min_slack,
                    "min_rel_slack": None if t.checked == 0 else t.min_rel_slack,
                }
                for name, t in sorted(self.totals.items())
            },
            "violations": self.violations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2, sort_keys=True) + "\n"


def _check_instance(
    config: GenConfig,
    index: int,
    variants: tuple[Variant, ...],
    policy: TolerancePolicy,
) -> tuple[list[tuple[str, float, float, float, bool] | tuple[str, str]], list[dict]]:
    """Rows for one instance: either (name, lhs, rhs, slack, holds) or (name, reason)."""
    inst, coeffs = generate_instance(config, index)
    ctx = EvalContext(inst, coeffs)
    rows: list = []
    violations: list[dict] = []
    for variant in variants:
        try:
            lhs, rhs = _eval_on_context(variant, ctx)
        except IncompatibleInstanceError as exc:
            rows.append((variant.name, exc.reason))
            continue
        slack = rhs - lhs
        ok = policy.holds(lhs, rhs)
        rows.append((variant.name, lhs, rhs, slack, ok))
        if not ok:
            violations.append(
                {
                    "instance_id": index,
                    "variant": variant.name,
                    "lhs": lhs,
                    "rhs": rhs,
                    "slack": slack,
                    "instance": instance_to_jsonable(inst, coeffs),
                }
            )
    return rows, violations


def run_suite(
    config: GenConfig,
    variants: Iterable[Variant],
    policy: TolerancePolicy = DEFAULT_POLICY,
    jobs: int = 1,
) -> SuiteReport:
    """Check every compatible (instance, variant) pair in the stream.

    ``jobs`` fans instance evaluation out over a thread pool; the report is
    reduced in instance order either way, so the output does not depend on
    the parallelism level.
    """
    variants = tuple(variants)
    report = SuiteReport(config, policy, tuple(v.name for v in variants))
    totals = {v.name: VariantTotals() for v in variants}
    report.totals = totals

    def one(index: int):
        return _check_instance(config, index, variants, policy)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(one, range(config.count))
            per_instance = list(results)
    else:
        per_instance = [one(i) for i in range(config.count)]

    for rows, violations in per_instance:
        for row in rows:
            if len(row) == 2:
                totals[row[0]].skipped += 1
            else:
                name, lhs, rhs, slack, ok = row
                totals[name].record(lhs, rhs, slack, ok)
        report.violations.extend(violations)
    report.violations.sort(key=lambda v: (v["instance_id"], v["variant"]))
    return report


class RemarkWitness(NamedTuple):
    instance_id: int
    a_value: float
    b_value: float
    instance: ProblemInstance


class SearchBudgetError(RuntimeError):
    """The search budget ran out before both orderings were witnessed."""


def search_incomparability(config: GenConfig) -> tuple[RemarkWitness, RemarkWitness]:
    """Find one instance with A > B and one with B > A.

    A is the ordered 2-norm of the off-diagonal Gram entries, B is
    ``(n - 1) * max``; exhibiting both orderings shows the two bounds they
    complete are incomparable.  With structured families enabled the two
    canonical triples at indices 0 and 1 settle the search deterministically.
    Raises :class:`SearchBudgetError` if the stream of ``config.count``
    instances does not contain both witnesses.
    """
    first_a: RemarkWitness | None = None
    first_b: RemarkWitness | None = None
    for index in range(config.count):
        inst, _ = generate_instance(config, index)
        if inst.n < 2:
            continue
        a, b = remark4_quantities(inst.family_gram)
        if a > b and first_a is None:
            first_a = RemarkWitness(index, a, b, inst)
        elif b > a and first_b is None:
            first_b = RemarkWitness(index, a, b, inst)
        if first_a and first_b:
            return first_a, first_b
    found = []
    if first_a:
        found.append("A > B")
    if first_b:
        found.append("B > A")
    raise SearchBudgetError(
        f"searched {config.count} instances, found only {found or 'neither ordering'}"
    )


def remark_comparison_rows() -> list[tuple[tuple[float, float, float], float, float]]:
    """The two canonical scalar triples with their (A, B) values.

    (1, 1, 1) gives A = sqrt(6) > B = 2; (1, 1/2, 1) gives A = sqrt(3) < B = 2.
    """
    rows = []
    for triple in ((1.0, 1.0, 1.0), (1.0, 0.5, 1.0)):
        fam = np.array([[v] for v in triple], dtype=np.complex128)
        inst = ProblemInstance.from_vectors(np.array([1.0 + 0.0j]), fam, field_mode="real")
        a, b = remark4_quantities(inst.family_gram)
        rows.append((triple, a, b))
    return rows
