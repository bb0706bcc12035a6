"""Bound formulas: frozen examples, brute-force oracles, and invariants.

The brute-force oracles below evaluate every term as an explicit loop over
ordered pairs, with none of the closed forms or factored power sums the
production code uses, so the two routes stay independent.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbbounds import (
    IncompatibleInstanceError,
    MAX,
    SUM,
    ProblemInstance,
    TolerancePolicy,
    ValidationError,
    Variant,
    VectorFamily,
    coarse_bound,
    combination_norm_sq,
    cor23_bounds,
    diag_term,
    evaluate_variant,
    fourier_bound,
    full_catalog,
    generate_instance,
    GenConfig,
    gram_of_family,
    holder,
    lemma21_bound,
    offdiag_term,
    orthonormalize,
    remark4_quantities,
    special_bound,
    weighted_sum_bound,
)

E1 = [1.0, 0.0]
E2 = [0.0, 1.0]

ORTHO_PAIR = VectorFamily.from_rows([E1, E2])
DUP_PAIR = VectorFamily.from_rows([E1, E1])
HALF_GRAM = np.array([[1.0, 0.5], [0.5, 1.0]], dtype=complex)
C12 = [1.0, 2.0]

SQRT2 = math.sqrt(2.0)
SQRT34 = math.sqrt(34.0)


# ---------------------------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------------------------


def brute_diag(sel, coeffs, gram_entries):
    a = [abs(c) for c in coeffs]
    d = [gram_entries[i][i].real for i in range(len(a))]
    if not a:
        return 0.0
    if sel.kind == "max":
        return max(v * v for v in a) * sum(d)
    if sel.kind == "sum":
        return sum(v * v for v in a) * max(d)
    p, q = sel.exponent, sel.conjugate
    return sum(v ** (2 * p) for v in a) ** (1 / p) * sum(v**q for v in d) ** (1 / q)


def brute_offdiag(sel, coeffs, gram_entries):
    a = [abs(c) for c in coeffs]
    n = len(a)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    if not pairs:
        return 0.0
    off = [abs(gram_entries[i][j]) for i, j in pairs]
    if sel.kind == "max":
        return max(a[i] * a[j] for i, j in pairs) * sum(off)
    if sel.kind == "sum":
        return sum(a[i] * a[j] for i, j in pairs) * max(off)
    g, dd = sel.exponent, sel.conjugate
    # double sum, not the closed form
    coeff_part = sum(a[i] ** g * a[j] ** g for i, j in pairs) ** (1 / g)
    return coeff_part * sum(o**dd for o in off) ** (1 / dd)


def brute_coarse_offdiag(sel, coeffs, gram_entries):
    a = [abs(c) for c in coeffs]
    n = len(a)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    if not pairs:
        return 0.0
    off = [abs(gram_entries[i][j]) for i, j in pairs]
    if sel.kind == "max":
        return max(v * v for v in a) * sum(off)
    if sel.kind == "sum":
        return (n - 1) * sum(v * v for v in a) * max(off)
    g, dd = sel.exponent, sel.conjugate
    return (n - 1) ** (1 / g) * sum(v ** (2 * g) for v in a) ** (1 / g) * sum(
        o**dd for o in off
    ) ** (1 / dd)


def bounded_coeffs(rng, n, ratio=10.0):
    """Coefficients whose max/min modulus ratio stays at most ``ratio``."""
    mags = rng.uniform(1.0, ratio, n)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    return mags * phases


# ---------------------------------------------------------------------------
# Frozen examples
# ---------------------------------------------------------------------------


class TestDiagTerm:
    def test_max_branch(self):
        assert diag_term(MAX, C12, gram_of_family(ORTHO_PAIR)) == pytest.approx(8.0)

    def test_holder_branch(self):
        got = diag_term(holder(2), C12, gram_of_family(ORTHO_PAIR))
        assert got == pytest.approx(SQRT34 * SQRT2 / SQRT2)  # sqrt(17)*sqrt(2)
        assert got == pytest.approx(5.8309518948453, abs=1e-12)

    def test_sum_branch(self):
        assert diag_term(SUM, C12, gram_of_family(ORTHO_PAIR)) == pytest.approx(5.0)

    def test_always_dominates_exact_diagonal_sum(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(1, 8))
            fam = rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))
            coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            g = gram_of_family(VectorFamily(fam))
            exact = sum(abs(coeffs[i]) ** 2 * g.entries[i, i].real for i in range(n))
            for sel in (MAX, holder(1.5), holder(2), holder(4), SUM):
                assert diag_term(sel, coeffs, g) >= exact * (1 - 1e-12)

    def test_bad_exponent_rejected_before_math(self):
        from bbbounds import VariantError

        with pytest.raises(VariantError):
            holder(0.5)


class TestOffdiagTerm:
    def test_max_branch_ordered_pairs_count_twice(self):
        assert offdiag_term(MAX, C12, HALF_GRAM) == pytest.approx(2.0)

    def test_holder_branch_closed_form(self):
        assert offdiag_term(holder(2), C12, HALF_GRAM) == pytest.approx(2.0)

    def test_sum_branch(self):
        assert offdiag_term(SUM, C12, HALF_GRAM) == pytest.approx(2.0)

    def test_single_vector_is_zero(self):
        assert offdiag_term(MAX, [3.0], np.array([[4.0 + 0j]])) == 0.0

    def test_orthogonal_family_is_zero(self):
        assert offdiag_term(holder(2), C12, gram_of_family(ORTHO_PAIR)) == 0.0

    def test_matches_double_sum_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            n = int(rng.integers(2, 8))
            fam = rng.standard_normal((n, 5)) + 1j * rng.standard_normal((n, 5))
            coeffs = bounded_coeffs(rng, n)
            g = gram_of_family(VectorFamily(fam))
            for sel in (MAX, holder(1.25), holder(2), holder(3), SUM):
                got = offdiag_term(sel, coeffs, g)
                want = brute_offdiag(sel, coeffs, g.entries)
                assert got == pytest.approx(want, rel=1e-12)


class TestLemma21:
    def test_orthonormal_equality_with_sum_diag(self):
        for osel in (MAX, holder(2), SUM):
            ev = lemma21_bound(SUM, osel, C12, ORTHO_PAIR)
            assert ev.lhs == pytest.approx(5.0)
            assert ev.rhs == pytest.approx(5.0)
            assert ev.holds

    def test_duplicate_vector_max_max(self):
        ev = lemma21_bound(MAX, MAX, C12, DUP_PAIR)
        assert (ev.lhs, ev.rhs) == (pytest.approx(9.0), pytest.approx(12.0))

    def test_duplicate_vector_holder_holder(self):
        ev = lemma21_bound(holder(2), holder(2), C12, DUP_PAIR)
        assert ev.lhs == pytest.approx(9.0)
        assert ev.rhs == pytest.approx(SQRT34 + 4.0)
        assert ev.holds

    def test_variant_identity(self):
        ev = lemma21_bound(holder(2), SUM, C12, DUP_PAIR)
        assert ev.variant.name == "lemma21:holder:2.0:sum"
        assert ev.slack == ev.rhs - ev.lhs


class TestCor23:
    def test_duplicate_vector_sharp_is_tight(self):
        sharp, weak = cor23_bounds(C12, DUP_PAIR)
        assert sharp.lhs == pytest.approx(9.0)
        assert sharp.rhs == pytest.approx(9.0)
        assert weak.rhs == pytest.approx(5.0 * (1.0 + SQRT2))

    def test_orthonormal_family_collapses(self):
        sharp, weak = cor23_bounds(C12, ORTHO_PAIR)
        assert sharp.rhs == weak.rhs == pytest.approx(5.0)

    def test_zero_coefficients(self):
        sharp, weak = cor23_bounds([0.0, 0.0], DUP_PAIR)
        assert (sharp.lhs, sharp.rhs, weak.rhs) == (0.0, 0.0, 0.0)
        assert sharp.holds and weak.holds

    def test_sharp_stays_sound_at_extreme_coefficient_ratios(self):
        # the ratio's bracket must not cancel away when one coefficient
        # dominates; the sharp bound would otherwise dip below the lhs
        for ratio in (1e-6, 1e-8, 3e-9, 1e-12):
            coeffs = [1.0, ratio]
            fam = VectorFamily.from_rows([[1.0, 0.0], [0.8, 0.6]])
            sharp, weak = cor23_bounds(coeffs, fam)
            assert sharp.holds, (ratio, sharp)
            assert sharp.rhs <= weak.rhs
            lhs = combination_norm_sq(coeffs, fam)
            assert sharp.rhs >= lhs * (1 - 1e-12)

    def test_chain_sharp_below_weak(self):
        rng = np.random.default_rng(23)
        for _ in range(300):
            n = int(rng.integers(1, 9))
            fam = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
            coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            sharp, weak = cor23_bounds(coeffs, VectorFamily(fam))
            assert sharp.rhs <= weak.rhs + 1e-12
            assert sharp.holds and weak.holds


class TestCoarseAndSpecials:
    def test_special_213(self):
        ev = special_bound(Variant.special_213(), C12, DUP_PAIR)
        assert (ev.lhs, ev.rhs) == (pytest.approx(9.0), pytest.approx(10.0))

    def test_special_211(self):
        ev = special_bound(Variant.special_211(), C12, DUP_PAIR)
        assert ev.rhs == pytest.approx(16.0)

    def test_special_212_p2(self):
        ev = special_bound(Variant.special_212(2.0), C12, DUP_PAIR)
        assert ev.rhs == pytest.approx(2.0 * SQRT34)

    def test_specials_are_aligned_coarse_bounds(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            n = int(rng.integers(1, 8))
            fam = rng.standard_normal((n, 4))
            coeffs = rng.standard_normal(n)
            famv = VectorFamily(fam.astype(complex))
            s211 = special_bound(Variant.special_211(), coeffs, famv).rhs
            s212 = special_bound(Variant.special_212(1.5), coeffs, famv).rhs
            s213 = special_bound(Variant.special_213(), coeffs, famv).rhs
            assert s211 == coarse_bound(MAX, MAX, coeffs, famv).rhs
            assert s212 == coarse_bound(holder(1.5), holder(1.5), coeffs, famv).rhs
            assert s213 == coarse_bound(SUM, SUM, coeffs, famv).rhs

    def test_coarse_dominates_lemma_pointwise(self):
        rng = np.random.default_rng(37)
        selectors = (MAX, holder(1.25), holder(2), holder(3), SUM)
        for k in range(200):
            n = int(rng.integers(1, 9))
            fam = rng.standard_normal((n, 4)) + (1j if k % 2 else 0) * rng.standard_normal((n, 4))
            coeffs = rng.standard_normal(n) + (1j if k % 2 else 0) * rng.standard_normal(n)
            famv = VectorFamily(fam.astype(complex))
            for dsel in selectors:
                for osel in selectors:
                    fine = lemma21_bound(dsel, osel, coeffs, famv)
                    coarse = coarse_bound(dsel, osel, coeffs, famv)
                    assert coarse.rhs - fine.rhs >= -1e-12
                    assert fine.holds and coarse.holds

    def test_coarse_offdiag_matches_oracle(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            n = int(rng.integers(2, 8))
            fam = rng.standard_normal((n, 5)) + 1j * rng.standard_normal((n, 5))
            coeffs = bounded_coeffs(rng, n)
            g = gram_of_family(VectorFamily(fam))
            for sel in (MAX, holder(1.5), holder(2), SUM):
                got = coarse_bound(sel, sel, coeffs, g).rhs
                want = brute_diag(sel, coeffs, g.entries) + brute_coarse_offdiag(
                    sel, coeffs, g.entries
                )
                assert got == pytest.approx(want, rel=1e-12)


class TestWeightedSum:
    @pytest.fixture
    def basis_instance(self):
        return ProblemInstance.from_vectors([1.0, 0.0], ORTHO_PAIR, field_mode="real")

    def test_thm31_sum_sum(self, basis_instance):
        ev = weighted_sum_bound(Variant.thm31(SUM, SUM), [1.0, 1.0], basis_instance)
        assert (ev.lhs, ev.rhs) == (pytest.approx(1.0), pytest.approx(2.0))

    def test_cor32_branch_2(self, basis_instance):
        ev = weighted_sum_bound(Variant.cor32(2), [1.0, 1.0], basis_instance)
        assert (ev.lhs, ev.rhs) == (pytest.approx(1.0), pytest.approx(2.0))

    def test_zero_coefficients_equality(self, basis_instance):
        ev = weighted_sum_bound(Variant.thm31(MAX, MAX), [0.0, 0.0], basis_instance)
        assert (ev.lhs, ev.rhs) == (0.0, 0.0)
        assert ev.holds

    def test_length_mismatch(self, basis_instance):
        with pytest.raises(ValidationError):
            weighted_sum_bound(Variant.cor32(1), [1.0], basis_instance)

    def test_wrong_family_rejected(self, basis_instance):
        with pytest.raises(ValidationError):
            weighted_sum_bound(Variant.bessel(), [1.0, 1.0], basis_instance)

    def test_thm31_matches_term_oracles(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            n, d = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            fam = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
            c = bounded_coeffs(rng, n)
            inst = ProblemInstance.from_vectors(x, fam)
            for dsel, osel in ((MAX, SUM), (holder(2), holder(1.5)), (SUM, MAX)):
                ev = weighted_sum_bound(Variant.thm31(dsel, osel), c, inst)
                g = inst.family_gram.entries
                want = inst.x_norm_sq * (brute_diag(dsel, c, g) + brute_offdiag(osel, c, g))
                assert ev.rhs == pytest.approx(want, rel=1e-12)
                assert ev.lhs == pytest.approx(abs(np.dot(c, inst.fourier)) ** 2, rel=1e-12)
                assert ev.holds


class TestFourier:
    def test_bessel_recovery_on_basis(self):
        inst = ProblemInstance.from_vectors([1.0, 0.0], ORTHO_PAIR, field_mode="real")
        ev = fourier_bound(Variant.fourier_45(), inst)
        assert (ev.lhs, ev.rhs) == (pytest.approx(1.0), pytest.approx(1.0))

    def test_ortho_42(self):
        inst = ProblemInstance.from_vectors([1.0, 0.0], ORTHO_PAIR, field_mode="real")
        ev = fourier_bound(Variant.ortho_42(), inst)
        assert ev.lhs == pytest.approx(1.0)
        assert ev.rhs == pytest.approx(SQRT2)

    def test_boas_bellman_on_duplicate_family(self):
        inst = ProblemInstance.from_vectors([1.0, 0.0], DUP_PAIR, field_mode="real")
        ev = fourier_bound(Variant.boas_bellman(), inst)
        assert ev.lhs == pytest.approx(2.0)
        assert ev.rhs == pytest.approx(1.0 + SQRT2)

    def test_orthonormal_gate(self):
        inst = ProblemInstance.from_vectors([1.0, 0.0], DUP_PAIR, field_mode="real")
        for variant in (Variant.bessel(), Variant.ortho_42(), Variant.ortho_44(2.0)):
            with pytest.raises(IncompatibleInstanceError, match="orthonormality gate"):
                fourier_bound(variant, inst)

    def test_wrong_family_rejected(self):
        inst = ProblemInstance.from_vectors([1.0, 0.0], ORTHO_PAIR, field_mode="real")
        with pytest.raises(ValidationError):
            fourier_bound(Variant.cor32(1), inst)

    def test_mpf_specialization_relations(self):
        # With c_i = conj((x, y_i)), each Fourier bound is the corresponding
        # weighted bound after dividing by sum |c|^2 or taking a square root.
        rng = np.random.default_rng(47)
        for k in range(200):
            n, d = int(rng.integers(1, 8)), int(rng.integers(1, 8))
            complex_field = bool(k % 2)
            x = rng.standard_normal(d) + (1j if complex_field else 0) * rng.standard_normal(d)
            fam = rng.standard_normal((n, d)) + (
                1j if complex_field else 0
            ) * rng.standard_normal((n, d))
            inst = ProblemInstance.from_vectors(x, fam)
            c = np.conj(inst.fourier)
            s = float(np.sum(np.abs(c) ** 2))
            if s == 0.0:
                continue
            b1 = weighted_sum_bound(Variant.cor32(1), c, inst)
            bb12 = fourier_bound(Variant.boas_bellman(), inst)
            assert b1.rhs == pytest.approx(s * bb12.rhs, rel=1e-10)
            assert b1.lhs == pytest.approx(s * bb12.lhs, rel=1e-10)
            b2 = weighted_sum_bound(Variant.cor32(2), c, inst)
            bb41 = fourier_bound(Variant.fourier_41(), inst)
            assert bb41.rhs == pytest.approx(math.sqrt(b2.rhs), rel=1e-10)
            b3 = weighted_sum_bound(Variant.cor32(3, 2.0), c, inst)
            bb43 = fourier_bound(Variant.fourier_43(2.0), inst)
            assert bb43.rhs == pytest.approx(math.sqrt(b3.rhs), rel=1e-10)
            b4 = weighted_sum_bound(Variant.cor32(4), c, inst)
            bb45 = fourier_bound(Variant.fourier_45(), inst)
            assert b4.rhs == pytest.approx(s * bb45.rhs, rel=1e-10)

    def test_ortho_bounds_on_orthonormalized_families(self):
        rng = np.random.default_rng(53)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            d = int(rng.integers(n, 9))
            raw = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
            fam = orthonormalize(VectorFamily(raw))
            x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            inst = ProblemInstance.from_vectors(x, fam)
            for variant in (
                Variant.bessel(),
                Variant.ortho_42(),
                Variant.ortho_44(1.25),
                Variant.ortho_44(4.0),
            ):
                assert fourier_bound(variant, inst).holds


class TestRemark4:
    def test_equal_triple(self):
        a, b = remark4_quantities(gram_of_family(VectorFamily.from_rows([[1.0], [1.0], [1.0]])))
        assert a == pytest.approx(math.sqrt(6.0), abs=1e-15)
        assert b == pytest.approx(2.0, abs=1e-15)
        assert a > b

    def test_half_triple(self):
        a, b = remark4_quantities(VectorFamily.from_rows([[1.0], [0.5], [1.0]]))
        assert a == pytest.approx(math.sqrt(3.0), abs=1e-15)
        assert b == pytest.approx(2.0, abs=1e-15)
        assert b > a

    def test_orthonormal_family_vanishes(self):
        assert remark4_quantities(ORTHO_PAIR) == (0.0, 0.0)

    def test_requires_two_vectors(self):
        with pytest.raises(ValidationError):
            remark4_quantities(VectorFamily.from_rows([[1.0]]))

    def test_ordering_invariant_under_scaling(self):
        rng = np.random.default_rng(59)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            fam = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
            a0, b0 = remark4_quantities(VectorFamily(fam))
            for s in (1e-3, 7.0, 1e3):
                a1, b1 = remark4_quantities(VectorFamily(s * fam))
                assert np.sign(a1 - b1) == np.sign(a0 - b0)


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------

positive_lists = st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=1, max_size=8)


class TestProofStepIdentity:
    @settings(max_examples=200, deadline=None)
    @given(positive_lists, st.sampled_from([1.0, 1.5, 2.0, 3.0]))
    def test_closed_form_equals_double_sum(self, mags, gamma):
        from bbbounds.bounds import CoeffStats

        cs = CoeffStats(mags)
        n = len(mags)
        double = sum(
            mags[i] ** gamma * mags[j] ** gamma for i in range(n) for j in range(n) if i != j
        )
        if gamma == 1.0:
            closed = cs.sum_bracket
        else:
            closed = cs.holder_bracket_root(gamma) ** gamma
        assert abs(closed - double) <= 1e-12 * max(double, 1.0)


class TestCoarseningLemmas:
    @settings(max_examples=200, deadline=None)
    @given(positive_lists)
    def test_cauchy_bunyakovsky_schwarz_square(self, a):
        n = len(a)
        assert sum(a) ** 2 <= n * sum(v * v for v in a) * (1 + 1e-12)

    @settings(max_examples=200, deadline=None)
    @given(positive_lists, st.sampled_from([1.0, 1.5, 2.0, 3.0]))
    def test_power_bracket_versus_n_minus_one(self, a, gamma):
        # fp slack scales with s2: pow(v, g)**2 and pow(v, 2g) round differently
        n = len(a)
        s1 = sum(v**gamma for v in a)
        s2 = sum(v ** (2 * gamma) for v in a)
        assert s1 * s1 - s2 <= (n - 1) * s2 + 1e-12 * max(s2, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(positive_lists)
    def test_sum_bracket_versus_n_minus_one(self, a):
        n = len(a)
        s1, s2 = sum(a), sum(v * v for v in a)
        assert s1 * s1 - s2 <= (n - 1) * s2 + 1e-12 * max(s2, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=2, max_size=8))
    def test_max_pair_product_below_max_square(self, a):
        n = len(a)
        pair_max = max(a[i] * a[j] for i in range(n) for j in range(n) if i != j)
        assert pair_max <= max(v * v for v in a)


class TestScaleCovariance:
    def test_coefficient_and_family_scaling(self):
        rng = np.random.default_rng(61)
        variants = [
            Variant.lemma21(MAX, holder(2)),
            Variant.lemma21(holder(1.5), SUM),
            Variant.coarse(SUM, holder(3)),
            Variant.cor23_sharp(),
            Variant.special_212(2.0),
        ]
        for _ in range(20):
            n = int(rng.integers(1, 7))
            fam = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
            coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            for t, s in ((2.0, 1.0), (1.0, 3.0), (0.25, 8.0)):
                base = ProblemInstance.from_vectors(x, fam)
                scaled = ProblemInstance.from_vectors(x, s * fam)
                for variant in variants:
                    ev0 = evaluate_variant(variant, base, coeffs)
                    ev1 = evaluate_variant(variant, scaled, t * coeffs)
                    factor = t * t * s * s
                    assert ev1.lhs == pytest.approx(factor * ev0.lhs, rel=1e-9)
                    assert ev1.rhs == pytest.approx(factor * ev0.rhs, rel=1e-9)


class TestHolderLimits:
    def test_extreme_exponents_never_collapse_the_cross_term(self):
        # with one dominant coefficient, (sum a^g)^2 - sum a^(2g) suffers
        # total cancellation if evaluated naively; the term must stay at or
        # above its max-selector limit, the dominant pair product
        for ratio in (0.5, 1e-3, 1e-9, 1e-300):
            coeffs = [1.0, ratio]
            for g in (4.0, 16.0, 64.0):
                got = offdiag_term(holder(g), coeffs, HALF_GRAM)
                floor = ratio * 2.0 ** (1.0 / g) * 0.5  # pair product * norm_off limit
                assert got >= floor * (1 - 1e-12), (ratio, g, got)
                exact_cross = 2 * ratio * 0.5  # ordered double sum
                assert got >= exact_cross * (1 - 1e-12)

    def test_soundness_with_extreme_exponent_variants(self):
        extreme = full_catalog(exponents=(1.0009765625, 64.0))
        config = GenConfig(master_seed=271828, count=150, field_mode="both")
        for index in range(config.count):
            inst, coeffs = generate_instance(config, index)
            # amplify one coefficient so power sums become one-sided
            if inst.n >= 2:
                coeffs = coeffs.copy()
                coeffs[0] *= 1e6
            for variant in extreme:
                try:
                    ev = evaluate_variant(variant, inst, coeffs)
                except IncompatibleInstanceError:
                    continue
                assert ev.holds, (variant.name, index, ev)

    def test_exponent_64_close_to_max_branch(self):
        rng = np.random.default_rng(67)
        for _ in range(300):
            n = int(rng.integers(1, 9))
            fam = rng.standard_normal((n, 5)) + 1j * rng.standard_normal((n, 5))
            coeffs = bounded_coeffs(rng, n, ratio=10.0)
            g = gram_of_family(VectorFamily(fam))
            at_max = diag_term(MAX, coeffs, g)
            at_64 = diag_term(holder(64.0), coeffs, g)
            assert abs(at_64 - at_max) <= 0.05 * at_max


class TestSoundnessSweep:
    def test_full_catalog_holds_on_random_instances(self):
        catalog = full_catalog()
        config = GenConfig(master_seed=12345, count=300, field_mode="both")
        for index in range(config.count):
            inst, coeffs = generate_instance(config, index)
            for variant in catalog:
                try:
                    ev = evaluate_variant(variant, inst, coeffs)
                except IncompatibleInstanceError:
                    continue
                assert ev.holds, (variant.name, index, ev)

    def test_strict_policy_still_passes(self):
        # rounding never eats more than a hair of slack
        policy = TolerancePolicy(tol_abs=1e-13, tol_rel=1e-12)
        config = GenConfig(master_seed=999, count=100, field_mode="both")
        for index in range(config.count):
            inst, coeffs = generate_instance(config, index)
            for variant in full_catalog():
                try:
                    ev = evaluate_variant(variant, inst, coeffs, policy)
                except IncompatibleInstanceError:
                    continue
                assert ev.holds, (variant.name, index, ev)
