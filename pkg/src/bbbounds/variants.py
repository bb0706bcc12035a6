"""Identifiers for the bound catalog and their wire-format names.

Each variant names one concrete inequality.  The combination bounds come in a
3 x 3 grid: a diagonal selector (how the ``|c_i|^2 |z_i|^2`` sum is bounded)
paired with an off-diagonal selector (how the ordered cross-term sum is
bounded).  Both selectors have the same three branches: factor out the max,
split by conjugate exponents, or factor out the other side's max.

Names are stable strings used verbatim by the CLI and in reports, e.g.
``lemma21:holder:2.0:max`` or ``cor32:3:p=1.5``.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "EXPONENT_MAX",
    "DEFAULT_EXPONENTS",
    "VariantError",
    "conjugate_exponent",
    "Selector",
    "MAX",
    "SUM",
    "holder",
    "Variant",
    "parse_variant",
    "parse_variant_list",
    "full_catalog",
]

# Conjugate-exponent domain: open at 1, capped where the power sums become
# numerically indistinguishable from the max-selector limit.
EXPONENT_MAX = 64.0

DEFAULT_EXPONENTS = (1.25, 1.5, 2.0, 3.0, 4.0)


class VariantError(ValueError):
    """Unknown variant name, malformed selector, or exponent out of domain."""


def _check_exponent(value) -> float:
    try:
        p = float(value)
    except (TypeError, ValueError):
        raise VariantError(f"exponent must be a number, got {value!r}") from None
    if not (1.0 < p <= EXPONENT_MAX):
        raise VariantError(f"exponent must lie in (1, {EXPONENT_MAX:g}], got {value!r}")
    return p


def conjugate_exponent(p: float) -> float:
    """The q with 1/p + 1/q = 1."""
    return p / (p - 1.0)


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class Selector:
    """One branch choice for a diagonal or off-diagonal term."""

    kind: str                     # "max" | "holder" | "sum"
    exponent: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("max", "holder", "sum"):
            raise VariantError(f"unknown selector kind {self.kind!r}")
        if self.kind == "holder":
            object.__setattr__(self, "exponent", _check_exponent(self.exponent))
        elif self.exponent is not None:
            raise VariantError(f"selector {self.kind!r} does not take an exponent")

    @property
    def conjugate(self) -> float:
        if self.kind != "holder":
            raise VariantError(f"selector {self.kind!r} has no conjugate exponent")
        return conjugate_exponent(self.exponent)

    @property
    def name(self) -> str:
        if self.kind == "holder":
            return f"holder:{_fmt(self.exponent)}"
        return self.kind


MAX = Selector("max")
SUM = Selector("sum")


def holder(p: float) -> Selector:
    return Selector("holder", p)


_SELECTOR_KINDS = {
    "lemma21": "combination",
    "cor23_sharp": "combination",
    "cor23_weak": "combination",
    "coarse": "combination",
    "special_211": "combination",
    "special_212": "combination",
    "special_213": "combination",
    "thm31": "weighted",
    "cor32": "weighted",
    "bb_12": "fourier",
    "bb_41": "fourier",
    "bb_43": "fourier",
    "bb_45": "fourier",
    "ortho_42": "fourier",
    "ortho_44": "fourier",
    "bessel_11": "fourier",
}

_NEEDS_SELECTORS = {"lemma21", "coarse", "thm31"}
_NEEDS_P = {"special_212", "bb_43", "ortho_44"}
_ORTHONORMAL_ONLY = {"ortho_42", "ortho_44", "bessel_11"}


@dataclass(frozen=True)
class Variant:
    """A tagged bound identifier; construct via the classmethods below."""

    kind: str
    diag: Selector | None = None
    offdiag: Selector | None = None
    branch: int | None = None
    p: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _SELECTOR_KINDS:
            raise VariantError(f"unknown variant kind {self.kind!r}")
        needs_sel = self.kind in _NEEDS_SELECTORS
        if needs_sel != (self.diag is not None) or needs_sel != (self.offdiag is not None):
            raise VariantError(f"variant {self.kind!r}: selector arguments are wrong")
        if self.kind == "cor32":
            if self.branch not in (1, 2, 3, 4):
                raise VariantError(f"cor32 branch must be 1..4, got {self.branch!r}")
            if (self.branch == 3) != (self.p is not None):
                raise VariantError("cor32 takes an exponent exactly for branch 3")
        elif self.branch is not None:
            raise VariantError(f"variant {self.kind!r} does not take a branch")
        needs_p = self.kind in _NEEDS_P or (self.kind == "cor32" and self.branch == 3)
        if needs_p != (self.p is not None):
            raise VariantError(f"variant {self.kind!r}: exponent argument is wrong")
        if self.p is not None:
            object.__setattr__(self, "p", _check_exponent(self.p))

    # -- constructors -------------------------------------------------------

    @classmethod
    def lemma21(cls, diag: Selector, offdiag: Selector) -> "Variant":
        return cls("lemma21", diag=diag, offdiag=offdiag)

    @classmethod
    def cor23_sharp(cls) -> "Variant":
        return cls("cor23_sharp")

    @classmethod
    def cor23_weak(cls) -> "Variant":
        return cls("cor23_weak")

    @classmethod
    def coarse(cls, diag: Selector, offdiag: Selector) -> "Variant":
        return cls("coarse", diag=diag, offdiag=offdiag)

    @classmethod
    def special_211(cls) -> "Variant":
        return cls("special_211")

    @classmethod
    def special_212(cls, p: float) -> "Variant":
        return cls("special_212", p=p)

    @classmethod
    def special_213(cls) -> "Variant":
        return cls("special_213")

    @classmethod
    def thm31(cls, diag: Selector, offdiag: Selector) -> "Variant":
        return cls("thm31", diag=diag, offdiag=offdiag)

    @classmethod
    def cor32(cls, branch: int, p: float | None = None) -> "Variant":
        return cls("cor32", branch=branch, p=p)

    @classmethod
    def boas_bellman(cls) -> "Variant":
        return cls("bb_12")

    @classmethod
    def fourier_41(cls) -> "Variant":
        return cls("bb_41")

    @classmethod
    def fourier_43(cls, p: float) -> "Variant":
        return cls("bb_43", p=p)

    @classmethod
    def fourier_45(cls) -> "Variant":
        return cls("bb_45")

    @classmethod
    def ortho_42(cls) -> "Variant":
        return cls("ortho_42")

    @classmethod
    def ortho_44(cls, p: float) -> "Variant":
        return cls("ortho_44", p=p)

    @classmethod
    def bessel(cls) -> "Variant":
        return cls("bessel_11")

    # -- metadata -----------------------------------------------------------

    @property
    def family(self) -> str:
        """"combination", "weighted", or "fourier" (which lhs the bound caps)."""
        return _SELECTOR_KINDS[self.kind]

    @property
    def requires_coeffs(self) -> bool:
        return self.family in ("combination", "weighted")

    @property
    def orthonormal_only(self) -> bool:
        return self.kind in _ORTHONORMAL_ONLY

    @property
    def name(self) -> str:
        k = self.kind
        if k == "lemma21":
            return f"lemma21:{self.diag.name}:{self.offdiag.name}"
        if k == "cor23_sharp":
            return "cor23:sharp"
        if k == "cor23_weak":
            return "cor23:weak"
        if k == "coarse":
            return f"coarse:{self.diag.name}:{self.offdiag.name}"
        if k == "special_211":
            return "special:2.11"
        if k == "special_212":
            return f"special:2.12:p={_fmt(self.p)}"
        if k == "special_213":
            return "special:2.13"
        if k == "thm31":
            return f"thm31:{self.diag.name}:{self.offdiag.name}"
        if k == "cor32":
            if self.branch == 3:
                return f"cor32:3:p={_fmt(self.p)}"
            return f"cor32:{self.branch}"
        if k == "bb_12":
            return "bb:1.2"
        if k == "bb_41":
            return "bb:4.1"
        if k == "bb_43":
            return f"bb:4.3:p={_fmt(self.p)}"
        if k == "bb_45":
            return "bb:4.5"
        if k == "ortho_42":
            return "ortho:4.2"
        if k == "ortho_44":
            return f"ortho:4.4:p={_fmt(self.p)}"
        return "bessel:1.1"

    def __str__(self) -> str:
        return self.name


def _take_selector(tokens: list[str], i: int, text: str) -> tuple[Selector, int]:
    if i >= len(tokens):
        raise VariantError(f"{text!r}: missing selector")
    tok = tokens[i]
    if tok in ("max", "sum"):
        return Selector(tok), i + 1
    if tok == "holder":
        if i + 1 >= len(tokens):
            raise VariantError(f"{text!r}: holder selector needs an exponent")
        return holder(_parse_float(tokens[i + 1], text)), i + 2
    raise VariantError(f"{text!r}: unknown selector {tok!r}")


def _parse_float(tok: str, text: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise VariantError(f"{text!r}: {tok!r} is not a number") from None


def _parse_p(tok: str, text: str) -> float:
    if not tok.startswith("p="):
        raise VariantError(f"{text!r}: expected p=<float>, got {tok!r}")
    return _parse_float(tok[2:], text)


def parse_variant(text: str) -> Variant:
    """Parse a wire-format variant name; inverse of ``Variant.name``."""
    tokens = text.strip().split(":")
    head = tokens[0]

    def done(v: Variant, i: int) -> Variant:
        if i != len(tokens):
            raise VariantError(f"{text!r}: trailing tokens {tokens[i:]}")
        return v

    try:
        if head in ("lemma21", "coarse", "thm31"):
            d, i = _take_selector(tokens, 1, text)
            o, i = _take_selector(tokens, i, text)
            ctor = {"lemma21": Variant.lemma21, "coarse": Variant.coarse, "thm31": Variant.thm31}
            return done(ctor[head](d, o), i)
        if head == "cor23" and len(tokens) == 2:
            if tokens[1] == "sharp":
                return Variant.cor23_sharp()
            if tokens[1] == "weak":
                return Variant.cor23_weak()
        if head == "special" and len(tokens) >= 2:
            if tokens[1] == "2.11":
                return done(Variant.special_211(), 2)
            if tokens[1] == "2.13":
                return done(Variant.special_213(), 2)
            if tokens[1] == "2.12" and len(tokens) == 3:
                return Variant.special_212(_parse_p(tokens[2], text))
        if head == "cor32" and len(tokens) >= 2:
            branch = tokens[1]
            if branch in ("1", "2", "4"):
                return done(Variant.cor32(int(branch)), 2)
            if branch == "3" and len(tokens) == 3:
                return Variant.cor32(3, _parse_p(tokens[2], text))
        if head == "bb" and len(tokens) >= 2:
            if tokens[1] == "1.2":
                return done(Variant.boas_bellman(), 2)
            if tokens[1] == "4.1":
                return done(Variant.fourier_41(), 2)
            if tokens[1] == "4.5":
                return done(Variant.fourier_45(), 2)
            if tokens[1] == "4.3" and len(tokens) == 3:
                return Variant.fourier_43(_parse_p(tokens[2], text))
        if head == "ortho" and len(tokens) >= 2:
            if tokens[1] == "4.2":
                return done(Variant.ortho_42(), 2)
            if tokens[1] == "4.4" and len(tokens) == 3:
                return Variant.ortho_44(_parse_p(tokens[2], text))
        if head == "bessel" and len(tokens) == 2 and tokens[1] == "1.1":
            return Variant.bessel()
    except VariantError:
        raise
    raise VariantError(f"unknown variant name {text!r}")


def full_catalog(exponents: tuple[float, ...] = DEFAULT_EXPONENTS) -> tuple[Variant, ...]:
    """The complete bound catalog with every exponent slot instantiated.

    Each conjugate-exponent slot (selector or p parameter) is expanded over
    ``exponents``; with the five defaults this yields 179 variants.
    """
    exps = tuple(_check_exponent(p) for p in exponents)
    sels = (MAX,) + tuple(holder(p) for p in exps) + (SUM,)
    out: list[Variant] = []
    for ctor in (Variant.lemma21, Variant.coarse, Variant.thm31):
        out.extend(ctor(d, o) for d in sels for o in sels)
    out += [Variant.cor23_sharp(), Variant.cor23_weak()]
    out += [Variant.special_211(), Variant.special_213()]
    out += [Variant.special_212(p) for p in exps]
    out += [Variant.cor32(1), Variant.cor32(2), Variant.cor32(4)]
    out += [Variant.cor32(3, p) for p in exps]
    out += [Variant.boas_bellman(), Variant.fourier_41(), Variant.fourier_45()]
    out += [Variant.fourier_43(p) for p in exps]
    out += [Variant.ortho_42()]
    out += [Variant.ortho_44(p) for p in exps]
    out += [Variant.bessel()]
    return tuple(out)


def parse_variant_list(
    text: str, exponents: tuple[float, ...] = DEFAULT_EXPONENTS
) -> tuple[Variant, ...]:
    """Parse a comma-separated variant list; ``all`` expands the full catalog."""
    if text.strip() == "all":
        return full_catalog(exponents)
    names = [t for t in (s.strip() for s in text.split(",")) if t]
    if not names:
        raise VariantError("empty variant list")
    return tuple(parse_variant(n) for n in names)
