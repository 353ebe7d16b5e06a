"""Value semirings for relations and tables, and the morphisms used by summaries.

Four carriers are supported: the Boolean semiring (OR/AND), the naturals,
the integers, and the nonnegative rationals.  Rationals are exact
(`fractions.Fraction`), never floats, so every downstream feasibility answer
is a certificate rather than an approximation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction


class KindError(TypeError):
    """Operands or morphism arguments live in different semirings."""


class DegenerateTotal(ValueError):
    """normalize-by-total was given a total of zero."""


class Kind(str, enum.Enum):
    BOOLEAN = "boolean"
    NATURAL = "natural"
    INTEGER = "integer"
    NONNEG_RATIONAL = "nonneg-rational"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class SemiringValue:
    """A value in one of the supported semirings.

    The payload type is pinned by the kind: bool, int, int, Fraction.
    Arithmetic never silently changes kind.
    """

    kind: Kind
    payload: bool | int | Fraction

    def __post_init__(self) -> None:
        k, p = self.kind, self.payload
        if k is Kind.BOOLEAN:
            if not isinstance(p, bool):
                raise KindError(f"boolean payload must be bool, got {p!r}")
        elif k is Kind.NATURAL:
            if not isinstance(p, int) or isinstance(p, bool) or p < 0:
                raise KindError(f"natural payload must be an int >= 0, got {p!r}")
        elif k is Kind.INTEGER:
            if not isinstance(p, int) or isinstance(p, bool):
                raise KindError(f"integer payload must be an int, got {p!r}")
        elif k is Kind.NONNEG_RATIONAL:
            if not isinstance(p, Fraction):
                object.__setattr__(self, "payload", Fraction(p))
            if self.payload < 0:
                raise KindError(f"nonneg-rational payload must be >= 0, got {p!r}")
        else:  # pragma: no cover - enum is closed
            raise KindError(f"unknown kind {k!r}")

    def is_zero(self) -> bool:
        return self.payload == zero(self.kind).payload

    def __repr__(self) -> str:
        return f"{self.kind.value}:{to_text(self)}"


def boolean(b: bool) -> SemiringValue:
    return SemiringValue(Kind.BOOLEAN, bool(b))


def natural(n: int) -> SemiringValue:
    return SemiringValue(Kind.NATURAL, n)


def integer(n: int) -> SemiringValue:
    return SemiringValue(Kind.INTEGER, n)


def rational(numerator: int | Fraction, denominator: int = 1) -> SemiringValue:
    return SemiringValue(Kind.NONNEG_RATIONAL, Fraction(numerator, denominator))


def zero(kind: Kind) -> SemiringValue:
    if kind is Kind.BOOLEAN:
        return boolean(False)
    if kind is Kind.NONNEG_RATIONAL:
        return rational(0)
    return SemiringValue(kind, 0)


def one(kind: Kind) -> SemiringValue:
    if kind is Kind.BOOLEAN:
        return boolean(True)
    if kind is Kind.NONNEG_RATIONAL:
        return rational(1)
    return SemiringValue(kind, 1)


def add(a: SemiringValue, b: SemiringValue) -> SemiringValue:
    """Semiring sum; OR in the Boolean kind."""
    if a.kind is not b.kind:
        raise KindError(f"cannot add {a.kind} and {b.kind}")
    if a.kind is Kind.BOOLEAN:
        return boolean(a.payload or b.payload)
    return SemiringValue(a.kind, a.payload + b.payload)


def sub(a: SemiringValue, b: SemiringValue) -> SemiringValue:
    """Difference; defined only in the integer kind."""
    if a.kind is not Kind.INTEGER or b.kind is not Kind.INTEGER:
        raise KindError("subtraction is defined only for the integer kind")
    return integer(a.payload - b.payload)


class Rule(str, enum.Enum):
    IDENTITY = "identity"
    BOOL_INDICATOR = "bool-indicator"
    NORMALIZE_BY_TOTAL = "normalize-by-total"


@dataclass(frozen=True)
class SemiringMorphism:
    """A per-cell change of semiring applied before summation.

    bool-indicator sends True to 1 and False to 0; normalize-by-total sends a
    count n to the exact rational n/total.
    """

    source: Kind
    target: Kind
    rule: Rule
    total: int | None = None

    @staticmethod
    def identity(kind: Kind) -> "SemiringMorphism":
        return SemiringMorphism(kind, kind, Rule.IDENTITY)

    @staticmethod
    def bool_indicator() -> "SemiringMorphism":
        return SemiringMorphism(Kind.BOOLEAN, Kind.NATURAL, Rule.BOOL_INDICATOR)

    @staticmethod
    def normalize_by_total(total: int) -> "SemiringMorphism":
        if total <= 0:
            raise DegenerateTotal(f"total must be > 0, got {total}")
        return SemiringMorphism(Kind.NATURAL, Kind.NONNEG_RATIONAL, Rule.NORMALIZE_BY_TOTAL, total)

    def __call__(self, a: SemiringValue) -> SemiringValue:
        return apply_morphism(self, a)


def apply_morphism(phi: SemiringMorphism, a: SemiringValue) -> SemiringValue:
    if a.kind is not phi.source:
        raise KindError(f"morphism expects {phi.source}, got {a.kind}")
    if phi.rule is Rule.IDENTITY:
        return a
    if phi.rule is Rule.BOOL_INDICATOR:
        return natural(1 if a.payload else 0)
    if phi.rule is Rule.NORMALIZE_BY_TOTAL:
        if not phi.total:
            raise DegenerateTotal("normalize-by-total with total 0")
        return rational(a.payload, phi.total)
    raise KindError(f"unknown rule {phi.rule!r}")  # pragma: no cover


def to_text(v: SemiringValue) -> str:
    """Serialize: true/false, decimal integers, rationals as p/q in lowest terms."""
    if v.kind is Kind.BOOLEAN:
        return "true" if v.payload else "false"
    return str(v.payload)


def from_text(s: str, kind: Kind) -> SemiringValue:
    s = s.strip()
    if kind is Kind.BOOLEAN:
        if s == "true":
            return boolean(True)
        if s == "false":
            return boolean(False)
        raise ValueError(f"not a boolean literal: {s!r}")
    if kind is Kind.NATURAL:
        return natural(int(s))
    if kind is Kind.INTEGER:
        return integer(int(s))
    if kind is Kind.NONNEG_RATIONAL:
        return rational(Fraction(s))
    raise KindError(f"unknown kind {kind!r}")  # pragma: no cover
