"""Exact rationals, Euclidean continued fractions, mediants.

Rationals are plain :class:`fractions.Fraction` values: they are always
reduced with a positive denominator, arbitrary precision, and immutable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidInput

Rational = Fraction

__all__ = [
    "Rational",
    "ContinuedFraction",
    "parse_rational",
    "format_rational",
    "cf_expand",
    "cf_value",
    "mediant",
    "unimodular_det",
    "lcm",
]

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")
_CF_RE = re.compile(r"^\s*\[\s*([+-]?\d+)\s*(?:;\s*(\d+(?:\s*,\s*\d+)*)\s*)?\]\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or a bare integer."""
    m = _RAT_RE.match(text)
    if m is None:
        raise InvalidInput(f"not a rational number: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise InvalidInput(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ContinuedFraction:
    """``[a0; a1, ..., an]`` with ``a1..a(n-1) >= 1`` and ``an > 1`` when ``n >= 1``."""

    terms: tuple[int, ...]

    def __post_init__(self) -> None:
        terms = tuple(int(t) for t in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise InvalidInput("continued fraction needs at least one term")
        if any(t < 1 for t in terms[1:]):
            raise InvalidInput(f"partial quotients after a0 must be >= 1: {terms}")
        if len(terms) > 1 and terms[-1] < 2:
            raise InvalidInput(f"terminal term must exceed 1: {terms}")

    @classmethod
    def parse(cls, text: str) -> "ContinuedFraction":
        m = _CF_RE.match(text)
        if m is None:
            raise InvalidInput(f"not a continued fraction: {text!r}")
        head = [int(m.group(1))]
        tail = [int(t) for t in m.group(2).split(",")] if m.group(2) else []
        return cls(tuple(head + tail))

    @property
    def value(self) -> Fraction:
        return cf_value(self)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, i: int) -> int:
        return self.terms[i]

    def __str__(self) -> str:
        a0, rest = self.terms[0], self.terms[1:]
        if not rest:
            return f"[{a0}]"
        return f"[{a0};{','.join(str(t) for t in rest)}]"


def cf_expand(q: Fraction | int) -> ContinuedFraction:
    q = Fraction(q)
    num, den = q.numerator, q.denominator
    terms = []
    while True:
        a, r = divmod(num, den)
        terms.append(a)
        if r == 0:
            break
        num, den = den, r
    return ContinuedFraction(tuple(terms))


def cf_value(cf: ContinuedFraction | Sequence[int]) -> Fraction:
    terms = cf.terms if isinstance(cf, ContinuedFraction) else tuple(cf)
    # convergent recurrence; avoids nested Fraction divisions
    h_prev, h = 1, terms[0]
    k_prev, k = 0, 1
    for a in terms[1:]:
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    return Fraction(h, k)


def mediant(q1: Fraction, q2: Fraction) -> Fraction:
    return Fraction(q1.numerator + q2.numerator, q1.denominator + q2.denominator)


def unimodular_det(q1: Fraction, q2: Fraction) -> int:
    """Determinant of the matrix with columns (num, den) of ``q1`` and ``q2``."""
    return q1.numerator * q2.denominator - q2.numerator * q1.denominator


def lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, int(v))
    return out
