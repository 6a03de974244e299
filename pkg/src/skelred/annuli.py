"""Fractional annuli in the analytic line, stored by radius exponents.

An annulus ``{|pi|^a < |T| < |pi|^b}`` is kept as the exponent pair ``(a, b)``
with ``a > b >= 0``; exponent 0 is radius 1.  End multiplicities are the
denominators of the reduced exponents.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from .errors import InvalidInput, WildError
from .exactmath import (
    cf_expand,
    format_rational,
    unimodular_det,
)

Direction = Literal["down", "up"]

_INFINITY = (1, 0)  # the point 0 of the line, exponent +oo, as a bare pair


@dataclass(frozen=True)
class FractionalAnnulus:
    inner_exp: Fraction
    outer_exp: Fraction

    def __post_init__(self) -> None:
        inner, outer = Fraction(self.inner_exp), Fraction(self.outer_exp)
        if inner < 0 or outer < 0:
            raise InvalidInput("radius exponents must be non-negative")
        if inner == outer:
            raise InvalidInput("degenerate annulus: equal exponents")
        if inner < outer:
            inner, outer = outer, inner
        object.__setattr__(self, "inner_exp", inner)
        object.__setattr__(self, "outer_exp", outer)

    @property
    def end_multiplicities(self) -> tuple[int, int]:
        return self.inner_exp.denominator, self.outer_exp.denominator

    def __str__(self) -> str:
        return (
            f"{{|pi|^{format_rational(self.inner_exp)} < |T| < "
            f"|pi|^{format_rational(self.outer_exp)}}}"
        )


@dataclass(frozen=True)
class BlowupStep:
    direction: Direction
    new_exp: Fraction


@dataclass(frozen=True)
class FormalFiberClass:
    kind: Literal["generalized_fractional_disc", "generalized_fractional_annulus"]
    constants_degree: int


def _check_nonneg(*qs: Fraction) -> None:
    for q in qs:
        if q < 0:
            raise InvalidInput(f"negative radius exponent {format_rational(q)}")


def is_regular(x: FractionalAnnulus) -> bool:
    return abs(unimodular_det(x.inner_exp, x.outer_exp)) == 1


def cf_adjacent(q: Fraction, q2: Fraction) -> bool:
    """Continued-fraction test for regularity, ``q.denominator <= q2.denominator``.

    True iff the expansion of ``q2`` is obtained from that of ``q`` by one of
    the four local moves, or both are integers one apart.
    """
    q, q2 = Fraction(q), Fraction(q2)
    _check_nonneg(q, q2)
    b, b2 = q.denominator, q2.denominator
    if b > b2:
        raise InvalidInput("cf_adjacent expects the smaller denominator first")
    if b == b2:
        return b == 1 and abs(q.numerator - q2.numerator) == 1
    t = cf_expand(q).terms
    s = cf_expand(q2).terms
    head, last = t[:-1], t[-1]
    if s == head + (last + 1,):
        return True
    if len(s) == len(t) + 1 and s[:-1] == t and s[-1] >= 2:
        return True
    if s == head + (last - 1, 2):
        return True
    return len(s) == len(t) + 2 and s[:-1] == head + (last - 1, 1) and s[-1] >= 2


def blowup_resolution(target: Fraction) -> list[BlowupStep]:
    """Blowups of the smooth model of the line reaching the point of radius ``|pi|^target``.

    ``a0 + 1`` steps downwards, ``a1`` upwards, alternating, the last block
    shortened by one; with ``[a0]`` alone that is ``a0`` downward steps.
    """
    target = Fraction(target)
    _check_nonneg(target)
    if target == 0:
        return []
    terms = cf_expand(target).terms
    if len(terms) == 1:
        counts = [terms[0]]
    else:
        counts = [terms[0] + 1, *terms[1:-1], terms[-1] - 1]
    directions: list[Direction] = []
    for i, c in enumerate(counts):
        directions.extend(["down" if i % 2 == 0 else "up"] * c)

    lo, hi = (0, 1), _INFINITY
    steps: list[BlowupStep] = []
    for k, direction in enumerate(directions):
        if k > 0:
            last = (steps[-1].new_exp.numerator, steps[-1].new_exp.denominator)
            if direction == "down":
                lo = last
            else:
                hi = last
        new = Fraction(lo[0] + hi[0], lo[1] + hi[1])
        steps.append(BlowupStep(direction, new))
    assert steps[-1].new_exp == target
    return steps


def _farey_neighbors(q: Fraction, lo: Fraction, hi: Fraction, bound: int) -> list[Fraction]:
    """All r in [lo, hi] with |det(q, r)| = 1 and denominator <= bound."""
    a, b = q.numerator, q.denominator
    out = []
    for sign in (1, -1):
        # a*y - b*x = sign; solutions in y form one residue class mod b
        y = (sign * pow(a, -1, b)) % b if b > 1 else 1
        y = y or b
        while y <= bound:
            x = (a * y - sign) // b
            r = Fraction(x, y)
            if lo <= r <= hi:
                out.append(r)
            y += b
    return out


def minimal_regular_subdivision(x: FractionalAnnulus) -> list[Fraction]:
    """Shortest increasing chain of cut exponents making every piece regular.

    Breadth-first search over unimodular steps inside the annulus.  Interior
    points of a shortest chain never have a denominator larger than both
    neighbours (otherwise both neighbours would be its Stern-Brocot parents,
    hence adjacent, and the point could be dropped), so the search is
    exhaustive with denominators bounded by the end multiplicities.
    """
    lo, hi = x.outer_exp, x.inner_exp
    bound = max(lo.denominator, hi.denominator)
    prev: dict[Fraction, Fraction | None] = {lo: None}
    queue = deque([lo])
    while queue:
        cur = queue.popleft()
        if cur == hi:
            break
        for nxt in sorted(_farey_neighbors(cur, cur, hi, bound)):
            if nxt > cur and nxt not in prev:
                prev[nxt] = cur
                queue.append(nxt)
    if hi not in prev:  # pragma: no cover - the integers always connect
        raise AssertionError("no unimodular chain found")
    chain = []
    node: Fraction | None = hi
    while node is not None:
        chain.append(node)
        node = prev[node]
    chain.reverse()
    return chain[1:-1]


def subdivision_closed_form(q: Fraction) -> int:
    """Piece count ``sum of a_(2i)`` over the canonical expansion of ``q``."""
    return sum(cf_expand(q).terms[0::2])


def subdivision_closed_form_even(q: Fraction) -> int:
    """Same sum, taken over the expansion whose last index is even.

    An odd-length canonical expansion ``[..., an]`` is rewritten
    ``[..., an - 1, 1]`` first.
    """
    terms = cf_expand(q).terms
    if len(terms) % 2 == 0:
        terms = terms[:-1] + (terms[-1] - 1, 1)
    return sum(terms[0::2])


def coprime_regular_witness(m: int, m2: int) -> FractionalAnnulus:
    """A regular annulus with end multiplicities ``m`` and ``m2``."""
    if m < 1 or m2 < 1:
        raise InvalidInput("multiplicities must be positive")
    if math.gcd(m, m2) != 1:
        raise InvalidInput(f"multiplicities {m} and {m2} are not coprime")
    # a*m2 - a2*m = 1 with the least positive a
    a = pow(m2, -1, m) if m > 1 else 0
    if a == 0:
        a = m
    a2 = (a * m2 - 1) // m
    return FractionalAnnulus(Fraction(a, m), Fraction(a2, m2))


def formal_fiber_type(mults: Sequence[int], p: int) -> FormalFiberClass:
    """Tame formal fibre at a closed point of an snc model.

    ``p`` is the residue characteristic exponent (1 in characteristic 0).
    """
    mults = [int(m) for m in mults]
    if p < 1:
        raise InvalidInput("characteristic exponent must be >= 1")
    if len(mults) not in (1, 2) or any(m < 1 for m in mults):
        raise InvalidInput("expected one or two positive multiplicities")
    if len(mults) == 1:
        m = mults[0]
        if p > 1 and m % p == 0:
            raise WildError(
                f"wild formal fiber: classification not guaranteed (p={p} divides m={m})"
            )
        return FormalFiberClass("generalized_fractional_disc", m)
    g = math.gcd(*mults)
    if p > 1 and g % p == 0:
        raise WildError(
            f"wild formal fiber: classification not guaranteed (p={p} divides gcd={g})"
        )
    return FormalFiberClass("generalized_fractional_annulus", g)
