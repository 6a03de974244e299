from __future__ import annotations

import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import min_pieces, unimodular
from skelred.annuli import (
    FractionalAnnulus,
    blowup_resolution,
    cf_adjacent,
    coprime_regular_witness,
    formal_fiber_type,
    is_regular,
    minimal_regular_subdivision,
    subdivision_closed_form,
    subdivision_closed_form_even,
)
from skelred.errors import InvalidInput, WildError


def test_annulus_normalizes_order():
    x = FractionalAnnulus(F(0), F(2, 3))
    assert (x.inner_exp, x.outer_exp) == (F(2, 3), 0)
    assert x.end_multiplicities == (3, 1)


@pytest.mark.parametrize("a,b", [(F(1), F(1)), (F(-1), F(0))])
def test_annulus_rejects(a, b):
    with pytest.raises(InvalidInput):
        FractionalAnnulus(a, b)


def test_regular_examples():
    assert is_regular(FractionalAnnulus(F(1, 2), F(0)))
    assert not is_regular(FractionalAnnulus(F(2, 3), F(0)))
    assert is_regular(FractionalAnnulus(F(1), F(0)))


def test_cf_adjacent_examples():
    assert cf_adjacent(F(1), F(3, 2))
    assert cf_adjacent(F(1, 2), F(2, 3))
    assert not cf_adjacent(F(0), F(2, 3))
    assert cf_adjacent(F(2), F(3))
    assert not cf_adjacent(F(1, 3), F(2, 3))
    with pytest.raises(InvalidInput):
        cf_adjacent(F(1, 3), F(1, 2))


def test_subdivision_examples():
    assert minimal_regular_subdivision(FractionalAnnulus(F(2, 3), F(0))) == [F(1, 2)]
    assert minimal_regular_subdivision(FractionalAnnulus(F(1, 2), F(0))) == []
    assert minimal_regular_subdivision(FractionalAnnulus(F(5, 3), F(0))) == [F(1), F(3, 2)]


def test_blowups_examples():
    steps = blowup_resolution(F(2, 3))
    assert [s.new_exp for s in steps] == [F(1), F(1, 2), F(2, 3)]
    assert [s.direction for s in steps] == ["down", "up", "down"]
    assert [s.new_exp for s in blowup_resolution(F(3))] == [F(1), F(2), F(3)]
    assert blowup_resolution(F(0)) == []


def test_witness_examples():
    x = coprime_regular_witness(5, 7)
    assert (x.inner_exp, x.outer_exp) == (F(3, 5), F(4, 7))
    x = coprime_regular_witness(2, 3)
    assert (x.inner_exp, x.outer_exp) == (F(1, 2), F(1, 3))
    x = coprime_regular_witness(1, 1)
    assert is_regular(x) and x.end_multiplicities == (1, 1)
    with pytest.raises(InvalidInput):
        coprime_regular_witness(4, 6)


def test_formal_fiber():
    assert formal_fiber_type([3], 2).kind == "generalized_fractional_disc"
    f = formal_fiber_type([4, 6], 5)
    assert (f.kind, f.constants_degree) == ("generalized_fractional_annulus", 2)
    assert formal_fiber_type([4], 1).constants_degree == 4
    with pytest.raises(WildError):
        formal_fiber_type([4, 6], 2)
    with pytest.raises(WildError):
        formal_fiber_type([9], 3)
    with pytest.raises(InvalidInput):
        formal_fiber_type([1, 2, 3], 1)


def test_closed_forms_differ_exactly_on_odd_length():
    # [1;2] = 3/2 needs two pieces: 0 -> 1 -> 3/2
    assert subdivision_closed_form(F(3, 2)) == 1
    assert subdivision_closed_form_even(F(3, 2)) == 2
    assert subdivision_closed_form(F(5, 3)) == subdivision_closed_form_even(F(5, 3)) == 3


def _down_steps(q):
    return sum(1 for s in blowup_resolution(q) if s.direction == "down")


@pytest.mark.parametrize("b", range(1, 9))
def test_piece_count_agrees_with_oracles(b):
    for a in range(1, 4 * b + 1):
        q = F(a, b)
        if q.denominator != b:
            continue
        bfs = len(minimal_regular_subdivision(FractionalAnnulus(q, F(0)))) + 1
        assert bfs == min_pieces(F(0), q)
        assert bfs == subdivision_closed_form_even(q) == _down_steps(q)


exponents = st.fractions(min_value=0, max_value=2, max_denominator=8)


@settings(max_examples=150, deadline=None)
@given(exponents, exponents)
def test_subdivision_is_regular_and_minimal(a, b):
    if a == b:
        return
    x = FractionalAnnulus(a, b)
    cuts = minimal_regular_subdivision(x)
    chain = [x.outer_exp, *cuts, x.inner_exp]
    assert chain == sorted(chain)
    assert all(unimodular(p, q) for p, q in zip(chain, chain[1:]))
    assert len(chain) - 1 == min_pieces(x.outer_exp, x.inner_exp)


@settings(max_examples=1000)
@given(st.fractions(min_value=0, max_value=20, max_denominator=60))
def test_blowup_walk_is_a_mediant_walk(q):
    steps = blowup_resolution(q)
    if q == 0:
        assert steps == []
        return
    assert steps[-1].new_exp == q
    assert len(steps) == sum(_terms(q))
    # each new exponent is a mediant next to its predecessor
    prev = F(0)
    for s in steps:
        assert unimodular(prev, s.new_exp)
        prev = s.new_exp


def _terms(q):
    from skelred.exactmath import cf_expand

    return cf_expand(q).terms


@settings(max_examples=1000)
@given(st.integers(1, 200), st.integers(1, 200))
def test_witness_property(m, m2):
    if math.gcd(m, m2) != 1:
        return
    x = coprime_regular_witness(m, m2)
    assert x.end_multiplicities == (m, m2)
    assert is_regular(x)
