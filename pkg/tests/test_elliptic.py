from __future__ import annotations

from fractions import Fraction as F

import pytest

from oracles import alpha_closed_form, unimodular
from skelred.elliptic import (
    POTENTIALLY_GOOD,
    EllipticInvariants,
    KodairaType,
    all_templates,
    alpha_from_chain,
    alpha_walk,
    display_alpha,
    graph_from_type,
    invariants_from_type,
    mark_path,
    multiplicative_report,
    type_from_graph,
    type_from_invariants,
)
from skelred.errors import InvalidInput, NoMatch
from skelred.sncgraph import SncGraph, SncVertex, genus_semistable, is_valid
from skelred.triangulate import principalize

TABLE = {
    "I0": (1, "0"), "I0star": (2, "1/2"), "II": (6, "-1/6"), "IIstar": (6, "1/6"),
    "III": (4, "-1/4"), "IIIstar": (4, "1/4"), "IV": (3, "-1/3"), "IVstar": (3, "1/3"),
}


def test_type_labels():
    assert str(KodairaType.parse("IV*")) == "IV*"
    assert KodairaType.parse("IVstar") == KodairaType("IVstar")
    assert KodairaType.parse("I5*") == KodairaType("Instar", 5)
    assert KodairaType.parse("I7") == KodairaType("In", 7)
    assert KodairaType.parse("In", 3) == KodairaType("In", 3)
    assert KodairaType.parse("I0*") == KodairaType("I0star")
    for bad in ("I1", "V", "In"):
        with pytest.raises(InvalidInput):
            KodairaType.parse(bad)
    with pytest.raises(InvalidInput):
        KodairaType("II", 3)


@pytest.mark.parametrize("label", POTENTIALLY_GOOD)
def test_table_round_trip(label):
    t = KodairaType(label)
    inv = invariants_from_type(t)
    m, shown = TABLE[label]
    assert inv.m == m and inv.alpha_display == shown
    assert 0 <= inv.alpha < 1
    assert type_from_invariants(inv) == t


def test_invariant_examples():
    assert invariants_from_type(KodairaType("IVstar")) == EllipticInvariants(3, F(1, 3))
    assert invariants_from_type(KodairaType("I0")) == EllipticInvariants(1, F(0))
    assert invariants_from_type(KodairaType("II")) == EllipticInvariants(6, F(-1, 6))
    with pytest.raises(InvalidInput):
        invariants_from_type(KodairaType("In", 3))
    with pytest.raises(NoMatch, match="valid pairs"):
        type_from_invariants(EllipticInvariants(6, F(1, 2)))
    with pytest.raises(InvalidInput):
        EllipticInvariants(4, F(1, 3))


def test_graph_examples():
    g = graph_from_type(KodairaType("I0star"))
    assert (g["x"].multiplicity, g["x"].genus) == (2, 1)
    assert sorted(g.neighbors("x")) == ["a1_1", "a2_1", "a3_1", "a4_1"]
    assert [v.id for v in g.vertices if v.marks] == ["a4_1"]
    g = graph_from_type(KodairaType("II"))
    leaves = sorted(g.multiplicity(v) for v in g.neighbors("x"))
    assert leaves == [1, 2, 3]
    assert [g.multiplicity(v.id) for v in g.vertices if v.marks] == [1]
    g = graph_from_type(KodairaType("In", 3))
    assert len(g.vertices) == 3 and len(g.edges) == 3
    with pytest.raises(InvalidInput):
        KodairaType("Instar", 1)


@pytest.mark.parametrize("t", all_templates(6), ids=str)
def test_templates_are_recognized(t):
    g = graph_from_type(t)
    assert is_valid(g)
    match = type_from_graph(g)
    assert match.type == t
    assert set(match.witness) == set(g.ids)


def test_relabelled_graph_recognized_with_witness():
    g = graph_from_type(KodairaType("IVstar"))
    ren = {v: f"n{i}" for i, v in enumerate(reversed(g.ids))}
    h = SncGraph(
        tuple(SncVertex(ren[v.id], v.multiplicity, v.genus, v.marks) for v in g.vertices),
        tuple((ren[u], ren[w]) for u, w in g.edges),
    )
    m = type_from_graph(h)
    assert m.type == KodairaType("IVstar")
    assert m.witness[ren["x"]] == "x"


def test_single_vertex_is_i0():
    g = SncGraph.build([SncVertex("e", 1, 1, ("O",))])
    assert type_from_graph(g).type == KodairaType("I0")


def test_mutated_graph_rejected():
    g = graph_from_type(KodairaType("IIstar"))
    verts = [SncVertex(v.id, 7 if v.id == "a3_2" else v.multiplicity, v.genus, v.marks)
             for v in g.vertices]
    with pytest.raises(NoMatch, match="nearest templates: II\\*"):
        type_from_graph(SncGraph(tuple(verts), g.edges))


def test_mark_position_matters():
    g = graph_from_type(KodairaType("II"))
    verts = [SncVertex(v.id, v.multiplicity, v.genus, ("O",) if v.multiplicity == 2 else ())
             for v in g.vertices]
    with pytest.raises(NoMatch):
        type_from_graph(SncGraph(tuple(verts), g.edges))


def test_alpha_examples():
    assert alpha_from_chain([3, 2, 1]) == F(1, 3)
    assert alpha_from_chain([6, 1]) == F(5, 6)
    assert alpha_from_chain([6, 5, 4, 3, 2, 1]) == F(1, 6)
    assert alpha_from_chain([1]) == 0
    assert display_alpha(F(5, 6)) == "-1/6"
    assert display_alpha(F(1, 2)) == "1/2"
    with pytest.raises(InvalidInput, match="expected 1"):
        alpha_from_chain([3, 2])
    with pytest.raises(InvalidInput, match="denominator"):
        alpha_from_chain([4, 3, 1])


@pytest.mark.parametrize("label", POTENTIALLY_GOOD)
def test_dictionary_consistency(label):
    t = KodairaType(label)
    g = graph_from_type(t)
    inv = invariants_from_type(t)
    (x,) = principalize(g)
    assert g.multiplicity(x) == inv.m
    path = mark_path(g)
    assert alpha_from_chain(path) == inv.alpha == alpha_closed_form(path)
    walk = alpha_walk(path)
    assert walk == sorted(walk) and all(0 < e <= 1 for e in walk)
    assert all(unimodular(a, b) for a, b in zip(walk, walk[1:]))


def test_multiplicative_reports():
    r = multiplicative_report(KodairaType("In", 5))
    assert (r.min_strong_size, r.min_size, r.modulus) == (1, 1, 5)
    assert r.annulus == "{|pi|^5 < |T(x)| < 1}"
    r = multiplicative_report(KodairaType("Instar", 5))
    assert (r.min_strong_size, r.min_size, r.trivializing_degree) == (2, 1, 2)
    assert r.annulus == "{|pi|^12 < |T^2(x) - pi| < |pi|^2}"
    assert multiplicative_report(KodairaType("In", 2)).modulus == 2
    with pytest.raises(InvalidInput):
        multiplicative_report(KodairaType("II"))


@pytest.mark.parametrize("n", range(2, 7))
def test_multiplicative_sizes_match_principal_sets(n):
    for fam in ("In", "Instar"):
        t = KodairaType(fam, n)
        assert len(principalize(graph_from_type(t))) == multiplicative_report(t).min_strong_size
    assert genus_semistable(graph_from_type(KodairaType("In", n))) == 1
