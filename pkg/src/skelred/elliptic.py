"""Kodaira types of elliptic curves with their snc dual graphs and invariants.

For potentially good reduction the type is determined by the multiplicity
``m`` of the genus-1 point and the gluing invariant ``alpha`` mod 1, which is
read off the chain of regular fractional annuli from that point to the
component carrying the origin.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import networkx as nx
from networkx.algorithms.isomorphism import MultiGraphMatcher

from .errors import InvalidInput, NoMatch
from .exactmath import format_rational
from .sncgraph import SncGraph, SncVertex, id_key, principal_vertices

ORIGIN = "O"

POTENTIALLY_GOOD = ("I0", "I0star", "II", "IIstar", "III", "IIIstar", "IV", "IVstar")
FAMILIES = ("In", "Instar")

# center multiplicity and arms (multiplicities outward); mark on the last
# vertex of the arm with index ``_MARK_ARM``
_TEMPLATES: dict[str, tuple[int, tuple[tuple[int, ...], ...]]] = {
    "I0": (1, ()),
    "I0star": (2, ((1,), (1,), (1,), (1,))),
    "II": (6, ((3,), (2,), (1,))),
    "IIstar": (6, ((3,), (4, 2), (5, 4, 3, 2, 1))),
    "III": (4, ((2,), (1,), (1,))),
    "IIIstar": (4, ((2,), (3, 2, 1), (3, 2, 1))),
    "IV": (3, ((1,), (1,), (1,))),
    "IVstar": (3, ((2, 1), (2, 1), (2, 1))),
}

_TABLE: dict[str, tuple[int, Fraction]] = {
    "I0": (1, Fraction(0)),
    "I0star": (2, Fraction(1, 2)),
    "II": (6, Fraction(5, 6)),
    "IIstar": (6, Fraction(1, 6)),
    "III": (4, Fraction(3, 4)),
    "IIIstar": (4, Fraction(1, 4)),
    "IV": (3, Fraction(2, 3)),
    "IVstar": (3, Fraction(1, 3)),
}

_LABEL_RE = re.compile(r"^(I0\*?|I0star|II\*?|IIstar|III\*?|IIIstar|IV\*?|IVstar|I(\d+)(\*|star)?)$")


@dataclass(frozen=True)
class KodairaType:
    label: str
    n: int | None = None

    def __post_init__(self) -> None:
        if self.label in POTENTIALLY_GOOD:
            if self.n is not None:
                raise InvalidInput(f"type {self.label} takes no parameter")
        elif self.label in FAMILIES:
            if self.n is None or self.n < 2:
                raise InvalidInput(f"type {self.label} needs n >= 2")
        else:
            raise InvalidInput(f"unknown Kodaira type {self.label!r}")

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "KodairaType":
        """Accept ``IV*``, ``IVstar``, ``I5``, ``I5*``, or ``In``/``Instar`` with ``n``."""
        t = text.strip()
        if t in FAMILIES:
            return cls(t, n)
        m = _LABEL_RE.match(t)
        if m is None:
            raise InvalidInput(f"unknown Kodaira type {text!r}")
        if m.group(2) is not None and t not in ("I0", "I0*", "I0star"):
            if n is not None and n != int(m.group(2)):
                raise InvalidInput(f"conflicting parameter for {text}")
            return cls("Instar" if m.group(3) else "In", int(m.group(2)))
        label = t.replace("*", "star")
        return cls(label, n)

    @property
    def potentially_good(self) -> bool:
        return self.label in POTENTIALLY_GOOD

    def __str__(self) -> str:
        if self.label == "In":
            return f"I{self.n}"
        if self.label == "Instar":
            return f"I{self.n}*"
        return self.label.replace("star", "*")


@dataclass(frozen=True)
class EllipticInvariants:
    m: int
    alpha: Fraction

    def __post_init__(self) -> None:
        a = Fraction(self.alpha) % 1
        object.__setattr__(self, "alpha", a)
        if self.m < 1:
            raise InvalidInput("m must be positive")
        if self.m % a.denominator:
            raise InvalidInput(f"denominator of alpha={format_rational(a)} does not divide m={self.m}")

    @property
    def alpha_display(self) -> str:
        return display_alpha(self.alpha)


def display_alpha(a: Fraction) -> str:
    """Representative in (-1/2, 1/2], so 5/6 prints as -1/6."""
    a = Fraction(a) % 1
    if a > Fraction(1, 2):
        a -= 1
    if a.denominator == 1:
        return str(a.numerator)
    return format_rational(a)


def invariants_from_type(t: KodairaType) -> EllipticInvariants:
    if not t.potentially_good:
        raise InvalidInput(f"{t} is not a potentially good type")
    m, a = _TABLE[t.label]
    return EllipticInvariants(m, a)


def type_from_invariants(inv: EllipticInvariants) -> KodairaType:
    for label, (m, a) in _TABLE.items():
        if (m, a) == (inv.m, inv.alpha):
            return KodairaType(label)
    valid = ", ".join(f"({m}, {format_rational(a)})" for m, a in _TABLE.values())
    raise NoMatch(
        f"no type with m={inv.m}, alpha={format_rational(inv.alpha)}; valid pairs: {valid}"
    )


def graph_from_type(t: KodairaType) -> SncGraph:
    """The minimal snc dual graph, with the origin marked."""
    if t.label == "In":
        verts = [SncVertex(f"v{i}", 1, 0, (ORIGIN,) if i == 0 else ()) for i in range(t.n)]
        edges = [(f"v{i}", f"v{(i + 1) % t.n}") for i in range(t.n)]
        return SncGraph(tuple(verts), tuple(edges))
    if t.label == "Instar":
        assert t.n is not None
        chain = [f"c{i}" for i in range(t.n + 1)]
        verts = [SncVertex(c, 2, 0) for c in chain]
        verts += [
            SncVertex("l1", 1, 0, (ORIGIN,)), SncVertex("l2", 1, 0),
            SncVertex("r1", 1, 0), SncVertex("r2", 1, 0),
        ]
        edges = [(chain[i], chain[i + 1]) for i in range(t.n)]
        edges += [("l1", chain[0]), ("l2", chain[0]), ("r1", chain[-1]), ("r2", chain[-1])]
        return SncGraph(tuple(verts), tuple(edges))
    center, arms = _TEMPLATES[t.label]
    verts = [SncVertex("x", center, 1, () if arms else (ORIGIN,))]
    edges = []
    for i, arm in enumerate(arms, 1):
        prev = "x"
        for j, m in enumerate(arm, 1):
            vid = f"a{i}_{j}"
            last_marked = i == len(arms) and j == len(arm)
            verts.append(SncVertex(vid, m, 0, (ORIGIN,) if last_marked else ()))
            edges.append((prev, vid))
            prev = vid
    return SncGraph(tuple(verts), tuple(edges))


def all_templates(max_n: int = 6) -> list[KodairaType]:
    out = [KodairaType(label) for label in POTENTIALLY_GOOD]
    for fam in FAMILIES:
        out += [KodairaType(fam, n) for n in range(2, max_n + 1)]
    return out


def _to_nx(g: SncGraph) -> nx.MultiGraph:
    h = nx.MultiGraph()
    for v in g.vertices:
        h.add_node(v.id, m=v.multiplicity, g=v.genus, marks=len(v.marks))
    h.add_edges_from(g.edges)
    return h


def _candidates(g: SncGraph) -> list[KodairaType]:
    out = [KodairaType(label) for label in POTENTIALLY_GOOD]
    nv = len(g.vertices)
    if nv >= 2:
        out.append(KodairaType("In", nv))
    if nv - 5 >= 2:
        out.append(KodairaType("Instar", nv - 5))
    return out


def _profile(g: SncGraph) -> Counter:
    return Counter((v.multiplicity, v.genus, len(v.marks)) for v in g.vertices)


@dataclass(frozen=True)
class TypeMatch:
    type: KodairaType
    witness: dict[str, str]  # input vertex -> template vertex


def type_from_graph(g: SncGraph) -> TypeMatch:
    """Recognize a marked minimal snc graph up to isomorphism."""
    target = _to_nx(g)

    def nm(a, b):
        return a["m"] == b["m"] and a["g"] == b["g"] and a["marks"] == b["marks"]

    prof = _profile(g)
    for t in _candidates(g):
        tmpl = graph_from_type(t)
        if _profile(tmpl) != prof:
            continue
        gm = MultiGraphMatcher(target, _to_nx(tmpl), node_match=nm)
        if gm.is_isomorphic():
            witness = dict(sorted(gm.mapping.items(), key=lambda kv: id_key(kv[0])))
            return TypeMatch(t, witness)

    def distance(t: KodairaType) -> int:
        tp = _profile(graph_from_type(t))
        return sum(((tp - prof) + (prof - tp)).values())

    near = sorted(_candidates(g), key=lambda t: (distance(t), str(t)))[:3]
    hint = "; ".join(f"{t} (differs in {distance(t)} vertex labels)" for t in near)
    raise NoMatch(f"not a minimal elliptic snc graph; nearest templates: {hint}")


def mark_path(g: SncGraph, mark: str = ORIGIN) -> list[int]:
    """Multiplicities from the principal vertex to the vertex carrying ``mark``."""
    where = g.marks()
    if mark not in where:
        raise InvalidInput(f"graph has no mark {mark!r}")
    pr = principal_vertices(g)
    if len(pr) != 1:
        raise InvalidInput(f"expected a single principal vertex, found {len(pr)}")
    (x,) = pr
    h = nx.MultiGraph()
    h.add_nodes_from(g.ids)
    h.add_edges_from(g.edges)
    path = nx.shortest_path(h, x, where[mark])
    return [g.multiplicity(v) for v in path]


def alpha_walk(mults: Sequence[int]) -> list[Fraction]:
    """Exponents from the principal point to the marked leaf.

    The leaf sits at exponent 1 and each step towards the principal point
    drops by ``1/(m_j m_(j+1))``, the unique unimodular step below.
    """
    ms = [int(m) for m in mults]
    if not ms or any(m < 1 for m in ms):
        raise InvalidInput("multiplicities must be positive")
    if ms[-1] != 1:
        raise InvalidInput(f"the marked component has multiplicity {ms[-1]}, expected 1")
    exps = [Fraction(1)]
    for j in range(len(ms) - 2, -1, -1):
        e = exps[0] - Fraction(1, ms[j] * ms[j + 1])
        if e.denominator != ms[j]:
            raise InvalidInput(
                f"step {ms[j]}-{ms[j + 1]}: exponent {format_rational(e)} does not have "
                f"denominator {ms[j]}"
            )
        exps.insert(0, e)
    return exps


def alpha_from_chain(mults: Sequence[int]) -> Fraction:
    return alpha_walk(mults)[0] % 1


@dataclass(frozen=True)
class MultiplicativeReport:
    type: KodairaType
    min_strong_size: int
    min_size: int
    annulus: str
    modulus: int | None = None
    trivializing_degree: int | None = None


def multiplicative_report(t: KodairaType) -> MultiplicativeReport:
    if t.label == "In":
        return MultiplicativeReport(t, 1, 1, f"{{|pi|^{t.n} < |T(x)| < 1}}", modulus=t.n)
    if t.label == "Instar":
        assert t.n is not None
        return MultiplicativeReport(
            t, 2, 1, f"{{|pi|^{2 * (t.n + 1)} < |T^2(x) - pi| < |pi|^2}}",
            trivializing_degree=2,
        )
    raise InvalidInput(f"{t} is not of multiplicative type")
