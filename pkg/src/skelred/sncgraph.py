"""Weighted dual graphs of snc models.

A vertex is a component of the special fibre with its multiplicity and genus,
plus the labels of marked rational points specializing onto it.  Edges are
double points; the edge list is a multiset and may contain self-loops.
Self-intersection numbers are never stored: on chains they follow from the
multiplicities (:func:`self_intersections`).

Text record format::

    sncgraph v1
    v <id> m=<int> g=<int> [marks=a,b]
    e <id> <id>
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal, Mapping, Sequence

from .errors import GraphFormatError, InvalidInput

HEADER = "sncgraph v1"

_DIGITS = re.compile(r"(\d+)")


def id_key(vid: str) -> tuple:
    """Sort key comparing digit runs numerically, so ``v2 < v10``."""
    parts = _DIGITS.split(vid)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts) + ((2, 0, vid),)


@dataclass(frozen=True)
class SncVertex:
    id: str
    multiplicity: int = 1
    genus: int = 0
    marks: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id or any(c.isspace() for c in self.id):
            raise InvalidInput(f"bad vertex id {self.id!r}")
        if self.multiplicity < 1:
            raise InvalidInput(f"vertex {self.id}: multiplicity must be >= 1")
        if self.genus < 0:
            raise InvalidInput(f"vertex {self.id}: genus must be >= 0")
        object.__setattr__(self, "marks", tuple(sorted(self.marks, key=id_key)))


@dataclass(frozen=True)
class SncGraph:
    vertices: tuple[SncVertex, ...]
    edges: tuple[tuple[str, str], ...] = ()
    _index: Mapping[str, SncVertex] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        verts = tuple(sorted(self.vertices, key=lambda v: id_key(v.id)))
        index = {}
        for v in verts:
            if v.id in index:
                raise InvalidInput(f"duplicate vertex id {v.id!r}")
            index[v.id] = v
        if not index:
            raise InvalidInput("a graph needs at least one vertex")
        edges = []
        for u, w in self.edges:
            for x in (u, w):
                if x not in index:
                    raise InvalidInput(f"edge endpoint {x!r} is not a vertex")
            edges.append(tuple(sorted((u, w), key=id_key)))
        edges.sort(key=lambda e: (id_key(e[0]), id_key(e[1])))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "_index", index)

    @classmethod
    def build(
        cls,
        vertices: Iterable[SncVertex | tuple],
        edges: Iterable[tuple[str, str]] = (),
    ) -> "SncGraph":
        vs = [v if isinstance(v, SncVertex) else SncVertex(*v) for v in vertices]
        return cls(tuple(vs), tuple(tuple(e) for e in edges))

    def __contains__(self, vid: str) -> bool:
        return vid in self._index

    def __getitem__(self, vid: str) -> SncVertex:
        return self._index[vid]

    @property
    def ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    def multiplicity(self, vid: str) -> int:
        return self._index[vid].multiplicity

    def genus(self, vid: str) -> int:
        return self._index[vid].genus

    def incident(self, vid: str) -> list[int]:
        """Indices of edges at ``vid``; a loop appears twice."""
        out = []
        for i, (u, w) in enumerate(self.edges):
            if u == vid:
                out.append(i)
            if w == vid:
                out.append(i)
        return out

    def degree(self, vid: str) -> int:
        return len(self.incident(vid))

    def effective_degree(self, vid: str) -> int:
        """Graph degree plus one per marked point on the vertex."""
        return self.degree(vid) + len(self._index[vid].marks)

    def other_end(self, edge: int, vid: str) -> str:
        u, w = self.edges[edge]
        return w if u == vid else u

    def neighbors(self, vid: str) -> list[str]:
        return [self.other_end(i, vid) for i in self.incident(vid)]

    def marks(self) -> dict[str, str]:
        """Mark label -> vertex id.  Duplicates are caught by :func:`validate`."""
        return {m: v.id for v in self.vertices for m in v.marks}

    def is_connected(self) -> bool:
        adj = defaultdict(set)
        for u, w in self.edges:
            adj[u].add(w)
            adj[w].add(u)
        start = self.vertices[0].id
        seen = {start}
        stack = [start]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(self.vertices)

    def first_betti(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def with_multiplicities(self, mults: Mapping[str, int]) -> "SncGraph":
        verts = [
            SncVertex(v.id, mults.get(v.id, v.multiplicity), v.genus, v.marks)
            for v in self.vertices
        ]
        return SncGraph(tuple(verts), self.edges)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    vertex: str | None = None
    level: Literal["error", "warning", "note"] = "error"

    def __str__(self) -> str:
        where = f" [{self.vertex}]" if self.vertex else ""
        return f"{self.level}: {self.code}{where}: {self.message}"


@dataclass(frozen=True)
class Chain:
    """Vertices ``x0, ..., xr`` joined by consecutive edges.

    ``x0`` is principal; ``xr`` is principal (two-ended) or a non-principal
    vertex of degree one (dangling).  Both ends coincide for a chain closing
    up on its anchor.
    """

    vertices: tuple[str, ...]
    edges: tuple[int, ...]
    dangling: bool

    @property
    def interior(self) -> tuple[str, ...]:
        return self.vertices[1:-1]


def is_principal(g: SncGraph, vid: str) -> bool:
    return g.genus(vid) > 0 or g.effective_degree(vid) >= 3


def principal_vertices(g: SncGraph) -> frozenset[str]:
    return frozenset(v for v in g.ids if is_principal(g, v))


def chains(g: SncGraph, principal: frozenset[str] | None = None) -> list[Chain]:
    """Maximal chains of non-principal vertices hanging between principal ones."""
    if principal is None:
        principal = principal_vertices(g)
    out: list[Chain] = []
    used: set[int] = set()
    for x0 in sorted(principal, key=id_key):
        for e0 in g.incident(x0):
            if e0 in used:
                continue
            verts = [x0]
            edges = [e0]
            cur = g.other_end(e0, x0)
            prev_edge = e0
            while cur not in principal:
                verts.append(cur)
                rest = [i for i in g.incident(cur) if i != prev_edge]
                if len(rest) != 1:
                    break  # dangling end (degree one)
                prev_edge = rest[0]
                edges.append(prev_edge)
                cur = g.other_end(prev_edge, cur)
            else:
                verts.append(cur)
            used.update(edges)
            dangling = verts[-1] not in principal
            out.append(Chain(tuple(verts), tuple(edges), dangling))
    return out


def check_wellformed(g: SncGraph) -> None:
    if not g.is_connected():
        raise InvalidInput("graph is not connected")
    seen: Counter[str] = Counter(m for v in g.vertices for m in v.marks)
    dup = sorted((m for m, c in seen.items() if c > 1), key=id_key)
    if dup:
        raise InvalidInput(f"marked points on more than one vertex: {', '.join(dup)}")


def validate(g: SncGraph) -> list[Diagnostic]:
    """Check the intersection calculus along chains.

    For an interior chain vertex ``m_j`` must divide ``m_(j-1) + m_(j+1)``;
    for the free end of a dangling chain ``m_r`` must divide ``m_(r-1)``.
    Raises :class:`InvalidInput` for a disconnected graph or a mark used twice.
    Only ``error``-level diagnostics are violations.
    """
    check_wellformed(g)
    principal = principal_vertices(g)
    diags: list[Diagnostic] = []
    for vid in g.ids:
        if vid in principal:
            continue
        inc = g.incident(vid)
        m = g.multiplicity(vid)
        if len(inc) == 2 and inc[0] != inc[1]:
            a, b = (g.other_end(i, vid) for i in inc)
            total = g.multiplicity(a) + g.multiplicity(b)
            if total % m:
                diags.append(Diagnostic(
                    "interior-divisibility",
                    f"{m} does not divide {g.multiplicity(a)} + {g.multiplicity(b)}",
                    vid,
                ))
        elif len(inc) == 1:
            nb = g.other_end(inc[0], vid)
            if g.multiplicity(nb) % m:
                diags.append(Diagnostic(
                    "end-divisibility",
                    f"{m} does not divide neighbour multiplicity {g.multiplicity(nb)}",
                    vid,
                ))
    for v in g.vertices:
        if v.marks and v.multiplicity > 1:
            diags.append(Diagnostic(
                "mark-multiplicity",
                f"marked point on a component of multiplicity {v.multiplicity}",
                v.id,
                "warning",
            ))
        if v.marks and v.genus == 0 and g.degree(v.id) == 2 and _on_cycle(g, v.id):
            diags.append(Diagnostic(
                "mark-on-cycle",
                "mark counted as +1 effective degree on a cycle vertex",
                v.id,
                "note",
            ))
    return diags


def _on_cycle(g: SncGraph, vid: str) -> bool:
    inc = g.incident(vid)
    if len(inc) >= 2 and len(set(inc)) < len(inc):
        return True  # self-loop
    for skip in set(inc):
        rest = [e for i, e in enumerate(g.edges) if i != skip]
        u, w = g.edges[skip]
        if u == w:
            return True
        if _connected(rest, u, w):
            return True
    return False


def _connected(edges: Sequence[tuple[str, str]], a: str, b: str) -> bool:
    adj = defaultdict(set)
    for u, w in edges:
        adj[u].add(w)
        adj[w].add(u)
    seen = {a}
    stack = [a]
    while stack:
        for nb in adj[stack.pop()]:
            if nb == b:
                return True
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return a == b


def is_valid(g: SncGraph) -> bool:
    return not any(d.level == "error" for d in validate(g))


def chain_gcd_check(g: SncGraph, chain: Chain) -> list[Diagnostic]:
    """gcd of consecutive multiplicities equals the gcd of the whole chain,
    and equals the last multiplicity on a dangling chain."""
    mults = [g.multiplicity(v) for v in chain.vertices]
    total = math.gcd(*mults)
    diags = []
    for j in range(len(mults) - 1):
        pair = math.gcd(mults[j], mults[j + 1])
        if pair != total:
            diags.append(Diagnostic(
                "chain-gcd",
                f"gcd({mults[j]}, {mults[j + 1]}) = {pair} but chain gcd is {total}",
                chain.vertices[j],
            ))
    if chain.dangling and total != mults[-1]:
        diags.append(Diagnostic(
            "dangling-gcd",
            f"chain gcd {total} differs from end multiplicity {mults[-1]}",
            chain.vertices[-1],
        ))
    return diags


def self_intersections(g: SncGraph) -> dict[str, int]:
    """``E^2`` for every non-principal chain vertex, derived from multiplicities."""
    out = {}
    for c in chains(g):
        for j, vid in enumerate(c.vertices):
            if j == 0 or (j == len(c.vertices) - 1 and not c.dangling):
                continue
            m = g.multiplicity(vid)
            nbs = g.multiplicity(c.vertices[j - 1])
            if j + 1 < len(c.vertices):
                nbs += g.multiplicity(c.vertices[j + 1])
            if nbs % m:
                raise InvalidInput(f"vertex {vid}: self-intersection is not integral")
            out[vid] = -(nbs // m)
    return out


def genus_semistable(g: SncGraph) -> int:
    """First Betti number plus the sum of vertex genera (all multiplicities 1)."""
    bad = [v.id for v in g.vertices if v.multiplicity > 1]
    if bad:
        raise InvalidInput(
            "genus formula needs a semi-stable graph; multiplicity > 1 at "
            + ", ".join(bad)
        )
    if not g.is_connected():
        raise InvalidInput("graph is not connected")
    return g.first_betti() + sum(v.genus for v in g.vertices)


# --- text records ------------------------------------------------------------


def iter_records(text: str, headers: Sequence[str] = (HEADER,)) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, tokens)`` for each non-blank, non-comment line after the header."""
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            if line not in headers:
                raise GraphFormatError(f"expected header {headers[0]!r}, got {line!r}", lineno)
            seen_header = True
            continue
        yield lineno, line.split()
    if not seen_header:
        raise GraphFormatError(f"missing header {headers[0]!r}")


def parse_fields(tokens: Sequence[str], lineno: int, allowed: Sequence[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep:
            raise GraphFormatError(f"expected key=value, got {tok!r}", lineno)
        if key not in allowed:
            raise GraphFormatError(f"unknown field {key!r}", lineno, key)
        if key in out:
            raise GraphFormatError("field given twice", lineno, key)
        out[key] = value
    return out


def parse_int(value: str, lineno: int, fieldname: str, minimum: int) -> int:
    try:
        n = int(value)
    except ValueError:
        raise GraphFormatError(f"not an integer: {value!r}", lineno, fieldname) from None
    if n < minimum:
        raise GraphFormatError(f"must be >= {minimum}", lineno, fieldname)
    return n


def parse_vertex(tokens: Sequence[str], lineno: int) -> SncVertex:
    if len(tokens) < 2:
        raise GraphFormatError("vertex line needs an id", lineno)
    fields = parse_fields(tokens[2:], lineno, ("m", "g", "marks"))
    m = parse_int(fields.get("m", "1"), lineno, "m", 1)
    gen = parse_int(fields.get("g", "0"), lineno, "g", 0)
    marks = tuple(x for x in fields.get("marks", "").split(",") if x)
    return SncVertex(tokens[1], m, gen, marks)


def loads(text: str) -> SncGraph:
    vertices: list[SncVertex] = []
    edges: list[tuple[str, str]] = []
    edge_lines: list[int] = []
    seen: set[str] = set()
    for lineno, tokens in iter_records(text):
        kind = tokens[0]
        if kind == "v":
            v = parse_vertex(tokens, lineno)
            if v.id in seen:
                raise GraphFormatError(f"duplicate vertex id {v.id!r}", lineno)
            seen.add(v.id)
            vertices.append(v)
        elif kind == "e":
            if len(tokens) != 3:
                raise GraphFormatError("edge line must be 'e <id> <id>'", lineno)
            edges.append((tokens[1], tokens[2]))
            edge_lines.append(lineno)
        else:
            raise GraphFormatError(f"unknown record type {kind!r}", lineno)
    for (u, w), lineno in zip(edges, edge_lines):
        for x in (u, w):
            if x not in seen:
                raise GraphFormatError(f"unknown vertex {x!r}", lineno)
    if not vertices:
        raise GraphFormatError("no vertices")
    return SncGraph(tuple(vertices), tuple(edges))


def vertex_line(v: SncVertex) -> str:
    line = f"v {v.id} m={v.multiplicity} g={v.genus}"
    if v.marks:
        line += " marks=" + ",".join(v.marks)
    return line


def dumps(g: SncGraph) -> str:
    lines = [HEADER]
    lines.extend(vertex_line(v) for v in g.vertices)
    lines.extend(f"e {u} {w}" for u, w in g.edges)
    return "\n".join(lines) + "\n"


serialize = dumps
deserialize = loads


def load(path) -> SncGraph:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


# --- DOT ---------------------------------------------------------------------


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: SncGraph, highlight: Iterable[str] = (), name: str = "skelred") -> str:
    """Graphviz rendering; highlighted vertices are drawn filled red."""
    hl = set(highlight)
    out = [f"graph {_q(name)} {{", "  node [shape=circle, fontsize=10];"]
    for v in g.vertices:
        attrs = [f'label="{v.id}\\nm={v.multiplicity} g={v.genus}"']
        if v.id in hl:
            attrs += ["color=red", "style=filled", 'fillcolor="#f4cccc"']
        out.append(f"  {_q(v.id)} [{', '.join(attrs)}];")
        for mark in v.marks:
            out.append(f"  {_q('mark:' + mark)} [shape=plaintext, label={_q(mark)}];")
            out.append(f"  {_q(v.id)} -- {_q('mark:' + mark)} [dir=forward, style=dashed];")
    for u, w in g.edges:
        out.append(f"  {_q(u)} -- {_q(w)};")
    out.append("}")
    return "\n".join(out) + "\n"
