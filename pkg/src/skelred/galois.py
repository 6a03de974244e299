"""Finite group actions on semi-stable skeletons and their quotients.

The input is the skeleton of the curve over a Galois extension together with
the action of the Galois group: a composition table plus, per element, a
vertex permutation and an edge permutation with orientation bits.  Edges
flipped onto themselves are subdivided at their midpoints before
quotienting, so the quotient is again a graph.  Every quotient vertex and
edge carries its splitting number ``s`` (number of lifts, counted with
weights when the input is itself a quotient).

Record format (extends the graph record)::

    sncgraph v1
    v <id> g=<int> [marks=...]
    e <u> <w> [id=<eid>]
    group <n>
    row <x> <x*y1> ... <x*yn>      # columns in row order
    act <elt> v <id>><id>
    act <elt> e <eid>><eid> [rev]

``x*y`` acts as ``x`` after ``y``.  Unlisted vertices and edges are fixed.
For an edge that is not a loop the orientation bit follows from the vertex
permutation and may be omitted.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

import networkx as nx
from networkx.algorithms.isomorphism import MultiGraphMatcher

from .errors import GraphFormatError, InvalidInput
from .sncgraph import HEADER, SncVertex, id_key, iter_records, parse_fields, parse_int, parse_vertex
from .triangulate import ComponentClass

EdgeImage = tuple[str, bool]


def _sorted(ids: Iterable[str]) -> list[str]:
    return sorted(ids, key=id_key)


def _resolve_action(
    vertices: Sequence[SncVertex],
    edges: Sequence[tuple[str, str, str]],
    given_v: Mapping[str, str],
    given_e: Mapping[str, EdgeImage | tuple[str, bool | None] | str],
    x: str,
) -> tuple[dict[str, str], dict[str, EdgeImage]]:
    """Fill in fixed items and orientation bits of one element's action."""
    vids = [v.id for v in vertices]
    ends = {eid: (u, w) for eid, u, w in edges}
    vmap_ids = set(vids)
    for k in given_v:
        if k not in vmap_ids:
            raise InvalidInput(f"element {x}: unknown vertex {k!r}")
    vmap = {v: given_v.get(v, v) for v in vids}
    if sorted(vmap.values()) != sorted(vids):
        raise InvalidInput(f"element {x} does not permute the vertices")
    pending = {k: (v, None) if isinstance(v, str) else (v[0], v[1]) for k, v in given_e.items()}
    emap: dict[str, EdgeImage] = {}
    for eid, (u, w) in ends.items():
        img, rev = pending.pop(eid, (eid, None))
        if img not in ends:
            raise InvalidInput(f"element {x}: unknown edge {img!r}")
        iu, iw = ends[img]
        if iu != iw:
            fwd = (vmap[u], vmap[w]) == (iu, iw)
            if not fwd and (vmap[u], vmap[w]) != (iw, iu):
                raise InvalidInput(f"element {x} maps edge {eid} to {img} but not its endpoints")
            if rev is not None and rev != (not fwd):
                raise InvalidInput(
                    f"element {x}: orientation bit of {eid}>{img} contradicts the vertex map"
                )
            rev = not fwd
        elif u != w or vmap[u] != iu:
            raise InvalidInput(f"element {x} maps edge {eid} to {img} but not its endpoints")
        emap[eid] = (img, bool(rev))
    if pending:
        raise InvalidInput(f"element {x}: unknown edge {next(iter(pending))!r}")
    if sorted(i for i, _ in emap.values()) != sorted(ends):
        raise InvalidInput(f"element {x} does not permute the edges")
    return vmap, emap


@dataclass(frozen=True, eq=False)
class GaloisSkeleton:
    """A connected graph with a finite group acting on it.

    ``vertex_weight``/``edge_weight`` default to 1; they hold splitting
    numbers when the skeleton is an intermediate quotient.  ``midpoints``
    names vertices that were created by subdividing a flipped edge, with a
    witness string each.
    """

    vertices: tuple[SncVertex, ...]
    edges: tuple[tuple[str, str, str], ...]
    elements: tuple[str, ...]
    table: Mapping[tuple[str, str], str]
    vertex_action: Mapping[str, Mapping[str, str]]
    edge_action: Mapping[str, Mapping[str, EdgeImage]]
    vertex_weight: Mapping[str, int] = field(default_factory=dict)
    edge_weight: Mapping[str, int] = field(default_factory=dict)
    midpoints: Mapping[str, str] = field(default_factory=dict)
    identity: str = field(init=False)

    def __post_init__(self) -> None:
        verts = tuple(sorted(self.vertices, key=lambda v: id_key(v.id)))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: id_key(e[0]))))
        self._check_graph()
        object.__setattr__(self, "identity", self._check_group())
        self._complete_action()
        self._check_action()

    # --- construction checks -------------------------------------------------

    def _check_graph(self) -> None:
        vids = [v.id for v in self.vertices]
        if not vids:
            raise InvalidInput("skeleton needs at least one vertex")
        if len(set(vids)) != len(vids):
            raise InvalidInput("duplicate vertex id")
        eids = [e[0] for e in self.edges]
        if len(set(eids)) != len(eids):
            raise InvalidInput("duplicate edge id")
        for v in self.vertices:
            if v.multiplicity != 1:
                raise InvalidInput(f"vertex {v.id}: skeleton vertices have multiplicity 1")
        vset = set(vids)
        for eid, u, w in self.edges:
            if u not in vset or w not in vset:
                raise InvalidInput(f"edge {eid}: unknown endpoint")
        adj = defaultdict(set)
        for _, u, w in self.edges:
            adj[u].add(w)
            adj[w].add(u)
        seen = {vids[0]}
        todo = [vids[0]]
        while todo:
            for nb in adj[todo.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        if len(seen) != len(vids):
            raise InvalidInput("skeleton is not connected")
        marks = [m for v in self.vertices for m in v.marks]
        if len(set(marks)) != len(marks):
            raise InvalidInput("a mark appears on more than one vertex")

    def _check_group(self) -> str:
        els = self.elements
        if not els or len(set(els)) != len(els):
            raise InvalidInput("group elements must be distinct and nonempty")
        eset = set(els)
        for x, y in product(els, els):
            z = self.table.get((x, y))
            if z not in eset:
                raise InvalidInput(f"composition table missing or invalid at ({x}, {y})")
        ident = [e for e in els if all(self.table[(e, y)] == y == self.table[(y, e)] for y in els)]
        if len(ident) != 1:
            raise InvalidInput("composition table has no identity element")
        for x in els:
            if len({self.table[(x, y)] for y in els}) != len(els):
                raise InvalidInput(f"row of {x} is not a permutation")
            if len({self.table[(y, x)] for y in els}) != len(els):
                raise InvalidInput(f"column of {x} is not a permutation")
        if len(els) <= 64:
            for x, y, z in product(els, els, els):
                t = self.table
                if t[(t[(x, y)], z)] != t[(x, t[(y, z)])]:
                    raise InvalidInput(f"composition is not associative at ({x}, {y}, {z})")
        return ident[0]

    def _complete_action(self) -> None:
        vact, eact = {}, {}
        for x in self.elements:
            vact[x], eact[x] = _resolve_action(
                self.vertices, self.edges, self.vertex_action.get(x, {}),
                self.edge_action.get(x, {}), x,
            )
        object.__setattr__(self, "vertex_action", vact)
        object.__setattr__(self, "edge_action", eact)

    def _check_action(self) -> None:
        e = self.identity
        if any(k != v for k, v in self.vertex_action[e].items()) or any(
            k != i or r for k, (i, r) in self.edge_action[e].items()
        ):
            raise InvalidInput("identity element must act trivially")
        for x, y in product(self.elements, self.elements):
            xy = self.table[(x, y)]
            for v in self.vertex_action[y]:
                if self.vertex_action[xy][v] != self.vertex_action[x][self.vertex_action[y][v]]:
                    raise InvalidInput(f"action is not a homomorphism at ({x}, {y}) on vertex {v}")
            for eid in self.edge_action[y]:
                if self.edge_action[xy][eid] != self._compose_edge(x, y, eid):
                    raise InvalidInput(f"action is not a homomorphism at ({x}, {y}) on edge {eid}")
        by_id = {v.id: v for v in self.vertices}
        for x in self.elements:
            for v, img in self.vertex_action[x].items():
                if by_id[v].genus != by_id[img].genus:
                    raise InvalidInput(f"element {x} maps {v} to {img} of different genus")
                if self.vweight(v) != self.vweight(img):
                    raise InvalidInput(f"element {x} maps {v} to {img} of different weight")
                if by_id[v].marks and img != v:
                    raise InvalidInput(f"marked vertex {v} is moved by {x}")
            for eid, (img, _) in self.edge_action[x].items():
                if self.eweight(eid) != self.eweight(img):
                    raise InvalidInput(f"element {x} maps {eid} to {img} of different weight")
            for v, img in self.vertex_action[x].items():
                if (v in self.midpoints) != (img in self.midpoints):
                    raise InvalidInput(f"element {x} maps a midpoint to an ordinary vertex")

    def _compose_edge(self, x: str, y: str, eid: str) -> EdgeImage:
        mid, r1 = self.edge_action[y][eid]
        out, r2 = self.edge_action[x][mid]
        return out, r1 != r2

    # --- accessors -------------------------------------------------------------

    def vertex(self, vid: str) -> SncVertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def vweight(self, vid: str) -> int:
        return self.vertex_weight.get(vid, 1)

    def eweight(self, eid: str) -> int:
        return self.edge_weight.get(eid, 1)

    def ends(self) -> dict[str, tuple[str, str]]:
        return {eid: (u, w) for eid, u, w in self.edges}

    def flipped_edges(self) -> dict[str, str]:
        """Edge id -> an element mapping it onto itself with reversed orientation."""
        out = {}
        for x in self.elements:
            for eid, (img, rev) in self.edge_action[x].items():
                if img == eid and rev and eid not in out:
                    out[eid] = x
        return out

    # --- constructors ----------------------------------------------------------

    @classmethod
    def trivial(cls, vertices: Iterable[SncVertex], edges: Iterable[tuple[str, str, str]]) -> "GaloisSkeleton":
        return cls(tuple(vertices), tuple(edges), ("1",), {("1", "1"): "1"}, {}, {})

    @classmethod
    def from_generators(
        cls,
        vertices: Iterable[SncVertex],
        edges: Iterable[tuple[str, str, str]],
        generators: Mapping[str, tuple[Mapping[str, str], Mapping[str, str | EdgeImage]]],
    ) -> "GaloisSkeleton":
        """Close a set of generating automorphisms under composition.

        Elements are labelled by the shortest word reaching them, ``1`` for
        the identity; ``r*s`` means ``r`` after ``s``.
        """
        vertices = tuple(vertices)
        edges = tuple(edges)
        gens = {
            name: _resolve_action(vertices, edges, vmap, emap, name)
            for name, (vmap, emap) in sorted(generators.items())
        }
        vids = [v.id for v in sorted(vertices, key=lambda v: id_key(v.id))]
        eids = _sorted(e[0] for e in edges)

        def key(vm, em):
            return tuple(vm[v] for v in vids), tuple(em[e] for e in eids)

        def compose(a, b):  # a after b
            (va, ea), (vb, eb) = a, b
            vm = {v: va[vb[v]] for v in vids}
            em = {}
            for e in eids:
                mid, r1 = eb[e]
                out, r2 = ea[mid]
                em[e] = (out, r1 != r2)
            return vm, em

        ident = ({v: v for v in vids}, {e: (e, False) for e in eids})
        label_of = {key(*ident): "1"}
        acts = {"1": ident}
        queue = deque(["1"])
        while queue:
            cur = queue.popleft()
            for name, g in gens.items():
                nxt = compose(g, acts[cur])
                k = key(*nxt)
                if k not in label_of:
                    lab = name if cur == "1" else f"{name}*{cur}"
                    label_of[k] = lab
                    acts[lab] = nxt
                    queue.append(lab)
        labels = list(acts)
        table = {}
        for x, y in product(labels, labels):
            table[(x, y)] = label_of[key(*compose(acts[x], acts[y]))]
        return cls(
            vertices,
            edges,
            tuple(labels),
            table,
            {x: acts[x][0] for x in labels},
            {x: acts[x][1] for x in labels},
        )

    def subdivided(self) -> "GaloisSkeleton":
        """Barycentric subdivision of every edge flipped by some element."""
        flipped = self.flipped_edges()
        if not flipped:
            return self
        vids = {v.id for v in self.vertices}
        mid = {e: f"{e}.mid" for e in flipped}
        for e in flipped:
            for new in (mid[e], f"{e}.h0", f"{e}.h1"):
                if new in vids or new in self.ends():
                    raise InvalidInput(f"id {new!r} is reserved for subdivision")
        ends = self.ends()
        vertices = list(self.vertices)
        edges = []
        vweight = dict(self.vertex_weight)
        eweight = {}
        midpoints = dict(self.midpoints)
        for eid, u, w in self.edges:
            if eid in flipped:
                vertices.append(SncVertex(mid[eid], 1, 0))
                vweight[mid[eid]] = self.eweight(eid)
                midpoints[mid[eid]] = f"midpoint of {eid}, flipped by {flipped[eid]}"
                edges += [(f"{eid}.h0", u, mid[eid]), (f"{eid}.h1", mid[eid], w)]
                eweight[f"{eid}.h0"] = eweight[f"{eid}.h1"] = self.eweight(eid)
            else:
                edges.append((eid, u, w))
                if eid in self.edge_weight:
                    eweight[eid] = self.edge_weight[eid]
        vact = {}
        eact = {}
        for x in self.elements:
            vm = dict(self.vertex_action[x])
            em = {}
            for eid in ends:
                img, rev = self.edge_action[x][eid]
                if eid in flipped:
                    vm[mid[eid]] = mid[img]
                    h0, h1 = (f"{img}.h1", f"{img}.h0") if rev else (f"{img}.h0", f"{img}.h1")
                    em[f"{eid}.h0"] = (h0, rev)
                    em[f"{eid}.h1"] = (h1, rev)
                else:
                    em[eid] = (img, rev)
            vact[x] = vm
            eact[x] = em
        return GaloisSkeleton(
            tuple(vertices), tuple(edges), self.elements, self.table,
            vact, eact, vweight, eweight, midpoints,
        )

    def restrict(self, subgroup: Iterable[str]) -> "GaloisSkeleton":
        h = _sorted(set(subgroup))
        hset = set(h)
        if self.identity not in hset or not hset <= set(self.elements):
            raise InvalidInput("subgroup must contain the identity and consist of group elements")
        for x, y in product(h, h):
            if self.table[(x, y)] not in hset:
                raise InvalidInput("subgroup is not closed under composition")
        return GaloisSkeleton(
            self.vertices, self.edges, tuple(h),
            {(x, y): self.table[(x, y)] for x, y in product(h, h)},
            {x: self.vertex_action[x] for x in h},
            {x: self.edge_action[x] for x in h},
            self.vertex_weight, self.edge_weight, self.midpoints,
        )

    def inverse(self, x: str) -> str:
        for y in self.elements:
            if self.table[(x, y)] == self.identity:
                return y
        raise AssertionError("group without inverses")  # pragma: no cover

    def is_normal(self, subgroup: Iterable[str]) -> bool:
        hset = set(subgroup)
        t = self.table
        return all(t[(t[(g, h)], self.inverse(g))] in hset for g in self.elements for h in hset)

    def induced(self, subgroup: Iterable[str]) -> "GaloisSkeleton":
        """The action of ``G/H`` on the quotient by a normal subgroup ``H``."""
        hset = set(subgroup)
        if not self.is_normal(hset):
            raise InvalidInput("staged quotients are only defined for normal subgroups")
        base = self.subdivided()
        q = quotient(base.restrict(hset))
        vorb = {lift: qv.id for qv in q.vertices for lift in qv.lifts}
        eorb = {lift: qe.id for qe in q.edges for lift in qe.lifts}
        cosets: dict[str, str] = {}
        for g in _sorted(base.elements):
            members = {base.table[(g, h)] for h in hset}
            label = _sorted(members)[0]
            for m in members:
                cosets[m] = label
        labels = _sorted(set(cosets.values()))
        table = {(a, b): cosets[base.table[(a, b)]] for a, b in product(labels, labels)}
        hlist = _sorted(hset)
        vact: dict[str, dict[str, str]] = {}
        eact: dict[str, dict[str, EdgeImage]] = {}
        for c in labels:
            vact[c] = {qv.id: vorb[base.vertex_action[c][qv.id]] for qv in q.vertices}
            em = {}
            for qe in q.edges:
                img, r = base.edge_action[c][qe.id]
                rep = eorb[img]
                for h in hlist:
                    hi, hr = base.edge_action[h][rep]
                    if hi == img:
                        em[qe.id] = (rep, r != hr)
                        break
            eact[c] = em
        vertices = tuple(SncVertex(qv.id, 1, qv.genus, qv.marks) for qv in q.vertices)
        edges = tuple((qe.id, qe.u, qe.w) for qe in q.edges)
        mids = {qv.id: base.midpoints[qv.id] for qv in q.vertices if qv.id in base.midpoints}
        return GaloisSkeleton(
            vertices, edges, tuple(labels), table, vact, eact,
            {qv.id: qv.s for qv in q.vertices},
            {qe.id: qe.s for qe in q.edges},
            mids,
        )


# --- quotient --------------------------------------------------------------------


@dataclass(frozen=True)
class QVertex:
    id: str
    genus: int
    s: int
    fold: bool
    midpoint: bool
    witness: str | None
    lifts: tuple[str, ...]
    marks: tuple[str, ...] = ()


@dataclass(frozen=True)
class QEdge:
    id: str
    u: str
    w: str
    s: int
    lifts: tuple[str, ...]


@dataclass(frozen=True)
class QuotientSkeleton:
    vertices: tuple[QVertex, ...]
    edges: tuple[QEdge, ...]

    def vertex(self, vid: str) -> QVertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise InvalidInput(f"unknown quotient vertex {vid!r}")

    @property
    def ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    def incident(self, vid: str) -> list[QEdge]:
        out = []
        for e in self.edges:
            if e.u == vid:
                out.append(e)
            if e.w == vid:
                out.append(e)
        return out

    def degree(self, vid: str) -> int:
        return len(self.incident(vid))

    def effective_degree(self, vid: str) -> int:
        return self.degree(vid) + len(self.vertex(vid).marks)

    def marks(self) -> dict[str, str]:
        return {m: v.id for v in self.vertices for m in v.marks}

    def with_marks(self, marks: Mapping[str, str]) -> "QuotientSkeleton":
        ids = set(self.ids)
        for m, vid in marks.items():
            if vid not in ids:
                raise InvalidInput(f"mark {m} placed on unknown vertex {vid!r}")
        where = defaultdict(list)
        for m, vid in marks.items():
            where[vid].append(m)
        verts = tuple(
            QVertex(v.id, v.genus, v.s, v.fold, v.midpoint, v.witness, v.lifts,
                    tuple(_sorted(where.get(v.id, ()))))
            for v in self.vertices
        )
        return QuotientSkeleton(verts, self.edges)

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        for v in self.vertices:
            g.add_node(v.id, genus=v.genus, s=v.s, fold=v.fold, midpoint=v.midpoint)
        for e in self.edges:
            g.add_edge(e.u, e.w, key=e.id, s=e.s)
        return g


def quotient(sk: GaloisSkeleton) -> QuotientSkeleton:
    """Quotient graph with splitting numbers and fold flags."""
    sk = sk.subdivided()
    ends = sk.ends()
    genus = {v.id: v.genus for v in sk.vertices}
    marks = {v.id: v.marks for v in sk.vertices}

    vorb: dict[str, str] = {}
    vlifts: dict[str, list[str]] = {}
    for v in _sorted(genus):
        if v in vorb:
            continue
        orbit = _sorted({sk.vertex_action[x][v] for x in sk.elements})
        for u in orbit:
            vorb[u] = orbit[0]
        vlifts[orbit[0]] = orbit

    eorb: dict[str, str] = {}
    elifts: dict[str, list[str]] = {}
    for e in _sorted(ends):
        if e in eorb:
            continue
        orbit = _sorted({sk.edge_action[x][e][0] for x in sk.elements})
        for f in orbit:
            eorb[f] = orbit[0]
        elifts[orbit[0]] = orbit

    qedges = []
    for rep, lifts in elifts.items():
        u, w = ends[rep]
        qedges.append(QEdge(rep, vorb[u], vorb[w], sum(sk.eweight(f) for f in lifts), tuple(lifts)))

    qverts = []
    for rep, lifts in vlifts.items():
        s = sum(sk.vweight(u) for u in lifts)
        fold, witness = False, None
        if rep in sk.midpoints:
            fold, witness = True, sk.midpoints[rep]
        else:
            for qe in qedges:
                if rep in (qe.u, qe.w) and qe.s == 2 * s:
                    fold, witness = True, _fold_witness(sk, rep, qe, eorb)
                    break
        qverts.append(QVertex(rep, genus[rep], s, fold, rep in sk.midpoints, witness,
                              tuple(lifts), marks[rep]))
    qverts.sort(key=lambda v: id_key(v.id))
    qedges.sort(key=lambda e: id_key(e.id))
    return QuotientSkeleton(tuple(qverts), tuple(qedges))


def _fold_witness(sk: GaloisSkeleton, v: str, qe: QEdge, eorb: Mapping[str, str]) -> str:
    ends = sk.ends()
    here = [f for f in qe.lifts if v in ends[f]]
    for x in sk.elements:
        if sk.vertex_action[x][v] != v:
            continue
        for f in here:
            img = sk.edge_action[x][f][0]
            if img != f and img in here:
                return f"{x} fixes {v} and exchanges {f} with {img}"
    return f"inherited: edge {qe.id} has twice the splitting number of {v}"


# --- splitting, nodes, bending points ---------------------------------------


@dataclass(frozen=True)
class SplittingProfile:
    vertex_s: Mapping[str, int]
    edge_s: Mapping[str, int]
    discontinuous: frozenset[str]


def splitting_profile(q: QuotientSkeleton) -> SplittingProfile:
    disc = frozenset(v.id for v in q.vertices if any(e.s != v.s for e in q.incident(v.id)))
    return SplittingProfile(
        {v.id: v.s for v in q.vertices}, {e.id: e.s for e in q.edges}, disc
    )


def nodes(q: QuotientSkeleton) -> frozenset[str]:
    """Positive genus, effective degree other than 2, or a jump of ``s``."""
    disc = splitting_profile(q).discontinuous
    out = frozenset(
        v.id for v in q.vertices
        if v.genus > 0 or q.effective_degree(v.id) != 2 or v.id in disc
    )
    if not out:
        raise InvalidInput(
            "the skeleton has no nodes: an unmarked curve of genus <= 1 needs a marked point"
        )
    return out


def bending_points(q: QuotientSkeleton) -> frozenset[str]:
    """Genus-0 leaf nodes folded over an edge of twice their splitting number."""
    out = set()
    for x in nodes(q):
        v = q.vertex(x)
        inc = q.incident(x)
        if v.genus == 0 and len(inc) == 1 and inc[0].s == 2 * v.s and v.fold:
            out.add(x)
    return frozenset(out)


# --- complements and triangulations -----------------------------------------


def classify_complement(
    q: QuotientSkeleton, vertex_set: Iterable[str], marks: Mapping[str, str] | None = None
) -> list[ComponentClass]:
    """Classify every connected component of the skeleton minus ``vertex_set``.

    Raises :class:`InvalidInput` if some component is neither a disc, a
    two-ended annulus nor a one-ended annulus, or a mark falls in an annulus.
    """
    vset = set(vertex_set)
    ids = set(q.ids)
    if not vset:
        raise InvalidInput("empty vertex set")
    if not vset <= ids:
        raise InvalidInput(f"unknown vertices {_sorted(vset - ids)}")
    if marks is None:
        marks = q.marks()
    marked = defaultdict(list)
    for m, vid in marks.items():
        marked[vid].append(m)

    parent: dict[str, str] = {}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for v in ids - vset:
        parent["v:" + v] = "v:" + v
    for e in q.edges:
        parent["e:" + e.id] = "e:" + e.id
    for e in q.edges:
        for x in (e.u, e.w):
            if x not in vset:
                parent[find("e:" + e.id)] = find("v:" + x)

    groups: dict[str, list[str]] = defaultdict(list)
    for k in parent:
        groups[find(k)].append(k)

    out = []
    for members in sorted(groups.values(), key=lambda ms: id_key(min(ms, key=id_key))):
        verts = _sorted(k[2:] for k in members if k.startswith("v:"))
        edges = [e for e in q.edges if "e:" + e.id in members]
        attach = []
        for e in edges:
            for x in (e.u, e.w):
                if x in vset:
                    attach.append(x)
        attach = _sorted(attach)
        label = verts or [e.id for e in edges]
        tree = len(edges) == len(verts) + len(attach) - 1
        folds = [v for v in verts if q.vertex(v).fold]
        inside_marks = [m for v in verts for m in marked.get(v, ())]
        degs = {v: q.degree(v) for v in verts}
        pathlike = all(d <= 2 for d in degs.values())
        if any(q.vertex(v).genus > 0 for v in verts) or not tree or not attach:
            raise InvalidInput(f"component {label} is not a virtual disc or annulus")
        if len(attach) == 1 and not folds:
            cls = ComponentClass("virtual_disc", tuple(attach), None, tuple(verts))
        elif len(attach) == 1 and len(folds) == 1 and degs[folds[0]] == 1 and pathlike:
            cls = ComponentClass("virtual_annulus_one_end", tuple(attach), folds[0], tuple(verts))
        elif len(attach) == 2 and not folds and all(d == 2 for d in degs.values()):
            cls = ComponentClass("virtual_annulus_two_ends", tuple(attach), None, tuple(verts))
        else:
            raise InvalidInput(f"component {label} is not a virtual disc or annulus")
        if inside_marks and cls.kind != "virtual_disc":
            raise InvalidInput(f"marked point {inside_marks[0]} lies in a virtual annulus")
        out.append(cls)
    return out


def is_triangulation(
    q: QuotientSkeleton, vertex_set: Iterable[str], *, strong: bool = False,
    marks: Mapping[str, str] | None = None,
) -> bool:
    try:
        comps = classify_complement(q, vertex_set, marks)
    except InvalidInput:
        return False
    return not strong or all(c.kind != "virtual_annulus_one_end" for c in comps)


def _leaf_path(q: QuotientSkeleton, start: str, stop: frozenset[str]) -> tuple[list[str], str | None]:
    """Walk from a leaf through vertices outside ``stop``; return path and the vertex reached."""
    path = [start]
    prev_edge = None
    cur = start
    while True:
        inc = [e for e in q.incident(cur) if e is not prev_edge]
        if len(inc) != 1:
            return path, None
        prev_edge = inc[0]
        cur = prev_edge.w if prev_edge.u == cur else prev_edge.u
        if cur in stop:
            return path, cur
        path.append(cur)


def minimal_triangulation_marked(
    q: QuotientSkeleton, marks: Mapping[str, str] | None = None
) -> frozenset[str]:
    """Nodes minus the bending points that can be dropped without touching a mark.

    A bending point is droppable when no mark lies on it or on the segment
    leading from it to the next node; the segment then becomes a one-ended
    annulus.  Two droppable bending points facing each other cannot both go,
    and then there is no unique minimum.
    """
    if marks is not None:
        q = q.with_marks(marks)
    marks = q.marks()
    marked_vertices = set(marks.values())
    n = nodes(q)
    targets = {}
    for b in bending_points(q):
        path, target = _leaf_path(q, b, n)
        if target is None or marked_vertices.intersection(path):
            continue
        targets[b] = target
    clash = _sorted(b for b, t in targets.items() if t in targets)
    if clash:
        raise InvalidInput(
            "no unique minimal triangulation: bending points "
            + " and ".join(clash) + " can each be dropped but not both"
        )
    result = n - frozenset(targets)
    if not result:  # pragma: no cover - a droppable point needs a kept target
        raise InvalidInput("no admissible nonempty triangulation")
    classify_complement(q, result, marks)
    return result


# --- comparison ----------------------------------------------------------------


def same_shape(a: QuotientSkeleton, b: QuotientSkeleton) -> bool:
    """Isomorphic as graphs with (genus, s, fold, midpoint) on vertices and s on edges."""
    def nm(x, y):
        return all(x[k] == y[k] for k in ("genus", "s", "fold", "midpoint"))

    def em(x, y):
        return sorted(d["s"] for d in x.values()) == sorted(d["s"] for d in y.values())

    return MultiGraphMatcher(a.to_networkx(), b.to_networkx(), node_match=nm, edge_match=em).is_isomorphic()


# --- text records ------------------------------------------------------------------


def loads(text: str) -> GaloisSkeleton:
    vertices: list[SncVertex] = []
    edges: list[tuple[str, str, str]] = []
    rows: list[tuple[int, list[str]]] = []
    acts: list[tuple[int, list[str]]] = []
    order = None
    for lineno, tokens in iter_records(text, (HEADER,)):
        kind = tokens[0]
        if kind == "v":
            vertices.append(parse_vertex(tokens, lineno))
        elif kind == "e":
            if len(tokens) < 3:
                raise GraphFormatError("edge line must be 'e <id> <id> [id=<eid>]'", lineno)
            fields = parse_fields(tokens[3:], lineno, ("id",))
            edges.append((fields.get("id", f"e{len(edges) + 1}"), tokens[1], tokens[2]))
        elif kind == "group":
            if len(tokens) != 2 or order is not None:
                raise GraphFormatError("expected a single 'group <n>' line", lineno)
            order = parse_int(tokens[1], lineno, "group", 1)
        elif kind == "row":
            rows.append((lineno, tokens[1:]))
        elif kind == "act":
            acts.append((lineno, tokens[1:]))
        else:
            raise GraphFormatError(f"unknown record type {kind!r}", lineno)

    if order is None:
        if rows or acts:
            raise GraphFormatError("'row'/'act' lines need a preceding 'group <n>' line")
        try:
            return GaloisSkeleton.trivial(vertices, edges)
        except InvalidInput as exc:
            raise GraphFormatError(str(exc)) from None
    if len(rows) != order:
        raise GraphFormatError(f"group of order {order} needs {order} row lines, got {len(rows)}")
    labels = [r[1][0] if r[1] else "" for r in rows]
    table = {}
    for lineno, row in rows:
        if len(row) != order + 1:
            raise GraphFormatError(f"row needs {order} products", lineno)
        x = row[0]
        for y, z in zip(labels, row[1:]):
            table[(x, y)] = z
    vact: dict[str, dict[str, str]] = defaultdict(dict)
    eact: dict[str, dict[str, tuple[str, bool | None]]] = defaultdict(dict)
    for lineno, tok in acts:
        if len(tok) < 3 or tok[1] not in ("v", "e") or ">" not in tok[2]:
            raise GraphFormatError("expected 'act <elt> v|e <a>><b> [rev]'", lineno)
        elt, what, pair = tok[0], tok[1], tok[2]
        if elt not in labels:
            raise GraphFormatError(f"unknown group element {elt!r}", lineno)
        src, _, dst = pair.partition(">")
        extra = tok[3:]
        if what == "v":
            if extra:
                raise GraphFormatError("vertex action takes no flags", lineno)
            if src in vact[elt]:
                raise GraphFormatError(f"vertex {src} acted on twice", lineno)
            vact[elt][src] = dst
        else:
            if extra not in ([], ["rev"]):
                raise GraphFormatError(f"unexpected flags {extra}", lineno)
            if src in eact[elt]:
                raise GraphFormatError(f"edge {src} acted on twice", lineno)
            eact[elt][src] = (dst, True if extra else None)
    try:
        return GaloisSkeleton(tuple(vertices), tuple(edges), tuple(labels), table,
                              dict(vact), dict(eact))
    except InvalidInput as exc:
        raise GraphFormatError(str(exc)) from None


def load(path) -> GaloisSkeleton:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(sk: GaloisSkeleton) -> str:
    from .sncgraph import vertex_line

    lines = [HEADER]
    lines += [vertex_line(v) for v in sk.vertices]
    lines += [f"e {u} {w} id={eid}" for eid, u, w in sk.edges]
    els = list(sk.elements)
    lines.append(f"group {len(els)}")
    for x in els:
        lines.append("row " + " ".join([x] + [sk.table[(x, y)] for y in els]))
    for x in els:
        for v, img in sk.vertex_action[x].items():
            if img != v:
                lines.append(f"act {x} v {v}>{img}")
        ends = sk.ends()
        for e, (img, rev) in sk.edge_action[x].items():
            if img == e and not rev:
                continue
            line = f"act {x} e {e}>{img}"
            if rev and ends[e][0] == ends[e][1]:
                line += " rev"
            lines.append(line)
    return "\n".join(lines) + "\n"
