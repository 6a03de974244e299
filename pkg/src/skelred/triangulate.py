"""Principal vertices, Saito's degree, tame minimal strong triangulations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping

from .errors import InvalidInput, WildError
from .exactmath import lcm
from .sncgraph import (
    Chain,
    SncGraph,
    check_wellformed,
    chains,
    id_key,
    principal_vertices,
)

ComponentKind = Literal["virtual_disc", "virtual_annulus_two_ends", "virtual_annulus_one_end"]


@dataclass(frozen=True)
class ComponentClass:
    kind: ComponentKind
    boundary: tuple[str, ...]
    bending_vertex: str | None = None
    vertices: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if (self.kind == "virtual_annulus_two_ends") != (len(self.boundary) == 2):
            raise InvalidInput("two-ended annuli have exactly two boundary entries")
        if (self.kind == "virtual_annulus_one_end") != (self.bending_vertex is not None):
            raise InvalidInput("only one-ended annuli carry a bending vertex")


@dataclass(frozen=True)
class SaitoReport:
    lcm: int
    residue_char: int
    tame: bool
    degree: int | None


@dataclass(frozen=True)
class Triangulation:
    vertices: tuple[str, ...]
    components: tuple[ComponentClass, ...]
    report: SaitoReport


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, math.isqrt(n) + 1))


def check_residue_char(p: int) -> int:
    """``p`` is a characteristic exponent: 1 or a prime."""
    p = int(p)
    if p != 1 and not _is_prime(p):
        raise InvalidInput(f"residue characteristic exponent must be 1 or a prime, got {p}")
    return p


def principalize(g: SncGraph) -> frozenset[str]:
    """Vertices of positive genus or effective degree at least three."""
    check_wellformed(g)
    pr = principal_vertices(g)
    if not pr:
        raise InvalidInput(
            "no principal vertex: an unmarked graph of genus < 2 has none "
            "(mark a rational point or supply a genus >= 2 graph)"
        )
    return pr


def saito_report(multiplicities: Iterable[int], p: int) -> SaitoReport:
    """lcm of the principal multiplicities and whether ``p`` is tame for it."""
    p = check_residue_char(p)
    mults = [int(m) for m in multiplicities]
    if not mults:
        raise InvalidInput("saito_report needs at least one multiplicity")
    if any(m < 1 for m in mults):
        raise InvalidInput("multiplicities must be positive")
    n = lcm(mults)
    tame = p == 1 or n % p != 0
    return SaitoReport(n, p, tame, n if tame else None)


def saito_report_graph(g: SncGraph, p: int) -> SaitoReport:
    return saito_report((g.multiplicity(v) for v in principalize(g)), p)


def classify_chain(c: Chain) -> ComponentClass:
    if c.dangling:
        return ComponentClass("virtual_disc", (c.vertices[0],), None, c.vertices[1:])
    return ComponentClass(
        "virtual_annulus_two_ends", (c.vertices[0], c.vertices[-1]), None, c.interior
    )


def minimal_strong_triangulation_tame(g: SncGraph, p: int) -> Triangulation:
    """The principal set, valid as the minimal strong triangulation when tame."""
    pr = principalize(g)
    report = saito_report((g.multiplicity(v) for v in pr), p)
    if not report.tame:
        raise WildError(
            f"tame hypothesis violated: p={report.residue_char} divides lcm {report.lcm} "
            "of the principal multiplicities, so the principal set need not be the "
            "minimal strong triangulation"
        )
    comps = tuple(classify_chain(c) for c in chains(g, pr))
    return Triangulation(tuple(sorted(pr, key=id_key)), comps, report)


def is_semistable(g: SncGraph) -> bool:
    return all(v.multiplicity == 1 for v in g.vertices)


def base_change_tame(
    g: SncGraph, d: int, p: int, vertices: Iterable[str] | None = None
) -> dict[str, int]:
    """New multiplicities ``m / gcd(m, d)`` after a tame extension of degree ``d``.

    Only the multiplicities of existing vertices are transformed; applicable
    when ``d`` is prime to ``p`` or ``p`` divides none of the multiplicities.
    """
    p = check_residue_char(p)
    if d < 1:
        raise InvalidInput("degree must be positive")
    ids = sorted(vertices if vertices is not None else g.ids, key=id_key)
    for vid in ids:
        if vid not in g:
            raise InvalidInput(f"unknown vertex {vid!r}")
    if p > 1 and d % p == 0:
        bad = [v for v in ids if g.multiplicity(v) % p == 0]
        if bad:
            raise WildError(
                f"base change of degree {d} is wild (p={p} divides d and the "
                f"multiplicity of {', '.join(bad)}); the multiplicity formula does not apply"
            )
    return {v: g.multiplicity(v) // math.gcd(g.multiplicity(v), d) for v in ids}


def least_semistable_degree(mults: Mapping[str, int] | Iterable[int], p: int) -> int | None:
    """Least ``d`` prime to ``p`` making every multiplicity 1, or None if wild."""
    values = list(mults.values()) if isinstance(mults, Mapping) else list(mults)
    return saito_report(values, p).degree
