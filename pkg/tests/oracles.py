"""Independent reference computations used by the tests.

Each oracle is written without calling the code it checks.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from functools import reduce
from itertools import count


def cf_terms(q: Fraction) -> list[int]:
    """Expansion by repeated floor and reciprocal."""
    q = Fraction(q)
    out = []
    while True:
        a = math.floor(q)
        out.append(a)
        q -= a
        if q == 0:
            return out
        q = 1 / q


def cf_eval(terms) -> Fraction:
    """Back-to-front evaluation."""
    acc = Fraction(terms[-1])
    for a in reversed(terms[:-1]):
        acc = a + 1 / acc
    return acc


def unimodular(q1: Fraction, q2: Fraction) -> bool:
    return abs(q1.numerator * q2.denominator - q2.numerator * q1.denominator) == 1


def farey_points(lo: Fraction, hi: Fraction, bound: int) -> list[Fraction]:
    pts = set()
    for b in range(1, bound + 1):
        for a in range(math.ceil(lo * b), math.floor(hi * b) + 1):
            pts.add(Fraction(a, b))
    return sorted(pts)


def min_pieces(lo: Fraction, hi: Fraction, bound: int | None = None) -> int:
    """Fewest unimodular steps from lo to hi through all rationals up to a
    generous denominator bound (BFS over the explicit point set)."""
    if bound is None:
        bound = 2 * max(lo.denominator, hi.denominator)
    pts = farey_points(lo, hi, bound)
    dist = {lo: 0}
    todo = deque([lo])
    while todo:
        cur = todo.popleft()
        if cur == hi:
            return dist[cur]
        for p in pts:
            if p > cur and p not in dist and unimodular(cur, p):
                dist[p] = dist[cur] + 1
                todo.append(p)
    raise AssertionError("unreachable")


def least_tame_degree(mults, p: int) -> int | None:
    """Brute-force search for the least d prime to p with every m | d."""
    top = reduce(math.lcm, mults, 1)
    if p > 1 and top % p == 0:
        return None
    step = max(mults, default=1)
    for d in count(step, step):
        if (p == 1 or d % p) and all(d % m == 0 for m in mults):
            return d
    return None  # pragma: no cover


def alpha_closed_form(mults) -> Fraction:
    total = sum(Fraction(1, a * b) for a, b in zip(mults, mults[1:]))
    return (1 - total) % 1


def orbit_size(sk, v: str) -> int:
    """|G| / |Stab(v)|."""
    stab = sum(1 for x in sk.elements if sk.vertex_action[x][v] == v)
    return len(sk.elements) // stab


def edge_orbit_size(sk, e: str) -> int:
    stab = sum(1 for x in sk.elements if sk.edge_action[x][e][0] == e)
    return len(sk.elements) // stab
