"""Combinatorics of skeletons of curves: fractional annuli, snc dual graphs,
tame triangulations, Galois quotients and Kodaira types."""

from __future__ import annotations

from .errors import GraphFormatError, InvalidInput, NoMatch, SkelredError, WildError
from .exactmath import ContinuedFraction, Rational, cf_expand, cf_value, parse_rational

__all__ = [
    "ContinuedFraction",
    "GraphFormatError",
    "InvalidInput",
    "NoMatch",
    "Rational",
    "SkelredError",
    "WildError",
    "cf_expand",
    "cf_value",
    "parse_rational",
]
