"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class carries the status name
it should be reported under.
"""

from __future__ import annotations


class SkelredError(Exception):
    status = "invalid_input"


class InvalidInput(SkelredError, ValueError):
    """Malformed or out-of-contract input."""


class GraphFormatError(InvalidInput):
    """A graph record could not be parsed."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class WildError(SkelredError):
    """A tameness hypothesis fails, so the requested statement does not apply."""

    status = "wild_refusal"


class NoMatch(SkelredError):
    """Shape recognition found no template."""

    status = "no_match"
