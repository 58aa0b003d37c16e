"""Error types raised by the geometry language front end."""

from __future__ import annotations

from .ast import Loc


class GeoLangError(Exception):
    """Base class for language errors; carries a source location."""

    def __init__(self, message: str, loc: Loc | None = None):
        self.loc = loc
        where = f" at {loc}" if loc else ""
        super().__init__(f"{message}{where}")


class GeoSyntaxError(GeoLangError):
    def __init__(self, line: int, col: int, expected: set[str], found: str):
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        self.found = found
        want = ", ".join(sorted(expected))
        super().__init__(f"expected {want}, found {found}", Loc(line, col))


class UnknownSymbol(GeoLangError):
    pass


class ArityMismatch(GeoLangError):
    pass


class SortMismatch(GeoLangError):
    pass


class DuplicateSymbol(GeoLangError):
    pass


class UnknownBodySymbol(GeoLangError):
    pass
