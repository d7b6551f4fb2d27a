# errors.py
"""Exception hierarchy for predictable, user-facing failures."""


class PerfDomError(Exception):
    """Raised for predictable, user-facing errors in perfdom operations."""


class BoardInputError(PerfDomError):
    """Bad dimensions, squares, constraints, pins, lattices or input files."""


class UnsupportedCaseError(BoardInputError):
    """A construction was requested for a board shape it does not cover."""


class ResourceGuardError(PerfDomError):
    """A size guard (cells, rows, band height) refused the request."""
