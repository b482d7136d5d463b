"""Exception hierarchy shared by all qwalk modules."""

from __future__ import annotations


class QWalkError(Exception):
    """Base class for every error raised by this package."""


# graph model
class GraphError(QWalkError, ValueError):
    pass


class NTooSmall(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class DisconnectedAnomaly(GraphError):
    pass


class NonUnitaryBehavior(GraphError):
    pass


class ParseError(GraphError):
    def __init__(self, message: str, *, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


# operators
class DimensionMismatch(QWalkError, ValueError):
    pass


class BasisMismatch(QWalkError, ValueError):
    pass


class NonUnitaryResult(QWalkError, RuntimeError):
    pass


# spectral analysis
class EigensolverFailure(QWalkError, RuntimeError):
    pass


class PhaseDegeneracy(QWalkError):
    """exp(i phi) + lambda0**2 vanishes for an active right eigenvalue."""

    def __init__(self, message: str, *, lambdas: list[complex] | None = None):
        self.lambdas = lambdas or []
        super().__init__(message)


class NoMatch(QWalkError):
    """No left and right active eigenvector share an eigenvalue."""

    def __init__(self, message: str, *, right_eigenvalues: list[complex] | None = None,
                 suggestions: list[dict] | None = None):
        self.right_eigenvalues = right_eigenvalues or []
        self.suggestions = suggestions or []
        super().__init__(message)


class AmbiguousMatch(QWalkError):
    def __init__(self, message: str, *, candidates: list[complex]):
        self.candidates = candidates
        super().__init__(message)


class FitDivergence(QWalkError):
    pass


class ZeroDelta(QWalkError, ValueError):
    pass


# walk engine
class ZeroCoupling(QWalkError, ValueError):
    pass


class TrialsExhausted(QWalkError):
    def __init__(self, message: str, *, trials: int):
        self.trials = trials
        super().__init__(message)


# experiments
class UnresolvedFamily(QWalkError):
    pass
