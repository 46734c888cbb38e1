"""Exception hierarchy shared across the package."""


class FourVortexError(Exception):
    pass


class DomainError(FourVortexError, ValueError):
    """Input outside the domain of an operation."""


class DegenerateParameterError(DomainError):
    pass


class NonexistenceError(FourVortexError):
    """The requested family has no solutions at this parameter value."""


class CollisionError(FourVortexError):
    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class PlanarityError(FourVortexError):
    pass


class GeometryError(FourVortexError):
    pass


class AmbiguityError(FourVortexError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class BoundaryEvent(FourVortexError):
    """Parameter sits too close to a bifurcation value for a reliable count."""

    def __init__(self, message, m=None, nearest=None, name=None, records=()):
        super().__init__(message)
        self.m = m
        self.nearest = nearest
        self.name = name
        self.records = list(records)


class NoEquilibriumError(FourVortexError):
    pass
