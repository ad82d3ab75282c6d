"""Exception hierarchy.

Input/configuration problems and mathematical-property violations are kept
apart so the CLI can map them to different exit codes.
"""


class PolygrowthError(Exception):
    """Base class for all package errors."""


class InputError(PolygrowthError, ValueError):
    """Malformed vertex id, unknown catalog name, bad parameters."""


class ConfigurationError(PolygrowthError):
    """An automorphism or height function is used outside its domain."""


class BudgetExceeded(PolygrowthError):
    """A ball or search grew past the configured vertex budget."""


class CountOverflow(PolygrowthError, OverflowError):
    """A count left the 128-bit range."""

    def __init__(self, n, value):
        super().__init__(f"count at n={n} exceeds 128 bits ({value.bit_length()} bits)")
        self.n = n


class PropertyViolation(PolygrowthError):
    """An identity or axiom that must hold exactly was found violated."""


class ConsistencyError(PropertyViolation):
    """Internal counting inconsistency (e.g. odd c_{n-1}(root nbrs))."""


class AutomorphismError(PropertyViolation):
    """A supposed automorphism broke adjacency on a checked ball."""


class StiffPathError(PropertyViolation):
    """No stiff path between two orbits within the search cap."""


class ConstructionError(PolygrowthError):
    """The tube/polygon construction could not be carried out."""


class AssemblyError(ConstructionError):
    """Assembled closed walk failed self-avoidance or tube disjointness."""


class CapExceeded(ConstructionError):
    """No admissible parameter found below the requested cap."""
