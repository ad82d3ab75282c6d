"""Exact enumeration of self-avoiding walks, polygons and bridges on
quasi-transitive graphs, with graph height functions and the tube
construction that turns bridges into polygons."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AssemblyError,
    BudgetExceeded,
    CapExceeded,
    ConfigurationError,
    ConsistencyError,
    ConstructionError,
    CountOverflow,
    InputError,
    PolygrowthError,
    PropertyViolation,
)
from .graphs import CATALOG, Vertex, get_graph  # noqa: E402
from .series import CountSeries  # noqa: E402

__all__ = [
    "AssemblyError",
    "BudgetExceeded",
    "CATALOG",
    "CapExceeded",
    "ConfigurationError",
    "ConsistencyError",
    "ConstructionError",
    "CountOverflow",
    "CountSeries",
    "InputError",
    "PolygrowthError",
    "PropertyViolation",
    "Vertex",
    "__version__",
    "get_graph",
]
