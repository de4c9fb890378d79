"""
Exception hierarchy for tropigon.

Negative mathematical answers (not harmonic, rank -1, no divisor found) are
returned as values. The exceptions below signal broken contracts.
"""

from typing import Optional


class TropigonError(Exception):
    """Base class for every error raised by tropigon."""


class GraphError(TropigonError):
    """Invalid multigraph, unknown id or violated genus precondition."""


class MetricGraphError(GraphError):
    """Invalid length, offset or point on a metric graph."""


class DivisorError(TropigonError):
    """Invalid divisor input or exhausted reduction step guard."""


class MorphismError(TropigonError):
    """Structurally invalid morphism or unmet harmonicity precondition."""


class TrigonalBuilderError(TropigonError):
    """Failed precondition or runtime verification while building a trigonal cover."""


class ModuliError(TropigonError):
    """Invalid tree, class selection or genus range for the moduli enumeration."""


class DocumentError(TropigonError):
    """
    Schema violation in a JSON document.

    Attributes:
        field (Optional[str]): Dotted path of the offending field, when known
    """

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
