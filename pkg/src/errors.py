"""Exception hierarchy shared by the engine and the CLI."""

from typing import Optional


class MonopoleStarError(Exception):
    """Base class for every error the engine raises on bad input."""


class ParseError(MonopoleStarError, ValueError):
    """Expression text does not conform to the grammar."""

    def __init__(self, message: str, position: int, text: Optional[str] = None):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class FieldError(MonopoleStarError, ValueError):
    """A magnetic-field component is not a polynomial in q1, q2, q3."""


class ArityError(MonopoleStarError, TypeError):
    """A cochain was evaluated on the wrong number of arguments."""


class SeriesOrderError(MonopoleStarError, ValueError):
    """Truncation orders of two series (or of a series and a product) disagree."""


class PreconditionError(MonopoleStarError, ValueError):
    """An operation was called outside the hypotheses it is valid under."""


class ConfigError(MonopoleStarError, ValueError):
    """Run configuration is malformed or names an unknown check."""
