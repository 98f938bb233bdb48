"""
Error hierarchy for the tnsd workbench
"""
from typing import Any, Dict, Optional


class TnsdError(Exception):
    """Base class for every error raised by the workbench"""


class GraphParseError(TnsdError):
    """Malformed graph input; `offset` is the byte offset of the problem"""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class GraphValidationError(TnsdError):
    """Well-formed input that does not describe a simple graph"""


class DomainError(TnsdError, ValueError):
    """An operation was called outside its precondition"""


class InvalidVertexError(DomainError):
    pass


class StaleOccurrenceError(DomainError):
    """A configuration occurrence no longer holds on the graph it is applied to"""


class ColouringError(TnsdError):
    """A colouring refers to colours or elements the graph/palette does not have"""


class InternalInconsistencyError(TnsdError):
    """A proof step failed although its preconditions held.

    This signals a transcription bug (or a gap in the argument) and is never
    swallowed: the command line archives `context` and exits with status 3.
    """

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.context = context or {}
