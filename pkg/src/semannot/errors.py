"""Exception types shared across the package."""

from __future__ import annotations


class AnnotError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(AnnotError):
    """An input file (ontology, model, rules, store, config) is malformed."""

    def __init__(self, message: str, *, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        prefix = ""
        if source:
            prefix = source if line is None else f"{source}:{line}"
        elif line is not None:
            prefix = f"line {line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class RuleSyntaxError(FormatError):
    """Rule file failed to parse; carries the offending position."""


class UnknownEntityError(AnnotError):
    """A graph operation referenced an entity id that is not in the graph."""

    def __init__(self, entity_id: str):
        self.entity_id = entity_id
        super().__init__(f"unknown entity: {entity_id}")


class InvariantViolation(AnnotError):
    """A domain invariant was violated; names the invariant for reporting."""

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")
