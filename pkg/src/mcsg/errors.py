"""Exception hierarchy shared across the package.

Every error raised by library code derives from McsgError so that callers
(CLI, HTTP service) can map failures to diagnostics in one place.
"""


class McsgError(Exception):
    """Base class for all errors raised by this package."""


class DatasetFormatError(McsgError):
    """The dataset container is malformed (bad JSON, missing fields, bad sidecar)."""


class DatasetValidationError(McsgError):
    """The dataset parsed but violates an invariant (dimensions, mask, mz order)."""


class NotFoundError(McsgError):
    """A referenced identifier (channel, community, node, metric) does not exist."""


class InsufficientDataError(McsgError):
    """The input is too small for the requested computation."""


class IntegrityError(McsgError):
    """Graph and hierarchy are inconsistent with each other."""


class EditError(McsgError):
    """An edit command is invalid for the current graph state."""


class PolygonError(McsgError):
    """A lasso polygon is degenerate or self-intersecting after cleanup."""


class EmptyRegionError(McsgError):
    """A lasso polygon covers no masked pixel."""


class ImportDocumentError(McsgError):
    """A JSON graph document failed schema or referential validation.

    The message carries a JSON-path-like locator (e.g. ``nodes[3].members[1]``).
    """


class EditNoOpWarning(UserWarning):
    """Signals that an edit command had no effect (e.g. reassign into same community)."""
