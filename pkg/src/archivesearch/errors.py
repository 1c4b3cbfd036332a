"""Exception types shared across the package."""


class ArchiveSearchError(Exception):
    """Base class for all errors raised by this package."""


class IngestionError(ArchiveSearchError):
    """A data file could not be parsed. Carries the offending line number."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DuplicateTitleError(IngestionError):
    """Two records share a canonical title within one language."""


class EntityNotFoundError(ArchiveSearchError, LookupError):
    """An entity id or title is not present in the queried structure."""


class UrlNormalizationError(ArchiveSearchError):
    """A URL could not be parsed as an absolute URL."""


class TransportError(ArchiveSearchError):
    """An upstream service could not be reached. Carries the URL."""

    def __init__(self, message: str, url: str | None = None):
        self.url = url
        super().__init__(message)


class ProviderError(ArchiveSearchError):
    """The search provider rejected the query; carries upstream detail."""


class ProtocolError(ArchiveSearchError):
    """An upstream payload did not match the expected wire format."""


class SnapshotConflictError(ArchiveSearchError):
    """A snapshot with the same (query key, retrieved_at) already exists."""


class ConfigError(ArchiveSearchError):
    """Service configuration is invalid or references missing files."""
