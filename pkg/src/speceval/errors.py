"""Exception types shared across the toolkit."""


class SpecevalError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(SpecevalError):
    """A document is structurally unusable: missing field, wrong type, unreadable file."""


class InvariantError(SpecevalError):
    """A document parsed fine but violates a domain invariant."""


class NegativeBytes(SpecevalError):
    """A byte count that must be >= 0 was negative."""


class EndpointUnreachable(SpecevalError):
    """The remote browser endpoint did not accept a connection."""


class ProtocolVersionMismatch(SpecevalError):
    """The browser endpoint rejected session creation."""


class NavigationTimeout(SpecevalError):
    """Navigation did not complete within the configured timeout."""


class PageCrashed(SpecevalError):
    """The page or browser tab died while under evaluation."""


class StaleCandidate(SpecevalError):
    """A DOM candidate vanished between capture and probe."""


class ProbeTimeout(SpecevalError):
    """A behavior probe did not finish within the configured timeout."""


class PageUnresolved(SpecevalError):
    """No application URL could be assigned to an annotated page."""

    def __init__(self, page_id: str, detail: str = ""):
        self.page_id = page_id
        msg = f"no URL resolved for page {page_id!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ProviderUnavailable(SpecevalError):
    """No embedding provider reachable and no cached vector present."""


class DimensionMismatch(SpecevalError):
    """Embedding vectors of different dimensions were combined."""


class EmptyPairSet(SpecevalError):
    """Visual similarity was requested over zero page pairs."""


class EmptyAnnotationSet(SpecevalError):
    """Aggregation was requested over zero annotations."""


class UnknownDialect(SpecevalError):
    """A trace log does not match any known harness dialect."""


class MalformedEvent(SpecevalError):
    """A trace log event could not be interpreted."""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        if index is not None:
            message = f"event {index}: {message}"
        super().__init__(message)


class EmptyMutationStream(SpecevalError):
    """Diff scoring was requested on a trace with no file mutations."""


class DegenerateVariance(SpecevalError):
    """Correlation was requested on a constant series."""
