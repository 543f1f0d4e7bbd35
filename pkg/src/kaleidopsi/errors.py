"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: ParameterError -> 2, ProtocolError -> 3,
file/parse problems (DataError) -> 4.
"""


class KaleidoError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(KaleidoError):
    """A caller-supplied value violates a precondition."""


class GroupParameterError(ParameterError):
    """The cyclic-group parameters are inconsistent (e.g. p does not divide q-1)."""


class DomainError(ParameterError):
    """An item is not present in the agreed attribute domain."""


class ProtocolError(KaleidoError):
    """A run-time violation of the PSI protocol (missing submissions, mismatched vectors)."""


class FramingError(ProtocolError):
    """A wire frame could not be decoded.

    Carries the byte offset at which decoding failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class TransportError(ProtocolError):
    """A connection-level failure, annotated with the endpoint identity."""


class DataError(KaleidoError):
    """A data file could not be read or parsed."""
