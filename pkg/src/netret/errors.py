"""Exception types shared across the package."""


class NetretError(Exception):
    """Base class for all netret errors."""


class EmptyCorpus(NetretError):
    """No document in the corpus produced any token."""


class DuplicateDocId(NetretError):
    """Two documents share the same id."""


class UnknownDoc(NetretError):
    """Requested document is absent from the index or not rankable."""


class EmptyQuery(NetretError):
    """No query term maps to the vocabulary."""


class NotSinglyConnected(NetretError):
    """The term layer contains an undirected cycle."""


class InconsistentEvidence(NetretError):
    """The instantiated evidence has probability zero."""


class ZeroEvidence(NetretError):
    """Enumeration found no configuration consistent with the evidence."""


class TooLarge(NetretError):
    """Instance exceeds the hard guard of a brute-force oracle."""
