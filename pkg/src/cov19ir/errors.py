"""Exception types shared across the package."""


class Cov19IrError(Exception):
    """Base class for all package errors."""


class MalformedRecord(Cov19IrError):
    """An article record is missing its id or cannot be parsed."""


class EmptyCorpus(Cov19IrError):
    """A corpus source yielded zero valid documents (or zero chunks)."""


class MalformedLexicon(Cov19IrError):
    """A lexicon file violates the keyword/synonym invariants."""


class ScorerError(Cov19IrError):
    """Base class for remote scoring failures."""


class TransportError(ScorerError):
    """Connection or timeout failure after the configured retries."""


class RemoteError(ScorerError):
    """The scoring server answered with a non-2xx status."""


class ProtocolError(ScorerError):
    """A scoring response violates the span/score invariants."""


class MalformedAnnotations(Cov19IrError):
    """An external entity-annotations file violates offset invariants."""


class NoTriplets(Cov19IrError):
    """Trainfile generation produced zero triplets (lexicon/corpus mismatch)."""


class EmptySquad(Cov19IrError):
    """Pair generation was given a trainfile with no triplets."""


class ConfigError(Cov19IrError):
    """Invalid configuration value or file."""
