"""Shared exception types.

Every error carries a machine `code` (the wire vocabulary used by the API
and the CLI) and the HTTP status the server maps it to.
"""


class FredaError(Exception):
    code = "malformed_request"
    http_status = 400


class MalformedMarkup(FredaError):
    """Corrupt corpus line: unbalanced brackets, empty surface, bad fields."""


class EmptyInput(FredaError):
    """Tokenizer input was empty or whitespace-only."""


class NoTaskAvailable(FredaError):
    code = "no_task"
    http_status = 404


class StaleRound(FredaError):
    code = "stale_round"
    http_status = 409


class DuplicateAnnotator(FredaError):
    code = "duplicate_annotator"
    http_status = 409


class InvalidPairTypes(FredaError):
    code = "invalid_pair_types"
    http_status = 422


class UnknownSentence(FredaError):
    code = "unknown_sentence"
    http_status = 404


class NotAdjudicated(FredaError):
    """Verdict requested for a state that is not adjudicated."""


class TypeMismatch(FredaError):
    """A verdict pair violates the relation's type signature."""


class NoValidMentionPair(FredaError):
    """Every (subject mention, object mention) pair overlaps."""


class DegenerateClassBalance(FredaError):
    """A relation's training set has no positive or no negative examples."""


class TooFewSentences(FredaError):
    """Fewer than two sentences: nothing to split."""


class UnknownKey(FredaError):
    """A prediction references a key absent from the gold set."""


class UnknownRelation(FredaError):
    """An aggregate subset names a relation absent from the report."""


class EmptyTable(FredaError):
    """Kappa requested on an all-zero contingency table."""
