"""Exception taxonomy shared by all modules.

The CLI maps these onto its exit-code contract: ParseError -> 2,
ValidationError -> 3, InfeasibleError / PlanMismatchError -> 4.
"""


class SrrError(Exception):
    """Base class for all srrplan errors."""


class ParseError(SrrError):
    """A file could not be decoded (bad magic, truncation, malformed JSON...).

    Where the problem is locatable, the message names the byte offset.
    """


class ValidationError(SrrError):
    """Structurally decodable input that violates a semantic invariant."""


class InfeasibleError(SrrError):
    """A pruning budget that cannot be met under the per-layer floors."""


class PlanMismatchError(SrrError):
    """A pruning plan that does not fit the model it is applied to."""
