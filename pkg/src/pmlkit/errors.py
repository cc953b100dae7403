"""Exception hierarchy shared by all pmlkit modules.

The CLI maps these onto stable exit codes: validation problems exit 1,
oracle-guarantee violations exit 2, capacity/capability limits exit 3.
"""


class PmlError(Exception):
    """Base class for all pmlkit errors."""


class ValidationError(PmlError):
    """An input violates a documented invariant (e.g. row sum != 1)."""


class AlphabetMismatchError(ValidationError):
    """Two objects that must share an alphabet do not."""


class UnknownSymbolError(PmlError, KeyError):
    """A symbol lookup failed against an alphabet."""


class UnsupportedLawError(ValidationError):
    """A symbolic law descriptor names a family we cannot truncate."""


class ParameterError(ValidationError):
    """A closed-form family was given parameters outside its domain."""


class AbsoluteContinuityError(PmlError):
    """Posterior is not absolutely continuous w.r.t. the prior.

    Raised by routines (e.g. the partition oracle) that are only defined
    in the absolutely continuous case; the subset oracle handles the
    infinite-leakage case instead.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CapacityError(PmlError):
    """An enumeration would exceed its hard cap; never silently truncated."""


class CapabilityError(PmlError):
    """A requested check is not available for the given model family."""


class UndefinedOutcomeError(PmlError):
    """Density-based leakage queried at an outcome with zero marginal density."""
