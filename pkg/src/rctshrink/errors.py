"""Exception types.

Every error carries a short machine-readable ``code`` which the command-line
front end prints verbatim.
"""


class RctShrinkError(Exception):
    code = "error"


class InvalidInputError(RctShrinkError, ValueError):
    code = "invalid-input"


class DegenerateFitError(RctShrinkError):
    code = "degenerate-fit"


class InsufficientAcceptancesError(RctShrinkError):
    code = "insufficient-acceptances"


class EmptyInputError(RctShrinkError):
    code = "empty-after-filtering"


class SchemaMismatchError(RctShrinkError):
    code = "schema-mismatch"


class VersionUnsupportedError(RctShrinkError):
    code = "version-unsupported"
