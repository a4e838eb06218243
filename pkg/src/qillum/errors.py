"""Package-wide exception types."""


class NumericFailure(RuntimeError):
    """A numerical routine could not produce a trustworthy result.

    Raised with a diagnostic message (residual norms, offending values)
    when a decomposition or linear solve degrades beyond its contract.
    Invalid inputs raise ValueError instead.
    """
