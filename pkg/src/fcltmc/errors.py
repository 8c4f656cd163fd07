"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A precondition on grids, parameters, or budgets was violated.

    The CLI maps this to exit code 2; the message names the violated
    precondition.
    """


class AssertionFailure(RuntimeError):
    """A hard statistical assertion failed; CLI exit code 1."""
