"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data violates a series or file contract."""


class ConfigError(ValueError):
    """A configuration value is out of range or unknown."""


class FitError(RuntimeError):
    """Model estimation did not converge.

    Carries optimizer diagnostics so callers (and ranked-model tables)
    can report why the candidate was dropped.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class SelectionError(RuntimeError):
    """Every candidate model failed to fit."""

    def __init__(self, message, failures=None):
        super().__init__(message)
        # list of (spec_text, error_message) pairs
        self.failures = list(failures or [])
