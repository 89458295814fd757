# errors.py
"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration: bad key, bad value, or inconsistent scenario."""


class StepRejected(RuntimeError):
    """A finite-volume update produced a cell below the positivity tolerance.

    This signals a CFL violation (or a bug); results are never clamped.
    """


class DiagnosticFailure(RuntimeError):
    """A runtime bound check exceeded its tolerance."""
