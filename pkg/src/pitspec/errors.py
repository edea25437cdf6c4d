"""Exception hierarchy shared across the package.

Every error raised on a documented failure path derives from
:class:`PitspecError`, so callers (and the CLI exit-code mapping) can
distinguish our failures from programming errors.
"""


class PitspecError(Exception):
    """Base class for all pitspec errors."""


class DegenerateSampleError(PitspecError, ValueError):
    """The sample is too short (or too flat) for the requested quantity."""


class InsufficientSampleError(PitspecError, ValueError):
    """A lag or order exceeds what the sample length supports."""


class StationarityError(PitspecError, ValueError):
    """Parameters violate the stationarity region of the model."""


class LikelihoodError(PitspecError, ArithmeticError):
    """The log-likelihood evaluated to a nonfinite value."""


class FitError(PitspecError, RuntimeError):
    """Maximum-likelihood fitting failed on the original data."""


class UnstableBootstrapError(PitspecError, RuntimeError):
    """Too many bootstrap replicates failed to refit."""


class InputError(PitspecError, ValueError):
    """A data file is unreadable, empty, or malformed."""


class ConfigError(PitspecError, ValueError):
    """A flag, model identifier, plan file, or level is not recognized."""
