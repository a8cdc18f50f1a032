"""Exception types shared across the package.

Two failure families matter to callers: bad configuration (wrong
exponents, malformed grids, incompatible tags) and numerical guards
tripping at run time (spectral leakage, degenerate norms, engine
disagreement).  The CLI maps them to exit codes 2 and 3.
"""


class ConfigError(ValueError):
    """Invalid parameters, grids, exponents or boundary tags."""


class BoundaryTagError(ConfigError):
    """A tagged field was used against its boundary condition."""


class NumericalGuardError(RuntimeError):
    """A run-time sanity guard fired; the result would be untrustworthy."""
