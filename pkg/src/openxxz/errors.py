"""Exception types shared across the workbench."""


class OpenXXZError(Exception):
    """Base class for all workbench errors."""


class SingularPoint(OpenXXZError):
    """A denominator or validity condition fell inside the genericity guard.

    Carries the offending quantity's label and its magnitude so callers can
    redraw parameters instead of propagating garbage.
    """

    def __init__(self, label, value=None):
        self.label = label
        self.value = value
        msg = f"singular point: {label}"
        if value is not None:
            msg += f" (|value| = {abs(value):.3e})"
        super().__init__(msg)


class ActionCheckFailed(OpenXXZError):
    """A reference vector failed its defining operator-action identities."""


class ZeroVectorWarning(UserWarning):
    """A constructed state has (numerically) zero norm; results downstream
    of it are meaningless.  Warned, not raised: degenerate root sets are a
    legitimate thing to probe."""


class Diverged(OpenXXZError):
    """Newton iteration failed to converge within the step budget."""


class SingularJacobian(OpenXXZError):
    """Newton step hit a numerically singular Jacobian."""


class StuckAtSingularLocus(OpenXXZError):
    """An iterate landed inside the guard distance of a singular locus."""


class PathCollision(OpenXXZError):
    """Two tracked root sets merged during a continuation path."""


class StepUnderflow(OpenXXZError):
    """Continuation step size shrank below the minimum."""


class AmbiguousMatch(OpenXXZError):
    """Two candidate eigenvalues are too close to assign a root set."""


class ConfigError(OpenXXZError):
    """A run configuration file or command-line override is invalid."""
