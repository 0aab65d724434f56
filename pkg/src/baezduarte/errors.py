"""Exception types shared across the package."""


class BaezDuarteError(Exception):
    """Base class for computational errors raised by this package."""


class PoleError(BaezDuarteError):
    """An evaluation point coincides with a pole of the function."""


class NonConvergenceError(BaezDuarteError):
    """An iteration or adaptive series failed to reach its tolerance."""


class ResourceLimitError(BaezDuarteError):
    """A computation exceeds a configured size ceiling."""


class ZerosFormatError(BaezDuarteError):
    """A zeros file or cache file violates its format contract."""
