"""Exception hierarchy shared by all modules."""


class ConicSpectraError(Exception):
    """Base class for errors raised by :mod:`conic_spectra`."""


class InvalidGeometryError(ConicSpectraError, ValueError):
    pass


class DegenerateOrbitError(ConicSpectraError, ValueError):
    """Raised for L = 0 (radial plunge) where the orbit formulas break down."""


class IntegrationError(ConicSpectraError, RuntimeError):
    pass


class NoBoundMotionError(ConicSpectraError, ValueError):
    """Energy lies below the minimum of the effective potential."""


class DenominatorPoleError(ConicSpectraError, ZeroDivisionError):
    """A Pochhammer symbol (b)_k vanished inside a terminating 1F1 series."""


class DivergentNormError(ConicSpectraError, ValueError):
    pass


class FormulaNotApplicableError(ConicSpectraError, ValueError):
    pass
