"""Exception hierarchy shared by every module of the package."""


class TasRelayError(Exception):
    """Base class for all errors raised by tasrelay."""


# -- configuration -----------------------------------------------------------

class ConfigError(TasRelayError, ValueError):
    """A single violated configuration invariant."""


class InvalidAntennaCount(ConfigError):
    pass


class InvalidModulationOrder(ConfigError):
    pass


class InvalidPowerSplit(ConfigError):
    pass


class InvalidChannelParameter(ConfigError):
    """Non-positive power, channel variance or noise level."""


class UnsupportedStbcSize(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    """Raised by :func:`tasrelay.model.validate_config`.

    ``errors`` holds one :class:`ConfigError` instance per violated invariant.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        msg = "; ".join(f"{type(e).__name__}: {e}" for e in self.errors)
        super().__init__(msg)


# -- numerics ----------------------------------------------------------------

class NumericalError(TasRelayError, ArithmeticError):
    pass


class NonConvergence(NumericalError):
    """Adaptive quadrature hit its subdivision depth limit."""


class CatastrophicCancellation(NumericalError):
    pass


class NoRootInInterval(NumericalError):
    pass


class NegativeSnr(TasRelayError, ValueError):
    pass


class NegativeArgument(TasRelayError, ValueError):
    pass


class DegenerateCodebook(TasRelayError, ValueError):
    """The codebook has coincident codewords or a zero distance sum."""


class DimensionMismatch(TasRelayError, ValueError):
    pass


# -- statistics --------------------------------------------------------------

class InsufficientPoints(TasRelayError, ValueError):
    pass


class ZeroSer(TasRelayError, ValueError):
    pass


class ZeroTotal(TasRelayError, ValueError):
    pass
