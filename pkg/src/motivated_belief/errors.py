"""Exception hierarchy.

Everything raised on purpose by the package derives from
:class:`MotivatedBeliefError`. The CLI maps :class:`ConfigError` to exit
code 1 and every other subclass to exit code 2.
"""


class MotivatedBeliefError(Exception):
    """Base class for package errors."""


class InvalidDistribution(MotivatedBeliefError, ValueError):
    pass


class DimensionMismatch(MotivatedBeliefError, ValueError):
    pass


class SupportViolation(MotivatedBeliefError, ValueError):
    """q puts mass on a state where the reference distribution has none."""


class ZeroEvidence(MotivatedBeliefError, ValueError):
    """The observation has zero marginal probability under the prior."""


class LambdaNonPositive(MotivatedBeliefError, ValueError):
    pass


class DegenerateProblem(MotivatedBeliefError, ValueError):
    """No state keeps positive weight after combining prior, likelihood and utility."""


class UnsupportedDimension(MotivatedBeliefError, ValueError):
    pass


class EmptyMenu(MotivatedBeliefError, ValueError):
    pass


class NotConverged(MotivatedBeliefError, RuntimeError):
    """Raised by the numeric solver; ``result`` holds the best iterate found."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class AxisMismatch(MotivatedBeliefError, ValueError):
    pass


class OutputError(MotivatedBeliefError, OSError):
    pass


class ConfigError(MotivatedBeliefError, ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ValidationError(ConfigError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
