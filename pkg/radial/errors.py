from typing import Any, Optional


class RadialError(ValueError):
    """Base error for the radial solver stack. `code` is stable and shows up in reports."""

    code = "RadialError"

    def __init__(self, message: str = "", **details: Any):
        super().__init__(f"{self.code}: {message}" if message else self.code)
        self.details = details


class NonFiniteInput(RadialError):
    code = "NonFiniteInput"


class NegativeInput(RadialError):
    code = "NegativeInput"


class DegenerateDenominator(RadialError):
    code = "DegenerateDenominator"


class ZeroFunction(RadialError):
    code = "ZeroFunction"


class BracketFailure(RadialError):
    code = "BracketFailure"


class BlowUp(RadialError):
    code = "BlowUp"


class NoSignChange(RadialError):
    code = "NoSignChange"


class GradientInconsistency(RadialError):
    code = "GradientInconsistency"


class ZeroBoundaryValue(RadialError):
    code = "ZeroBoundaryValue"


class InadmissibleProblem(RadialError):
    code = "InadmissibleProblem"


class NotConverged(RadialError):
    """Iteration cap reached. `best` holds the best iterate or partial result."""

    code = "NotConverged"

    def __init__(self, message: str = "", best: Optional[Any] = None, **details: Any):
        super().__init__(message, **details)
        self.best = best
