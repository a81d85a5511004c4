"""Exception hierarchy shared by every qdissect module."""


class QDissectError(Exception):
    """Base class for all errors raised by this package."""


class ZeroLeadingCoefficient(QDissectError, ZeroDivisionError):
    pass


class PrecisionExceeded(QDissectError):
    """A coefficient was requested at or beyond the guaranteed precision."""


class ZeroTheta(QDissectError):
    """Theta(q^a; q^m) with m | a vanishes identically."""


class DivergentProduct(QDissectError):
    pass


class NonGenericParameters(QDissectError):
    """Appell-Lerch parameters hit a pole or a vanishing theta prefactor."""


class RuleNotApplicable(QDissectError):
    pass


class UnsupportedLevel(QDissectError):
    pass


class LevelMismatch(QDissectError):
    """Some factor modulus does not divide the chosen level."""


class NotModular(QDissectError):
    """A monomial is not a weight-zero generalized eta quotient."""


class DslSyntaxError(QDissectError):
    def __init__(self, message, span=None, expected=()):
        self.span = span
        self.expected = tuple(expected)
        where = f" at {span.start}..{span.end}" if span is not None else ""
        if self.expected:
            message = f"{message}{where}; expected one of: {', '.join(self.expected)}"
        else:
            message = f"{message}{where}"
        super().__init__(message)


class UnknownName(DslSyntaxError):
    pass


class NotAThetaCombination(QDissectError):
    def __init__(self, message, span=None):
        self.span = span
        super().__init__(message)


class EvaluationError(QDissectError):
    """Wraps a failure raised while evaluating a DSL node."""

    def __init__(self, message, span=None):
        self.span = span
        super().__init__(message)


class ManifestError(QDissectError):
    pass
