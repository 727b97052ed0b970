"""Exception hierarchy shared by the engine, the DSL and the service layer."""


class EngineError(Exception):
    """Base class for every error raised by tangentcalc."""


class ZeroDenominator(EngineError):
    """A denominator normalized to the zero polynomial."""


class PoleAtPoint(EngineError):
    """Numeric evaluation hit a zero of the denominator."""


class UnboundGenerator(EngineError):
    """Numeric evaluation found a generator with no value assigned."""


class InconsistentBinding(EngineError):
    """A substitution binds a formal partial in conflict with its symbol,
    or substitutes coordinates underneath an unbound function symbol."""


class NotBaseOnly(EngineError):
    """An operation restricted to base objects received fiber-dependent input."""


class ArityMismatch(EngineError):
    """Number of vector arguments does not match the degree of the form."""


class UnsupportedDegree(EngineError):
    """The derivation calculus is implemented for vector-valued forms of
    low degree only."""


class NotSemiBasic(EngineError):
    """Input form has a fiber coframe index where none is allowed."""


class NotClosed(EngineError):
    """Input form fails the required closedness condition."""


class NonPolynomialFiberDependence(EngineError):
    """The fiberwise homotopy needs polynomial dependence on fiber coordinates."""


class NotAboveMu(EngineError):
    """A candidate form does not contract through the mirror map onto the
    claimed base form."""


class NotInverse(EngineError):
    """A chart transition whose forward/inverse pair fails the round trip."""


class UnknownLift(EngineError):
    """Naturality check requested for a lift kind that does not exist."""


class DslError(EngineError):
    """Base class for DSL front-end errors; carries source position."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self):
        if self.line is None:
            return self.message
        return f"{self.message} (line {self.line}, column {self.column})"


class DslSyntaxError(DslError):
    """Malformed DSL source text."""


class UndeclaredName(DslError):
    """A name was referenced before being declared."""


class IndexOutOfRange(DslError):
    """A coordinate index lies outside 1..m for the declared dimension."""
