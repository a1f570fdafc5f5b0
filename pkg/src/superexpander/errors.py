"""Exception hierarchy shared by every module."""


class ExpanderError(Exception):
    """Base class for all library errors."""


class NonRegularError(ExpanderError, ValueError):
    """Row sums of a multiplicity matrix are not all equal."""


class MultiplicityOverflow(ExpanderError, OverflowError):
    """A multiplicity or degree does not fit in 64 unsigned bits."""


class DegreeMismatch(ExpanderError, ValueError):
    """The small factor of a product does not have d1 vertices."""


class NotBipartite(ExpanderError, ValueError):
    pass


class TooLarge(ExpanderError, ValueError):
    """A dense routine was asked to handle a matrix above its threshold."""


class NoConvergence(ExpanderError, RuntimeError):
    def __init__(self, iterations, residual):
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


class CapExceeded(ExpanderError, ValueError):
    """Brute-force enumeration would exceed the configured cap."""


class NotFound(ExpanderError, RuntimeError):
    pass


class PrecisionError(ExpanderError, ArithmeticError):
    """A floor could not be certified at the available precision."""


class HypothesisViolation(ExpanderError, ValueError):
    """Inputs fall outside the range where an arithmetic check applies."""


class InfeasibleSchedule(ExpanderError, ValueError):
    pass


class ParseError(ExpanderError, ValueError):
    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
