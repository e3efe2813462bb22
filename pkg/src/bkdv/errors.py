"""Exception hierarchy shared by all bkdv modules."""


class BkdvError(Exception):
    """Base class of every error raised by this package."""


class ParseError(BkdvError):
    """Malformed expression text. `offset` is the byte position of the problem."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnknownFunction(ParseError):
    pass


class DomainError(BkdvError):
    """Numeric evaluation left the real domain (log/sqrt of nonpositive, zero division...)."""


class UnboundParameter(BkdvError):
    pass


class NotTimeFunction(BkdvError):
    """An expression required to depend on t alone contains other variables."""


class MissingKey(BkdvError):
    pass


class InvariantViolation(BkdvError):
    pass


class Degenerate(BkdvError):
    """Transformation violates the nondegeneracy condition T_t * X1 != 0."""


class InverseUnavailable(BkdvError):
    pass


class NonMonotoneT(BkdvError):
    pass


class AnalyticIntegrationUnsupported(BkdvError):
    """1/C has no antiderivative in the closed-form catalog."""


class NotGauged(BkdvError):
    pass


class AmbiguousFit(BkdvError):
    pass


class InadmissibleParams(BkdvError):
    pass


class NotInvariant(BkdvError):
    """The requested subalgebra is not a symmetry of the given equation."""


class NoRealRoot(BkdvError):
    pass


class Blowup(BkdvError):
    """Finite-time blow-up detected during ODE integration."""

    def __init__(self, t_escape):
        super().__init__(f"solution exceeded the blow-up guard near t = {t_escape:.6g}")
        self.t_escape = t_escape


class NonAffineEquation(BkdvError):
    pass


class GridTooCoarse(BkdvError):
    pass


class DependentBasis(BkdvError):
    pass
