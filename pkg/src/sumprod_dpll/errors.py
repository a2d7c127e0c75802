"""Exception types raised across the package."""


class SumProdError(Exception):
    """Base class for all errors raised by this package."""


class FormulaError(SumProdError, ValueError):
    pass


class TautologyError(FormulaError):
    pass


class NonIntegralCount(SumProdError, ArithmeticError):
    pass


class InvalidDecomposition(SumProdError, ValueError):
    pass


class HypergraphTooSmall(SumProdError, ValueError):
    pass


class NoBranchableVariable(SumProdError, RuntimeError):
    pass


class FactorScopeViolation(SumProdError, ValueError):
    pass


class InvalidPseudoTree(SumProdError, ValueError):
    pass


class VarNotInScope(SumProdError, KeyError):
    pass


class InstanceTooLarge(SumProdError, ValueError):
    pass


class UnsupportedSemiring(SumProdError, ValueError):
    pass


class ParameterOutOfRange(SumProdError, ValueError):
    pass


class ParseError(SumProdError, ValueError):
    """Malformed input text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HeaderMismatch(ParseError):
    pass


class ScopeOutOfRange(ParseError):
    pass


class TableLengthMismatch(ParseError):
    pass


class KindMismatch(ParseError):
    pass
