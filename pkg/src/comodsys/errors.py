"""Exception hierarchy shared by the classical and quantum engines."""


class ComodsysError(Exception):
    """Base class for all library errors."""


class UnboundSymbol(ComodsysError, KeyError):
    def __init__(self, symbol):
        super().__init__(f"symbol {symbol} is not bound")
        self.symbol = symbol

    def __str__(self):
        return self.args[0]


class DomainError(ComodsysError, ArithmeticError):
    """Division by zero, or a fractional power of a negative base."""


class InexactError(DomainError):
    """Exact evaluation would leave the rationals (irrational root, exp)."""


class SamplerExhausted(ComodsysError):
    pass


class UnknownGenerator(ComodsysError, KeyError):
    def __init__(self, symbol, algebra):
        super().__init__(f"{symbol} is not a generator of {algebra}")
        self.symbol = symbol

    def __str__(self):
        return self.args[0]


class NotCasimir(ComodsysError):
    pass


class EmbeddingNotHomomorphism(ComodsysError):
    pass


class ConditionViolated(ComodsysError):
    """Subalgebra coproduct has a left-leg factor outside the subalgebra."""

    def __init__(self, generator, term, offending):
        super().__init__(
            f"coproduct of {generator} has term {term} whose left leg involves "
            f"{offending}, which is outside the subalgebra"
        )
        self.generator = generator
        self.term = term
        self.offending = offending


class SiteCollision(ComodsysError):
    pass


class NonTerminating(ComodsysError):
    pass


class BudgetExceeded(ComodsysError):
    pass


class RewriteError(ComodsysError):
    """A rewrite system is malformed (missing rule, unknown letter, ...)."""


class UnknownModel(ComodsysError, KeyError):
    def __str__(self):
        return self.args[0]


class InvalidParameter(ComodsysError, ValueError):
    pass


class UnboundParameter(ComodsysError):
    pass


class SingularityApproach(ComodsysError):
    def __init__(self, time, state, guard):
        super().__init__(
            f"trajectory entered the singularity guard at t={time:.6g} "
            f"(guarded expression {guard})"
        )
        self.time = time
        self.state = state
        self.guard = guard


class StepSizeUnderflow(ComodsysError):
    pass


class ModelFileError(ComodsysError, ValueError):
    pass
