"""Exception hierarchy shared by all modules."""


class ParamExclError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(ParamExclError, ValueError):
    pass


class DivisionByZeroInterval(ParamExclError, ZeroDivisionError):
    pass


class DomainError(ParamExclError, ValueError):
    pass


class ArithOverflow(ParamExclError, OverflowError):
    pass


class ArithUnderflow(ParamExclError, ArithmeticError):
    pass


class AmbiguousFloor(ParamExclError):
    """The enclosure straddles an integer boundary; retry at higher precision."""


class ChainSingularity(ParamExclError):
    def __init__(self, field, reason=""):
        self.field = field
        self.reason = reason
        super().__init__(f"singular value while computing {field}: {reason}".rstrip(": "))


class InvalidEta(ParamExclError, ValueError):
    pass


class NonResonanceFailure(ParamExclError):
    pass


class PrecisionExhausted(ParamExclError):
    pass


class NotFound(ParamExclError):
    def __init__(self, n_limit):
        self.n_limit = n_limit
        super().__init__(f"no escape time found below n = {n_limit}")


class Undecided(ParamExclError):
    def __init__(self, k, what="derivative sum"):
        self.k = k
        super().__init__(f"{what} enclosure contains 0 at k = {k}")


class EmptySpace(ParamExclError, ValueError):
    pass
