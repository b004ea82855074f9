"""Exception hierarchy shared across the package."""


class RagaCausalError(Exception):
    """Base class for all errors raised by ragacausal."""


class UnknownRaga(RagaCausalError, KeyError):
    def __init__(self, raga_id):
        self.raga_id = raga_id
        super().__init__(raga_id)

    def __str__(self):
        return f"raga {self.raga_id!r} is not in the scale database"


class UnknownToken(RagaCausalError, ValueError):
    def __init__(self, token, line=None, column=None):
        self.token = token
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}, column {column}"
        super().__init__(f"unknown notation token {token!r}{where}")

    def __str__(self):
        return self.args[0]


class AmbiguousSvara(RagaCausalError, ValueError):
    pass


class EmptyComposition(RagaCausalError, ValueError):
    pass


class ZeroDurationMeasure(RagaCausalError, ValueError):
    pass


class NegativeSymbol(RagaCausalError, ValueError):
    pass


class EmptyPool(RagaCausalError, ValueError):
    pass


class WindowTooLong(RagaCausalError, ValueError):
    pass


class MinLengthZero(RagaCausalError, ValueError):
    pass


class EmptySequence(RagaCausalError, ValueError):
    pass


class LengthMismatch(RagaCausalError, ValueError):
    pass


class NoCrossPairs(RagaCausalError, ValueError):
    pass


class CorpusTooShort(RagaCausalError, ValueError):
    pass


class OrderUnsupported(RagaCausalError, ValueError):
    pass


class NonConvergence(RagaCausalError, RuntimeError):
    pass


class GenerationStalled(RagaCausalError, RuntimeError):
    pass


class EmptyExperiment(RagaCausalError, ValueError):
    pass
