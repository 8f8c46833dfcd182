"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class MargulisLabError(Exception):
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ExperimentFailed(MargulisLabError):
    exit_code = 1


class ParseError(MargulisLabError):
    exit_code = 2


class IndexOutOfRange(MargulisLabError, IndexError):
    exit_code = 2


class NumericDomainError(MargulisLabError):
    exit_code = 3


class NonFiniteInput(NumericDomainError):
    pass


class NotInSL2(NumericDomainError):
    pass


class NotHyperbolic(NumericDomainError):
    def __init__(self, detail: str, trace: float | None = None):
        super().__init__(detail)
        self.trace = trace


class NegativeTrace(NumericDomainError):
    pass


class DegenerateRepresentation(NumericDomainError):
    pass


class ResourceLimit(MargulisLabError):
    exit_code = 4
