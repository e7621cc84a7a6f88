"""Exception types shared by every module.

Each exception carries a machine-readable ``code`` used by the CLI when it
serialises failures.
"""


class KernelError(Exception):
    code = "KernelError"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"code": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: str(v) for k, v in sorted(self.details.items())}
        return out


class NotDivisible(KernelError):
    code = "NotDivisible"


class TowerDegreeInfinite(KernelError):
    code = "TowerDegreeInfinite"


class MembershipUndecidedAtBound(KernelError):
    code = "MembershipUndecidedAtBound"


class MonotonicityViolation(KernelError):
    code = "MonotonicityViolation"


class NotStabilized(KernelError):
    code = "NotStabilized"


class PositiveSigmaDimension(KernelError):
    code = "PositiveSigmaDimension"


class BaseMismatch(KernelError):
    code = "BaseMismatch"


class InseparableMinimalPolynomial(KernelError):
    code = "InseparableMinimalPolynomial"


class StabilizationNotReached(KernelError):
    code = "StabilizationNotReached"


class ZeroFunction(KernelError):
    code = "ZeroFunction"


class UniverseIncomplete(KernelError):
    code = "UniverseIncomplete"


class SearchExhausted(KernelError):
    code = "SearchExhausted"


class EmptyFiber(KernelError):
    code = "EmptyFiber"


class BasisSearchExhausted(KernelError):
    code = "BasisSearchExhausted"


class SeparationUndecided(KernelError):
    code = "SeparationUndecided"


class SemilinearityViolation(KernelError):
    code = "SemilinearityViolation"


class InvalidPresentation(KernelError):
    code = "InvalidPresentation"


class Unsupported(KernelError):
    code = "Unsupported"


class ParseError(KernelError):
    code = "ParseError"

    def __init__(self, message, position):
        super().__init__(f"{message} at column {position}", position=position)
        self.position = position


class UndeclaredName(KernelError):
    code = "UndeclaredName"


class SchemaError(KernelError):
    code = "SchemaError"
