"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` and the CLI exit
status it maps to (2 parse, 3 numeric, 4 conditions failed).
"""


class WindlineError(Exception):
    code = "WindlineError"
    exit_code = 3

    def to_dict(self):
        d = {"code": self.code, "message": str(self), "exit_code": self.exit_code}
        for key in ("field", "line", "column"):
            if getattr(self, key, None) is not None:
                d[key] = getattr(self, key)
        return d


# -- parsing / input ---------------------------------------------------------

class ParseError(WindlineError):
    code = "ParseError"
    exit_code = 2

    def __init__(self, msg, pos=None):
        super().__init__(msg if pos is None else f"{msg} (at position {pos})")
        self.pos = pos

    def to_dict(self):
        d = super().to_dict()
        d["position"] = self.pos
        return d


class ExpressionSyntaxError(ParseError):
    code = "SyntaxError"


class UnknownFunction(ParseError):
    code = "UnknownFunction"

    def __init__(self, name, pos=None):
        super().__init__(f"unknown function '{name}'", pos)
        self.name = name


class NonHolomorphic(ParseError):
    code = "NonHolomorphic"


class ProblemFileError(ParseError):
    code = "ProblemFileError"


# -- geometry ----------------------------------------------------------------

class InvalidCurve(WindlineError):
    code = "InvalidCurve"


class NonImmersion(WindlineError):
    code = "NonImmersion"


class TooManyHits(WindlineError):
    code = "TooManyHits"


class MissingSecondDerivative(WindlineError):
    code = "MissingSecondDerivative"


class InsufficientSamples(WindlineError):
    code = "InsufficientSamples"


# -- integration -------------------------------------------------------------

class NoConvergence(WindlineError):
    code = "NoConvergence"


class NonFiniteIntegrand(WindlineError):
    code = "NonFiniteIntegrand"


class SingularityOnPath(WindlineError):
    code = "SingularityOnPath"


class OverlappingExclusions(WindlineError):
    code = "OverlappingExclusions"


class WindowEscape(WindlineError):
    code = "WindowEscape"


# -- winding -----------------------------------------------------------------

class PointOnCurve(WindlineError):
    code = "PointOnCurve"


class OracleMismatch(WindlineError):
    code = "OracleMismatch"


class NotC11NearHit(WindlineError):
    code = "NotC11NearHit"


class DetourOverlap(WindlineError):
    code = "DetourOverlap"


# -- laurent / grt -----------------------------------------------------------

class AnnulusViolation(WindlineError):
    code = "AnnulusViolation"


class IrrationalAngle(WindlineError):
    code = "IrrationalAngle"


class NotNullHomologous(WindlineError):
    code = "NotNullHomologous"


class ConditionsFailed(WindlineError):
    code = "ConditionsFailed"
    exit_code = 4
