"""Exception hierarchy.

Every failure raised by the package derives from :class:`UniformizeError`
so that the command line front-end can map it to a machine-readable reason.
"""


class UniformizeError(Exception):
    """Base class for all package errors."""

    #: short machine-readable tag used in CLI error payloads
    code = "error"

    def to_dict(self):
        return {"error": self.code, "type": type(self).__name__, "message": str(self)}


# exact algebra
class InexactDivision(UniformizeError, ArithmeticError):
    code = "inexact-division"


class UndefinedGcd(UniformizeError, ValueError):
    code = "undefined-gcd"


class DegenerateResultant(UniformizeError, ValueError):
    code = "degenerate-resultant"


class PoleProximity(UniformizeError, ArithmeticError):
    code = "pole-proximity"


class ParseError(UniformizeError, ValueError):
    code = "parse-error"


# curves
class InvalidCurve(UniformizeError, ValueError):
    code = "invalid-curve"


class InvalidPlace(UniformizeError, ValueError):
    code = "invalid-place"


class ZeroFunction(UniformizeError, ValueError):
    code = "zero-function"


class ConsistencyFailure(UniformizeError, RuntimeError):
    code = "consistency-failure"


# Fuchsian data
class DegenerateMap(UniformizeError, ValueError):
    code = "degenerate-map"


class InvalidAccessoryData(UniformizeError, ValueError):
    code = "invalid-accessory-data"


class DegeneratePotential(UniformizeError, ValueError):
    code = "degenerate-potential"


class IrregularSingularity(UniformizeError, ValueError):
    code = "irregular-singularity"


# connections
class ExcessiveAutomorphismRisk(UniformizeError, ValueError):
    code = "excessive-automorphism-risk"


class DegenerateCoordinate(UniformizeError, ValueError):
    code = "degenerate-coordinate"


class DegenerateIdentity(UniformizeError, ValueError):
    code = "degenerate-identity"


# elimination
class EliminationDegeneracy(UniformizeError, RuntimeError):
    code = "elimination-degeneracy"

    def __init__(self, message, common_factor=None):
        super().__init__(message)
        self.common_factor = common_factor


class DegreeOverflow(UniformizeError, RuntimeError):
    code = "degree-overflow"


# numerics
class SingularityEncounter(UniformizeError, RuntimeError):
    code = "singularity-encounter"

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class CoordinateDegeneracy(UniformizeError, ArithmeticError):
    code = "coordinate-degeneracy"


class OracleDomain(UniformizeError, ValueError):
    code = "oracle-domain"


class InvalidPath(UniformizeError, ValueError):
    code = "invalid-path"
