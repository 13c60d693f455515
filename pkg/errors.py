# ENTBOUND error hierarchy
from typing import Optional


class EntboundError(Exception):
    """Base class for every error raised by ENTBOUND"""
    pass


class PreconditionError(EntboundError, ValueError):
    """Input violates an operation's precondition (shape, range, hermiticity)"""
    pass


class NumericalFailureError(EntboundError, ArithmeticError):
    """An iterative routine did not converge"""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NotPSDError(EntboundError, ValueError):
    def __init__(self, min_eigenvalue: float, threshold: float):
        super().__init__(
            f"matrix is not positive semidefinite: smallest eigenvalue "
            f"{min_eigenvalue:.3e} < -{threshold:.1e}"
        )
        self.min_eigenvalue = min_eigenvalue


class XStateError(EntboundError, ValueError):
    """Matrix or record is outside the X-state family"""

    def __init__(self, message: str, row: Optional[int] = None,
                 col: Optional[int] = None, modulus: Optional[float] = None):
        if row is not None:
            message = f"{message}: largest offending entry ({row}, {col}) has modulus {modulus:.3e}"
        super().__init__(message)
        self.row = row
        self.col = col
        self.modulus = modulus


class NotCanonicalError(XStateError):
    pass


class RecordError(EntboundError, ValueError):
    """Measurement record is not physically consistent"""

    def __init__(self, constraint: str, detail: str = ""):
        text = f"inconsistent measurement record: {constraint} violated"
        if detail:
            text += f" ({detail})"
        super().__init__(text)
        self.constraint = constraint


class PauliError(EntboundError, ValueError):
    pass


class StateFileError(EntboundError):
    """State file is malformed or fails its module invariants"""
    pass


class ConfigError(EntboundError):
    pass
