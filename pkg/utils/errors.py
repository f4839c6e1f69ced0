"""
Error hierarchy shared by every module

Each error carries the process exit code the command line uses for it.
"""


class DualSpaceError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 1


class StructuralError(DualSpaceError, ValueError):
    """Dimension or space mismatch between operands"""


class DomainError(DualSpaceError, ValueError):
    """Parameter outside the range an operation is defined on"""


class UnboundedConjugateError(DualSpaceError, ArithmeticError):
    """Bracket expansion for the conjugate passed the overflow bound"""


class DegenerateYoungError(DualSpaceError, ValueError):
    """Young function vanishes at a positive grid point"""


class InfeasibleError(DualSpaceError, ValueError):
    """No sample satisfies the constraint of an estimator"""


class UnsupportedYoungError(DualSpaceError, ValueError):
    """Young function lacks the structure a solver needs (Δ2, strict P′)"""


class GradientUndefinedError(DualSpaceError, ValueError):
    """Norm gradient requested at the origin"""


class UndefinedDirectionError(DualSpaceError, ValueError):
    """Duality map requested for the zero functional"""


class UnsupportedModelError(DualSpaceError, ValueError):
    """Space model outside the family an operation supports"""


class SolverDivergenceError(DualSpaceError, RuntimeError):
    """Iterative solver failed to bracket or converge"""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ProblemFileError(DualSpaceError, ValueError):
    """Problem file could not be parsed or validated"""

    exit_code = 2

    def __init__(self, message: str, path: str | None = None, line: int | None = None,
                 column: int | None = None, pointer: str | None = None):
        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        if pointer:
            location.append(pointer)
        prefix = ", ".join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.column = column
        self.pointer = pointer


class ContractViolation(DualSpaceError):
    """A verification suite measured a contract outside its tolerance"""

    exit_code = 3
