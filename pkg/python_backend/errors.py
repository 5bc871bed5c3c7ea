#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Error Types
Every library failure raises one of these; the CLI maps them to exit codes.
"""

from typing import Any, List, Optional, Tuple


class MeanError(Exception):
    """Base class for all toolkit errors"""


class DomainError(MeanError):
    """A point lies outside the domain of a mean or mapping"""

    def __init__(self, point: Tuple[float, ...], interval: Any, message: Optional[str] = None):
        self.point = point
        self.interval = interval
        super().__init__(message or f"point {point} outside domain {interval}")


class ParameterError(MeanError):
    """A parameter is out of range"""


class EmptySampleError(MeanError):
    """An operation that needs sample points received none"""


class TableDataError(MeanError):
    """Malformed table-mean data"""


class MeanParseError(MeanError):
    """Syntax or semantic error in a mean expression"""

    def __init__(self, text: str, diagnostics: List[Any]):
        self.text = text
        self.diagnostics = diagnostics
        first = diagnostics[0]
        super().__init__(f"{first.kind} error at offset {first.offset}: expected {first.expected}")


class NumericalFailure(MeanError):
    """Convergence was demanded but not achieved"""


class NonConvergenceError(NumericalFailure):
    """The orbit was certified periodic with a gap above tolerance"""

    def __init__(self, result: Any):
        self.result = result
        super().__init__(f"non-convergent, gap={result.final_gap:g}")


class BudgetExhaustedError(NumericalFailure):
    """The iteration budget ran out before convergence or a certificate"""

    def __init__(self, result: Any):
        self.result = result
        super().__init__(
            f"iteration budget exhausted after {result.iterations_used} steps, gap={result.final_gap:g}"
        )


class RootNotBracketedError(NumericalFailure):
    """The complementary-mean equation has no sign change on the bracket"""

    def __init__(self, point: Tuple[float, float], message: str):
        self.point = point
        super().__init__(message)


class RootSearchError(NumericalFailure):
    """Bisection did not reach the requested residual"""

    def __init__(self, point: Tuple[float, float], message: str):
        self.point = point
        super().__init__(message)


class MeanEvaluationError(NumericalFailure):
    """A catalog formula produced a value outside [min(x,y), max(x,y)]"""

    def __init__(self, point: Tuple[float, float], value: float, message: str):
        self.point = point
        self.value = value
        super().__init__(message)


class PreconditionError(NumericalFailure):
    """A sampled hypothesis (symmetry, strict monotonicity) failed"""

    def __init__(self, witness: Tuple[float, ...], message: str):
        self.witness = witness
        super().__init__(message)


class ResidualEvaluationError(MeanError):
    """Evaluating K failed at a sample point"""

    def __init__(self, point: Tuple[float, float], cause: Exception):
        self.point = point
        self.cause = cause
        super().__init__(f"evaluation failed at {point}: {cause}")
