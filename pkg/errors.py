"""
Exception hierarchy shared by the separator toolkit.

The CLI maps these onto exit codes, so every error raised by the library
belongs to one of the classes below.
"""

from typing import Optional, Sequence


class SeparatorError(Exception):
    """Base class for all toolkit errors"""


class ParameterError(SeparatorError, ValueError):
    """Invalid argument or configuration value"""


class GraphParseError(ParameterError):
    """Malformed edge-list, assignment or ordering document"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class DomainError(SeparatorError, ValueError):
    """Request that is mathematically undefined for the given input"""


class CapacityError(SeparatorError):
    """Exhaustive search requested above its configured cap"""

    def __init__(self, cap_name: str, cap: int, size: int, hint: str = ""):
        self.cap_name = cap_name
        self.cap = cap
        self.size = size
        message = (
            f"{cap_name} search limited to {cap}, got {size} "
            f"(raise with SEP_EXACT_CAPS={cap_name}=<n>)"
        )
        if hint:
            message = f"{message}; {hint}"
        super().__init__(message)


class InvariantViolation(SeparatorError, RuntimeError):
    """An engine invariant or post-condition failed"""

    def __init__(self, message: str, trace: Sequence[str] = ()):
        self.trace = tuple(trace)
        if self.trace:
            message = f"{message} (after {len(self.trace)} transitions, last: {self.trace[-1]})"
        super().__init__(message)
