"""Exception hierarchy shared by every module of the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all errors raised by paraslant."""


class ExprSyntaxError(ToolkitError, ValueError):
    def __init__(self, offset: int, expected: str, text: str = ""):
        self.offset = offset
        self.expected = expected
        self.text = text
        super().__init__(f"expected {expected} at offset {offset}")


class UnknownFunction(ToolkitError, ValueError):
    def __init__(self, name: str, offset: int = -1):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown function {name!r} at offset {offset}")


class UnboundVariable(ToolkitError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self) -> str:
        return f"unbound variable {self.name!r}"


class DomainError(ToolkitError, ArithmeticError):
    """ln of a non-positive value, sqrt of a negative value, division by zero."""


class DegenerateMetric(ToolkitError, ArithmeticError):
    def __init__(self, det: float, threshold: float, what: str = "bilinear form"):
        self.det = det
        self.threshold = threshold
        super().__init__(f"degenerate {what}: |det| = {abs(det):.3e} < {threshold:.3e}")


class RankDeficient(ToolkitError, ArithmeticError):
    def __init__(self, rank: int, expected: int, what: str = "pushforward"):
        self.rank = rank
        self.expected = expected
        super().__init__(f"{what} has rank {rank}, expected {expected}")


class NoAdmissiblePoints(ToolkitError):
    pass


class NonPositiveWarp(ToolkitError, ValueError):
    pass


class MissingWarpData(ToolkitError):
    pass


class ConfigError(ToolkitError):
    def __init__(self, path: str, field: str, reason: str):
        self.path = path
        self.field = field
        self.reason = reason
        super().__init__(f"{path}: {field}: {reason}")
