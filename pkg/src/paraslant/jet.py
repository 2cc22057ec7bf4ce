"""Forward-mode jets: truncated Taylor arithmetic carrying first (and second) derivatives.

``Jet1`` carries a value and a gradient with respect to ``k`` seed variables,
``Jet2`` additionally carries the Hessian.  Both mix freely with plain floats,
so constant sub-expressions never allocate derivative storage.
"""

from __future__ import annotations

import math
from typing import Callable, Union

import numpy as np

from .errors import DomainError

Number = Union[int, float]


class _Jet:
    __slots__ = ("val", "grad")

    val: float
    grad: np.ndarray

    # subclasses implement the three primitives below, everything else is shared
    def _unary(self, f0: float, f1: float, f2: float):
        raise NotImplementedError

    def _mul(self, other: "_Jet"):
        raise NotImplementedError

    def _lift(self, c: float):
        raise NotImplementedError

    def _coerce(self, other):
        if isinstance(other, _Jet):
            if type(other) is not type(self):
                raise TypeError(f"cannot mix {type(self).__name__} and {type(other).__name__}")
            return other
        return None

    def __float__(self) -> float:
        return self.val

    # comparisons look at the scalar part only
    def __lt__(self, other) -> bool:
        return self.val < float(other)

    def __le__(self, other) -> bool:
        return self.val <= float(other)

    def __gt__(self, other) -> bool:
        return self.val > float(other)

    def __ge__(self, other) -> bool:
        return self.val >= float(other)

    def __neg__(self):
        return self * -1.0

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return self._shift(float(other))
        return self._add(o)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return self._scale(float(other))
        return self._mul(o)

    __rmul__ = __mul__

    def reciprocal(self):
        if self.val == 0.0:
            raise DomainError("division by a jet with zero scalar part")
        r = 1.0 / self.val
        return self._unary(r, -r * r, 2.0 * r * r * r)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            c = float(other)
            if c == 0.0:
                raise DomainError("division by zero")
            return self._scale(1.0 / c)
        return self._mul(o.reciprocal())

    def __rtruediv__(self, other):
        return self.reciprocal()._scale(float(other))

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise TypeError("jets support integer exponents only")
        n = int(n)
        a = self.val
        if n == 0:
            return self._lift(1.0)
        if n < 0 and a == 0.0:
            raise DomainError("negative power of zero")
        if n == 1:
            return self
        f0 = a**n
        f1 = n * a ** (n - 1)
        f2 = n * (n - 1) * a ** (n - 2)
        return self._unary(f0, f1, f2)

    # elementary functions
    def cos(self):
        c, s = math.cos(self.val), math.sin(self.val)
        return self._unary(c, -s, -c)

    def sin(self):
        c, s = math.cos(self.val), math.sin(self.val)
        return self._unary(s, c, -s)

    def cosh(self):
        c, s = math.cosh(self.val), math.sinh(self.val)
        return self._unary(c, s, c)

    def sinh(self):
        c, s = math.cosh(self.val), math.sinh(self.val)
        return self._unary(s, c, s)

    def exp(self):
        e = math.exp(self.val)
        return self._unary(e, e, e)

    def ln(self):
        a = self.val
        if a <= 0.0:
            raise DomainError(f"ln of non-positive value {a!r}")
        return self._unary(math.log(a), 1.0 / a, -1.0 / (a * a))

    def sqrt(self):
        a = self.val
        if a <= 0.0:
            # the derivative blows up at 0, so 0 is outside the jet domain
            raise DomainError(f"sqrt of non-positive jet value {a!r}")
        r = math.sqrt(a)
        return self._unary(r, 0.5 / r, -0.25 / (r * a))


class Jet1(_Jet):
    """Value plus gradient."""

    __slots__ = ()

    def __init__(self, val: float, grad):
        self.val = float(val)
        self.grad = np.asarray(grad, dtype=float)

    @classmethod
    def variable(cls, val: float, index: int, k: int) -> "Jet1":
        g = np.zeros(k)
        g[index] = 1.0
        return cls(val, g)

    @classmethod
    def constant(cls, val: float, k: int) -> "Jet1":
        return cls(val, np.zeros(k))

    def _lift(self, c):
        return Jet1(c, np.zeros_like(self.grad))

    def _shift(self, c):
        return Jet1(self.val + c, self.grad)

    def _scale(self, c):
        return Jet1(self.val * c, self.grad * c)

    def _add(self, o):
        return Jet1(self.val + o.val, self.grad + o.grad)

    def _mul(self, o):
        return Jet1(self.val * o.val, self.grad * o.val + o.grad * self.val)

    def _unary(self, f0, f1, f2):
        return Jet1(f0, f1 * self.grad)

    def __repr__(self) -> str:
        return f"Jet1({self.val!r}, {self.grad.tolist()!r})"


class Jet2(_Jet):
    """Value, gradient and (symmetric) Hessian."""

    __slots__ = ("hess",)

    def __init__(self, val: float, grad, hess):
        self.val = float(val)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @classmethod
    def variable(cls, val: float, index: int, k: int) -> "Jet2":
        g = np.zeros(k)
        g[index] = 1.0
        return cls(val, g, np.zeros((k, k)))

    @classmethod
    def constant(cls, val: float, k: int) -> "Jet2":
        return cls(val, np.zeros(k), np.zeros((k, k)))

    def _lift(self, c):
        return Jet2(c, np.zeros_like(self.grad), np.zeros_like(self.hess))

    def _shift(self, c):
        return Jet2(self.val + c, self.grad, self.hess)

    def _scale(self, c):
        return Jet2(self.val * c, self.grad * c, self.hess * c)

    def _add(self, o):
        return Jet2(self.val + o.val, self.grad + o.grad, self.hess + o.hess)

    def _mul(self, o):
        cross = np.outer(self.grad, o.grad)
        return Jet2(
            self.val * o.val,
            self.grad * o.val + o.grad * self.val,
            self.hess * o.val + o.hess * self.val + cross + cross.T,
        )

    def _unary(self, f0, f1, f2):
        return Jet2(f0, f1 * self.grad, f1 * self.hess + f2 * np.outer(self.grad, self.grad))

    def __repr__(self) -> str:
        return f"Jet2({self.val!r}, {self.grad.tolist()!r}, {self.hess.tolist()!r})"


def scalar(x) -> float:
    """Scalar part of any carrier."""
    return x.val if isinstance(x, _Jet) else float(x)


def is_jet(x) -> bool:
    return isinstance(x, _Jet)


def _float_ln(a: float) -> float:
    if a <= 0.0:
        raise DomainError(f"ln of non-positive value {a!r}")
    return math.log(a)


def _float_sqrt(a: float) -> float:
    if a < 0.0:
        raise DomainError(f"sqrt of negative value {a!r}")
    return math.sqrt(a)


def _float_exp(a: float) -> float:
    try:
        return math.exp(a)
    except OverflowError as exc:
        raise DomainError(f"exp overflow at {a!r}") from exc


def _guard(fn: Callable[[float], float], name: str) -> Callable[[float], float]:
    def wrapped(a: float) -> float:
        try:
            return fn(a)
        except OverflowError as exc:
            raise DomainError(f"{name} overflow at {a!r}") from exc

    return wrapped


_FLOAT_FUNCS: dict[str, Callable[[float], float]] = {
    "cos": math.cos,
    "sin": math.sin,
    "cosh": _guard(math.cosh, "cosh"),
    "sinh": _guard(math.sinh, "sinh"),
    "exp": _float_exp,
    "ln": _float_ln,
    "sqrt": _float_sqrt,
}

FUNCTIONS = frozenset(_FLOAT_FUNCS)


def apply(name: str, x):
    """Apply the named elementary function to a float or a jet."""
    if isinstance(x, _Jet):
        return getattr(x, name)()
    return _FLOAT_FUNCS[name](float(x))


def divide(a, b):
    if not isinstance(b, _Jet) and float(b) == 0.0:
        raise DomainError("division by zero")
    if not isinstance(a, _Jet) and not isinstance(b, _Jet):
        return float(a) / float(b)
    return a / b


def power(a, n: int):
    if isinstance(a, _Jet):
        return a**n
    a = float(a)
    if n < 0 and a == 0.0:
        raise DomainError("negative power of zero")
    try:
        return a**n
    except OverflowError as exc:
        raise DomainError(f"power overflow at {a!r}^{n}") from exc
