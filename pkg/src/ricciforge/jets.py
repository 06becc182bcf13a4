"""Second-order forward-mode jets.

A :class:`Jet` carries a value together with its gradient and Hessian with
respect to a fixed set of ``n`` input variables.  Arithmetic and the usual
numpy ufuncs (``np.sin``, ``np.arccos``, ``np.log1p`` ...) propagate all three
exactly, so any function written against numpy can be differentiated twice to
machine precision by feeding it jets instead of floats.

Object arrays of jets work too: numpy falls back to per-element Python calls.
"""

from __future__ import annotations

import numpy as np


def _chain(x: "Jet", f0: float, f1: float, f2: float) -> "Jet":
    return Jet(f0, f1 * x.grad, f1 * x.hess + f2 * np.outer(x.grad, x.grad))


class Jet:
    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad, hess):
        self.value = float(value)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @classmethod
    def constant(cls, value: float, n: int) -> "Jet":
        return cls(value, np.zeros(n), np.zeros((n, n)))

    @classmethod
    def variables(cls, point) -> np.ndarray:
        """Independent variables seeded at ``point``, as an object array."""
        point = np.asarray(point, dtype=float)
        n = point.size
        eye = np.eye(n)
        out = np.empty(n, dtype=object)
        for i in range(n):
            out[i] = cls(point[i], eye[i], np.zeros((n, n)))
        return out

    @property
    def nvars(self) -> int:
        return self.grad.size

    def __repr__(self):
        return f"Jet({self.value!r}, grad={self.grad!r})"

    # -- arithmetic -----------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(float(other), self.nvars)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.value + other.value, self.grad + other.grad, self.hess + other.hess)
        if isinstance(other, np.ndarray) and other.ndim > 0:
            return NotImplemented
        return Jet(self.value + float(other), self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            g = self.value * other.grad + other.value * self.grad
            h = (self.value * other.hess + other.value * self.hess
                 + np.outer(self.grad, other.grad) + np.outer(other.grad, self.grad))
            return Jet(self.value * other.value, g, h)
        if isinstance(other, np.ndarray) and other.ndim > 0:
            return NotImplemented
        c = float(other)
        return Jet(self.value * c, self.grad * c, self.hess * c)

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        return _chain(self, 1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        if isinstance(other, np.ndarray) and other.ndim > 0:
            return NotImplemented
        return self * (1.0 / float(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return (self.log() * p).exp()
        p = float(p)
        v = self.value
        if p == 2.0:
            return self * self
        return _chain(self, v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))

    # comparisons use the value only
    def __lt__(self, other):
        return self.value < _val(other)

    def __le__(self, other):
        return self.value <= _val(other)

    def __gt__(self, other):
        return self.value > _val(other)

    def __ge__(self, other):
        return self.value >= _val(other)

    def __float__(self):
        return self.value

    # -- elementary functions --------------------------------------------
    def sqrt(self):
        r = np.sqrt(self.value)
        return _chain(self, r, 0.5 / r, -0.25 / r**3)

    def exp(self):
        e = np.exp(self.value)
        return _chain(self, e, e, e)

    def log(self):
        v = self.value
        return _chain(self, np.log(v), 1.0 / v, -1.0 / v**2)

    def log1p(self):
        v = 1.0 + self.value
        return _chain(self, np.log1p(self.value), 1.0 / v, -1.0 / v**2)

    def expm1(self):
        e = np.exp(self.value)
        return _chain(self, np.expm1(self.value), e, e)

    def sin(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return _chain(self, s, c, -s)

    def cos(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return _chain(self, c, -s, -c)

    def tan(self):
        t = np.tan(self.value)
        sec2 = 1.0 + t * t
        return _chain(self, t, sec2, 2.0 * t * sec2)

    def arccos(self):
        v = self.value
        w = 1.0 - v * v
        return _chain(self, np.arccos(v), -1.0 / np.sqrt(w), -v / w**1.5)

    def arcsin(self):
        v = self.value
        w = 1.0 - v * v
        return _chain(self, np.arcsin(v), 1.0 / np.sqrt(w), v / w**1.5)

    def arctan(self):
        v = self.value
        w = 1.0 + v * v
        return _chain(self, np.arctan(v), 1.0 / w, -2.0 * v / w**2)

    def sinh(self):
        s, c = np.sinh(self.value), np.cosh(self.value)
        return _chain(self, s, c, s)

    def cosh(self):
        s, c = np.sinh(self.value), np.cosh(self.value)
        return _chain(self, c, s, c)

    def tanh(self):
        t = np.tanh(self.value)
        d = 1.0 - t * t
        return _chain(self, t, d, -2.0 * t * d)

    def absolute(self):
        return -self if self.value < 0 else self

    __abs__ = absolute

    def square(self):
        return self * self

    # -- numpy interop ----------------------------------------------------
    _UNARY = {
        "sqrt", "exp", "log", "log1p", "expm1", "sin", "cos", "tan", "arccos",
        "arcsin", "arctan", "sinh", "cosh", "tanh", "absolute", "square",
        "reciprocal", "negative", "positive",
    }
    _BINARY = {
        "add": lambda a, b: a + b,
        "subtract": lambda a, b: a - b,
        "multiply": lambda a, b: a * b,
        "true_divide": lambda a, b: a / b,
        "divide": lambda a, b: a / b,
        "power": lambda a, b: a**b,
        "maximum": lambda a, b: a if _val(a) >= _val(b) else b,
        "minimum": lambda a, b: a if _val(a) <= _val(b) else b,
    }

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs.get("out") is not None:
            return NotImplemented
        if any(isinstance(x, np.ndarray) and x.ndim > 0 for x in inputs):
            conv = [_as_object(x) for x in inputs]
            return ufunc(*conv, **kwargs)
        inputs = [x.item() if isinstance(x, np.ndarray) else x for x in inputs]
        inputs = [x if isinstance(x, Jet) else float(x) for x in inputs]
        name = ufunc.__name__
        if len(inputs) == 1 and name in self._UNARY:
            if name == "negative":
                return -inputs[0]
            if name == "positive":
                return inputs[0]
            return getattr(inputs[0], name)()
        if len(inputs) == 2 and name in self._BINARY:
            return self._BINARY[name](*inputs)
        return NotImplemented


def _val(x):
    return x.value if isinstance(x, Jet) else float(x)


def _as_object(x):
    if isinstance(x, Jet):
        out = np.empty((), dtype=object)
        out[()] = x
        return out
    if isinstance(x, np.ndarray) and x.dtype != object:
        return x.astype(object)
    return x


def value_of(x):
    """Strip jets (scalar or object array) down to plain float values."""
    if isinstance(x, Jet):
        return x.value
    arr = np.asarray(x)
    if arr.dtype == object:
        return np.vectorize(_val, otypes=[float])(arr)
    return arr


def unpack(arr) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split an array of jets into (values, gradients, Hessians).

    Entries that are plain numbers are treated as constants.  The output
    shapes are ``S``, ``S + (n,)`` and ``S + (n, n)`` for input shape ``S``.
    """
    arr = np.asarray(arr, dtype=object)
    n = None
    for item in arr.flat:
        if isinstance(item, Jet):
            n = item.nvars
            break
    if n is None:
        raise ValueError("no jets found")
    vals = np.zeros(arr.shape)
    grads = np.zeros(arr.shape + (n,))
    hess = np.zeros(arr.shape + (n, n))
    for idx in np.ndindex(arr.shape):
        item = arr[idx]
        if isinstance(item, Jet):
            vals[idx], grads[idx], hess[idx] = item.value, item.grad, item.hess
        else:
            vals[idx] = float(item)
    return vals, grads, hess
