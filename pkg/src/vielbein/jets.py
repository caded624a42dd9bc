"""Truncated second-order Taylor scalars.

Every field evaluation in the package runs on these instead of symbolic or
finite-difference derivatives: arithmetic carries the exact value, gradient,
and Hessian with respect to the base coordinates through every operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["Jet2", "jet_seed", "jet_const", "sin", "cos", "sqrt", "exp", "ln"]


@dataclass(frozen=True, slots=True)
class Jet2:
    """Scalar with exact gradient and (symmetric) Hessian.

    The Hessian stays symmetric under all operations because every rank-2
    update is built from symmetrized outer products.
    """

    value: float
    grad: np.ndarray
    hess: np.ndarray

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value + other.value, self.grad + other.grad,
                        self.hess + other.hess)
        return Jet2(self.value + float(other), self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value - other.value, self.grad - other.grad,
                        self.hess - other.hess)
        return Jet2(self.value - float(other), self.grad, self.hess)

    def __rsub__(self, other):
        return (-self) + float(other)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            cross = np.outer(self.grad, other.grad)
            return Jet2(
                self.value * other.value,
                self.value * other.grad + other.value * self.grad,
                self.value * other.hess + other.value * self.hess + cross + cross.T,
            )
        c = float(other)
        return Jet2(c * self.value, c * self.grad, c * self.hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        if self.value == 0.0:
            raise ZeroDivisionError("division by zero value")
        v = 1.0 / self.value
        outer = np.outer(self.grad, self.grad)
        return Jet2(v, -v * v * self.grad, -v * v * self.hess + 2.0 * v ** 3 * outer)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        return self * (1.0 / float(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * float(other)

    def __pow__(self, exponent):
        if isinstance(exponent, Jet2):
            # a^b = exp(b ln a); requires a > 0
            return exp(exponent * ln(self))
        p = float(exponent)
        if p == 0.0:
            return jet_const(1.0, self.dim)
        if p == 1.0:
            return self
        u = self.value
        f0 = math.pow(u, p)
        f1 = p * math.pow(u, p - 1.0)
        f2 = p * (p - 1.0) * math.pow(u, p - 2.0) if p != 1.0 else 0.0
        return _unary(self, f0, f1, f2)


def jet_const(value: float, dim: int) -> Jet2:
    return Jet2(float(value), np.zeros(dim), np.zeros((dim, dim)))


def jet_seed(point: Sequence[float]) -> list[Jet2]:
    """Coordinate functions as jets: value x^i, unit gradient, zero Hessian."""
    m = len(point)
    eye = np.eye(m)
    return [Jet2(float(point[i]), eye[i].copy(), np.zeros((m, m))) for i in range(m)]


def _unary(u: Jet2, f0: float, f1: float, f2: float) -> Jet2:
    outer = np.outer(u.grad, u.grad)
    return Jet2(f0, f1 * u.grad, f2 * outer + f1 * u.hess)


def sin(u):
    if not isinstance(u, Jet2):
        return math.sin(u)
    s, c = math.sin(u.value), math.cos(u.value)
    return _unary(u, s, c, -s)


def cos(u):
    if not isinstance(u, Jet2):
        return math.cos(u)
    s, c = math.sin(u.value), math.cos(u.value)
    return _unary(u, c, -s, -c)


def sqrt(u):
    if not isinstance(u, Jet2):
        if u < 0.0:
            raise ValueError(f"sqrt of negative value {u}")
        return math.sqrt(u)
    if u.value < 0.0:
        raise ValueError(f"sqrt of negative value {u.value}")
    if u.value == 0.0:
        raise ValueError("sqrt not differentiable at zero")
    r = math.sqrt(u.value)
    return _unary(u, r, 0.5 / r, -0.25 / (r * u.value))


def exp(u):
    if not isinstance(u, Jet2):
        return math.exp(u)
    w = math.exp(u.value)
    return _unary(u, w, w, w)


def ln(u):
    if not isinstance(u, Jet2):
        if u <= 0.0:
            raise ValueError(f"ln of non-positive value {u}")
        return math.log(u)
    if u.value <= 0.0:
        raise ValueError(f"ln of non-positive value {u.value}")
    v = 1.0 / u.value
    return _unary(u, math.log(u.value), v, -v * v)
