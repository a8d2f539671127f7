"""Forward-mode dual numbers over complex scalars.

Machine-precision directional derivatives of holomorphic expressions built
from +, -, *, /, integer powers and sqrt.  Seeding the dual part with a
direction vector gives the full complex differential in one pass per
direction, with none of the step-size cancellation of finite differences.
Nesting Dual inside Dual yields exact second derivatives.
"""

from __future__ import annotations

import cmath
import math


class Dual:
    """Value together with a first-order perturbation coefficient."""

    __slots__ = ("val", "eps")

    def __init__(self, val, eps=0.0):
        self.val = val
        self.eps = eps

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.eps + other.eps)
        return Dual(self.val + other, self.eps)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.eps - other.eps)
        return Dual(self.val - other, self.eps)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.eps)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val,
                        self.val * other.eps + self.eps * other.val)
        return Dual(self.val * other, self.eps * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.val
            return Dual(self.val * inv,
                        (self.eps - self.val * inv * other.eps) * inv)
        return Dual(self.val / other, self.eps / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        return Dual(other * inv, -other * inv * inv * self.eps)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n == 0:
            return Dual(1.0, 0.0 * self.eps)
        base = self.val ** (n - 1)
        return Dual(base * self.val, n * base * self.eps)

    def __neg__(self):
        return Dual(-self.val, -self.eps)

    def __repr__(self):
        return f"Dual({self.val!r}, {self.eps!r})"


def sqrt(x):
    """Principal square root, usable on scalars and Dual values."""
    if isinstance(x, Dual):
        s = sqrt(x.val)
        return Dual(s, x.eps / (2.0 * s))
    if isinstance(x, complex):
        return cmath.sqrt(x)
    return math.sqrt(x) if x >= 0.0 else cmath.sqrt(x)


def value(x):
    """Strip (possibly nested) dual layers."""
    while isinstance(x, Dual):
        x = x.val
    return x


def directional(f, point, direction):
    """Derivative of f along `direction` at `point` (sequences of scalars)."""
    seeded = [Dual(p, d) for p, d in zip(point, direction)]
    out = f(seeded)
    if isinstance(out, Dual):
        return out.eps
    return 0.0 * point[0]


def gradient(f, point):
    """All complex partials of a holomorphic f at `point`, one pass each."""
    n = len(point)
    parts = []
    for k in range(n):
        seeded = [Dual(p, 1.0 if j == k else 0.0) for j, p in enumerate(point)]
        out = f(seeded)
        parts.append(out.eps if isinstance(out, Dual) else 0.0j)
    return parts
