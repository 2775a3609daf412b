"""Truncated Laurent series in one local parameter.

A series is ``t**val * (c[0] + c[1] t + ... + c[N-1] t**(N-1) + O(t**N))``
so ``N = len(c)`` is the relative precision.  Coefficients are exact
rationals or complex doubles; mixing promotes to complex.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

from .poly import coerce_coeff


def _exact(c):
    return isinstance(c, (int, Fraction))


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _sqrt_coeff(c):
    if _exact(c):
        f = Fraction(c)
        if f >= 0:
            n, d = math.isqrt(f.numerator), math.isqrt(f.denominator)
            if n * n == f.numerator and d * d == f.denominator:
                return _clean(Fraction(n, d))
        return cmath.sqrt(complex(f))
    return cmath.sqrt(complex(c))


class LaurentSeries:
    """Truncated Laurent series ``t^val * sum c_i t^i`` with relative precision ``len(c)``."""

    __slots__ = ("val", "coeffs", "var")

    def __init__(self, coeffs, val=0, var="t"):
        cs = [_clean(coerce_coeff(c)) if not isinstance(c, (complex, float)) else complex(c) for c in coeffs]
        self.val = val
        self.coeffs = cs
        self.var = var

    @classmethod
    def _raw(cls, coeffs, val, var="t"):
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj.val = val
        obj.var = var
        return obj

    @classmethod
    def from_poly_coeffs(cls, coeffs, prec, var="t"):
        """Series of the polynomial ``sum coeffs[i] t^i`` known to absolute order ``prec``."""
        cs = list(coeffs)[:prec] + [0] * max(0, prec - len(coeffs))
        return cls(cs, 0, var)

    @classmethod
    def monomial(cls, c, e, prec, var="t"):
        """``c t^e`` with relative precision ``prec``."""
        return cls([c] + [0] * (prec - 1), e, var)

    # -- structure ---------------------------------------------------------
    @property
    def prec(self):
        """Absolute precision: the series is known modulo ``t**prec``."""
        return self.val + len(self.coeffs)

    def is_exact(self):
        return all(_exact(c) for c in self.coeffs)

    def normalized(self, tol=0.0):
        """Drop leading zero coefficients (``|c| <= tol`` for complex entries)."""
        i = 0
        cs = self.coeffs
        while i < len(cs) and (cs[i] == 0 if _exact(cs[i]) else abs(cs[i]) <= tol):
            i += 1
        return LaurentSeries._raw(cs[i:], self.val + i, self.var)

    def valuation(self, tol=0.0):
        s = self.normalized(tol)
        if not s.coeffs:
            return None
        return s.val

    def coeff(self, e):
        i = e - self.val
        if i < 0:
            return 0
        if i >= len(self.coeffs):
            raise IndexError(f"t^{e} lies beyond the precision O(t^{self.prec})")
        return self.coeffs[i]

    def truncate(self, prec):
        """Keep terms below absolute order ``prec``."""
        n = max(0, prec - self.val)
        return LaurentSeries._raw(self.coeffs[:n], self.val, self.var)

    def is_zero(self, tol=0.0):
        return not self.normalized(tol).coeffs

    def _align(self, other):
        lo = min(self.val, other.val)
        hi = min(self.prec, other.prec)
        a = [self.coeff(e) if e < self.prec else 0 for e in range(lo, hi)]
        b = [other.coeff(e) if e < other.prec else 0 for e in range(lo, hi)]
        return lo, a, b

    def _lift(self, other):
        if isinstance(other, LaurentSeries):
            return other
        c = other if isinstance(other, (complex, float)) else coerce_coeff(other)
        n = max(self.prec, 1)
        return LaurentSeries._raw([c] + [0] * (n - 1), 0, self.var)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        lo, a, b = self._align(o)
        return LaurentSeries._raw([_clean(x + y) for x, y in zip(a, b)], lo, self.var)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries._raw([-c for c in self.coeffs], self.val, self.var)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            c = other if isinstance(other, (complex, float)) else coerce_coeff(other)
            return LaurentSeries._raw([_clean(x * c) for x in self.coeffs], self.val, self.var)
        n = min(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs[:n], other.coeffs[:n]
        out = []
        for k in range(n):
            s = 0
            for i in range(k + 1):
                if a[i] and b[k - i]:
                    s += a[i] * b[k - i]
            out.append(_clean(s))
        return LaurentSeries._raw(out, self.val + other.val, self.var)

    __rmul__ = __mul__

    def inv(self):
        s = self.normalized()
        if not s.coeffs:
            raise ZeroDivisionError("series is zero to working precision")
        a = s.coeffs
        n = len(a)
        a0 = a[0]
        inv0 = Fraction(1) / a0 if _exact(a0) else 1 / a0
        out = [_clean(inv0)]
        for k in range(1, n):
            acc = 0
            for i in range(1, k + 1):
                if a[i]:
                    acc += a[i] * out[k - i]
            out.append(_clean(-acc * inv0))
        return LaurentSeries._raw(out, -s.val, self.var)

    def __truediv__(self, other):
        if not isinstance(other, LaurentSeries):
            c = other if isinstance(other, (complex, float)) else coerce_coeff(other)
            inv = (Fraction(1) / c) if _exact(c) else 1 / c
            return self * inv
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inv() ** (-e)
        s = self.normalized()
        result = LaurentSeries._raw([1] + [0] * (len(s.coeffs) - 1), 0, self.var)
        base = s
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def sqrt(self):
        """Square root with even valuation; exact when the leading coefficient is a rational square."""
        s = self.normalized()
        if not s.coeffs:
            raise ValueError("square root of zero series")
        if s.val % 2:
            raise ValueError("odd valuation has no Laurent square root")
        a = s.coeffs
        n = len(a)
        r0 = _sqrt_coeff(a[0])
        two_r0 = 2 * r0
        inv = (Fraction(1) / two_r0) if _exact(two_r0) else 1 / two_r0
        out = [r0]
        for k in range(1, n):
            acc = a[k]
            for i in range(1, k):
                acc -= out[i] * out[k - i]
            out.append(_clean(acc * inv))
        return LaurentSeries._raw(out, s.val // 2, self.var)

    def deriv(self):
        cs = []
        for i, c in enumerate(self.coeffs):
            cs.append(_clean(c * (self.val + i)))
        if self.val == 0 and cs:
            # the constant term disappears; the series starts at t^0 again
            return LaurentSeries._raw(cs[1:], 0, self.var)
        return LaurentSeries._raw(cs, self.val - 1, self.var)

    def shift(self, e):
        """Multiply by ``t**e``."""
        return LaurentSeries._raw(list(self.coeffs), self.val + e, self.var)

    def compose(self, g):
        """``self(g(t))`` for ``g`` of positive valuation."""
        g = g.normalized()
        if g.val < 1:
            raise ValueError("inner series must have positive valuation")
        s = self.normalized()
        if not s.coeffs:
            return s
        # relative precision is preserved when g has valuation 1
        n = min(len(s.coeffs), len(g.coeffs))
        gg = g.truncate(g.val + n)
        acc = LaurentSeries._raw([0] * n, 0, self.var)
        power = LaurentSeries._raw([1] + [0] * (n - 1), 0, self.var)
        for c in s.coeffs[:n]:
            if c:
                acc = acc + power * c
            power = power * gg
        lead = gg ** s.val if s.val else LaurentSeries._raw([1] + [0] * (n - 1), 0, self.var)
        return (acc * lead).truncate(s.val * g.val + n)

    def reverse(self):
        """Compositional inverse of a series ``a1 t + a2 t^2 + ...`` with ``a1 != 0``."""
        s = self.normalized()
        if s.val != 1:
            raise ValueError("reversion needs valuation exactly one")
        n = len(s.coeffs)
        a1 = s.coeffs[0]
        inv1 = (Fraction(1) / a1) if _exact(a1) else 1 / a1
        # Newton-free fixed point: r = (t - (s(r) - a1 r)) / a1, refined term by term
        r = LaurentSeries._raw([_clean(inv1)] + [0] * (n - 1), 1, self.var)
        t = LaurentSeries._raw([1] + [0] * (n - 1), 1, self.var)
        for _ in range(n):
            err = s.compose(r) - t
            r = r - err * inv1
            r = LaurentSeries._raw(r.coeffs[:n] + [0] * max(0, n - len(r.coeffs)), r.val, self.var)
        return r

    def evaluate(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc * t ** self.val

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            other = self._lift(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.val, tuple(self.coeffs)))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"({c})*{self.var}^{self.val + i}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O({self.var}^{self.prec})"
