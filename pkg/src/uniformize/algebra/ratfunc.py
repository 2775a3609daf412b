"""Reduced rational functions over the rationals."""
from __future__ import annotations

import math
from fractions import Fraction

from ..errors import ParseError, PoleProximity
from .euclid import _int_primitive, gcd
from .poly import MultiPoly, coerce_coeff, parse_expr

POLE_EPS = 1e-12


class RatFunc:
    """``num / den`` with coprime integer-coefficient parts.

    The denominator has positive graded-lex leading coefficient and the
    combined integer content of numerator and denominator is one, so equal
    functions have identical representations.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        if not isinstance(num, MultiPoly):
            num = MultiPoly.const(num, den.vars if isinstance(den, MultiPoly) else ())
        if den is None:
            den = MultiPoly.const(1, num.vars)
        elif not isinstance(den, MultiPoly):
            den = MultiPoly.const(den, num.vars)
        num, den = num._unify(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = num
            self.den = MultiPoly.const(1, num.vars)
            return
        if reduce and not den.is_constant():
            g = gcd(num, den)
            if not g.is_constant():
                num = num.exact_div(g)
                den = den.exact_div(g)
        self.num, self.den = _normalize(num, den)

    @classmethod
    def _raw(cls, num, den):
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def parse(cls, text, vars=None):
        num, den = parse_expr(text, vars)
        if den.is_zero():
            raise ParseError(f"zero denominator in {text!r}")
        return cls(num, den)

    @classmethod
    def gen(cls, name, vars=None):
        return cls(MultiPoly.gen(name, vars))

    @property
    def vars(self):
        return self.num.vars

    def with_vars(self, vars):
        return RatFunc._raw(self.num.with_vars(vars), self.den.with_vars(vars))

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        return coerce_coeff(Fraction(self.num.constant_value()) / Fraction(self.den.constant_value()))

    def as_poly(self):
        if not self.den.is_constant():
            raise ValueError("not a polynomial")
        return self.num / self.den.constant_value()

    def used_vars(self):
        u = set(self.num.used_vars()) | set(self.den.used_vars())
        return tuple(v for v in self.vars if v in u)

    # -- arithmetic --------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, MultiPoly):
            return RatFunc._raw(*_normalize(other, MultiPoly.const(1, other.vars)))
        c = coerce_coeff(other)
        return RatFunc._raw(*_normalize(MultiPoly.const(c, self.vars), MultiPoly.const(1, self.vars)))

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        if o.den.is_constant() or self.den.is_constant():
            return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den, reduce=not (o.den.is_constant() and self.den.is_constant()))
        g = gcd(self.den, o.den)
        d1 = self.den.exact_div(g)
        d2 = o.den.exact_div(g)
        return RatFunc(self.num * d2 + o.num * d1, d1 * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RatFunc(MultiPoly.const(0, self.vars))
        # cross-cancel to keep operands small
        g1 = gcd(self.num, o.den) if not o.den.is_constant() else None
        g2 = gcd(o.num, self.den) if not self.den.is_constant() else None
        n1, d2 = (self.num.exact_div(g1), o.den.exact_div(g1)) if g1 is not None else (self.num, o.den)
        n2, d1 = (o.num.exact_div(g2), self.den.exact_div(g2)) if g2 is not None else (o.num, self.den)
        num, den = n1 * n2, d1 * d2
        return RatFunc._raw(*_normalize(*num._unify(den)))

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc._raw(*_normalize(self.den, self.num))

    def __truediv__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inv() ** (-e)
        return RatFunc._raw(*_normalize(self.num ** e, self.den ** e))

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- calculus ----------------------------------------------------------
    def diff(self, var):
        n, d = self.num, self.den
        if d.is_constant():
            return RatFunc._raw(*_normalize(n.diff(var), d))
        return RatFunc(n.diff(var) * d - n * d.diff(var), d * d)

    def subs(self, mapping):
        """Substitute rationals, polynomials or rational functions."""
        polys = {}
        rats = {}
        for v, val in mapping.items():
            if isinstance(val, RatFunc):
                if val.den.is_constant():
                    polys[v] = val.as_poly()
                else:
                    rats[v] = val
            else:
                polys[v] = val
        n = self.num.subs(polys)
        d = self.den.subs(polys)
        if not rats:
            if d.is_zero():
                raise ZeroDivisionError("substitution annihilates the denominator")
            return RatFunc(n, d)
        return RatFunc(n).subs_rat(rats) / RatFunc(d).subs_rat(rats)

    def subs_rat(self, rats):
        """Substitute rational functions into a polynomial-valued ``self``."""
        if not self.den.is_constant():
            return self.subs(rats)
        # homogenize over the common denominators of the substituted values
        result = RatFunc(MultiPoly.const(0, self.vars))
        for exps, c in self.num.terms.items():
            term = RatFunc(MultiPoly({tuple(0 if v in rats else e for v, e in zip(self.vars, exps)): c}, self.vars))
            for v, e in zip(self.vars, exps):
                if v in rats and e:
                    term = term * rats[v] ** e
            result = result + term
        return result / self.den.constant_value()

    # -- evaluation --------------------------------------------------------
    def evaluate(self, point):
        d = self.den.evaluate(point)
        if d == 0:
            raise PoleProximity("denominator vanishes")
        n = self.num.evaluate(point)
        if isinstance(n, complex) or isinstance(d, complex) or isinstance(n, float) or isinstance(d, float):
            return n / d
        return coerce_coeff(Fraction(n) / Fraction(d))

    def eval_complex(self, point, eps=POLE_EPS):
        """Complex-double value; :class:`PoleProximity` when ``|den| <= eps``."""
        d = self.den.eval_complex(point)
        if abs(d) <= eps:
            raise PoleProximity(f"|denominator| = {abs(d):.3g} at {point}")
        return self.num.eval_complex(point) / d

    def numeric(self):
        nn = self.num.numeric()
        dd = self.den.numeric()

        def f(values):
            return nn(values) / dd(values)

        return f

    def __str__(self):
        if self.den.is_constant():
            c = Fraction(self.den.constant_value())
            if c == 1:
                return str(self.num)
            return str(self.num / c)
        n = str(self.num)
        if len(self.num) > 1:
            n = f"({n})"
        return f"{n}/({self.den})"

    def __repr__(self):
        return f"RatFunc({str(self)!r})"


def _normalize(num, den):
    """Integer coefficients, unit content overall, positive leading den coefficient."""
    if num.is_zero():
        return num, MultiPoly.const(1, num.vars)
    fn, sn = _int_primitive(num._t)
    fd, sd = _int_primitive(den._t)
    # num/den = (fn/sn)/(fd/sd) = fn*sd / (fd*sn)
    r = Fraction(sd) / Fraction(sn)
    a, b = r.numerator, r.denominator
    lead = den.leading_key()
    if fd[lead] < 0:
        a = -a
    nn = {k: v * a for k, v in fn.items()}
    dd = {k: v * b * (1 if fd[lead] > 0 else -1) for k, v in fd.items()}
    g = math.gcd(math.gcd(*nn.values()) if len(nn) > 1 else abs(next(iter(nn.values()))),
                 math.gcd(*dd.values()) if len(dd) > 1 else abs(next(iter(dd.values()))))
    if g > 1:
        nn = {k: v // g for k, v in nn.items()}
        dd = {k: v // g for k, v in dd.items()}
    return MultiPoly._raw(num.vars, nn), MultiPoly._raw(den.vars, dd)


def as_ratfunc(x, vars=()):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, MultiPoly):
        return RatFunc(x)
    if isinstance(x, str):
        return RatFunc.parse(x, vars or None)
    return RatFunc(MultiPoly.const(x, vars))
