"""Hyperelliptic function fields, places, local expansions and divisor bookkeeping.

Elements of the function field of ``w^2 = P(z)`` are stored as
``a(z) + b(z) w`` with ``a``, ``b`` reduced rational functions.  Orders of
``f (dz)^k`` at places are computed exactly from multiplicities of the
irreducible-over-Q pieces of a gcd-free basis; local expansions give the
same information as series in the local parameter.
"""
from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import LaurentSeries, MultiPoly, RatFunc, gcd, gcd_free_basis, multiplicity, parse_expr
from .algebra.poly import coerce_coeff, fmt_coeff
from .errors import ConsistencyFailure, InvalidCurve, InvalidPlace, ParseError, ZeroFunction

DEFAULT_TERMS = 16


def _rf(x, var):
    if isinstance(x, RatFunc):
        return x.with_vars((var,)) if x.vars != (var,) else x
    if isinstance(x, MultiPoly):
        return RatFunc(x.with_vars((var,)))
    if isinstance(x, str):
        return RatFunc.parse(x, (var,)).with_vars((var,))
    return RatFunc(MultiPoly.const(x, (var,)))


class PlaneCurve:
    """Affine plane curve ``F(x, y) = 0`` supporting total differentiation."""

    def __init__(self, F, x="x", y="y"):
        if isinstance(F, str):
            F = RatFunc.parse(F, (x, y)).as_poly()
        self.x, self.y = x, y
        self.F = F.with_vars((x, y)) if set(F.used_vars()) <= {x, y} else F
        if self.F.degree(y) < 1:
            raise InvalidCurve("F must involve the dependent variable")
        g = gcd(self.F, self.F.diff(y))
        if not g.is_constant():
            raise InvalidCurve("F has a repeated factor")

    def total_derivative(self, f):
        """Derivative along the curve: ``f_x - (F_x / F_y) f_y``."""
        f = f if isinstance(f, RatFunc) else RatFunc(f)
        f = f.with_vars((self.x, self.y)) if set(f.used_vars()) <= {self.x, self.y} else f
        Fx = RatFunc(self.F.diff(self.x))
        Fy = RatFunc(self.F.diff(self.y))
        return f.diff(self.x) - Fx / Fy * f.diff(self.y)

    def to_json(self):
        return {"type": "plane", "F": str(self.F)}


class HyperellipticCurve:
    """The curve ``w^2 = P(z)`` with ``deg P = 2g + 1`` and ``P`` square-free."""

    def __init__(self, P, z="z", w="w"):
        if isinstance(P, (list, tuple)):
            P = MultiPoly.from_coeffs([coerce_coeff(c) for c in P], z)
        elif isinstance(P, str):
            P = RatFunc.parse(P, (z,)).as_poly()
        P = P.with_vars((z,))
        d = P.degree(z)
        if d < 3 or d % 2 == 0:
            raise InvalidCurve(f"deg P must be odd and at least 3, got {d}")
        if not gcd(P, P.diff(z)).is_constant():
            raise InvalidCurve("P is not square-free")
        self.P = P
        self.z = z
        self.w = w
        self.genus = (d - 1) // 2
        self.monic = P.leading_coeff() == 1
        self._Prf = RatFunc(P)

    @classmethod
    def from_json(cls, spec):
        if isinstance(spec, str):
            spec = json.loads(spec)
        kind = spec.get("type", "hyperelliptic")
        if kind == "hyperelliptic":
            return cls([coerce_coeff(c) for c in spec["P"]])
        if kind == "plane":
            F = RatFunc.parse(spec["F"]).as_poly()
            vars = F.used_vars()
            if "w" in vars and F.degree("w") == 2:
                z = [v for v in vars if v != "w"]
                if len(z) != 1:
                    raise InvalidCurve("plane model is not of hyperelliptic form")
                cw = F.coeffs_in("w")
                if set(cw) - {0, 2} or not cw[2].is_constant():
                    raise InvalidCurve("plane model is not of hyperelliptic form")
                return cls(-cw[0] / cw[2].constant_value(), z=z[0])
            raise InvalidCurve("only plane models w^2 = P(z) define hyperelliptic curves")
        raise InvalidCurve(f"unknown curve type {kind!r}")

    def to_json(self):
        coeffs = [fmt_coeff(self.P.coeffs_in(self.z).get(e, MultiPoly.const(0)).constant_value())
                  for e in range(self.P.degree(self.z) + 1)]
        return {"type": "hyperelliptic", "P": coeffs}

    @property
    def degree(self):
        return 2 * self.genus + 1

    def P_value(self, z):
        return self.P.eval_complex({self.z: z})

    def func(self, a=0, b=0):
        return CurveFunction(a, b, self)

    def zfunc(self):
        return CurveFunction(RatFunc.gen(self.z, (self.z,)), 0, self)

    def wfunc(self):
        return CurveFunction(0, 1, self)

    def parse(self, text):
        return CurveFunction.parse(text, self)

    def total_derivative(self, f):
        return f.derivative()

    def branch_factors(self):
        """Irreducible-over-Q pieces of ``P`` (pairwise coprime, square-free)."""
        return gcd_free_basis([self.P])

    def __eq__(self, other):
        return isinstance(other, HyperellipticCurve) and self.P == other.P

    def __hash__(self):
        return hash(self.P)

    def __repr__(self):
        return f"HyperellipticCurve({self.w}^2 = {self.P})"


class CurveFunction:
    """``a(z) + b(z) w`` on a hyperelliptic curve, or ``a(z)`` when ``curve`` is None."""

    __slots__ = ("a", "b", "curve", "var")

    def __init__(self, a, b=0, curve=None, var="z"):
        var = curve.z if curve is not None else var
        self.var = var
        self.curve = curve
        self.a = _rf(a, var)
        self.b = _rf(b, var)
        if curve is None and not self.b.is_zero():
            raise InvalidCurve("a w-component requires a curve")

    @classmethod
    def parse(cls, text, curve=None, var="z"):
        """Parse text in ``z`` (and ``w``) and reduce modulo the curve."""
        z = curve.z if curve is not None else var
        w = curve.w if curve is not None else "w"
        num, den = parse_expr(text, (z, w))
        if curve is None:
            if num.degree(w) > 0 or den.degree(w) > 0:
                raise ParseError(f"{text!r} uses {w} without a curve")
            return cls(RatFunc(num.with_vars((z,)), den.with_vars((z,))), 0, None, var)
        fn = _reduce_poly(num, curve)
        fd = _reduce_poly(den, curve)
        if fd.is_zero():
            raise ParseError(f"denominator of {text!r} vanishes on the curve")
        return fn / fd

    # -- structure ---------------------------------------------------------
    def _new(self, a, b):
        return CurveFunction(a, b, self.curve, self.var)

    def is_zero(self):
        return self.a.is_zero() and self.b.is_zero()

    def is_constant(self):
        return self.b.is_zero() and self.a.is_constant()

    def parity(self):
        """Behaviour under ``w -> -w``: 'even', 'odd', 'mixed' or 'zero'."""
        if self.is_zero():
            return "zero"
        if self.b.is_zero():
            return "even"
        if self.a.is_zero():
            return "odd"
        return "mixed"

    def involution(self):
        return self._new(self.a, -self.b)

    def norm(self):
        """``f * involution(f) = a^2 - b^2 P`` as a rational function of z."""
        if self.curve is None:
            return self.a * self.a
        return self.a * self.a - self.b * self.b * self.curve._Prf

    # -- arithmetic --------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, CurveFunction):
            return other
        return self._new(_rf(other, self.var), 0)

    def __add__(self, other):
        o = self._lift(other)
        return self._new(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if self.curve is None:
            return self._new(self.a * o.a, 0)
        P = self.curve._Prf
        a = self.a * o.a
        if not (self.b.is_zero() or o.b.is_zero()):
            a = a + self.b * o.b * P
        b = self.a * o.b + self.b * o.a
        return self._new(a, b)

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroFunction("inverse of the zero function")
        n = self.norm()
        return self._new(self.a / n, -self.b / n)

    def __truediv__(self, other):
        return self * self._lift(other).inv()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inv()

    def __pow__(self, e):
        if e < 0:
            return self.inv() ** (-e)
        result = self._new(1, 0)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (TypeError, ParseError):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    # -- calculus ----------------------------------------------------------
    def derivative(self):
        """Total z-derivative, using ``w' = P'(z) / (2 w) = P' w / (2 P)``."""
        da = self.a.diff(self.var)
        if self.curve is None or self.b.is_zero():
            return self._new(da, 0)
        P = self.curve._Prf
        dP = RatFunc(self.curve.P.diff(self.var))
        db = self.b.diff(self.var) + self.b * dP / (P * 2)
        return self._new(da, db)

    # -- evaluation --------------------------------------------------------
    def eval_complex(self, z, w=None, eps=1e-12):
        va = self.a.eval_complex({self.var: z}, eps)
        if self.b.is_zero():
            return va
        if w is None:
            raise ValueError("a w-value is needed")
        return va + self.b.eval_complex({self.var: z}, eps) * w

    def numeric(self):
        fa = self.a.numeric()
        fb = None if self.b.is_zero() else self.b.numeric()

        def f(z, w=None):
            v = fa([z])
            if fb is not None:
                v = v + fb([z]) * w
            return v

        return f

    def __str__(self):
        if self.b.is_zero():
            return str(self.a)
        w = self.curve.w
        bs = f"({self.b})*{w}"
        if self.a.is_zero():
            return bs
        return f"{self.a} + {bs}"

    def __repr__(self):
        return f"CurveFunction({str(self)!r})"


def _reduce_poly(p, curve):
    """Reduce a polynomial in (z, w) modulo ``w^2 - P`` to a CurveFunction."""
    z, w = curve.z, curve.w
    cw = p.with_vars((z, w)).coeffs_in(w)
    P = curve.P
    a = MultiPoly.const(0, (z,))
    b = MultiPoly.const(0, (z,))
    for e, c in cw.items():
        c = c.with_vars((z,))
        term = c * P ** (e // 2)
        if e % 2:
            b = b + term
        else:
            a = a + term
    return CurveFunction(RatFunc(a), RatFunc(b), curve)


def parity_decompose(f: CurveFunction):
    """``(a, b)`` with ``f = a(z) + b(z) w``; the involution negates ``b``."""
    return f.a, f.b


def total_derivative(f, curve=None):
    if isinstance(curve, PlaneCurve):
        return curve.total_derivative(f)
    return f.derivative()


# -- places ------------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    """A point of the smooth model.

    ``kind`` is 'regular', 'branch' or 'infinite'.  Finite places carry the
    irreducible polynomial ``h`` of their z-coordinate with a root index
    into its numerically sorted roots (or an exact rational ``z``);
    regular places also carry a sheet sign choosing ``w = sheet * sqrt(P(z))``
    with the principal square root.
    """

    kind: str
    z: Fraction | None = None
    minpoly: MultiPoly | None = field(default=None, compare=False)
    root_index: int = 0
    sheet: int = 1

    @classmethod
    def regular(cls, z, sheet=1):
        return cls("regular", Fraction(coerce_coeff(z)), None, 0, sheet)

    @classmethod
    def branch(cls, z=None, minpoly=None, root_index=0):
        return cls("branch", None if z is None else Fraction(coerce_coeff(z)), minpoly, root_index, 1)

    @classmethod
    def infinity(cls):
        return cls("infinite")

    @classmethod
    def algebraic(cls, kind, minpoly, root_index=0, sheet=1):
        return cls(kind, None, minpoly, root_index, sheet)

    def is_exact(self):
        return self.kind == "infinite" or self.z is not None

    def z_value(self):
        if self.z is not None:
            return self.z
        return _sorted_roots(self.minpoly)[self.root_index]

    def z_complex(self):
        return complex(self.z_value())

    def w_complex(self, curve):
        if self.kind == "infinite":
            return complex("inf")
        if self.kind == "branch":
            return 0j
        return self.sheet * cmath.sqrt(curve.P_value(self.z_complex()))

    def factor(self, var):
        """The primitive irreducible polynomial vanishing at the z-coordinate."""
        if self.z is not None:
            zz = MultiPoly.gen(var, (var,))
            return (zz * self.z.denominator - self.z.numerator).primitive()
        return self.minpoly.with_vars((var,)).primitive()

    def __str__(self):
        if self.kind == "infinite":
            return "P_inf"
        loc = str(self.z) if self.z is not None else f"root{self.root_index}({self.minpoly})"
        if self.kind == "branch":
            return f"branch[{loc}]"
        return f"regular[{loc}, sheet {self.sheet:+d}]"


def _sorted_roots(h):
    (var,) = h.used_vars()
    coeffs = h.coeffs_in(var)
    d = max(coeffs)
    arr = [float(Fraction(coeffs.get(e, MultiPoly.const(0)).constant_value())) if e in coeffs else 0.0
           for e in range(d, -1, -1)]
    roots = np.roots(arr)
    return sorted((complex(r) for r in roots), key=lambda r: (round(r.real, 9), round(r.imag, 9)))


def _validate_place(curve, place):
    if place.kind == "infinite":
        return
    if place.kind not in ("regular", "branch"):
        raise InvalidPlace(f"unknown place kind {place.kind!r}")
    h = place.factor(curve.z)
    on_branch = h.divides(curve.P)
    if place.kind == "branch" and not on_branch:
        raise InvalidPlace(f"{place} is not a zero of P")
    if place.kind == "regular":
        if on_branch:
            raise InvalidPlace(f"{place} lies over a branch point; use a branch place")
        if place.sheet not in (1, -1):
            raise InvalidPlace("sheet must be +1 or -1")
    if place.z is None:
        if place.minpoly is None or len(place.minpoly.used_vars()) != 1:
            raise InvalidPlace("algebraic places need a univariate minimal polynomial")
        if not 0 <= place.root_index < place.minpoly.degree():
            raise InvalidPlace("root index out of range")


# -- exact orders ----------------------------------------------------------

def _mult_rf(h, f: RatFunc):
    if f.is_zero():
        return None
    return multiplicity(h, f.num) - multiplicity(h, f.den)


def _deg_rf(f: RatFunc, var):
    return f.num.degree(var) - f.den.degree(var)


def _regular_orders(f, h):
    """Orders of ``f`` at the two sheets over a root of ``h`` (h coprime to P).

    Returns ``(m_low, m_high, a1, b1)``: one sheet has order ``m_high``,
    the other ``m_low``; ``a1, b1`` are the components of ``f / h^m_low``.
    """
    ma = _mult_rf(h, f.a)
    mb = _mult_rf(h, f.b)
    if mb is None:
        return ma, ma, None, None
    if ma is None:
        return mb, mb, None, None
    m = min(ma, mb)
    hr = RatFunc(h) ** m
    a1, b1 = f.a / hr, f.b / hr
    n = _mult_rf(h, a1 * a1 - b1 * b1 * f.curve._Prf)
    return m, m + n, a1, b1


def order_at(f: CurveFunction, k: int, place: Place) -> int:
    """Valuation of ``f (dz)^k`` at ``place``."""
    if f.is_zero():
        raise ZeroFunction("order of the zero function")
    curve = f.curve
    if curve is None:
        raise InvalidPlace("places are defined for hyperelliptic curves only")
    _validate_place(curve, place)
    z = curve.z
    if place.kind == "infinite":
        n = curve.degree
        cand = []
        if not f.a.is_zero():
            cand.append(-2 * _deg_rf(f.a, z))
        if not f.b.is_zero():
            cand.append(-2 * _deg_rf(f.b, z) - n)
        return min(cand) - 3 * k
    h = place.factor(z)
    if place.kind == "branch":
        cand = []
        if not f.a.is_zero():
            cand.append(2 * _mult_rf(h, f.a))
        if not f.b.is_zero():
            cand.append(2 * _mult_rf(h, f.b) + 1)
        return min(cand) + k
    lo, hi, a1, b1 = _regular_orders(f, h)
    if lo == hi:
        return lo
    z0 = place.z_complex()
    w0 = place.w_complex(curve)
    va = a1.eval_complex({z: z0})
    vb = b1.eval_complex({z: z0}) * w0
    # the vanishing sheet has a1 + b1 w0 = 0
    return hi if abs(va + vb) < abs(va - vb) else lo


def divisor(f: CurveFunction, k: int = 0):
    """List of ``(place, order)`` with nonzero order for ``f (dz)^k``.

    Conjugate places over an irreducible factor are listed individually
    (numerical roots); the sum of orders is exact.
    """
    if f.is_zero():
        raise ZeroFunction("divisor of the zero function")
    out = []
    for h, kind in _support_factors(f):
        roots = range(h.degree())
        exact = h.degree() == 1
        for i in roots:
            if kind == "branch":
                pl = _mk_place("branch", h, i, 1, exact)
                o = order_at(f, k, pl)
                if o:
                    out.append((pl, o))
            else:
                for sheet in (1, -1):
                    pl = _mk_place("regular", h, i, sheet, exact)
                    o = order_at(f, k, pl)
                    if o:
                        out.append((pl, o))
    o = order_at(f, k, Place.infinity())
    if o:
        out.append((Place.infinity(), o))
    return out


def _mk_place(kind, h, i, sheet, exact):
    if exact:
        (var,) = h.used_vars()
        c = h.coeffs_in(var)
        z0 = Fraction(-Fraction(c[0].constant_value()) if 0 in c else 0) / Fraction(c[1].constant_value())
        return Place(kind, z0, None, 0, sheet)
    return Place(kind, None, h, i, sheet)


def _support_factors(f):
    curve = f.curve
    polys = [curve.P]
    for r in (f.a, f.b, f.norm()):
        if not r.is_zero():
            polys += [r.num.with_vars((curve.z,)), r.den.with_vars((curve.z,))]
    out = []
    for h in gcd_free_basis(polys):
        kind = "branch" if h.divides(curve.P) else "regular"
        out.append((h, kind))
    return out


def residue_sum_of_dlog(f: CurveFunction, k: int, curve: HyperellipticCurve | None = None) -> int:
    """Total degree of the divisor of ``f (dz)^k``; must equal ``k (2g - 2)``.

    For ``k = 1`` this is the winding number ``(1/2 pi i) \\oint d log`` of the
    differential around a fundamental polygon.
    """
    if curve is not None and f.curve != curve:
        f = CurveFunction(f.a, f.b, curve)
    curve = f.curve
    if f.is_zero():
        raise ZeroFunction("zero differential")
    total = 0
    for h, kind in _support_factors(f):
        d = h.degree()
        if kind == "branch":
            cand = []
            if not f.a.is_zero():
                cand.append(2 * _mult_rf(h, f.a))
            if not f.b.is_zero():
                cand.append(2 * _mult_rf(h, f.b) + 1)
            total += d * (min(cand) + k)
        else:
            lo, hi, _, _ = _regular_orders(f, h)
            total += d * (lo + hi)
    total += order_at(f, k, Place.infinity())
    expected = k * (2 * curve.genus - 2)
    if total != expected:
        raise ConsistencyFailure(f"degree of divisor is {total}, expected {expected}")
    return total


# -- local expansions --------------------------------------------------------

def _poly_coeffs(p: MultiPoly, var):
    c = p.coeffs_in(var)
    if not c:
        return [0]
    return [c[e].constant_value() if e in c else 0 for e in range(max(c) + 1)]


def _taylor_shift(coeffs, z0):
    """Coefficients of ``p(z0 + t)`` in ``t`` (exact for rational ``z0``)."""
    out = [0] * len(coeffs)
    for c in reversed(coeffs):
        # out = out * (z0 + t) + c
        new = [0] * len(coeffs)
        for i, v in enumerate(out):
            if v:
                new[i] += v * z0
                if i + 1 < len(new):
                    new[i + 1] += v
        new[0] += c
        out = new
    return out


def _series_from_coeffs(cs, prec, var="t"):
    cs = list(cs)
    return LaurentSeries(cs[:prec] + [0] * max(0, prec - len(cs)), 0, var)


def _rf_series(f: RatFunc, var, place, curve, prec, known_val):
    """Series of the rational function ``f(z(t))`` with relative precision ``prec``.

    ``known_val`` is the exact valuation (used to zero numerically
    cancelling leading coefficients at algebraic places).
    """
    num = _poly_coeffs(f.num, var)
    den = _poly_coeffs(f.den, var)

    def sub(coeffs, extra):
        if place.kind == "infinite":
            d = len(coeffs) - 1
            rev = list(reversed(coeffs))  # coefficient of u^i in u^d p(1/u)
            ser = [0] * (2 * len(rev))
            for i, c in enumerate(rev):
                ser[2 * i] = c
            return ser, -2 * d
        z0 = place.z if place.z is not None else place.z_complex()
        sh = _taylor_shift(coeffs, z0)
        if place.kind == "branch":
            ser = [0] * (2 * len(sh))
            for i, c in enumerate(sh):
                ser[2 * i] = c
            return ser, 0
        return sh, 0

    ns, nv = sub(num, 0)
    ds, dv = sub(den, 0)
    h = None if place.kind == "infinite" else place.factor(var)
    step = 2 if place.kind == "branch" else 1
    if h is not None:
        mn = multiplicity(h, f.num) * step
        md = multiplicity(h, f.den) * step
        ns = [0] * mn + ns[mn:]
        ds = [0] * md + ds[md:]
    N = prec + len(ns) + len(ds) + 4
    nser = LaurentSeries(ns + [0] * max(0, N - len(ns)), nv).normalized()
    dser = LaurentSeries(ds + [0] * max(0, N - len(ds)), dv).normalized()
    nser = nser.truncate(nser.val + prec)
    dser = dser.truncate(dser.val + prec)
    return nser / dser


def local_expansion(f: CurveFunction, place: Place, k: int = 0, N: int = DEFAULT_TERMS) -> LaurentSeries:
    """Series of ``f * (dz/dt)^k`` in the local parameter ``t`` at ``place``.

    ``t = z - z0`` at regular places, ``t^2 = z - E`` at branch places and
    ``t^-2 = z`` at infinity.  The result has relative precision ``N``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    curve = f.curve
    if curve is None:
        raise InvalidPlace("places are defined for hyperelliptic curves only")
    _validate_place(curve, place)
    z = curve.z
    n = curve.degree
    prec = N + 2
    Pc = _poly_coeffs(curve.P, z)
    if place.kind == "infinite":
        rev = list(reversed(Pc))
        ser = [0] * (2 * len(rev))
        for i, c in enumerate(rev):
            ser[2 * i] = c
        wser = LaurentSeries(ser[:prec] + [0] * max(0, prec - len(ser)), 0).sqrt().shift(-n)
        dz = LaurentSeries.monomial(-2, -3, prec)
    elif place.kind == "branch":
        z0 = place.z if place.z is not None else place.z_complex()
        sh = _taylor_shift(Pc, z0)
        sh[0] = 0  # P(E) = 0
        q = sh[1:]
        ser = [0] * (2 * len(q))
        for i, c in enumerate(q):
            ser[2 * i] = c
        wser = LaurentSeries(ser[:prec] + [0] * max(0, prec - len(ser)), 0).sqrt().shift(1)
        dz = LaurentSeries.monomial(2, 1, prec)
    else:
        z0 = place.z if place.z is not None else place.z_complex()
        sh = _taylor_shift(Pc, z0)
        base = LaurentSeries(sh[:prec] + [0] * max(0, prec - len(sh)), 0).sqrt()
        w0 = place.w_complex(curve)
        lead = base.coeffs[0]
        # align with the sheet convention w0 = sheet * principal sqrt(P(z0))
        if abs(complex(lead) - w0) > abs(complex(lead) + w0):
            base = -base
        wser = base
        dz = LaurentSeries.monomial(1, 0, prec)
    order = order_at(f, 0, place)
    result = None
    for comp, mult in ((f.a, None), (f.b, wser)):
        if comp.is_zero():
            continue
        s = _rf_series(comp, z, place, curve, prec, None)
        if mult is not None:
            s = s * mult
        result = s if result is None else result + s
    if k:
        result = result * dz ** k
    result = result.normalized()
    if not result.is_exact():
        # numerically cancelled leading terms: the exact order is known
        target = order + k * {"regular": 0, "branch": 1, "infinite": -3}[place.kind]
        drop = target - result.val
        if drop > 0:
            result = LaurentSeries._raw(result.coeffs[drop:], target, result.var)
    return result.truncate(result.val + N)


def curve_from_json(spec):
    if isinstance(spec, str):
        spec = json.loads(spec)
    if spec.get("type") == "plane":
        F = RatFunc.parse(spec["F"]).as_poly()
        try:
            return HyperellipticCurve.from_json(spec)
        except InvalidCurve:
            vars = F.used_vars()
            return PlaneCurve(F, *vars[:2])
    return HyperellipticCurve.from_json(spec)
