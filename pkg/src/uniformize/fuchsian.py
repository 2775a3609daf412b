"""Schwarzian-bracket calculus and constructors for Fuchsian potentials.

Throughout, a potential ``Q`` describes ``Psi'' = Q Psi / 2`` in some scalar
coordinate ``x`` on a curve; equivalently ``Q = [x, tau]`` where ``tau`` is a
ratio of two solutions and the bracket is

    [x, tau] = x''' / x'^3 - (3/2) x''^2 / x'^4 = {x, tau} / x'^2.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import LaurentSeries, MultiPoly, RatFunc, gcd, multiplicity, resultant, squarefree_part
from .algebra.poly import coerce_coeff, fmt_coeff
from .curve import CurveFunction, HyperellipticCurve
from .errors import (
    DegenerateMap,
    DegeneratePotential,
    InvalidAccessoryData,
    IrregularSingularity,
)

INF = "inf"


# -- Möbius maps -----------------------------------------------------------

@dataclass(frozen=True)
class MobiusMap:
    """``tau -> (a tau + b) / (c tau + d)``."""

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        if self.det() == 0:
            raise DegenerateMap("ad - bc = 0")

    def det(self):
        return self.a * self.d - self.b * self.c

    def __call__(self, tau):
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def derivative(self, tau):
        return self.det() / (self.c * tau + self.d) ** 2

    def compose(self, other):
        """``self o other``."""
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self):
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def normalized(self):
        """Scale so that ``ad - bc > 0`` (real entries only)."""
        det = self.det()
        if isinstance(det, complex):
            raise DegenerateMap("normalization needs real entries")
        if det > 0:
            return self
        return MobiusMap(-self.a, -self.b, self.c, self.d)

    def on_series(self, x: LaurentSeries) -> LaurentSeries:
        return (x * self.a + self.b) / (x * self.c + self.d)


# -- series brackets --------------------------------------------------------

def _derivs(x: LaurentSeries):
    d1 = x.deriv()
    d2 = d1.deriv()
    d3 = d2.deriv()
    return d1, d2, d3


def schwarzian_of_series(x: LaurentSeries) -> LaurentSeries:
    """The bracket ``[x, tau]`` of a series in ``tau``.

    The input's relative precision ``N`` becomes ``N - 3`` on output.
    """
    d1, d2, d3 = _derivs(x)
    if d1.is_zero():
        raise DegenerateMap("x' vanishes identically to working precision")
    n = len(x.coeffs) - 3
    if n < 1:
        raise ValueError("series too short for a third derivative")
    d1, d2, d3 = (s.normalized() for s in (d1, d2, d3))
    inv = d1.inv()
    res = d3 * inv ** 3 - (d2 * d2) * (inv ** 4) * Fraction(3, 2)
    res = res.normalized()
    return res.truncate(res.val + n)


def classical_schwarzian_of_series(x: LaurentSeries) -> LaurentSeries:
    """``{x, tau} = x'''/x' - (3/2)(x''/x')^2``."""
    d1, d2, d3 = _derivs(x)
    if d1.is_zero():
        raise DegenerateMap("x' vanishes identically to working precision")
    n = len(x.coeffs) - 3
    inv = d1.normalized().inv()
    r = d2 * inv
    res = (d3 * inv - r * r * Fraction(3, 2)).normalized()
    return res.truncate(res.val + n)


# -- exact brackets on curves ------------------------------------------------

def _as_cf(f, curve=None, var="z"):
    if isinstance(f, CurveFunction):
        return f
    if isinstance(f, str):
        return CurveFunction.parse(f, curve, var)
    return CurveFunction(f, 0, curve, var)


def classical_from_density(rho: CurveFunction, coord_density=None) -> CurveFunction:
    """``{u, c}`` from ``du/dc = rho``, where ``dc/dz = coord_density`` (default 1)."""
    if rho.is_zero():
        raise DegenerateMap("the coordinate has zero derivative")

    def d(f):
        df = f.derivative()
        return df if coord_density is None else df / coord_density

    L = d(rho) / rho
    return d(L) - L * L * Fraction(1, 2)


def bracket_from_density(rho: CurveFunction, coord_density=None) -> CurveFunction:
    """``[u, c] = {u, c} / (du/dc)^2`` from the density ``rho = du/dc``."""
    return classical_from_density(rho, coord_density) / (rho * rho)


def schwarzian_rational(R, var="x") -> RatFunc:
    """Exact ``[R, x] = {R, x} / R_x^2`` for a rational function ``R(x)``."""
    R = R if isinstance(R, RatFunc) else RatFunc.parse(R, (var,)) if isinstance(R, str) else RatFunc(R)
    if var not in R.vars:
        raise DegenerateMap("R is constant")
    R = R.with_vars((var,)) if set(R.used_vars()) <= {var} else R
    d1 = R.diff(var)
    if d1.is_zero():
        raise DegenerateMap("R is constant")
    d2 = d1.diff(var)
    d3 = d2.diff(var)
    return d3 / d1 ** 3 - d2 * d2 / d1 ** 4 * Fraction(3, 2)


# -- Fuchsian potentials ----------------------------------------------------

@dataclass
class FuchsianQ:
    """Potential ``Q`` of ``Psi'' = Q Psi / 2`` in a scalar coordinate on a curve.

    ``Q`` is a :class:`CurveFunction` in the curve variables (``curve`` is
    None for a univariate potential in ``var``).  ``density`` is the
    derivative of the current scalar coordinate with respect to the curve
    variable (``None`` when the scalar is the curve variable itself).
    ``singular`` maps exact singular points (or ``"inf"``) to the
    coefficient of the double pole.
    """

    Q: CurveFunction
    provenance: str = "custom"
    curve: HyperellipticCurve | None = None
    density: CurveFunction | None = None
    singular: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)

    @property
    def var(self):
        return self.Q.var

    def on_curve(self) -> CurveFunction:
        """``Q`` as a function on the recorded curve (when there is one)."""
        if self.curve is not None and self.Q.curve is None and self.Q.var == self.curve.z:
            return CurveFunction(self.Q.a, 0, self.curve)
        return self.Q

    def ratfunc(self) -> RatFunc:
        if not self.Q.b.is_zero():
            raise ValueError("potential depends on w")
        return self.Q.a

    def is_univariate(self):
        return self.Q.b.is_zero() and self.density is None

    def eval_complex(self, z, w=None):
        return self.Q.eval_complex(z, w)

    def numeric(self):
        return self.Q.numeric()

    def to_json(self):
        out = {"Q": str(self.Q), "provenance": self.provenance, "var": self.var}
        if self.curve is not None:
            out["curve"] = self.curve.to_json()
        return out

    def __str__(self):
        return str(self.Q)


def change_variable_density(Q: FuchsianQ, rho, provenance=None) -> FuchsianQ:
    """Potential for a new scalar ``u`` with ``du = rho dc`` (``c`` the current scalar).

    ``[u, tau] = [u, c] + [c, tau] / (du/dc)^2``.
    """
    base = Q.on_curve()
    rho = _as_cf(rho, base.curve, Q.var)
    if rho.is_zero():
        raise DegenerateMap("the new coordinate is constant")
    newQ = bracket_from_density(rho, Q.density) + base / (rho * rho)
    dens = rho if Q.density is None else rho * Q.density
    return FuchsianQ(newQ, provenance or Q.provenance, Q.curve, dens)


def change_variable_q(Q: FuchsianQ, R) -> FuchsianQ:
    """Potential for the scalar ``R`` (a function on the curve).

    ``[R, tau] = [R, c] + [c, tau] / R_c^2`` with the total derivative
    along the curve.
    """
    R = _as_cf(R, Q.on_curve().curve, Q.var)
    dR = R.derivative()
    if dR.is_zero():
        raise DegenerateMap("R is constant on the curve")
    rho = dR if Q.density is None else dR / Q.density
    return change_variable_density(Q, rho)


def express_in(f: RatFunc, R: RatFunc, var="x", new_var="z"):
    """Find ``g`` with ``f = g(R)``; returns a RatFunc in ``new_var`` or None.

    Uses ``Res_x(R_num - z R_den, f_num - v f_den)``, which is a power of a
    linear form in ``v`` exactly when ``f`` factors through ``R``.
    """
    vz = MultiPoly.gen(new_var, (var, new_var, "_v"))
    vv = MultiPoly.gen("_v", (var, new_var, "_v"))
    a = R.num.with_vars((var, new_var, "_v")) - vz * R.den.with_vars((var, new_var, "_v"))
    b = f.num.with_vars((var, new_var, "_v")) - vv * f.den.with_vars((var, new_var, "_v"))
    if f.is_constant():
        return RatFunc(MultiPoly.const(f.constant_value(), (new_var,)))
    res = resultant(a, b, var)
    sq = squarefree_part(res, "_v")
    if sq.degree("_v") != 1:
        return None
    c = sq.coeffs_in("_v")
    c1 = c[1].with_vars((new_var,))
    c0 = c.get(0, MultiPoly.const(0, ())).with_vars((new_var,))
    return RatFunc(-c0, c1)


def _half_defect(p):
    """``(1/p^2 - 1) / 2``; ``p = inf`` gives ``-1/2``."""
    if p == INF or p is None:
        return Fraction(-1, 2)
    p = int(p)
    if p < 2:
        raise InvalidAccessoryData(f"orbifold order must be >= 2 or inf, got {p}")
    return (Fraction(1, p * p) - 1) / 2


@dataclass
class OrbifoldSpec:
    """Genus-zero orbifold data: points (exact rationals or ``"inf"``), orders, accessory tail."""

    points: list
    orders: list
    accessory: list = field(default_factory=list)

    def __post_init__(self):
        pts = []
        for p in self.points:
            if isinstance(p, str) and p.strip().lower() in ("inf", "oo", "infinity", "∞"):
                pts.append(INF)
            elif isinstance(p, complex) or (isinstance(p, str) and "j" in p):
                raise InvalidAccessoryData("orbifold points must be exact rationals or inf")
            else:
                pts.append(Fraction(coerce_coeff(p)))
        ords = []
        for o in self.orders:
            if isinstance(o, str) and o.strip().lower() in ("inf", "oo", "infinity", "∞"):
                ords.append(INF)
            elif o == math.inf:
                ords.append(INF)
            else:
                ords.append(int(o))
        if len(pts) != len(ords):
            raise InvalidAccessoryData("points and orders differ in length")
        if len(set(pts)) != len(pts):
            raise InvalidAccessoryData("orbifold points must be distinct")
        if len(pts) < 3:
            raise InvalidAccessoryData("at least three singular points are needed")
        self.points = pts
        self.orders = ords
        self.accessory = [Fraction(coerce_coeff(a)) for a in self.accessory]

    @classmethod
    def from_json(cls, spec):
        if isinstance(spec, str):
            spec = json.loads(spec)
        return cls(spec["points"], spec["orders"], spec.get("accessory", []))

    def to_json(self):
        return {
            "points": [INF if p == INF else fmt_coeff(p) for p in self.points],
            "orders": [INF if o == INF else str(o) for o in self.orders],
            "accessory": [fmt_coeff(a) for a in self.accessory],
        }


def _solve_linear(rows, rhs):
    """Exact Gauss-Jordan elimination; returns the unique solution or raises."""
    n = len(rows[0]) if rows else 0
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][-1] != 0:
            raise InvalidAccessoryData("accessory data inconsistent with the behaviour at infinity")
    if r < n:
        raise InvalidAccessoryData("accessory data underdetermined")
    sol = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        sol[c] = m[i][-1]
    return sol


def build_orbifold_q(spec: OrbifoldSpec, var="x") -> FuchsianQ:
    """Genus-zero potential with double poles ``c_s/(x-e_s)^2`` and simple-pole tail.

    ``Q = sum_s [c_s/(x-e_s)^2 + beta_s/(x-e_s)]`` with
    ``c_s = (1/p_s^2 - 1)/2``.  The ``beta_s`` satisfy the conditions at
    infinity: ``sum beta = 0`` and ``x^2 Q -> c_inf`` when infinity is a
    singular point, or ``Q = O(x^-4)`` otherwise.  ``spec.accessory`` gives
    the leading ``beta`` values that these conditions leave free (or all of
    them, which are then validated).
    """
    finite = [(p, o) for p, o in zip(spec.points, spec.orders) if p != INF]
    at_inf = [o for p, o in zip(spec.points, spec.orders) if p == INF]
    n = len(finite)
    cs = [_half_defect(o) for _, o in finite]
    es = [p for p, _ in finite]
    # conditions on beta: sum beta = 0; sum c + sum beta e = c_inf (or 0); if regular also
    # sum 2 c e + sum beta e^2 = 0
    rows = [[Fraction(1)] * n, list(es)]
    rhs = [Fraction(0), (_half_defect(at_inf[0]) if at_inf else Fraction(0)) - sum(cs)]
    if not at_inf:
        rows.append([e * e for e in es])
        rhs.append(-sum(2 * c * e for c, e in zip(cs, es)))
    free = n - len(rows)
    acc = list(spec.accessory)
    if len(acc) == n:
        for r, b in zip(rows, rhs):
            if sum(x * y for x, y in zip(r, acc)) != b:
                raise InvalidAccessoryData("accessory tail violates the order at infinity")
        betas = acc
    elif len(acc) == free:
        # unknowns: the last n - free betas
        sub_rows = [r[free:] for r in rows]
        sub_rhs = [b - sum(x * y for x, y in zip(r[:free], acc)) for r, b in zip(rows, rhs)]
        betas = acc + _solve_linear(sub_rows, sub_rhs)
    else:
        raise InvalidAccessoryData(
            f"expected {free} free accessory parameters (or all {n}), got {len(acc)}"
        )
    x = RatFunc.gen(var, (var,))
    Q = RatFunc(MultiPoly.const(0, (var,)))
    for c, b, e in zip(cs, betas, es):
        Q = Q + RatFunc(MultiPoly.const(c, (var,))) / (x - e) ** 2
        if b:
            Q = Q + RatFunc(MultiPoly.const(b, (var,))) / (x - e)
    singular = {e: c for e, c in zip(es, cs)}
    orders = {e: o for e, (_, o) in zip(es, finite)}
    if at_inf:
        singular[INF] = _half_defect(at_inf[0])
        orders[INF] = at_inf[0]
    return FuchsianQ(CurveFunction(Q, 0, None, var), "orbifold", None, None, singular, orders)


def build_q38(E=None, A=0, P=None, var="z") -> FuchsianQ:
    """Potential ``-(3/8) {sum 1/(z-E_s)^2 - (2n z^(2n-1) + A(z)) / prod (z-E_s)}``.

    The ``2n+1`` points are given either as exact rationals ``E`` or as the
    roots of a square-free polynomial ``P`` (leading coefficient divided out).
    """
    if P is None:
        if E is None:
            raise InvalidAccessoryData("either E or P is required")
        pts = [Fraction(coerce_coeff(e)) for e in E]
        if len(set(pts)) != len(pts):
            raise InvalidAccessoryData("points must be distinct")
        Pm = MultiPoly.const(1, (var,))
        zz = MultiPoly.gen(var, (var,))
        for e in pts:
            Pm = Pm * (zz - e)
    else:
        Pm = P if isinstance(P, MultiPoly) else RatFunc.parse(P, (var,)).as_poly()
        Pm = Pm.with_vars((var,))
        Pm = Pm / Pm.leading_coeff()
        pts = None
        if not gcd(Pm, Pm.diff(var)).is_constant():
            raise InvalidAccessoryData("points must be distinct")
    d = Pm.degree(var)
    if d % 2 == 0 or d < 3:
        raise InvalidAccessoryData("an odd number (>= 3) of points is required")
    n = (d - 1) // 2
    if isinstance(A, str):
        A = RatFunc.parse(A, (var,)).as_poly()
    if not isinstance(A, MultiPoly):
        A = MultiPoly.const(A, (var,))
    A = A.with_vars((var,))
    if A.degree(var) > 2 * n - 2:
        raise InvalidAccessoryData(f"deg A = {A.degree(var)} exceeds 2n-2 = {2 * n - 2}")
    Pr = RatFunc(Pm)
    dP = RatFunc(Pm.diff(var))
    ddP = RatFunc(Pm.diff(var, 2))
    sum_sq = (dP * dP - Pr * ddP) / (Pr * Pr)
    tail = (RatFunc(MultiPoly.gen(var, (var,)) ** (2 * n - 1) * (2 * n)) + RatFunc(A)) / Pr
    Q = (sum_sq - tail) * Fraction(-3, 8)
    singular = {e: Fraction(-3, 8) for e in pts} if pts else {}
    singular[INF] = Fraction(-3, 8)
    curve = None
    try:
        curve = HyperellipticCurve(Pm)
    except Exception:
        curve = None
    fq = FuchsianQ(CurveFunction(Q, 0, None, var), "q38", curve, None, singular,
                   {k: 2 for k in singular})
    return fq


def whittaker_z(g: int) -> FuchsianQ:
    """``[z, tau] = -(3/8) z^(2g-1) (z^(2g+1) - 4g(g+1)) / (z^(2g+1) + 1)^2`` on ``w^2 = z^(2g+1) + 1``."""
    if g < 1:
        raise ValueError("genus must be positive")
    z = MultiPoly.gen("z", ("z",))
    n = 2 * g + 1
    num = z ** (2 * g - 1) * (z ** n - 4 * g * (g + 1)) * Fraction(-3, 8)
    den = (z ** n + 1) ** 2
    curve = HyperellipticCurve(z ** n + 1)
    return FuchsianQ(CurveFunction(RatFunc(num, den), 0, None, "z"), "whittakerZ", curve, None,
                     {INF: Fraction(-3, 8)}, {INF: 2})


def whittaker_w(g: int) -> FuchsianQ:
    """``[w, tau] = -(2g(g+1)/(2g+1)^2) (w^2 + 3) / (w^2 - 1)^2``."""
    if g < 1:
        raise ValueError("genus must be positive")
    w = MultiPoly.gen("w", ("w",))
    k = Fraction(-2 * g * (g + 1), (2 * g + 1) ** 2)
    Q = RatFunc(w ** 2 + 3, (w ** 2 - 1) ** 2) * k
    c = k  # (w-1)^2 Q at w = 1 equals k (1 + 3) / 4
    return FuchsianQ(CurveFunction(Q, 0, None, "w"), "whittakerW", None, None,
                     {Fraction(1): c, Fraction(-1): c}, {})


def companion_phi(Q: FuchsianQ):
    """Coefficients ``(c1, c0)`` of ``Phi'' + c1 Phi' + c0 Phi = 0`` for ``Phi = Psi'``.

    ``c1 = -Q'/Q`` and ``c0 = -Q/2``.
    """
    if Q.Q.is_zero():
        raise DegeneratePotential("Q vanishes identically")
    dQ = Q.Q.derivative()
    if Q.density is not None:
        dQ = dQ / Q.density
    return -(dQ / Q.Q), Q.Q * Fraction(-1, 2)


def _exponents_from_c(c):
    disc = 1 + 2 * Fraction(c) if not isinstance(c, complex) else 1 + 2 * c
    if isinstance(disc, Fraction) and disc >= 0:
        n, d = math.isqrt(disc.numerator), math.isqrt(disc.denominator)
        if n * n == disc.numerator and d * d == disc.denominator:
            r = Fraction(n, d)
            return (1 + r) / 2, (1 - r) / 2
    s = cmath.sqrt(complex(disc))
    return (1 + s) / 2, (1 - s) / 2


def leading_pole_coefficient(Q: FuchsianQ, point):
    """Pole order ``m`` of ``Q`` at ``point`` and the coefficient of ``(x-e)^-2``.

    ``point`` is an exact rational, ``"inf"``, a complex number, or a pair
    ``(minpoly, complex approximation)``.
    """
    f = Q.ratfunc()
    var = Q.var
    x = MultiPoly.gen(var, (var,))
    num, den = f.num.with_vars((var,)), f.den.with_vars((var,))
    if point == INF or (isinstance(point, str) and point.lower() in ("inf", "oo")):
        # t = 1/x: Q_t = Q(1/t) / t^4, coefficient of t^-2 is lim x^2 Q
        m = num.degree(var) - den.degree(var) + 4
        if m < 2:
            return m, Fraction(0)
        if m > 2:
            return m, None
        return 2, Fraction(num.leading_coeff()) / Fraction(den.leading_coeff()) if num.degree(var) >= 0 else 0
    if isinstance(point, (int, Fraction, str)):
        e = Fraction(coerce_coeff(point))
        h = (x * e.denominator - e.numerator).primitive()
        m = multiplicity(h, den) - multiplicity(h, num)
        if m < 2:
            return m, Fraction(0)
        if m > 2:
            return m, None
        rest = RatFunc(num * (x - e) ** 2, den)
        return 2, Fraction(rest.evaluate({var: e}))
    if isinstance(point, tuple):
        h, approx = point
        h = h.with_vars((var,))
    else:
        approx = complex(point)
        h = None
        for cand in _irreducible_pieces(den):
            if abs(cand.eval_complex({var: approx})) < 1e-8 * max(1.0, abs(approx)) ** cand.degree():
                h = cand
                break
        if h is None:
            return 0, 0j
    m = multiplicity(h, den) - multiplicity(h, num)
    if m < 2:
        return m, 0j
    if m > 2:
        return m, None
    # refine the root numerically then evaluate (x-e)^2 Q = num / (den/h^2) / h'(e)^2
    e = complex(approx)
    dh = h.diff(var)
    for _ in range(50):
        step = h.eval_complex({var: e}) / dh.eval_complex({var: e})
        e -= step
        if abs(step) < 1e-15 * max(1, abs(e)):
            break
    rest = den.exact_div(h * h)
    val = num.eval_complex({var: e}) / rest.eval_complex({var: e}) / dh.eval_complex({var: e}) ** 2
    return 2, val


def _irreducible_pieces(p):
    from .algebra import gcd_free_basis

    return gcd_free_basis([squarefree_part(p)])


def indicial_exponents(Q: FuchsianQ, point):
    """Roots ``(rho+, rho-)`` of ``rho (rho - 1) = c / 2``; their difference is ``sqrt(1 + 2c)``."""
    m, c = leading_pole_coefficient(Q, point)
    if c is None:
        raise IrregularSingularity(f"pole of order {m} at {point}")
    return _exponents_from_c(c)


def exponent_difference(Q: FuchsianQ, point):
    a, b = indicial_exponents(Q, point)
    return a - b
