"""Jet indeterminates, curvature relations and elimination to autonomous ODEs.

The jets ``j0..j3`` stand for ``Gamma`` and its first three tau-derivatives.
On an object of weight ``k`` the covariant derivative is
``grad f = D f - k j0 f`` with the formal derivation ``D j_i = j_(i+1)``.

Relations coming from a connection are written in the curvature
indeterminates ``k0, k1, k2`` (for ``K``, ``grad K``, ``grad^2 K``) and only
pulled back to jets once the curve variables are gone.  Relations for a
1-differential ``psi`` use ``p0..p3`` (``psi`` and its tau-derivatives).
"""
from __future__ import annotations

import json
import math
import re
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import MultiPoly, RatFunc, content_in, gcd, lcm, resultant, squarefree_part
from .algebra.poly import coerce_coeff, fmt_coeff
from .connection import FlatConnection, STIdentity, compute_st_identities
from .curve import CurveFunction, HyperellipticCurve
from .errors import DegenerateIdentity, DegreeOverflow, EliminationDegeneracy, InvalidCurve
from .fuchsian import FuchsianQ

JET_VARS = ("j0", "j1", "j2", "j3")
CURV_VARS = ("k0", "k1", "k2")
PSI_VARS = ("p0", "p1", "p2", "p3")
DEFAULT_DEGREE_CAP = 64

_JET_NAME = re.compile(r"^([jkpg])(\d+)$")


def jet_weight(name):
    """Weight of a jet indeterminate: ``j_i, p_i, g_i`` have ``i + 1``, ``k_i`` has ``i + 2``."""
    m = _JET_NAME.match(name)
    if not m:
        return 0
    kind, i = m.group(1), int(m.group(2))
    return i + 2 if kind == "k" else i + 1


def is_jet(name):
    return bool(_JET_NAME.match(name))


def _jet_order(name):
    return (name[0], int(name[1:]))


# -- formal derivatives and curvature -----------------------------------------
def formal_derivative(f: MultiPoly, jets=JET_VARS) -> MultiPoly:
    """Total derivative with ``D jets[i] = jets[i + 1]``."""
    f = f.with_vars(tuple(jets))
    if f.degree(jets[-1]) > 0:
        raise ValueError(f"{jets[-1]} has no derivative among the jets")
    out = MultiPoly.const(0, jets)
    for a, b in zip(jets, jets[1:]):
        if f.degree(a) > 0:
            out = out + f.diff(a) * MultiPoly.gen(b, jets)
    return out


def covariant_derivative(f: MultiPoly, weight: int, jets=JET_VARS) -> MultiPoly:
    """``D f - weight * j0 * f``."""
    j0 = MultiPoly.gen(jets[0], jets)
    return formal_derivative(f, jets) - j0 * f.with_vars(tuple(jets)) * weight


def jet_curvature():
    """Closed forms of ``K``, ``grad K`` and ``grad^2 K`` in ``j0..j3``."""
    j0, j1, j2, j3 = MultiPoly.gens(*JET_VARS)
    K = j1 - j0 ** 2 * Fraction(1, 2)
    dK = j2 - j0 * j1 * 3 + j0 ** 3
    d2K = j3 - j0 * j2 * 6 - j1 ** 2 * 3 + j0 ** 2 * j1 * 12 - j0 ** 4 * 3
    return K, dK, d2K


def curvature_by_iteration():
    """``K``, ``(D - 2 j0) K`` and ``(D - 3 j0)(D - 2 j0) K`` computed formally."""
    j0, j1 = MultiPoly.gens(*JET_VARS)[:2]
    K = j1 - j0 ** 2 * Fraction(1, 2)
    dK = covariant_derivative(K, 2)
    return K, dK, covariant_derivative(dK, 3)


# -- polynomials with curve-function coefficients ---------------------------------
class CurvePoly:
    """Polynomial in jet indeterminates whose coefficients are curve functions."""

    __slots__ = ("terms", "jets", "curve", "var")

    def __init__(self, terms, jets, curve=None, var="z"):
        self.jets = tuple(jets)
        self.curve = curve
        self.var = curve.z if curve is not None else var
        self.terms = {e: c for e, c in terms.items() if not c.is_zero()}

    def _coef(self, c):
        if isinstance(c, CurveFunction):
            return c
        return CurveFunction(RatFunc(MultiPoly.const(coerce_coeff(c), (self.var,))), 0, self.curve, self.var)

    @classmethod
    def gen(cls, name, jets, curve=None, var="z"):
        e = tuple(int(v == name) for v in jets)
        p = cls({}, jets, curve, var)
        return cls({e: p._coef(1)}, jets, curve, var)

    @classmethod
    def constant(cls, c, jets, curve=None, var="z"):
        p = cls({}, jets, curve, var)
        return cls({(0,) * len(jets): p._coef(c)}, jets, curve, var)

    def _new(self, terms):
        return CurvePoly(terms, self.jets, self.curve, self.var)

    def _lift(self, other):
        if isinstance(other, CurvePoly):
            return other
        return self._new({(0,) * len(self.jets): self._coef(other)})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        o = self._lift(other)
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out[e] + c if e in out else c
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CurvePoly):
            c = self._coef(other)
            return self._new({e: v * c for e, v in self.terms.items()})
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                v = ca * cb
                out[e] = out[e] + v if e in out else v
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = self._lift(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, CurvePoly):
            other = self._lift(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def coeff(self, exps):
        return self.terms.get(tuple(exps), self._coef(0))

    def derive(self, coef_rule):
        """Total derivative with ``D jets[i] = jets[i+1]`` and ``D c = coef_rule(c)`` (a CurvePoly)."""
        out = self._new({})
        n = len(self.jets)
        for e, c in self.terms.items():
            mono = self._new({e: self._coef(1)})
            dc = c.derivative()
            if not dc.is_zero():
                out = out + coef_rule(dc) * mono
            for i in range(n):
                if e[i]:
                    if i + 1 >= n:
                        raise ValueError(f"{self.jets[i]} has no derivative among the jets")
                    ne = list(e)
                    ne[i] -= 1
                    ne[i + 1] += 1
                    out = out + self._new({tuple(ne): c * e[i]})
        return out

    def to_bipoly(self) -> MultiPoly:
        """Clear denominators: a polynomial in the curve variables and the jets."""
        cvars = (self.var,) if self.curve is None else (self.curve.z, self.curve.w)
        vars = cvars + self.jets
        if not self.terms:
            return MultiPoly.const(0, vars)
        L = MultiPoly.const(1, (self.var,))
        for c in self.terms.values():
            for part in (c.a, c.b):
                if not part.is_zero():
                    L = lcm(L, part.den.with_vars((self.var,)))
        out = MultiPoly.const(0, vars)
        wgen = MultiPoly.gen(self.curve.w, vars) if self.curve is not None else None
        for e, c in self.terms.items():
            mono = MultiPoly({(0,) * len(cvars) + e: 1}, vars)
            for part, factor in ((c.a, None), (c.b, wgen)):
                if part.is_zero():
                    continue
                num = part.num.with_vars((self.var,)) * L.exact_div(part.den.with_vars((self.var,)))
                term = num.with_vars(vars) * mono
                out = out + (term * factor if factor is not None else term)
        return out

    def __str__(self):
        return str(self.to_bipoly())

    def __repr__(self):
        return f"CurvePoly({str(self)!r})"


@dataclass
class Relations:
    """Relations ``P1, P2`` (and the curve equation ``Pc``) for elimination."""

    P1: CurvePoly
    P2: CurvePoly
    Pc: MultiPoly | None = None

    def bipolys(self):
        return self.P1.to_bipoly(), self.P2.to_bipoly(), self.Pc


def curve_equation(curve: HyperellipticCurve) -> MultiPoly:
    vars = (curve.z, curve.w)
    return MultiPoly.gen(curve.w, vars) ** 2 - curve.P.with_vars(vars)


def build_relations(st: STIdentity, curve: HyperellipticCurve | None = None) -> Relations:
    """``P1 = (grad K)^2 - S K^3`` and ``P2 = grad^2 K - T K^2`` in ``k0, k1, k2``."""
    curve = curve if curve is not None else st.curve
    if st.S.is_zero() or st.T.is_zero():
        raise DegenerateIdentity("S or T vanishes identically")
    var = st.S.var
    k0, k1, k2 = (CurvePoly.gen(v, CURV_VARS, curve, var) for v in CURV_VARS)
    P1 = k1 ** 2 - k0 ** 3 * st.S
    P2 = k2 - k0 ** 2 * st.T
    Pc = curve_equation(curve) if curve is not None else None
    return Relations(P1, P2, Pc)


def psi_relations(Q: FuchsianQ, R=None):
    """Relations for ``psi`` with ``xdot = R(x) psi`` (``R = 1``: ``psi = xdot``).

    Base relations in ``X_i`` (``xdot`` and its derivatives)::

        2 X2 X0 - 3 X1^2 - 2 Q X0^4,
        X3 X0^2 - 6 X2 X1 X0 + 6 X1^3 - Q' X0^6,

    with ``X0 = R p0`` and ``X_(i+1) = D X_i`` where ``D p_i = p_(i+1)`` and
    ``D f(x) = f'(x) R p0``.
    """
    base = Q.on_curve()
    curve, var = base.curve, base.var
    density = Q.density

    def dx(f):
        d = f.derivative()
        return d / density if density is not None else d

    if R is None:
        R = CurveFunction(1, 0, curve, var)
    elif isinstance(R, str):
        R = CurveFunction.parse(R, curve, var)
    elif not isinstance(R, CurveFunction):
        R = CurveFunction(R, 0, curve, var)
    if R.is_zero():
        raise DegenerateIdentity("R vanishes identically")
    p0 = CurvePoly.gen("p0", PSI_VARS, curve, var)

    def coef_rule(dc):
        # dc is the z-derivative of a coefficient; convert to d/dx and multiply by xdot
        c = dc / density if density is not None else dc
        return p0 * (c * R)

    X = [p0 * R]
    for _ in range(3):
        X.append(X[-1].derive(coef_rule))
    Qc = base
    dQ = dx(base)
    A1 = X[2] * X[0] * 2 - X[1] ** 2 * 3 - X[0] ** 4 * (Qc * 2)
    A2 = X[3] * X[0] ** 2 - X[2] * X[1] * X[0] * 6 + X[1] ** 3 * 6 - X[0] ** 6 * dQ
    return A1, A2


# -- elimination ---------------------------------------------------------
@dataclass
class DerivedODE:
    """Autonomous polynomial ODE ``Xi = 0`` in jet indeterminates."""

    Xi: MultiPoly
    names: tuple = ("g0", "g1", "g2", "g3")
    provenance: dict = field(default_factory=dict)
    log: list = field(default_factory=list)
    curvature_form: MultiPoly | None = None
    seconds: float = field(default=0.0, compare=False, repr=False)

    @property
    def weights(self):
        return tuple(jet_weight(v) for v in self.Xi.vars)

    def text(self):
        renamed = MultiPoly._raw(tuple(self.names), self.Xi._t)
        return str(renamed)

    def to_json(self):
        terms = [{"coeff": fmt_coeff(c), "powers": list(e)} for e, c in self.Xi.sorted_terms()]
        out = {"vars": list(self.names), "terms": terms, "text": self.text(), "eliminationLog": self.log}
        if self.provenance:
            out["provenance"] = self.provenance
        return out

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, spec):
        if isinstance(spec, str):
            spec = json.loads(spec)
        names = tuple(spec["vars"])
        internal = tuple(("j" if n.startswith("g") else n[0]) + n[1:] for n in names)
        terms = {tuple(t["powers"]): coerce_coeff(t["coeff"]) for t in spec["terms"]}
        return cls(MultiPoly(terms, internal), names, spec.get("provenance", {}), spec.get("eliminationLog", []))

    def evaluate(self, values) -> complex:
        return evaluate_ode(self, values)

    def relative_residual(self, values) -> float:
        return relative_residual(self, values)


def _jet_values(values, vars=None):
    """Values for ``vars`` from a full jet vector ``(g0, g1, g2, g3)`` (or a positional tuple)."""
    vals = values.as_tuple() if hasattr(values, "as_tuple") else tuple(values)
    if vars is None or len(vals) == len(vars):
        return vals
    return tuple(vals[int(v[1:])] for v in vars)


def evaluate_ode(ode: DerivedODE, values) -> complex:
    """``Xi`` at numeric jets ``(g0, g1, g2, g3)``."""
    vals = _jet_values(values, ode.Xi.vars)
    return complex(ode.Xi.eval_complex(dict(zip(ode.Xi.vars, vals))))


def relative_residual(ode: DerivedODE, values) -> float:
    """``|Xi(jets)|`` divided by the sum of the absolute values of its terms.

    The jets are first rescaled by ``lam^weight`` so that the largest one has
    modulus one (``Xi`` is weighted homogeneous, so this only multiplies the
    value by a power of ``lam``).  The denominator is the coefficient norm
    weighted by the monomials at the sample, so the ratio measures
    cancellation: it is ``O(1)`` at generic jets and at rounding level on
    solutions.
    """
    vals = _jet_values(values, ode.Xi.vars)
    wts = [jet_weight(v) or 1 for v in ode.Xi.vars]
    lam = max(abs(complex(v)) ** (1.0 / w) for v, w in zip(vals, wts))
    if lam == 0:
        lam = 1.0
    scaled = np.array([complex(v) / lam ** w for v, w in zip(vals, wts)])
    num = ode.Xi.numeric()
    value = num(scaled)
    scale = float(np.sum(num.abs_terms(scaled)))
    if scale == 0:
        return 0.0 if value == 0 else math.inf
    return abs(value) / scale


def _split_vars(polys):
    allv = []
    for p in polys:
        for v in p.vars:
            if v not in allv:
                allv.append(v)
    jets = sorted((v for v in allv if is_jet(v)), key=_jet_order)
    cvars = [v for v in allv if not is_jet(v)]
    return tuple(cvars), tuple(jets)


def _curve_var_from_eq(Pc: MultiPoly):
    """``(z, w, P)`` from ``Pc = w^2 - P(z)``."""
    for w in Pc.used_vars():
        cw = Pc.coeffs_in(w)
        if set(cw) == {0, 2} and cw[2].is_constant() and w not in cw[0].used_vars():
            rest = [v for v in cw[0].used_vars()]
            if len(rest) != 1:
                continue
            z = rest[0]
            P = -(cw[0] / cw[2].constant_value())
            return z, w, P.with_vars((z,))
    raise InvalidCurve("curve equation is not of the form w^2 - P(z)")


def _reduce_w(p: MultiPoly, w: str, P: MultiPoly) -> MultiPoly:
    if p.degree(w) <= 1:
        return p
    cw = p.coeffs_in(w)
    rest = tuple(v for v in p.vars if v != w)
    Pr = P.with_vars(rest)
    out = {}
    for e, c in cw.items():
        term = c * Pr ** (e // 2)
        out[e % 2] = out[e % 2] + term if e % 2 in out else term
    return MultiPoly.from_coeffs_in(out, w, rest).with_vars(p.vars)


def _weighted_homogeneous(p: MultiPoly, jets):
    ws = [jet_weight(v) if v in jets else 0 for v in p.vars]
    seen = {sum(e * w for e, w in zip(exps, ws)) for exps in p.terms}
    return len(seen) == 1


def _jet_content(p: MultiPoly, jets):
    """Gcd of the coefficients of ``p`` viewed as a polynomial in the jets only."""
    cvars = tuple(v for v in p.vars if v not in jets)
    g = None
    groups = {}
    idx = [p.vars.index(v) for v in jets]
    cidx = [p.vars.index(v) for v in cvars]
    for exps, c in p.terms.items():
        key = tuple(exps[i] for i in idx)
        groups.setdefault(key, {})[tuple(exps[i] for i in cidx)] = c
    for d in groups.values():
        q = MultiPoly(d, cvars)
        g = q if g is None else gcd(g, q)
        if g.is_constant():
            break
    return g.with_vars(p.vars).primitive()


def _compress(polys, var):
    """Common exponent stride of ``var`` across ``polys`` (1 when none)."""
    d = 0
    for p in polys:
        if var in p.vars:
            for e in p.coeffs_in(var):
                d = math.gcd(d, e)
    return d if d > 1 else 1


def _stretch(p: MultiPoly, var, d, inverse=False):
    if d == 1 or var not in p.vars:
        return p
    cs = p.coeffs_in(var)
    rest = tuple(v for v in p.vars if v != var)
    new = {(e // d if inverse else e * d): c for e, c in cs.items()}
    return MultiPoly.from_coeffs_in(new, var, rest).with_vars(p.vars)


def _remove_factor(R: MultiPoly, cand: MultiPoly, top, label, log, strides=None):
    """Divide ``R`` by every factor it shares with ``cand`` that is free of ``top``."""
    if cand.is_zero() or cand.is_constant():
        return R
    cand = cand.with_vars(R.vars) if set(cand.used_vars()) <= set(R.vars) else None
    if cand is None:
        return R
    while True:
        g = gcd(R, cand)
        if g.is_constant():
            return R
        if top is not None and g.degree(top) > 0:
            g = content_in(g, top)
            if g.is_constant():
                return R
        rest = R.exact_div(g)
        if top is not None and rest.degree(top) <= 0:
            return R
        shown = g.primitive()
        for v, d in (strides or {}).items():
            shown = _stretch(shown, v, d)
        log.append({"step": "extraneous", "source": label, "factor": str(shown)})
        R = rest


def _rehomogenize(p: MultiPoly, base: str, jets):
    wb = jet_weight(base)
    vars = tuple(jets)
    p = p.with_vars(vars)
    ws = [jet_weight(v) for v in vars]
    bi = vars.index(base)
    wts = {}
    for exps in p.terms:
        wts[exps] = sum(e * w for e, w in zip(exps, ws))
    W = max(wts.values())
    out = {}
    for exps, c in p.terms.items():
        diff = W - wts[exps]
        if diff % wb:
            raise EliminationDegeneracy("eliminant is not weighted homogeneous after restoring " + base)
        e = list(exps)
        e[bi] += diff // wb
        out[tuple(e)] = c
    return MultiPoly(out, vars)


def _finish(R: MultiPoly, jets, top_first=True):
    top = max((v for v in R.used_vars() if v in jets), key=jet_weight, default=None)
    if top is not None and top_first:
        return squarefree_part(R, top), top
    return squarefree_part(R), top


def eliminate(P1, P2, Pc=None, degree_cap=DEFAULT_DEGREE_CAP, names=None, provenance=None) -> DerivedODE:
    """Eliminate the curve variables from two relations.

    The ``w`` step is linear: with ``P_i = a_i + b_i w`` (reduced modulo
    ``Pc``), a common zero has ``w = -a_1 / b_1``, so the pair
    ``N = a_1^2 - b_1^2 P`` and ``a_1 b_2 - a_2 b_1`` carries the same
    points without mixing the two sheets.  Then ``z`` goes by a resultant.
    Weighted-homogeneous relations are dehomogenized at the lowest-weight
    jet first and rehomogenized at the end.
    """
    t0 = time.perf_counter()
    log = []
    A = P1.to_bipoly() if isinstance(P1, CurvePoly) else P1
    B = P2.to_bipoly() if isinstance(P2, CurvePoly) else P2
    if A.is_zero() or B.is_zero():
        raise DegenerateIdentity("relations must be nonzero")
    A, B = A._unify(B)
    cvars, jets = _split_vars([A, B])
    if Pc is not None:
        z, w, P = _curve_var_from_eq(Pc)
        A = _reduce_w(A.with_vars(tuple(dict.fromkeys(A.vars + (w,)))), w, P)
        B = _reduce_w(B.with_vars(A.vars), w, P)
    else:
        z, w, P = (cvars[0] if cvars else None), None, None
    vars = A.vars
    names = tuple(names) if names else jets
    prov = dict(provenance or {})

    # relation already free of the curve variables
    for label, p in (("P1", A), ("P2", B)):
        if not any(v in p.used_vars() for v in cvars):
            log.append({"step": "direct", "relation": label})
            Xi, _ = _finish(p.with_vars(jets), jets)
            Xi = Xi.primitive()
            _check_cap(Xi, degree_cap, log)
            return DerivedODE(Xi, names, prov, log)

    # factors in the curve variables alone are spurious
    for label in ("P1", "P2"):
        p = A if label == "P1" else B
        c = _jet_content(p, jets)
        if not c.is_constant():
            log.append({"step": "curve-content", "relation": label, "factor": str(c)})
            p = p.exact_div(c)
            if label == "P1":
                A = p
            else:
                B = p

    base = None
    if _weighted_homogeneous(A, jets) and _weighted_homogeneous(B, jets):
        base = min((v for v in jets if v in A.used_vars() or v in B.used_vars()), key=jet_weight)
        A = A.subs({base: 1}).with_vars(vars)
        B = B.subs({base: 1}).with_vars(vars)
        log.append({"step": "dehomogenize", "var": base})

    suspects = []
    if w is not None and (A.degree(w) > 0 or B.degree(w) > 0):
        if A.degree(w) <= 0:
            A, B = B, A
        ca, cb = A.coeffs_in(w), B.coeffs_in(w)
        rest = tuple(v for v in vars if v != w)
        zero = MultiPoly.const(0, rest)
        a1, b1 = ca.get(0, zero), ca.get(1, zero)
        a2, b2 = cb.get(0, zero), cb.get(1, zero)
        Pr = P.with_vars(rest)
        F1 = a1 * a1 - b1 * b1 * Pr
        F2 = a1 * b2 - a2 * b1
        if z in a1.used_vars() and z in b1.used_vars():
            suspects.append(("Res(a1,b1)", resultant(a1, b1, z)))
        elif not b1.is_constant():
            suspects.append(("b1", b1))
        log.append({"step": "w", "method": "linear", "deg_z": [F1.degree(z), F2.degree(z)]})
    else:
        rest = tuple(v for v in vars if v != w) if w is not None else vars
        F1, F2 = A.with_vars(rest), B.with_vars(rest)

    jet_only = tuple(v for v in rest if v != z)
    F1, F2 = F1.primitive(), F2.primitive()
    strides = {}
    for v in jet_only:
        d = _compress([F1, F2], v)
        if d > 1:
            strides[v] = d
            F1, F2 = _stretch(F1, v, d, inverse=True), _stretch(F2, v, d, inverse=True)
            suspects = [(lab, _stretch(s, v, d, inverse=True)) for lab, s in suspects]

    for attempt in range(2):
        if F1.degree(z) <= 0 or F2.degree(z) <= 0:
            free = F1 if F1.degree(z) <= 0 else F2
            log.append({"step": "direct-after-w"})
            R = free.with_vars(jet_only)
            break
        R = resultant(F1, F2, z)
        if not R.is_zero():
            break
        g = gcd(F1, F2)
        log.append({"step": "common-factor", "factor": str(g)})
        if attempt == 1:
            raise EliminationDegeneracy("resultant vanishes after removing common factors", str(g))
        F1, F2 = F1.exact_div(g), F2.exact_div(g)
    if R.is_zero():
        raise EliminationDegeneracy("resultant vanishes identically", str(gcd(F1, F2)))
    if not any(v in R.used_vars() for v in jet_only):
        raise EliminationDegeneracy("no relation among the jets survives elimination", str(R))
    R = R.with_vars(jet_only)
    log.append({"step": "resultant", "var": z, "terms": len(R), "degree": R.degree()})

    top = max((v for v in R.used_vars()), key=jet_weight, default=None)
    R = R.primitive()
    for label, F in (("lc(F1)", F1), ("lc(F2)", F2)):
        lc = F.coeffs_in(z)[F.degree(z)] if F.degree(z) > 0 else None
        if lc is not None:
            suspects.append((label, lc))
    for label, s in suspects:
        R = _remove_factor(R, s.with_vars(jet_only) if set(s.used_vars()) <= set(jet_only) else s, top, label, log, strides)

    Xi, top = _finish(R, jet_only)
    for v, d in strides.items():
        Xi = _stretch(Xi, v, d)
    Xi = Xi.with_vars(jets)
    if base is not None:
        Xi = _rehomogenize(Xi, base, jets)
    Xi = Xi.primitive()
    log.append({"step": "square-free", "top": top, "terms": len(Xi), "degree": Xi.degree()})
    _check_cap(Xi, degree_cap, log)
    ode = DerivedODE(Xi, names, prov, log)
    ode.seconds = time.perf_counter() - t0
    return ode


def _check_cap(Xi, cap, log):
    if cap is not None and Xi.degree() > cap:
        log.append({"step": "degree-cap", "degree": Xi.degree(), "cap": cap})
        raise DegreeOverflow(f"eliminant has total degree {Xi.degree()} > {cap}")


def pullback(phi: MultiPoly, mapping: dict, out_vars) -> MultiPoly:
    """``phi`` with each variable replaced by a polynomial, by nested Horner."""
    out_vars = tuple(out_vars)
    vals = {v: p.with_vars(out_vars) for v, p in mapping.items()}
    order = [v for v in phi.vars if v in vals]

    def rec(p, i):
        if i == len(order):
            return MultiPoly.const(p.constant_value(), out_vars) if p.is_constant() else None
        v = order[i]
        cs = p.coeffs_in(v)
        top = max(cs)
        acc = rec(cs[top], i + 1)
        for e in range(top - 1, -1, -1):
            acc = acc * vals[v]
            if e in cs:
                acc = acc + rec(cs[e], i + 1)
        return acc

    return rec(phi.with_vars(tuple(order)), 0)


def curvature_to_jets(phi: MultiPoly) -> MultiPoly:
    K, dK, d2K = jet_curvature()
    return pullback(phi, dict(zip(CURV_VARS, (K, dK, d2K))), JET_VARS).primitive()


# -- pipelines -----------------------------------------------------------
def derive_connection_ode(conn, Q: FuchsianQ, u_density=None, degree_cap=DEFAULT_DEGREE_CAP) -> DerivedODE:
    """Autonomous ODE for the jets of a connection on a curve or orbifold."""
    t0 = time.perf_counter()
    prov = {"source": "connection", "connection": conn.to_json(), "Q": str(Q.Q)}
    st = compute_st_identities(conn, Q, u_density)
    if isinstance(st, FlatConnection):
        K = jet_curvature()[0]
        log = [{"step": "flat", "reason": "modified potential vanishes; K = 0"}]
        return DerivedODE(K.primitive(), ("g0", "g1", "g2", "g3"), prov, log, MultiPoly.gen("k0", CURV_VARS))
    prov["S"], prov["T"] = str(st.S), str(st.T)
    rel = build_relations(st, conn.curve)
    ode = eliminate(rel.P1, rel.P2, rel.Pc, degree_cap=degree_cap, names=CURV_VARS, provenance=prov)
    phi = ode.Xi.with_vars(CURV_VARS)
    Xi = curvature_to_jets(phi)
    log = list(ode.log)
    log.append({"step": "pullback", "curvature_degree": phi.degree(), "jet_degree": Xi.degree(), "terms": len(Xi)})
    out = DerivedODE(Xi, ("g0", "g1", "g2", "g3"), prov, log, phi)
    out.seconds = time.perf_counter() - t0
    return out


def derive_psi_ode(Q: FuchsianQ, R=None, degree_cap=DEFAULT_DEGREE_CAP) -> DerivedODE:
    """Autonomous ODE for a 1-differential ``psi`` with ``xdot = R psi``."""
    A1, A2 = psi_relations(Q, R)
    curve = Q.on_curve().curve
    Pc = curve_equation(curve) if curve is not None else None
    prov = {"source": "differential", "Q": str(Q.Q), "R": str(R) if R is not None else "1"}
    return eliminate(A1, A2, Pc, degree_cap=degree_cap, names=PSI_VARS, provenance=prov)
