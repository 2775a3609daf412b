"""Sparse multivariate polynomials over the rationals.

Exponent vectors are packed into a single Python integer, ``BITS`` bits per
variable with the first variable in the most significant field.  Integer
comparison of packed keys is then lexicographic order, and monomial
multiplication is integer addition.  Coefficients are ``int`` whenever they
are integral and :class:`fractions.Fraction` otherwise.
"""
from __future__ import annotations

import ast
import math
from fractions import Fraction
from numbers import Rational as _RationalABC

import numpy as np

from ..errors import InexactDivision, ParseError

BITS = 16
FIELD = (1 << BITS) - 1
MAX_EXP = (1 << (BITS - 1)) - 1


def _guard(n):
    return sum(1 << (BITS * i + BITS - 1) for i in range(n))


def _pack(exps):
    key = 0
    for e in exps:
        if e < 0 or e > MAX_EXP:
            raise ValueError(f"exponent {e} out of range")
        key = (key << BITS) | e
    return key


def _unpack(key, n):
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = key & FIELD
        key >>= BITS
    return tuple(out)


def _tdeg(key):
    s = 0
    while key:
        s += key & FIELD
        key >>= BITS
    return s


def coerce_coeff(c):
    """Return ``c`` as an exact rational (``int`` when integral)."""
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, _RationalABC):
        return coerce_coeff(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return coerce_coeff(Fraction(c.replace("−", "-").strip()))
    if isinstance(c, float):
        return coerce_coeff(Fraction(c))
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


def fmt_coeff(c):
    """Canonical ``p/q`` text for a rational."""
    c = coerce_coeff(c)
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


# -- raw dict kernels (shared with the elimination code) ---------------------

def d_add(a, b):
    r = dict(a)
    for k, c in b.items():
        v = r.get(k, 0) + c
        if v:
            r[k] = v
        else:
            r.pop(k, None)
    return r


def d_sub(a, b):
    r = dict(a)
    for k, c in b.items():
        v = r.get(k, 0) - c
        if v:
            r[k] = v
        else:
            r.pop(k, None)
    return r


def d_scale(a, s):
    if not s:
        return {}
    return {k: c * s for k, c in a.items()}


def d_mul(a, b):
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    if len(a) == 1:
        (ka, ca), = a.items()
        return {ka + kb: ca * cb for kb, cb in b.items()}
    r = {}
    get = r.get
    bi = list(b.items())
    for ka, ca in a.items():
        for kb, cb in bi:
            k = ka + kb
            r[k] = get(k, 0) + ca * cb
    return {k: v for k, v in r.items() if v}


def d_pow(a, e):
    result = {0: 1}
    base = a
    while e:
        if e & 1:
            result = d_mul(result, base)
        e >>= 1
        if e:
            base = d_mul(base, base)
    return result


def _qdiv(c, d):
    if isinstance(c, int) and isinstance(d, int):
        q, r = divmod(c, d)
        if not r:
            return q
    return coerce_coeff(Fraction(c) / d)


def d_divexact(a, b, nvars):
    """Exact quotient ``a / b``; raises :class:`InexactDivision`."""
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    if not a:
        return {}
    guard = _guard(nvars)
    lb = max(b)
    cb = b[lb]
    rest = [(k, c) for k, c in b.items() if k != lb]
    r = dict(a)
    q = {}
    while r:
        lk = max(r)
        d = lk - lb
        if d < 0 or (d & guard):
            raise InexactDivision("polynomial division leaves a remainder")
        qc = _qdiv(r.pop(lk), cb)
        q[d] = qc
        for kb, c in rest:
            k = d + kb
            v = r.get(k, 0) - qc * c
            if v:
                r[k] = v
            else:
                r.pop(k, None)
    return q


class MultiPoly:
    """Immutable sparse polynomial in an ordered tuple of variables.

    >>> x, y = MultiPoly.gens("x", "y")
    >>> str((x + 1) * (x - 1))
    'x^2 - 1'
    """

    __slots__ = ("_vars", "_t", "_hash")

    def __init__(self, terms=None, vars=()):
        vars = tuple(vars)
        n = len(vars)
        d = {}
        for exps, c in (terms or {}).items():
            if isinstance(exps, int):
                exps = (exps,)
            if len(exps) != n:
                raise ValueError("exponent vector length does not match the variables")
            c = coerce_coeff(c)
            if c:
                k = _pack(exps)
                v = d.get(k, 0) + c
                if v:
                    d[k] = v
                else:
                    d.pop(k)
        self._vars = vars
        self._t = d
        self._hash = None

    @classmethod
    def _raw(cls, vars, d):
        obj = object.__new__(cls)
        obj._vars = vars
        obj._t = d
        obj._hash = None
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def gen(cls, name, vars=None):
        vars = tuple(vars) if vars is not None else (name,)
        i = vars.index(name)
        return cls._raw(vars, {1 << (BITS * (len(vars) - 1 - i)): 1})

    @classmethod
    def gens(cls, *names):
        return tuple(cls.gen(n, names) for n in names)

    @classmethod
    def const(cls, c, vars=()):
        c = coerce_coeff(c)
        return cls._raw(tuple(vars), {0: c} if c else {})

    @classmethod
    def from_coeffs(cls, coeffs, var):
        """Univariate polynomial from ascending coefficients."""
        d = {}
        for e, c in enumerate(coeffs):
            c = coerce_coeff(c)
            if c:
                d[e] = c
        return cls._raw((var,), d)

    # -- basic properties --------------------------------------------------
    @property
    def vars(self):
        return self._vars

    @property
    def terms(self):
        n = len(self._vars)
        return {_unpack(k, n): c for k, c in self._t.items()}

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def is_zero(self):
        return not self._t

    def is_constant(self):
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._t.get(0, 0)

    def used_vars(self):
        n = len(self._vars)
        used = set()
        for k in self._t:
            for i, e in enumerate(_unpack(k, n)):
                if e:
                    used.add(i)
        return tuple(v for i, v in enumerate(self._vars) if i in used)

    def _shift(self, var):
        i = self._vars.index(var)
        return BITS * (len(self._vars) - 1 - i)

    def degree(self, var=None):
        """Degree in ``var`` (total degree if omitted); -1 for zero."""
        if not self._t:
            return -1
        if var is None:
            return max(_tdeg(k) for k in self._t)
        if var not in self._vars:
            return 0
        s = self._shift(var)
        return max((k >> s) & FIELD for k in self._t)

    def total_degree(self):
        return self.degree()

    def _grlex_key(self, k):
        return (_tdeg(k), k)

    def leading_key(self):
        return max(self._t, key=self._grlex_key)

    def leading_coeff(self):
        """Coefficient of the graded-lex leading term."""
        if not self._t:
            return 0
        return self._t[self.leading_key()]

    def content(self):
        """Positive rational content: gcd of numerators over lcm of denominators."""
        if not self._t:
            return 0
        num = 0
        den = 1
        for c in self._t.values():
            f = Fraction(c)
            num = math.gcd(num, f.numerator)
            den = den * f.denominator // math.gcd(den, f.denominator)
        return coerce_coeff(Fraction(num, den))

    def primitive(self):
        """Integer-coefficient primitive part with positive leading coefficient."""
        if not self._t:
            return self
        c = self.content()
        if self.leading_coeff() < 0:
            c = -c
        return self._raw(self._vars, {k: _qdiv(v, c) for k, v in self._t.items()})

    def monic(self):
        lc = self.leading_coeff()
        return self._raw(self._vars, {k: _qdiv(v, lc) for k, v in self._t.items()})

    # -- variable bookkeeping ----------------------------------------------
    def with_vars(self, vars):
        """Re-express in a (super)set of variables in the given order."""
        vars = tuple(vars)
        if vars == self._vars:
            return self
        n_old = len(self._vars)
        pos = []
        for i, v in enumerate(self._vars):
            if v in vars:
                pos.append(vars.index(v))
            else:
                pos.append(None)
        n = len(vars)
        d = {}
        for k, c in self._t.items():
            e = _unpack(k, n_old)
            new = [0] * n
            for i, ei in enumerate(e):
                if ei:
                    if pos[i] is None:
                        raise ValueError(f"variable {self._vars[i]} is used but not kept")
                    new[pos[i]] = ei
            d[_pack(new)] = c
        return self._raw(vars, d)

    def drop_unused(self):
        return self.with_vars(self.used_vars())

    def _unify(self, other):
        if isinstance(other, MultiPoly):
            if other._vars == self._vars:
                return self, other
            vars = self._vars + tuple(v for v in other._vars if v not in self._vars)
            return self.with_vars(vars), other.with_vars(vars)
        return self, MultiPoly.const(other, self._vars)

    # -- arithmetic --------------------------------------------------------
    def __neg__(self):
        return self._raw(self._vars, {k: -c for k, c in self._t.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        try:
            a, b = self._unify(other)
        except TypeError:
            return NotImplemented
        return self._raw(a._vars, d_add(a._t, b._t))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            a, b = self._unify(other)
        except TypeError:
            return NotImplemented
        return self._raw(a._vars, d_sub(a._t, b._t))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                c = coerce_coeff(other)
            except TypeError:
                return NotImplemented
            return self._raw(self._vars, d_scale(self._t, c))
        a, b = self._unify(other)
        return self._raw(a._vars, d_mul(a._t, b._t))

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        return self._raw(self._vars, d_pow(self._t, e))

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            return NotImplemented
        c = coerce_coeff(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self._raw(self._vars, {k: _qdiv(v, c) for k, v in self._t.items()})

    def exact_div(self, other):
        """Exact quotient; raises :class:`InexactDivision` on a remainder."""
        if not isinstance(other, MultiPoly):
            return self / other
        a, b = self._unify(other)
        if not b._t:
            raise ZeroDivisionError("division by the zero polynomial")
        return self._raw(a._vars, d_divexact(a._t, b._t, len(a._vars)))

    def divides(self, other):
        try:
            other.exact_div(self)
        except InexactDivision:
            return False
        return True

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            if self._vars == other._vars:
                return self._t == other._t
            a, b = self._unify(other)
            return a._t == b._t
        try:
            c = coerce_coeff(other)
        except TypeError:
            return NotImplemented
        return self._t == ({0: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            p = self.drop_unused()
            self._hash = hash((p._vars, frozenset(p._t.items())))
        return self._hash

    # -- calculus and substitution -----------------------------------------
    def diff(self, var, times=1):
        if var not in self._vars:
            return MultiPoly._raw(self._vars, {})
        p = self
        s = self._shift(var)
        unit = 1 << s
        for _ in range(times):
            d = {}
            for k, c in p._t.items():
                e = (k >> s) & FIELD
                if e:
                    d[k - unit] = c * e
            p = MultiPoly._raw(self._vars, d)
        return p

    def coeffs_in(self, var):
        """``{e: coefficient}`` with coefficients as polynomials in the other variables."""
        rest = tuple(v for v in self._vars if v != var)
        if var not in self._vars:
            return {0: self.with_vars(rest)} if self._t else {}
        i = self._vars.index(var)
        n = len(self._vars)
        groups = {}
        for k, c in self._t.items():
            e = _unpack(k, n)
            rk = _pack(e[:i] + e[i + 1:])
            groups.setdefault(e[i], {})[rk] = c
        return {e: MultiPoly._raw(rest, d) for e, d in groups.items()}

    @classmethod
    def from_coeffs_in(cls, coeffs, var, rest_vars):
        """Inverse of :meth:`coeffs_in`: ``sum coeffs[e] * var**e``."""
        vars = tuple(rest_vars) + (var,)
        d = {}
        for e, c in coeffs.items():
            c = c.with_vars(rest_vars) if isinstance(c, MultiPoly) else MultiPoly.const(c, rest_vars)
            for k, v in c._t.items():
                d[(k << BITS) | e] = v
        return cls._raw(vars, d)

    def subs(self, mapping):
        """Substitute variables by rationals or polynomials."""
        mapping = {v: val for v, val in mapping.items() if v in self._vars}
        if not mapping:
            return self
        keep = tuple(v for v in self._vars if v not in mapping)
        out_vars = keep
        for val in mapping.values():
            if isinstance(val, MultiPoly):
                out_vars = out_vars + tuple(v for v in val.vars if v not in out_vars)
        n = len(self._vars)
        idx = [self._vars.index(v) for v in mapping]
        keep_idx = [self._vars.index(v) for v in keep]
        vals = []
        for v in mapping:
            val = mapping[v]
            if isinstance(val, MultiPoly):
                vals.append(val.with_vars(out_vars)._t)
            else:
                c = coerce_coeff(val)
                vals.append({0: c} if c else {})
        cache = [dict() for _ in idx]

        def power(j, e):
            c = cache[j]
            if e not in c:
                if e == 0:
                    c[e] = {0: 1}
                elif e - 1 in c:
                    c[e] = d_mul(c[e - 1], vals[j])
                else:
                    c[e] = d_pow(vals[j], e)
            return c[e]

        keep_shift = [BITS * (len(out_vars) - 1 - out_vars.index(v)) for v in keep]
        groups = {}
        for k, c in self._t.items():
            e = _unpack(k, n)
            sub_e = tuple(e[i] for i in idx)
            mono = 0
            for s, i in zip(keep_shift, keep_idx):
                mono += e[i] << s
            groups.setdefault(sub_e, {})
            g = groups[sub_e]
            g[mono] = g.get(mono, 0) + c
        result = {}
        for sub_e, poly in groups.items():
            term = poly
            for j, ej in enumerate(sub_e):
                if ej:
                    term = d_mul(term, power(j, ej))
            result = d_add(result, term)
        return MultiPoly._raw(out_vars, result)

    def evaluate(self, point):
        """Exact or floating evaluation at ``{var: value}`` covering all used variables."""
        return _horner(self._t, len(self._vars), [point.get(v, 0) for v in self._vars], 0)

    def __call__(self, *args, **kwargs):
        point = dict(zip(self._vars, args))
        point.update(kwargs)
        return self.evaluate(point)

    def eval_complex(self, point):
        """Horner evaluation in complex doubles."""
        vals = [complex(point.get(v, 0)) for v in self._vars]
        return complex(_horner(self._t, len(self._vars), vals, 0, numeric=True))

    def numeric(self):
        """Vectorised complex evaluator ``f(values)`` with values ordered as ``vars``."""
        return NumericPoly(self)

    # -- text --------------------------------------------------------------
    def sorted_terms(self):
        """Terms in descending graded-lexicographic order."""
        n = len(self._vars)
        keys = sorted(self._t, key=self._grlex_key, reverse=True)
        return [(_unpack(k, n), self._t[k]) for k in keys]

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self._vars, exps) if e
            )
            neg = c < 0
            a = -c if neg else c
            if mono:
                body = mono if a == 1 else f"{fmt_coeff(a)}*{mono}"
            else:
                body = fmt_coeff(a)
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"MultiPoly({str(self)!r}, vars={self._vars})"


def _horner(d, n, vals, level, numeric=False):
    """Recursive Horner evaluation of packed dict ``d`` from variable ``level`` on."""
    if not d:
        return 0
    if level == n:
        c = d.get(0, 0)
        return complex(c) if numeric else c
    shift = BITS * (n - 1 - level)
    groups = {}
    for k, c in d.items():
        e = (k >> shift) & FIELD
        groups.setdefault(e, {})[k & ((1 << shift) - 1)] = c
    x = vals[level]
    top = max(groups)
    acc = 0
    for e in range(top, -1, -1):
        acc = acc * x
        g = groups.get(e)
        if g:
            acc = acc + _horner(g, n, vals, level + 1, numeric)
    return acc


class NumericPoly:
    """Complex-double evaluator for a :class:`MultiPoly` (terms in arrays)."""

    def __init__(self, poly):
        self.vars = poly.vars
        items = poly.sorted_terms()
        n = len(self.vars)
        self.exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), n)
        self.coeffs = np.array([float(c) for _, c in items], dtype=float)
        self.maxdeg = self.exps.max(axis=0) if len(items) else np.zeros(n, dtype=np.int64)

    def monomials(self, values):
        vals = np.asarray(values, dtype=complex)
        out = np.ones(len(self.coeffs), dtype=complex)
        for i in range(len(self.vars)):
            if self.maxdeg[i]:
                pw = vals[i] ** np.arange(self.maxdeg[i] + 1)
                out = out * pw[self.exps[:, i]]
        return out

    def __call__(self, values):
        return complex(np.dot(self.coeffs, self.monomials(values)))

    def abs_terms(self, values):
        return np.abs(self.coeffs * self.monomials(values))


# -- parsing -----------------------------------------------------------------

def _clean(text):
    return text.replace("−", "-").replace("^", "**").replace("·", "*")


def parse_expr(text, vars=None):
    """Parse rational-function text into ``(num, den)`` polynomials.

    Variables are ordered as ``vars`` when given, otherwise by first
    appearance.  Only ``+ - * / **``, integers, decimals and names occur.
    """
    try:
        tree = ast.parse(_clean(text).strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    names = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and node.id not in names:
            names.append(node.id)
    if vars is None:
        # first appearance in the source text
        names.sort(key=lambda s: _first_pos(text, s))
        all_vars = tuple(names)
    else:
        all_vars = tuple(vars) + tuple(v for v in names if v not in vars)

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            val = coerce_coeff(Fraction(str(node.value)))
            return (MultiPoly.const(val, all_vars), MultiPoly.const(1, all_vars))
        if isinstance(node, ast.Name):
            return (MultiPoly.gen(node.id, all_vars), MultiPoly.const(1, all_vars))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            n, d = build(node.operand)
            return (-n, d) if isinstance(node.op, ast.USub) else (n, d)
        if isinstance(node, ast.BinOp):
            ln, ld = build(node.left)
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)) and not (
                    isinstance(node.right, ast.UnaryOp) and isinstance(node.right.op, ast.USub)
                    and isinstance(node.right.operand, ast.Constant) and isinstance(node.right.operand.value, int)
                ):
                    raise ParseError(f"exponent must be an integer literal in {text!r}")
                e = node.right.value if isinstance(node.right, ast.Constant) else -node.right.operand.value
                if e >= 0:
                    return (ln ** e, ld ** e)
                if ln.is_zero():
                    raise ParseError(f"zero raised to a negative power in {text!r}")
                return (ld ** (-e), ln ** (-e))
            rn, rd = build(node.right)
            if isinstance(node.op, ast.Add):
                return (ln * rd + rn * ld, ld * rd)
            if isinstance(node.op, ast.Sub):
                return (ln * rd - rn * ld, ld * rd)
            if isinstance(node.op, ast.Mult):
                return (ln * rn, ld * rd)
            if isinstance(node.op, ast.Div):
                if rn.is_zero():
                    raise ParseError(f"division by zero in {text!r}")
                return (ln * rd, ld * rn)
        raise ParseError(f"unsupported syntax in {text!r}")

    return build(tree)


def _first_pos(text, name):
    import re

    m = re.search(r"(?<![A-Za-z0-9_])" + re.escape(name) + r"(?![A-Za-z0-9_])", text)
    return m.start() if m else len(text)


def parse_poly(text, vars=None):
    """Parse polynomial text such as ``"-3/8*z^4 + 3*z"``."""
    num, den = parse_expr(text, vars)
    if not den.is_constant():
        raise ParseError(f"{text!r} is not a polynomial")
    return num / den.constant_value()
