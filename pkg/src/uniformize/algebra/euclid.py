"""GCD, resultant and square-free machinery for :class:`MultiPoly`.

Polynomials are handled as packed dictionaries (see :mod:`.poly`).  The
gcd uses the heuristic evaluation/interpolation scheme for integer
polynomials with a subresultant-PRS fallback; resultants use the
subresultant PRS over ``Z[other variables]``.
"""
from __future__ import annotations

import math
from fractions import Fraction

from ..errors import DegenerateResultant, InexactDivision, UndefinedGcd
from .poly import (
    BITS,
    FIELD,
    MultiPoly,
    coerce_coeff,
    d_divexact,
    d_mul,
    d_pow,
    d_scale,
    d_sub,
)


# -- integer content helpers --------------------------------------------------

def _int_primitive(d):
    """Scale a rational dict to integer coefficients with content 1 (sign kept)."""
    if not d:
        return {}, 1
    den = 1
    for c in d.values():
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
    num = 0
    for c in d.values():
        num = math.gcd(num, int(c * den))
    scale = Fraction(den, num)
    return {k: int(c * scale) for k, c in d.items()}, scale


def _icontent(d):
    g = 0
    for c in d.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


# -- univariate-in-main-variable views ----------------------------------------

def _split(d, n):
    """Split packed dict over ``n`` vars by the first variable.

    Returns a list ``coeffs`` with ``coeffs[e]`` a packed dict over the
    remaining ``n - 1`` variables.
    """
    shift = BITS * (n - 1)
    mask = (1 << shift) - 1
    out = {}
    for k, c in d.items():
        e = k >> shift
        out.setdefault(e, {})[k & mask] = c
    if not out:
        return []
    lst = [{} for _ in range(max(out) + 1)]
    for e, v in out.items():
        lst[e] = v
    return lst


def _join(lst, n):
    shift = BITS * (n - 1)
    d = {}
    for e, v in enumerate(lst):
        for k, c in v.items():
            d[(e << shift) | k] = c
    return d


def _trim(lst):
    while lst and not lst[-1]:
        lst.pop()
    return lst


def _eval_first(d, n, x):
    """Substitute the integer ``x`` for the first variable."""
    shift = BITS * (n - 1)
    mask = (1 << shift) - 1
    out = {}
    pw = {}
    for k, c in d.items():
        e = k >> shift
        p = pw.get(e)
        if p is None:
            p = pw[e] = x ** e
        r = k & mask
        v = out.get(r, 0) + c * p
        if v:
            out[r] = v
        else:
            out.pop(r, None)
    return out


# -- heuristic gcd ----------------------------------------------------------

def _maxnorm(d):
    return max(abs(c) for c in d.values())


def _heu(f, g, n, depth=0):
    """Heuristic gcd of two nonzero integer dicts over ``n`` variables, or None."""
    if n == 0:
        return {0: math.gcd(f[0], g[0])}
    if len(f) == 1 and len(g) == 1:
        return _mono_gcd(f, g, n)
    cf, cg = _icontent(f), _icontent(g)
    c = math.gcd(cf, cg)
    if cf > 1:
        f = {k: v // cf for k, v in f.items()}
    if cg > 1:
        g = {k: v // cg for k, v in g.items()}
    B = 2 * min(_maxnorm(f), _maxnorm(g)) + 29
    x = max(min(B, 99 * math.isqrt(B)), 2 * min(_maxnorm(f) // abs(_lc_first(f, n)), _maxnorm(g) // abs(_lc_first(g, n))) + 2)
    shift = BITS * (n - 1)
    for _ in range(6):
        ff = _eval_first(f, n, x)
        gg = _eval_first(g, n, x)
        if ff and gg:
            h = _heu(ff, gg, n - 1, depth + 1)
            if h is not None:
                cand = _interp(h, x, shift)
                if cand:
                    cont = _icontent(cand)
                    cand = {k: c // cont for k, c in cand.items()}
                    if _divides_int(cand, f, n) and _divides_int(cand, g, n):
                        return {k: v * c for k, v in cand.items()}
        x = 73794 * x * math.isqrt(math.isqrt(x)) // 27011
    return None


def _lc_first(d, n):
    shift = BITS * (n - 1)
    top = max(k >> shift for k in d)
    sub = {k: c for k, c in d.items() if k >> shift == top}
    return sub[max(sub)]


def _interp(h, x, shift):
    out = {}
    e = 0
    half = x // 2
    while h:
        digit = {}
        for k, c in h.items():
            r = c % x
            if r > half:
                r -= x
            if r:
                digit[k] = r
        for k, c in digit.items():
            out[(e << shift) | k] = c
        h = {k: (c - digit.get(k, 0)) // x for k, c in h.items()}
        h = {k: c for k, c in h.items() if c}
        e += 1
        if e > FIELD // 2:
            return None
    return out


def _divides_int(h, f, n):
    try:
        q = d_divexact(f, h, n)
    except InexactDivision:
        return False
    return all(isinstance(c, int) for c in q.values())


def _mono_gcd(f, g, n):
    (kf, cf), = f.items()
    (kg, cg), = g.items()
    k = 0
    for i in range(n):
        s = BITS * i
        k |= min((kf >> s) & FIELD, (kg >> s) & FIELD) << s
    return {k: math.gcd(cf, cg)}


# -- subresultant machinery ------------------------------------------------

def _deg(lst):
    return len(lst) - 1


def _prem(A, B, m):
    """Pseudo-remainder lc(B)^(dA-dB+1) * A mod B, coefficients over ``m`` vars."""
    A = [dict(c) for c in A]
    dB = _deg(B)
    lcB = B[-1]
    delta = _deg(A) - dB + 1
    steps = 0
    while A and _deg(A) >= dB:
        dA = _deg(A)
        lcA = A[-1]
        shift = dA - dB
        new = [d_mul(c, lcB) for c in A[:-1]]
        for i in range(dB):
            if B[i]:
                new[i + shift] = d_sub(new[i + shift], d_mul(lcA, B[i]))
        A = _trim(new)
        steps += 1
    if steps < delta and A:
        f = d_pow(lcB, delta - steps)
        A = [d_mul(c, f) for c in A]
    return A


def _lst_icontent(lst):
    g = 0
    for c in lst:
        for v in c.values():
            g = math.gcd(g, v)
            if g == 1:
                return 1
    return g


def _resultant_lists(A, B, m):
    """Subresultant resultant of univariate lists over Z[m vars]."""
    if not A or not B:
        return {}
    s = 1
    if _deg(A) < _deg(B):
        A, B = B, A
        if _deg(A) % 2 and _deg(B) % 2:
            s = -1
    if _deg(B) == 0:
        return d_scale(d_pow(B[0], _deg(A)), s)
    ca = _lst_icontent(A)
    cb = _lst_icontent(B)
    t = ca ** _deg(B) * cb ** _deg(A)
    A = [{k: v // ca for k, v in c.items()} for c in A]
    B = [{k: v // cb for k, v in c.items()} for c in B]
    g = {0: 1}
    h = {0: 1}
    while True:
        dA, dB = _deg(A), _deg(B)
        delta = dA - dB
        if dA % 2 and dB % 2:
            s = -s
        R = _prem(A, B, m)
        if not R:
            return {}
        A = B
        div = d_mul(g, d_pow(h, delta))
        B = [d_divexact(c, div, m) for c in R]
        g = A[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = d_divexact(d_pow(g, delta), d_pow(h, delta - 1), m)
        if _deg(B) == 0:
            dA = _deg(A)
            if dA == 0:
                hh = {0: 1}
            elif dA == 1:
                hh = B[0]
            else:
                hh = d_divexact(d_pow(B[0], dA), d_pow(h, dA - 1), m)
            return d_scale(hh, s * t)


def _prs_gcd(f, g, n):
    """Recursive primitive-PRS gcd of nonzero integer dicts over ``n`` variables."""
    if n == 0:
        return {0: math.gcd(f.get(0, 0), g.get(0, 0))}
    A = _split(f, n)
    B = _split(g, n)
    m = n - 1
    ca = _content_list(A, m)
    cb = _content_list(B, m)
    c = _gcd_int(ca, cb, m)
    A = [d_divexact(x, ca, m) if x else {} for x in A]
    B = [d_divexact(x, cb, m) if x else {} for x in B]
    if _deg(A) < _deg(B):
        A, B = B, A
    while B and _deg(B) > 0:
        R = _prem(A, B, m)
        A = B
        if not R:
            B = []
            break
        cr = _content_list(R, m)
        B = [d_divexact(x, cr, m) if x else {} for x in R]
    if B:
        # nonzero constant remainder: the primitive parts are coprime
        return c
    cr = _content_list(A, m)
    res = _join([d_divexact(x, cr, m) if x else {} for x in A], n)
    return d_mul(res, c)


def _content_list(lst, m):
    """Gcd (integer content included) of the nonzero entries."""
    g = None
    for c in lst:
        if c:
            g = _sign_norm(c) if g is None else _gcd_int(g, c, m)
            if len(g) == 1 and g.get(0) == 1:
                break
    return g


def _sign_norm(d):
    if d and d[max(d)] < 0:
        return {k: -v for k, v in d.items()}
    return d


def _gcd_int(f, g, n):
    """Gcd of integer dicts, integer content included, positive lex-leading coefficient."""
    if not f:
        return _sign_norm(g)
    if not g:
        return _sign_norm(f)
    if n == 0:
        return {0: math.gcd(f.get(0, 0), g.get(0, 0))}
    h = _heu(f, g, n)
    if h is None:
        h = _prs_gcd(f, g, n)
    return _sign_norm(h)


# -- public API --------------------------------------------------------------

def gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Greatest common divisor, integer-primitive with positive leading coefficient."""
    if not isinstance(b, MultiPoly):
        b = MultiPoly.const(b, a.vars)
    if not isinstance(a, MultiPoly):
        a = MultiPoly.const(a, b.vars)
    a, b = a._unify(b)
    if a.is_zero() and b.is_zero():
        raise UndefinedGcd("gcd(0, 0) is undefined")
    if a.is_zero():
        return b.primitive()
    if b.is_zero():
        return a.primitive()
    n = len(a.vars)
    fa, _ = _int_primitive(a._t)
    fb, _ = _int_primitive(b._t)
    h = _gcd_int(fa, fb, n)
    return MultiPoly._raw(a.vars, h).primitive()


def lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return (a * b).exact_div(gcd(a, b)).primitive()


def resultant(a: MultiPoly, b: MultiPoly, var: str) -> MultiPoly:
    """Resultant of ``a`` and ``b`` with respect to ``var``.

    The result lives in the remaining variables (in the order of the unified
    variable tuple with ``var`` removed).
    """
    a, b = a._unify(b)
    vars = a.vars
    if var not in vars:
        raise DegenerateResultant(f"variable {var} does not occur")
    if a.degree(var) <= 0 and b.degree(var) <= 0:
        raise DegenerateResultant("both polynomials are constant in the eliminated variable")
    rest = tuple(v for v in vars if v != var)
    order = (var,) + rest
    pa = a.with_vars(order)
    pb = b.with_vars(order)
    fa, sa = _int_primitive(pa._t)
    fb, sb = _int_primitive(pb._t)
    n = len(order)
    A = _trim(_split(fa, n))
    B = _trim(_split(fb, n))
    res = _resultant_lists(A, B, n - 1)
    # undo the integer scalings: Res(sa^-1 A', ...) scaling
    da, db = len(A) - 1, len(B) - 1
    scale = Fraction(1) / (sa ** db * sb ** da) if (A and B) else Fraction(1)
    scale = coerce_coeff(scale)
    return MultiPoly._raw(rest, {k: coerce_coeff(v * scale) for k, v in res.items()})


def discriminant_like(a: MultiPoly, var: str) -> MultiPoly:
    """Res(a, da/dvar) (the discriminant up to a leading-coefficient factor)."""
    return resultant(a, a.diff(var), var)


def content_in(a: MultiPoly, var: str) -> MultiPoly:
    """Gcd of the coefficients of ``a`` viewed as a polynomial in ``var``."""
    cs = list(a.coeffs_in(var).values())
    g = cs[0].with_vars(a.vars)
    for c in cs[1:]:
        if g.is_constant():
            break
        g = gcd(g, c.with_vars(a.vars))
    return g.primitive()


def squarefree_part(a: MultiPoly, var: str | None = None) -> MultiPoly:
    """Product of the distinct irreducible factors of ``a``.

    With ``var`` given, only factors involving ``var`` are kept (the content
    with respect to ``var`` is removed).  Without it, every variable is
    treated.  The result is integer-primitive with positive leading
    coefficient.
    """
    if a.is_zero():
        raise ValueError("square-free part of zero")
    a = a.primitive()
    if var is None:
        out = MultiPoly.const(1, a.vars)
        rest = a
        for v in a.used_vars():
            if rest.degree(v) <= 0:
                continue
            cont = content_in(rest, v)
            prim = rest.exact_div(cont)
            out = out * _sqf_main(prim, v)
            rest = cont
        return out.primitive()
    if a.degree(var) <= 0:
        return MultiPoly.const(1, a.vars)
    cont = content_in(a, var)
    return _sqf_main(a.exact_div(cont), var).primitive()


def _sqf_main(p, var):
    if p.degree(var) <= 0:
        return MultiPoly.const(1, p.vars)
    g = gcd(p, p.diff(var))
    return p.exact_div(g).primitive()


def gcd_free_basis(polys):
    """Pairwise coprime non-constant polynomials whose products generate ``polys``.

    Every input factors (up to a constant) as a product of powers of basis
    elements.
    """
    basis = []
    for p in polys:
        if p.is_zero() or p.is_constant():
            continue
        todo = [p.primitive()]
        while todo:
            q = todo.pop()
            if q.is_constant():
                continue
            placed = False
            for i, b in enumerate(basis):
                g = gcd(q, b)
                if g.is_constant():
                    continue
                basis.pop(i)
                for piece in (g, b.exact_div(g), q.exact_div(g)):
                    if not piece.is_constant():
                        todo.append(piece.primitive())
                placed = True
                break
            if not placed:
                basis.append(q)
    return basis


def multiplicity(h: MultiPoly, f: MultiPoly) -> int:
    """Largest ``m`` with ``h**m`` dividing ``f`` (``h`` non-constant, ``f`` nonzero)."""
    m = 0
    while True:
        try:
            f = f.exact_div(h)
        except InexactDivision:
            return m
        m += 1


def rational_roots(p: MultiPoly):
    """Rational roots of a univariate polynomial with multiplicities."""
    (var,) = p.used_vars() or (p.vars[0],)
    q = p.drop_unused() if p.used_vars() else p
    coeffs = q.coeffs_in(var)
    ints, _ = _int_primitive({e: c.constant_value() for e, c in coeffs.items()})
    roots = {}
    if not ints:
        raise ValueError("zero polynomial")
    low = min(ints)
    if low > 0:
        roots[Fraction(0)] = low
    a0 = ints[low]
    an = ints[max(ints)]
    cand = set()
    for r in _divisors(abs(a0)):
        for s in _divisors(abs(an)):
            cand.add(Fraction(r, s))
            cand.add(Fraction(-r, s))
    x = MultiPoly.gen(var, q.vars)
    for c in sorted(cand):
        lin = (x * c.denominator - c.numerator)
        m = multiplicity(lin, q)
        if m:
            roots[c] = m
    return roots


def _divisors(n):
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return out
