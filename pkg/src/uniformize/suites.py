"""Named verification suites.

Each suite returns a report dictionary with ``suite``, ``passed``,
``tolerance`` and a list of ``rows``.  Reports contain no timings so that a
fixed seed gives identical output.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

from .algebra import LaurentSeries, MultiPoly, RatFunc
from .connection import build_genus0_connection, build_hyperelliptic_connection, involution_parity
from .curve import CurveFunction, HyperellipticCurve, residue_sum_of_dlog
from .errors import ExcessiveAutomorphismRisk
from .fuchsian import (
    MobiusMap,
    OrbifoldSpec,
    build_orbifold_q,
    schwarzian_of_series,
    schwarzian_rational,
    whittaker_w,
    whittaker_z,
)
from .jets import (
    DEFAULT_DEGREE_CAP,
    CurvePoly,
    PSI_VARS,
    curvature_by_iteration,
    derive_connection_ode,
    derive_psi_ode,
    jet_curvature,
    psi_relations,
)
from .numerics import (
    PathSpec,
    PsiState,
    chazy_residual,
    circle_loop,
    connection_form,
    elliptic_order_check,
    gauto_residual,
    integrate_psi,
    jet_forms,
    lambda_connection_jets,
    lambda_differential_jets,
    lambda_periodicity_residual,
    monodromy,
    sample_taus,
    scaled_jets,
    singular_points,
    tau_and_jets,
)
from .numerics.qseries import CHAZY_CONSTANT

SUITES = ("chazy", "gauto", "monodromy", "lambda-ode", "psi-ode", "whittaker-g1", "whittaker-g2",
          "residues-g123", "parity", "identities")


def _report(name, tol, rows, **extra):
    passed = all(r.get("ok", True) for r in rows)
    out = {"suite": name, "passed": passed, "tolerance": tol, "rows": rows}
    out.update(extra)
    return out


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


# -- q-series suites -----------------------------------------------------
def suite_chazy(tol=1e-8, terms=50, **_):
    """``pi eta''' = 12 i (2 eta eta'' - 3 eta'^2)`` for ``eta = (pi^2/12) E2``."""
    rows = []
    for tau in (1j, 2j, 0.3 + 1.2j):
        r = chazy_residual(tau, CHAZY_CONSTANT, terms)
        rows.append({"tau": _c(tau), "residual": r, "ok": r < tol})
    alt = max(chazy_residual(t, math.pi ** 2 / 36, terms) for t in (1j, 2j, 0.3 + 1.2j))
    return _report("chazy", tol, rows, constant="pi^2/12", residual_with_pi2_over_36=alt)


def suite_gauto(tol=1e-8, terms=50, samples=8, seed=0, **_):
    """Quasi-modular law of ``(pi i/3) E2`` under ``-1/tau`` and ``tau + 1``; lambda period 2."""
    rng = np.random.default_rng(seed)
    # points with Im tau and Im(-1/tau) both inside the oracle domain
    taus = []
    while len(taus) < samples:
        t = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 1.25))
        if (-1 / t).imag >= 0.5:
            taus.append(t)
    rows = []
    for label, m in (("S: -1/tau", MobiusMap(0, -1, 1, 0)), ("T: tau+1", MobiusMap(1, 1, 0, 1))):
        r = gauto_residual(m, taus, terms)
        rows.append({"map": label, "residual": r, "ok": r < tol})
    r = lambda_periodicity_residual(taus, terms)
    rows.append({"map": "lambda(tau+2) - lambda(tau)", "residual": r, "ok": r < tol})
    return _report("gauto", tol, rows)


def _lambda_potential():
    return build_orbifold_q(OrbifoldSpec(["0", "1", "inf"], ["inf", "inf", "inf"]))


def _orbit_rows(ode, jet_fn, taus, tol, seed):
    rng = np.random.default_rng(seed + 1)
    rows = []
    for tau in taus:
        r0 = ode.relative_residual(jet_fn(tau, None))
        r2 = ode.relative_residual(jet_fn(tau, MobiusMap(1, 2, 0, 1)))
        sigma = float(rng.uniform(0.7, 1.4))
        r3 = ode.relative_residual(scaled_jets(jet_fn(tau * sigma, None), sigma))
        worst = max(r0, r2, r3)
        rows.append({"tau": _c(tau), "residual": r0, "shift2": r2, "scaling": r3, "sigma": sigma,
                     "ok": worst < tol})
    return rows


def _generic_rows(ode, seed, n=5):
    """Residuals at random jets; these must stay large for the test to mean anything."""
    rng = np.random.default_rng(seed + 7)
    vals = []
    for _ in range(n):
        j = rng.normal(size=4) + 1j * rng.normal(size=4)
        vals.append(ode.relative_residual(j))
    return min(vals)


def suite_lambda_ode(tol=1e-6, samples=20, terms=50, seed=0, degree_cap=DEFAULT_DEGREE_CAP, **_):
    """Xi for ``Gamma = d/dtau ln lambda'`` via the S/T identities, checked on q-series jets."""
    Q = _lambda_potential()
    ode = derive_connection_ode(build_genus0_connection(Q), Q, degree_cap=degree_cap)
    taus = sample_taus(samples, seed)
    rows = _orbit_rows(ode, lambda t, m: lambda_connection_jets(t, m, terms), taus, tol, seed)
    return _report("lambda-ode", tol, rows, ode=ode.to_json(), generic_min_residual=_generic_rows(ode, seed))


def suite_psi_ode(tol=1e-6, samples=20, terms=50, seed=0, degree_cap=DEFAULT_DEGREE_CAP, **_):
    """Xi for ``psi = lambda'`` from the differential relations."""
    Q = _lambda_potential()
    ode = derive_psi_ode(Q, degree_cap=degree_cap)
    taus = sample_taus(samples, seed)
    rows = _orbit_rows(ode, lambda t, m: lambda_differential_jets(t, m, terms), taus, tol, seed)
    return _report("psi-ode", tol, rows, ode=ode.to_json(), generic_min_residual=_generic_rows(ode, seed))


# -- integration suites -------------------------------------------------------
def _loop_rows(Q, centers, p, tol, radius):
    rows = []
    for c in centers:
        M = monodromy(Q, circle_loop(c, radius))
        ok, res = elliptic_order_check(M, p, tol)
        rows.append({"potential": Q.provenance, "center": _c(c), "trace": _c(np.trace(M)),
                     "det": _c(np.linalg.det(M)), "order": p, "residual": res,
                     "ok": bool(ok) and abs(np.linalg.det(M) - 1) < 1e-8})
    return rows


def suite_monodromy(tol=1e-6, **_):
    """Elliptic orders: branch points of the Whittaker ``z`` equations (2) and ``w = 1`` (3)."""
    rows = []
    for g in (1, 2):
        Q = whittaker_z(g)
        rows += _loop_rows(Q, singular_points(Q), 2, tol, 0.25)
    rows += _loop_rows(whittaker_w(1), [1.0], 3, tol, 0.25)
    return _report("monodromy", tol, rows)


def regular_path(n, seed=0, radius=0.7):
    """Polygon of ``n + 1`` vertices inside ``|z| < radius`` (starting at a fixed point)."""
    rng = np.random.default_rng(seed)
    verts = [complex(0.3, 0.2)]
    while len(verts) < n + 1:
        r = radius * math.sqrt(rng.uniform(0.05, 1.0))
        a = rng.uniform(0, 2 * math.pi)
        v = r * complex(math.cos(a), math.sin(a))
        if abs(v - verts[-1]) > 0.05:
            verts.append(v)
    return PathSpec(verts)


def _connection_rows(g, cs, tol, samples, seed, degree_cap):
    Q = whittaker_z(g)
    conn = build_hyperelliptic_connection(Q.curve, cs)
    ode = derive_connection_ode(conn, Q, degree_cap=degree_cap)
    forms = jet_forms(connection_form(Q, conn.dlog_density()))
    states = []
    path = regular_path(samples, seed)
    integrate_psi(Q, path, PsiState.standard(path.vertices[0]), samples=states)
    rows = []
    for s in states[1:samples + 1]:
        jet = tau_and_jets(s, Q, forms)
        r = ode.relative_residual(jet)
        rows.append({"x": _c(s.x), "tau": _c(jet.tau), "residual": r, "ok": r < tol})
    return ode, rows


def suite_whittaker_g1(tol=1e-6, samples=20, seed=0, degree_cap=DEFAULT_DEGREE_CAP, **_):
    """Genus one: order-2 monodromy, order-3 monodromy of the ``w`` equation, and the connection ODE."""
    rows = _loop_rows(whittaker_z(1), singular_points(whittaker_z(1)), 2, tol, 0.25)
    rows += _loop_rows(whittaker_w(1), [1.0], 3, tol, 0.25)
    ode, crow = _connection_rows(1, [1], tol, samples, seed, degree_cap)
    return _report("whittaker-g1", tol, rows + crow, ode=ode.to_json())


def suite_whittaker_g2(tol=1e-6, samples=20, seed=0, degree_cap=DEFAULT_DEGREE_CAP, **_):
    """Genus two connection with ``cs = [1, 0]`` on ``w^2 = z^5 + 1``: Xi on integrated jets."""
    ode, rows = _connection_rows(2, [1, 0], tol, samples, seed, degree_cap)
    return _report("whittaker-g2", tol, rows, ode=ode.to_json(),
                   generic_min_residual=_generic_rows(ode, seed))


# -- exact suites ------------------------------------------------------------
def random_differential(curve: HyperellipticCurve, rng: random.Random):
    """``a(z) + b(z) w`` with small random rational coefficients, nonzero."""
    z = curve.z
    while True:
        parts = []
        for _ in range(2):
            num = MultiPoly.from_coeffs([rng.randint(-3, 3) for _ in range(rng.randint(1, 3))], z)
            den = MultiPoly.from_coeffs([rng.randint(-3, 3) for _ in range(rng.randint(1, 3))], z)
            if den.is_zero():
                den = MultiPoly.const(1, (z,))
            parts.append(RatFunc(num, den))
        f = CurveFunction(parts[0], parts[1], curve)
        if not f.is_zero():
            return f


def suite_residues(samples=5, seed=0, **_):
    """The dlog residue sum of a differential is ``2g - 2`` for ``g = 1, 2, 3``."""
    rng = random.Random(seed)
    rows = []
    for g in (1, 2, 3):
        curve = HyperellipticCurve([1] + [0] * (2 * g) + [1])
        for _ in range(samples):
            f = random_differential(curve, rng)
            total = residue_sum_of_dlog(f, 1)
            rows.append({"genus": g, "differential": str(f), "sum": total, "ok": total == 2 * g - 2})
    return _report("residues-g123", 0, rows)


def suite_parity(samples=10, seed=0, **_):
    """Opposite involution parities for random connections; equal parity flagged when all c_j vanish."""
    rng = random.Random(seed)
    rows = []
    for _ in range(samples):
        g = rng.randint(1, 3)
        P = [rng.randint(-3, 3) for _ in range(2 * g + 1)] + [1]
        try:
            curve = HyperellipticCurve(P)
        except Exception:
            curve = HyperellipticCurve([1] + [0] * (2 * g) + [1])
        cs = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(g)]
        if all(c == 0 for c in cs):
            cs[0] = Fraction(1)
        rep = involution_parity(build_hyperelliptic_connection(curve, cs))
        rows.append({"genus": g, "cs": [str(c) for c in cs], "dlog": rep.dlog, "added": rep.added,
                     "ok": rep.dlog != rep.added and not rep.excessive})
    curve = HyperellipticCurve([1, 0, 0, 0, 0, 1])
    try:
        build_hyperelliptic_connection(curve, [0, 0])
        refused = False
    except ExcessiveAutomorphismRisk:
        refused = True
    rep = involution_parity(build_hyperelliptic_connection(curve, [0, 0], variant="gu"))
    rows.append({"genus": 2, "cs": ["0", "0"], "dlog": rep.dlog, "added": rep.added,
                 "ok": rep.excessive and refused})
    return _report("parity", 0, rows)


def _compose(f: RatFunc, g: RatFunc, var="x") -> RatFunc:
    return f.subs_rat({var: g})


def _random_rational(rng, var="x"):
    while True:
        num = MultiPoly.from_coeffs([rng.randint(-3, 3) for _ in range(rng.randint(2, 3))], var)
        den = MultiPoly.from_coeffs([rng.randint(-3, 3) for _ in range(rng.randint(1, 2))], var)
        if den.is_zero() or num.is_zero():
            continue
        f = RatFunc(num, den)
        if not f.diff(var).is_zero():
            return f


def _classical(f: RatFunc, var="x"):
    d1 = f.diff(var)
    d2 = d1.diff(var)
    d3 = d2.diff(var)
    return d3 / d1 - (d2 / d1) * (d2 / d1) * Fraction(3, 2)


def suite_identities(samples=5, seed=0, **_):
    """Exact identities: Möbius brackets, the local branch model, composition laws, curvature, psi relations."""
    rng = random.Random(seed)
    rows = []
    # Möbius maps have zero bracket
    for _ in range(3):
        a, b, c, d = (rng.randint(-5, 5) for _ in range(4))
        if a * d - b * c == 0:
            a, d = 1, 1
        m = MobiusMap(a, b, c, d)
        t = LaurentSeries([1] + [0] * 9, 1)
        x = m.on_series(t + 2) if (c * 2 + d) != 0 else m.on_series(t + 3)
        br = schwarzian_of_series(x)
        rows.append({"check": f"mobius({a},{b},{c},{d})", "ok": br.is_zero()})
    # [E + tau^2, tau] = -3/8 tau^-4
    E = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    br = schwarzian_rational(f"{E} + x^2", "x")
    rows.append({"check": "branch model", "value": str(br), "ok": br == RatFunc.parse("-3/(8*x^4)", ("x",))})
    # composition law {f o g} = ({f} o g) g'^2 + {g}, associative over triples
    for _ in range(samples):
        f, g, h = (_random_rational(rng) for _ in range(3))
        fg = _compose(f, g)
        gh = _compose(g, h)
        lhs = _classical(_compose(fg, h))
        law = _compose(_classical(fg), h) * h.diff("x") ** 2 + _classical(h)
        other = _compose(_classical(f), gh) * gh.diff("x") ** 2 + _classical(gh)
        rows.append({"check": "composition", "f": str(f), "g": str(g), "h": str(h),
                     "ok": lhs == law and lhs == other})
    # curvature closed forms against formal covariant differentiation
    closed, formal = jet_curvature(), curvature_by_iteration()
    for name, a, b in zip(("K", "grad K", "grad^2 K"), closed, formal):
        rows.append({"check": name, "value": str(a), "ok": a == b})
    # psi relations for R = 1 in the displayed form
    Q = _lambda_potential()
    A1, A2 = psi_relations(Q)
    base = Q.on_curve()
    p = [CurvePoly.gen(v, PSI_VARS, None, base.var) for v in PSI_VARS]
    dQ = base.derivative()
    E1 = p[2] * p[0] * 2 - p[1] ** 2 * 3 - p[0] ** 4 * (base * 2)
    E2 = p[3] * p[0] ** 2 - p[2] * p[1] * p[0] * 6 + p[1] ** 3 * 6 - p[0] ** 6 * dQ
    rows.append({"check": "psi relation 1", "ok": A1 == E1})
    rows.append({"check": "psi relation 2", "ok": A2 == E2})
    return _report("identities", 0, rows)


RUNNERS = {
    "chazy": suite_chazy,
    "gauto": suite_gauto,
    "monodromy": suite_monodromy,
    "lambda-ode": suite_lambda_ode,
    "psi-ode": suite_psi_ode,
    "whittaker-g1": suite_whittaker_g1,
    "whittaker-g2": suite_whittaker_g2,
    "residues-g123": suite_residues,
    "parity": suite_parity,
    "identities": suite_identities,
}


def run_suite(name, **opts):
    if name not in RUNNERS:
        raise KeyError(name)
    opts = {k: v for k, v in opts.items() if v is not None}
    return RUNNERS[name](**opts)
