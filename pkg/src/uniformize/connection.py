"""Connections on the canonical bundle and their curvature identities.

A connection is stored on the curve as two densities over ``dz``:

    Gamma = d/dtau ln(D0 * zdot) + D1 * zdot,

where ``z`` is the curve coordinate (``x`` in genus zero) and the dot is the
derivative in the uniformizing variable.  Writing the same connection in a
chosen scalar ``u`` with ``du = R' dz`` as ``Gamma = dlog(udot) - r udot``
and ``Qt = Q_u - r_u - r^2/2`` gives

    K = Qt * udot^2,
    (grad K)^2 / K^3 = (Qt_u + 2 r Qt)^2 / Qt^3                     =: S,
    grad^2 K / K^2  = (Qt_uu + 2 Qt r_u + 5 r Qt_u + 6 r^2 Qt) / Qt^2 =: T,

with ``K = Gamma' - Gamma^2/2`` and ``grad f = f' - k Gamma f`` on weight-k
objects.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .algebra import MultiPoly, RatFunc, gcd
from .algebra.poly import coerce_coeff, fmt_coeff
from .curve import CurveFunction, HyperellipticCurve, divisor
from .errors import (
    DegenerateCoordinate,
    ExcessiveAutomorphismRisk,
    InvalidCurve,
    PoleProximity,
)
from .fuchsian import FuchsianQ, MobiusMap, change_variable_density


@dataclass
class ConnectionSpec:
    """``Gamma = d/dtau ln(D0 zdot) + D1 zdot`` on a curve (``curve`` None in genus zero)."""

    curve: HyperellipticCurve | None
    D0: CurveFunction
    D1: CurveFunction
    cs: list | None = None
    variant: str = "custom"
    meromorphic: bool = False
    var: str = "z"

    def __post_init__(self):
        if self.D0.is_zero():
            raise DegenerateCoordinate("D0 must be nonzero")

    def dlog_density(self):
        """Density ``D0'/D0 + D1`` with ``Gamma = d/dtau ln zdot + density * zdot``."""
        return self.D0.derivative() / self.D0 + self.D1

    def to_json(self):
        out = {"variant": self.variant, "D0": str(self.D0), "D1": str(self.D1)}
        if self.curve is not None:
            out["curve"] = self.curve.to_json()
        if self.cs is not None:
            out["cs"] = [fmt_coeff(c) for c in self.cs]
        return out


@dataclass
class FlatConnection:
    """Signal returned when the modified potential vanishes identically.

    Then ``K`` vanishes along the connection, which is the differential
    ``Gamma' = Gamma^2 / 2`` of a flat coordinate (``Gamma = dlog udot`` with
    ``u`` Möbius in ``tau``).
    """

    connection: ConnectionSpec
    u_density: CurveFunction
    r: CurveFunction

    def __bool__(self):
        return False


@dataclass
class STIdentity:
    """Exact identities ``(grad K)^2 = S K^3`` and ``grad^2 K = T K^2`` on the curve."""

    S: CurveFunction
    T: CurveFunction
    u_density: CurveFunction
    Q_tilde: CurveFunction
    r: CurveFunction
    Q_u: CurveFunction
    curve: HyperellipticCurve | None = None

    def is_constant(self):
        return self.S.is_constant() and self.T.is_constant()


@dataclass
class ParityReport:
    dlog: str
    added: str
    excessive: bool


def build_genus0_connection(Q: FuchsianQ, R=0) -> ConnectionSpec:
    """``Gamma = dlog(xdot) + R(x) xdot`` on a genus-zero orbifold."""
    var = Q.var
    if not Q.Q.b.is_zero():
        raise InvalidCurve("genus-zero connections need a univariate potential")
    if isinstance(R, str):
        R = RatFunc.parse(R, (var,))
    D1 = CurveFunction(R, 0, None, var)
    meromorphic = False
    if not D1.a.is_zero() and not D1.a.den.is_constant():
        # a pole of R off the singular points of Q
        meromorphic = _has_extra(D1.a.den.with_vars((var,)), Q.Q.a.den.with_vars((var,)))
    return ConnectionSpec(None, CurveFunction(1, 0, None, var), D1, None, "genus0", meromorphic, var)


def _has_extra(rden, qden):
    rest = rden
    while True:
        g = gcd(rest, qden)
        if g.is_constant():
            return not rest.is_constant()
        rest = rest.exact_div(g)
        if rest.is_constant():
            return False


def build_hyperelliptic_connection(curve: HyperellipticCurve, cs, variant="final") -> ConnectionSpec:
    """``Gamma = d/dtau ln(zdot/w) + (c_1 + c_2 z + ... + c_g z^(g-1)) zdot / w``.

    All ``c_j = 0`` leaves a connection with an extra elliptic automorphism;
    it is only built when ``variant="gu"`` is requested explicitly.
    """
    cs = [Fraction(coerce_coeff(c)) for c in cs]
    if len(cs) != curve.genus:
        raise InvalidCurve(f"expected {curve.genus} coefficients, got {len(cs)}")
    if all(c == 0 for c in cs) and variant != "gu":
        raise ExcessiveAutomorphismRisk("all c_j vanish: the connection keeps the involution as an automorphism")
    z = MultiPoly.gen(curve.z, (curve.z,))
    poly = MultiPoly.const(0, (curve.z,))
    for j, c in enumerate(cs):
        poly = poly + z ** j * c
    D0 = CurveFunction(0, 1, curve).inv()
    D1 = CurveFunction(RatFunc(poly), 0, curve) * D0
    return ConnectionSpec(curve, D0, D1, cs, "gu" if all(c == 0 for c in cs) else variant, False, curve.z)


def connection_from_json(spec, Q: FuchsianQ | None = None):
    from .curve import curve_from_json

    if isinstance(spec, str):
        spec = json.loads(spec)
    variant = spec.get("variant", "final")
    if variant == "genus0":
        if Q is None:
            raise InvalidCurve("genus-zero connections need a potential")
        return build_genus0_connection(Q, spec.get("R", "0"))
    curve = curve_from_json(spec["curve"])
    return build_hyperelliptic_connection(curve, spec.get("cs", ["0"] * curve.genus), variant)


def _term_parity(f: CurveFunction):
    """Parity under tau -> -tau of ``f * zdot`` (zdot is odd, w is odd)."""
    p = f.parity()
    return {"zero": "none", "even": "odd", "odd": "even", "mixed": "mixed"}[p]


def involution_parity(conn: ConnectionSpec) -> ParityReport:
    """Parities of the dlog part and of the added part under the hyperelliptic involution.

    The dlog of a density of pure parity behaves like ``zdot`` (odd).  The
    involution survives as an automorphism when the added part is absent
    or has the same parity as the dlog part.
    """
    if conn.curve is None:
        raise InvalidCurve("parity is defined for hyperelliptic connections")
    dlog = "odd" if conn.D0.parity() in ("even", "odd") else "mixed"
    added = _term_parity(conn.D1)
    excessive = added == "none" or added == dlog
    return ParityReport(dlog, added, excessive)


def connection_singularities(conn: ConnectionSpec):
    """Places where ``Gamma`` is singular: zeros/poles of ``D0 dz`` and poles of ``D1 dz``.

    Returns ``(place, dlog_residue, added_pole_order)`` triples.
    """
    if conn.curve is None:
        raise InvalidCurve("places are defined for hyperelliptic curves")
    found = {}
    for pl, o in divisor(conn.D0, 1):
        found.setdefault(pl, [0, 0])[0] = o
    if not conn.D1.is_zero():
        for pl, o in divisor(conn.D1, 1):
            if o < 0:
                found.setdefault(pl, [0, 0])[1] = -o
    return [(pl, v[0], v[1]) for pl, v in found.items()]


def default_u_density(conn: ConnectionSpec) -> CurveFunction:
    if conn.curve is not None:
        return CurveFunction(0, 1, conn.curve).inv()
    return CurveFunction(1, 0, None, conn.var)


def compute_st_identities(conn: ConnectionSpec, Q: FuchsianQ, u_density=None):
    """S and T for ``conn`` written in the scalar ``u`` with ``du = u_density dz``.

    Returns :class:`STIdentity`, or a :class:`FlatConnection` signal when the
    modified potential vanishes identically.
    """
    Rp = default_u_density(conn) if u_density is None else u_density
    if isinstance(Rp, str):
        Rp = CurveFunction.parse(Rp, conn.curve, conn.var)
    if Rp.is_zero():
        raise DegenerateCoordinate("du/dz vanishes identically")
    if Q.density is not None:
        raise DegenerateCoordinate("the potential must be given in the curve coordinate")
    Qu = change_variable_density(Q, Rp).Q
    if conn.curve is not None:
        Qu = CurveFunction(Qu.a, Qu.b, conn.curve)

    def du(f):
        return f.derivative() / Rp

    # Gamma = dlog(udot) + (D0'/D0 - R''/R' + D1) / R' * udot
    r = -((conn.D0.derivative() / conn.D0 - Rp.derivative() / Rp + conn.D1) / Rp)
    Qt = Qu - du(r) - r * r * Fraction(1, 2)
    if Qt.is_zero():
        return FlatConnection(conn, Rp, r)
    Qt1 = du(Qt)
    Qt2 = du(Qt1)
    num_s = Qt1 + r * Qt * 2
    S = num_s * num_s / (Qt * Qt * Qt)
    T = (Qt2 + Qt * du(r) * 2 + r * Qt1 * 5 + r * r * Qt * 6) / (Qt * Qt)
    return STIdentity(S, T, Rp, Qt, r, Qu, conn.curve)


def transform_connection_numeric(samples, m: MobiusMap, sampler, skip_eps=1e-12):
    """Max of ``|(ad-bc) G~(m tau) - (c tau + d)^2 G(tau) - 2c(c tau + d)|``.

    ``samples`` are ``(tau, Gamma(tau))`` pairs and ``sampler`` evaluates the
    transformed connection at ``m(tau)``.  Samples hitting a pole are skipped
    with a warning.
    """
    worst = 0.0
    used = 0
    for tau, g in samples:
        c, d = m.c, m.d
        try:
            gt = sampler(m(tau))
        except (PoleProximity, ZeroDivisionError, OverflowError) as exc:
            warnings.warn(f"sample at tau={tau} skipped: {exc}")
            continue
        if not (abs(gt) < float("inf")) or not (abs(g) < float("inf")):
            warnings.warn(f"sample at tau={tau} skipped: non-finite value")
            continue
        res = abs(m.det() * gt - (c * tau + d) ** 2 * g - 2 * c * (c * tau + d))
        worst = max(worst, res)
        used += 1
    if not used:
        raise PoleProximity("every sample was skipped")
    return worst
