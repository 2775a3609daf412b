"""Tau-jets computed on the x-side from a solution pair.

With ``tau = Psi2 / Psi1`` and Wronskian one, ``xdot = Psi1^2`` and
``d/dtau = Psi1^2 d/dx``.  Any quantity that is a polynomial in ``Psi1``,
``Psi1'`` with coefficients on the curve stays of that form under
``d/dtau`` because ``Psi1'' = Q Psi1 / 2``.  The forms are built exactly and
only evaluated in floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..curve import CurveFunction
from ..errors import CoordinateDegeneracy
from ..fuchsian import FuchsianQ
from .paths import PsiState

DEGENERACY_EPS = 1e-10


@dataclass
class JetValue:
    """Numeric jets ``g0..g3`` at ``tau`` (names follow the ODE variables)."""

    g0: complex
    g1: complex
    g2: complex
    g3: complex
    tau: complex = 0j

    def as_tuple(self):
        return (self.g0, self.g1, self.g2, self.g3)

    def to_json(self):
        return {"tau": ["%.17g" % self.tau.real, "%.17g" % self.tau.imag],
                "jets": [["%.17g" % complex(v).real, "%.17g" % complex(v).imag] for v in self.as_tuple()]}


class PsiForm:
    """``sum c_(a,b)(x, w) Psi^a Phi^b`` with ``Psi = Psi1`` and ``Phi = Psi1'``."""

    def __init__(self, terms, Q: FuchsianQ):
        self.Q = Q
        self.terms = {k: c for k, c in terms.items() if not c.is_zero()}

    @classmethod
    def from_coefficient(cls, c: CurveFunction, a, b, Q):
        return cls({(a, b): c}, Q)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return PsiForm(out, self.Q)

    def derive(self):
        """``d/dtau`` using ``d/dtau = Psi^2 d/dx``, ``Psi' = Phi``, ``Phi' = Q Psi / 2``."""
        base = self.Q.on_curve()
        half_q = base * Fraction(1, 2)
        density = self.Q.density
        out = {}

        def put(k, v):
            if not v.is_zero():
                out[k] = out[k] + v if k in out else v

        for (a, b), c in self.terms.items():
            dc = c.derivative()
            if density is not None:
                dc = dc / density
            put((a + 2, b), dc)
            if a:
                put((a + 1, b + 1), c * a)
            if b:
                put((a + 3, b - 1), c * half_q * b)
        return PsiForm(out, self.Q)

    def evaluate(self, x, w, psi, phi):
        total = 0j
        for (a, b), c in self.terms.items():
            total += c.eval_complex(x, w) * psi ** a * phi ** b
        return total


def connection_form(Q: FuchsianQ, dlog_density: CurveFunction | None = None) -> PsiForm:
    """``Gamma = 2 Psi Phi + density * Psi^2`` (``d/dtau ln xdot`` plus a density times ``xdot``)."""
    base = Q.on_curve()
    one = CurveFunction(1, 0, base.curve, base.var)
    terms = {(1, 1): one * 2}
    if dlog_density is not None and not dlog_density.is_zero():
        terms[(2, 0)] = CurveFunction(dlog_density.a, dlog_density.b, base.curve, base.var)
    return PsiForm(terms, Q)


def differential_form(Q: FuchsianQ, R: CurveFunction | None = None) -> PsiForm:
    """``psi = xdot / R`` as a form (``R = 1`` gives ``psi = Psi^2``)."""
    base = Q.on_curve()
    c = CurveFunction(1, 0, base.curve, base.var)
    if R is not None:
        c = c / CurveFunction(R.a, R.b, base.curve, base.var)
    return PsiForm({(2, 0): c}, Q)


def jet_forms(form: PsiForm, n=4):
    out = [form]
    for _ in range(n - 1):
        out.append(out[-1].derive())
    return out


def tau_and_jets(state: PsiState, Q: FuchsianQ, forms, w=None) -> JetValue:
    """Evaluate precomputed jet forms at a continued state."""
    if abs(state.Psi1) < DEGENERACY_EPS:
        raise CoordinateDegeneracy(f"Psi1 vanishes at x={state.x:.6g}")
    w = state.w if w is None else w
    vals = [f.evaluate(state.x, w, state.Psi1, state.Psi1x) for f in forms]
    vals += [0j] * (4 - len(vals))
    return JetValue(*vals[:4], tau=state.tau)


def connection_jets(state: PsiState, Q: FuchsianQ, dlog_density=None, w=None) -> JetValue:
    """Jets of ``Gamma`` at one state (forms rebuilt each call; prefer :func:`jet_forms` in loops)."""
    return tau_and_jets(state, Q, jet_forms(connection_form(Q, dlog_density)), w)
