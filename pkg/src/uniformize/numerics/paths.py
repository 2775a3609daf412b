"""Continuation of the linear equation ``Psi'' = Q Psi / 2`` along complex paths."""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..algebra import squarefree_part
from ..errors import InvalidPath, SingularityEncounter
from ..fuchsian import FuchsianQ

DEFAULT_TOL = 1e-10
DEFAULT_MARGIN = 1e-3
WRONSKIAN_TOL = 1e-8


@dataclass
class PathSpec:
    """Polygonal path through ``vertices``; ``max_step`` bounds each integrator step."""

    vertices: list
    max_step: float = 0.05
    tolerance: float = DEFAULT_TOL
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        self.vertices = [complex(v) for v in self.vertices]
        if len(self.vertices) < 2:
            raise InvalidPath("a path needs at least two vertices")
        for a, b in zip(self.vertices, self.vertices[1:]):
            if a == b:
                raise InvalidPath(f"repeated vertex {a}")
        if self.max_step <= 0 or self.tolerance <= 0:
            raise InvalidPath("max_step and tolerance must be positive")

    @property
    def closed(self):
        return abs(self.vertices[0] - self.vertices[-1]) < 1e-14

    def segments(self):
        return list(zip(self.vertices, self.vertices[1:]))

    def length(self):
        return sum(abs(b - a) for a, b in self.segments())

    def distance_to(self, p):
        best = math.inf
        for a, b in self.segments():
            d = b - a
            t = ((p - a) * d.conjugate()).real / abs(d) ** 2
            t = min(1.0, max(0.0, t))
            best = min(best, abs(a + t * d - p))
        return best

    def validate(self, singular_points):
        for s in singular_points:
            if self.distance_to(s) < self.margin:
                raise InvalidPath(f"path passes within {self.margin} of the singular point {s:.6g}")

    @classmethod
    def from_json(cls, spec):
        if isinstance(spec, str):
            spec = json.loads(spec)
        verts = []
        for v in spec["vertices"]:
            if isinstance(v, (list, tuple)):
                verts.append(complex(float(v[0]), float(v[1])))
            else:
                verts.append(complex(v))
        return cls(verts, float(spec.get("maxStep", 0.05)), float(spec.get("tol", DEFAULT_TOL)),
                   float(spec.get("margin", DEFAULT_MARGIN)))

    def to_json(self):
        return {"vertices": [["%.17g" % v.real, "%.17g" % v.imag] for v in self.vertices],
                "maxStep": self.max_step, "tol": self.tolerance, "margin": self.margin}


def circle_loop(center, radius, n=48, start_angle=0.0, **kw) -> PathSpec:
    """Closed polygon around ``center`` (counter-clockwise)."""
    pts = [complex(center) + radius * cmath.exp(1j * (start_angle + 2 * math.pi * k / n)) for k in range(n)]
    pts.append(pts[0])
    return PathSpec(pts, **kw)


def based_loop(base, center, radius, n=48, **kw) -> PathSpec:
    """Loop from ``base`` to a circle around ``center``, once around and back."""
    base = complex(base)
    center = complex(center)
    d = base - center
    ang = cmath.phase(d)
    entry = center + radius * d / abs(d)
    ring = [center + radius * cmath.exp(1j * (ang + 2 * math.pi * k / n)) for k in range(1, n)]
    verts = [base, entry] + ring + [entry, base]
    if abs(base - entry) < 1e-14:
        verts = verts[1:-1]
    return PathSpec(verts, **kw)


@dataclass
class PsiState:
    """Point ``x`` (with ``w`` on a curve) and two solutions with their x-derivatives."""

    x: complex
    Psi1: complex = 1.0
    Psi1x: complex = 0.0
    Psi2: complex = 0.0
    Psi2x: complex = 1.0
    w: complex | None = None

    @property
    def tau(self):
        return self.Psi2 / self.Psi1

    def wronskian(self):
        return self.Psi1 * self.Psi2x - self.Psi2 * self.Psi1x

    def matrix(self):
        return np.array([[self.Psi1, self.Psi2], [self.Psi1x, self.Psi2x]], dtype=complex)

    def as_vector(self):
        v = [self.Psi1, self.Psi1x, self.Psi2, self.Psi2x]
        if self.w is not None:
            v.append(self.w)
        return np.array(v, dtype=complex)

    @classmethod
    def standard(cls, x, w=None):
        """``Psi1 = 1, Psi1' = 0, Psi2 = 0, Psi2' = 1`` at ``x``."""
        return cls(complex(x), 1, 0, 0, 1, None if w is None else complex(w))

    def renormalized(self):
        W = self.wronskian()
        s = 1 / cmath.sqrt(W)
        return PsiState(self.x, self.Psi1 * s, self.Psi1x * s, self.Psi2 * s, self.Psi2x * s, self.w)


def _poly_roots(p):
    """Complex roots of a univariate MultiPoly."""
    if p.is_constant():
        return []
    p = squarefree_part(p)
    (v,) = p.used_vars()
    cs = p.with_vars((v,)).coeffs_in(v)
    deg = max(cs)
    arr = [complex(cs[e].constant_value()) if e in cs else 0j for e in range(deg, -1, -1)]
    return list(np.roots(arr))


def singular_points(Q: FuchsianQ, extra=()):
    """Finite poles of ``Q`` (and branch points when ``Q`` lives on a curve)."""
    base = Q.on_curve()
    pts = []
    for part in (base.a, base.b):
        if not part.is_zero():
            pts += _poly_roots(part.den)
    if base.curve is not None:
        pts += _poly_roots(base.curve.P)
    for f in extra:
        for part in (f.a, f.b):
            if not part.is_zero():
                pts += _poly_roots(part.den)
    out = []
    for p in pts:
        if all(abs(p - q) > 1e-12 for q in out):
            out.append(p)
    return out


class _Rhs:
    def __init__(self, Q: FuchsianQ):
        base = Q.on_curve()
        self.curve = base.curve
        self.qa = base.a.numeric()
        self.qb = None if base.b.is_zero() else base.b.numeric()
        if self.curve is not None:
            Pn = self.curve.P.numeric()
            dPn = self.curve.P.diff(self.curve.z).numeric()
            self.P = lambda z: Pn([z])
            self.dP = lambda z: dPn([z])
        self.track_w = self.curve is not None

    def q(self, x, w=None):
        v = self.qa([x])
        if self.qb is not None:
            v = v + self.qb([x]) * w
        return v

    def __call__(self, x, y, dx):
        w = y[4] if self.track_w else None
        h = 0.5 * self.q(x, w)
        out = [y[1], h * y[0], y[3], h * y[2]]
        if self.track_w:
            out.append(self.dP(x) / (2 * w))
        return np.array(out, dtype=complex) * dx


def _default_w(curve, x):
    return cmath.sqrt(curve.P_value(x))


def integrate_psi(Q: FuchsianQ, path: PathSpec, init: PsiState | None = None, checkpoint=64,
                  validate=True, samples=None):
    """Continue ``init`` along ``path``; returns the final :class:`PsiState`.

    Both solutions are carried by DOP853.  Every ``checkpoint`` accepted
    steps (and at each vertex) the pair is rescaled so the Wronskian is one;
    the drift measured there never exceeds ``1e-8`` on a valid path.
    ``samples``, if given, is a list that receives the state at each vertex.
    """
    rhs = _Rhs(Q)
    x0 = path.vertices[0]
    if init is None:
        init = PsiState.standard(x0)
    if abs(init.x - x0) > 1e-12:
        raise InvalidPath("initial state is not at the first vertex")
    if abs(init.wronskian() - 1) > WRONSKIAN_TOL:
        raise InvalidPath("initial Wronskian must be 1")
    if validate:
        path.validate(singular_points(Q))
    state = init
    if rhs.track_w and state.w is None:
        state = PsiState(state.x, state.Psi1, state.Psi1x, state.Psi2, state.Psi2x, _default_w(rhs.curve, state.x))
    max_drift = 0.0
    if samples is not None:
        samples.append(state)
    for a, b in path.segments():
        dx = b - a
        L = abs(dx)
        nsub = max(1, math.ceil(L / (path.max_step * checkpoint)))
        for k in range(nsub):
            s0, s1 = k / nsub, (k + 1) / nsub
            y0 = state.as_vector()

            def f(s, y):
                return rhs(a + s * dx, y, dx)

            sol = solve_ivp(f, (s0, s1), y0, method="DOP853", rtol=path.tolerance, atol=path.tolerance * 1e-2,
                            max_step=path.max_step / L)
            if not sol.success:
                loc = a + sol.t[-1] * dx
                raise SingularityEncounter(f"integration stalled near x={loc:.6g}: {sol.message}", loc)
            y = sol.y[:, -1]
            if not np.all(np.isfinite(y)):
                raise SingularityEncounter(f"solution overflow near x={a + s1 * dx:.6g}", a + s1 * dx)
            state = PsiState(a + s1 * dx, *y[:4], y[4] if rhs.track_w else None)
            max_drift = max(max_drift, abs(state.wronskian() - 1))
            state = state.renormalized()
        if samples is not None:
            samples.append(state)
    integrate_psi.last_drift = max_drift
    return state


integrate_psi.last_drift = 0.0


def monodromy(Q: FuchsianQ, loop: PathSpec, base: PsiState | None = None):
    """Matrix ``M`` with (continued basis) = ``M`` (original basis).

    With fundamental matrices ``Y = [[Psi1, Psi2], [Psi1', Psi2']]`` at the
    start and end of the loop, the continued solutions are ``Y0 C`` with
    ``C = Y0^-1 Y1``; written on the basis vector ``(Psi1, Psi2)`` this is
    ``M = C^T``.
    """
    if not loop.closed:
        raise InvalidPath("monodromy needs a closed loop")
    if base is None:
        base = PsiState.standard(loop.vertices[0])
    end = integrate_psi(Q, loop, base)
    if end.w is not None and base.w is not None and abs(end.w - base.w) > 1e-6 * max(1.0, abs(base.w)):
        if not Q.Q.b.is_zero():
            raise InvalidPath("loop changes the sheet of a potential that depends on w")
    Y0 = base.matrix()
    Y1 = end.matrix()
    C = np.linalg.solve(Y0, Y1)
    return C.T


def elliptic_order_check(M, p, tol=1e-6):
    """``(ok, residual)`` with residual ``||tr M| - 2|cos(pi/p)||``."""
    target = 2 * abs(math.cos(math.pi / p))
    res = abs(abs(np.trace(np.asarray(M))) - target)
    return res < tol, float(res)
