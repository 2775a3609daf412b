"""q-series oracles: the quasi-modular ``E2`` and the modular lambda function.

Conventions: ``E2 = 1 - 24 sum sigma_1(n) q^n`` with ``q = exp(2 pi i tau)``;
``lambda = theta_2^4 / theta_3^4`` with ``q = exp(pi i tau)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..algebra import LaurentSeries
from ..errors import OracleDomain
from ..fuchsian import MobiusMap
from .jets import JetValue

MIN_IMAG = 0.3
CHAZY_CONSTANT = math.pi ** 2 / 12


def sigma1(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def e2_coefficients(terms=50):
    """``[1, -24 sigma_1(1), -24 sigma_1(2), ...]`` up to ``q^(terms-1)``."""
    return [1] + [-24 * sigma1(n) for n in range(1, terms)]


def _int_series_mul(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def lambda_coefficients(terms=20):
    """Integer q-coefficients of ``lambda`` (``q = exp(pi i tau)``), index = power of q."""
    n = terms
    # theta_2^4 = 16 q (sum_{k>=0} q^{k(k+1)})^4, theta_3 = 1 + 2 sum q^{k^2}
    a = [0] * n
    k = 0
    while k * (k + 1) < n:
        a[k * (k + 1)] += 1
        k += 1
    t3 = [0] * n
    t3[0] = 1
    k = 1
    while k * k < n:
        t3[k * k] += 2
        k += 1
    a2 = _int_series_mul(a, a, n)
    a4 = _int_series_mul(a2, a2, n)
    num = [0] + [16 * c for c in a4[: n - 1]]
    t32 = _int_series_mul(t3, t3, n)
    t34 = _int_series_mul(t32, t32, n)
    # divide by theta_3^4 (constant term 1)
    out = [0] * n
    for i in range(n):
        s = num[i] - sum(out[j] * t34[i - j] for j in range(i))
        out[i] = s
    return out


@dataclass
class QSeriesOracle:
    """Truncated q-series evaluator with term-wise tau-derivatives."""

    kind: str = "eisensteinE2"
    terms: int = 50

    def __post_init__(self):
        if self.kind not in ("eisensteinE2", "modularLambda"):
            raise ValueError(f"unknown oracle kind {self.kind!r}")
        if self.terms < 10:
            raise ValueError("at least 10 terms are required")

    def check(self, tau):
        if complex(tau).imag < MIN_IMAG:
            raise OracleDomain(f"Im tau = {complex(tau).imag:.3g} is below {MIN_IMAG}")

    def __call__(self, tau, derivatives=0):
        return qseries_eval(self, tau, derivatives)


def _e2_derivs(tau, k, terms):
    q = cmath.exp(2j * math.pi * tau)
    n = np.arange(terms)
    c = np.array(e2_coefficients(terms), dtype=complex)
    qn = q ** n
    out = []
    for m in range(k + 1):
        out.append(complex(np.sum(c * (2j * math.pi * n) ** m * qn)))
    return out


def _theta_derivs(tau, k, terms):
    """``theta_2`` and ``theta_3`` and their first ``k`` tau-derivatives (``q = e^(i pi tau)``)."""
    t2 = [0j] * (k + 1)
    t3 = [0j] * (k + 1)
    for n in range(-terms, terms + 1):
        e3 = n * n
        e2 = (n + 0.5) ** 2
        v3 = cmath.exp(1j * math.pi * e3 * tau)
        v2 = cmath.exp(1j * math.pi * e2 * tau)
        for m in range(k + 1):
            t3[m] += (1j * math.pi * e3) ** m * v3
            t2[m] += (1j * math.pi * e2) ** m * v2
    return t2, t3


def _taylor(derivs):
    """Series ``sum f^(m) h^m / m!`` from a derivative list."""
    return LaurentSeries([d / math.factorial(m) for m, d in enumerate(derivs)], 0, "h")


def _from_taylor(s: LaurentSeries, k):
    return [complex(s.coeff(m)) * math.factorial(m) for m in range(k + 1)]


def lambda_taylor(tau, order=5, terms=50) -> LaurentSeries:
    """Taylor series of ``lambda(tau + h)`` in ``h`` to ``O(h^(order+1))``."""
    t2, t3 = _theta_derivs(tau, order, terms)
    s2, s3 = _taylor(t2), _taylor(t3)
    return (s2 ** 4) / (s3 ** 4)


def qseries_eval(oracle: QSeriesOracle, tau, derivatives=0):
    """Value and the first ``derivatives`` tau-derivatives.

    ``E2`` is differentiated term by term in its q-series.  ``lambda`` uses
    term-wise derivatives of the theta series combined by Taylor arithmetic;
    orders above 3 are allowed.
    """
    tau = complex(tau)
    oracle.check(tau)
    if derivatives < 0:
        raise ValueError("derivative order must be non-negative")
    if oracle.kind == "eisensteinE2":
        return _e2_derivs(tau, derivatives, oracle.terms)
    return _from_taylor(lambda_taylor(tau, derivatives, oracle.terms), derivatives)


def chazy_residual(tau, constant=CHAZY_CONSTANT, terms=50):
    """``|pi eta''' - 12 i (2 eta eta'' - 3 eta'^2)|`` for ``eta = constant * E2``."""
    e = qseries_eval(QSeriesOracle("eisensteinE2", terms), tau, 3)
    eta = [constant * v for v in e]
    return abs(math.pi * eta[3] - 12j * (2 * eta[0] * eta[2] - 3 * eta[1] ** 2))


def gamma_e2(tau, terms=50):
    """The connection ``(pi i / 3) E2``."""
    return (1j * math.pi / 3) * qseries_eval(QSeriesOracle("eisensteinE2", terms), tau, 0)[0]


def gauto_residual(m: MobiusMap, taus, terms=50):
    """Max over ``taus`` of ``|det(m) G(m tau) - (c tau + d)^2 G(tau) - 2 c (c tau + d)|`` with ``G = (pi i/3) E2``."""
    worst = 0.0
    for tau in taus:
        tau = complex(tau)
        cd = m.c * tau + m.d
        res = abs(m.det() * gamma_e2(m(tau), terms) - cd ** 2 * gamma_e2(tau, terms) - 2 * m.c * cd)
        worst = max(worst, res)
    return worst


def lambda_periodicity_residual(taus, terms=50):
    """``max |lambda(tau + 2) - lambda(tau)|``."""
    orc = QSeriesOracle("modularLambda", terms)
    return max(abs(qseries_eval(orc, t + 2)[0] - qseries_eval(orc, t)[0]) for t in taus)


# -- jets of lambda-derived objects ---------------------------------------
def lambda_connection_series(tau, terms=50) -> LaurentSeries:
    """Taylor series of ``Gamma = d/dtau ln(lambda')`` at ``tau`` to ``O(h^4)``."""
    lam = lambda_taylor(tau, 5, terms)
    d1 = lam.deriv()
    return d1.deriv() / d1


def lambda_differential_series(tau, terms=50) -> LaurentSeries:
    """Taylor series of ``psi = lambda'`` to ``O(h^4)``."""
    return lambda_taylor(tau, 4, terms).deriv()


def _mobius_pull(series_at, m: MobiusMap, tau, weight, connection):
    """Series of the pulled-back object ``G(m(tau + h)) m'^(weight/2)`` (+ ``d/dh ln m'`` for connections)."""
    tau = complex(tau)
    a, b, c, d = (complex(v) for v in (m.a, m.b, m.c, m.d))
    det = a * d - b * c
    n = 6
    h = LaurentSeries([1] + [0] * (n - 1), 1, "h")
    cd = h * c + (c * tau + d)
    # m(tau + h) - m(tau) = det h / ((c tau + d)(c (tau + h) + d))
    shift = cd.inv() * h * (det / (c * tau + d))
    QSeriesOracle().check(m(tau))
    G = series_at(m(tau))
    comp = G.compose(shift)
    mprime = (cd ** 2).inv() * det
    out = comp * (mprime if weight == 2 else mprime ** (weight // 2))
    if connection:
        out = out + (cd.inv() * (-2 * c))
    return out


def _jets_from_series(s: LaurentSeries, tau) -> JetValue:
    vals = [complex(s.coeff(k)) * math.factorial(k) for k in range(4)]
    return JetValue(*vals, tau=complex(tau))


def lambda_connection_jets(tau, m: MobiusMap | None = None, terms=50) -> JetValue:
    """Jets of ``Gamma = d/dtau ln lambda'`` at ``tau``, optionally of its Möbius transform.

    The transform of a connection ``G`` under ``m`` is
    ``G(m tau) m'(tau) + m''(tau)/m'(tau)``; it satisfies the same
    autonomous ODE.
    """
    if m is None:
        QSeriesOracle().check(tau)
        return _jets_from_series(lambda_connection_series(tau, terms), tau)
    s = _mobius_pull(lambda t: lambda_connection_series(t, terms), m, tau, 2, True)
    return _jets_from_series(s, tau)


def lambda_differential_jets(tau, m: MobiusMap | None = None, terms=50) -> JetValue:
    """Jets of ``psi = lambda'`` (or of ``psi(m tau) m'(tau)``)."""
    if m is None:
        QSeriesOracle().check(tau)
        return _jets_from_series(lambda_differential_series(tau, terms), tau)
    s = _mobius_pull(lambda t: lambda_differential_series(t, terms), m, tau, 2, False)
    return _jets_from_series(s, tau)


def scaled_jets(jet: JetValue, sigma, weights=(1, 2, 3, 4)) -> JetValue:
    """Jets of ``sigma G(sigma tau)`` from the jets of ``G`` at ``sigma tau``."""
    vals = [v * sigma ** w for v, w in zip(jet.as_tuple(), weights)]
    return JetValue(*vals, tau=jet.tau / sigma)


def sample_taus(n, seed=0, re=(-1.0, 1.0), im=(0.5, 1.5)):
    """``n`` deterministic pseudo-random points in a box of the upper half-plane."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(*re, size=n)
    ys = rng.uniform(*im, size=n)
    return [complex(x, y) for x, y in zip(xs, ys)]
