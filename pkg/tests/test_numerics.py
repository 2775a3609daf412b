"""Path continuation, x-side jets, monodromy and q-series oracles."""
import cmath
import math

import numpy as np
import pytest

from uniformize.algebra import RatFunc
from uniformize.connection import build_hyperelliptic_connection
from uniformize.curve import CurveFunction
from uniformize.errors import CoordinateDegeneracy, InvalidPath, OracleDomain
from uniformize.fuchsian import FuchsianQ, MobiusMap, whittaker_w, whittaker_z
from uniformize.numerics import (
    CHAZY_CONSTANT,
    PathSpec,
    PsiState,
    QSeriesOracle,
    based_loop,
    chazy_residual,
    circle_loop,
    connection_form,
    e2_coefficients,
    elliptic_order_check,
    gauto_residual,
    integrate_psi,
    jet_forms,
    lambda_coefficients,
    lambda_connection_jets,
    lambda_periodicity_residual,
    monodromy,
    qseries_eval,
    scaled_jets,
    singular_points,
    tau_and_jets,
)


def const_q(c):
    return FuchsianQ(CurveFunction(RatFunc.parse(str(c), ("x",)), 0, None, "x"))


# -- integration ------------------------------------------------------------
def test_free_equation():
    end = integrate_psi(const_q(0), PathSpec([0, 1]))
    assert abs(end.Psi2 - 1) < 1e-12 and abs(end.Psi2x - 1) < 1e-12
    assert abs(end.tau - 1) < 1e-12


def test_exponential_equation():
    end = integrate_psi(const_q(2), PathSpec([0, 0.5 + 0.5j, 1]))
    assert abs(end.Psi1 - math.cosh(1)) < 1e-10 and abs(end.Psi1x - math.sinh(1)) < 1e-10
    assert abs(end.Psi2 - math.sinh(1)) < 1e-10 and abs(end.Psi2x - math.cosh(1)) < 1e-10


def test_wronskian_drift_small():
    Q = whittaker_z(2)
    integrate_psi(Q, circle_loop(0, 0.7))
    assert integrate_psi.last_drift < 1e-8


def test_invalid_paths():
    with pytest.raises(InvalidPath):
        PathSpec([0])
    with pytest.raises(InvalidPath):
        PathSpec([0, 0, 1])
    with pytest.raises(InvalidPath):
        integrate_psi(whittaker_z(1), PathSpec([0, -1.0005]))
    with pytest.raises(InvalidPath):
        integrate_psi(const_q(0), PathSpec([0, 1]), PsiState(0, 2, 0, 0, 2))
    with pytest.raises(InvalidPath):
        monodromy(const_q(0), PathSpec([0, 1]))


def test_path_json_roundtrip():
    p = PathSpec([0.3 + 0.2j, 1j, -0.5])
    q = PathSpec.from_json(p.to_json())
    assert q.vertices == p.vertices and q.tolerance == p.tolerance


def test_singular_points():
    pts = sorted(singular_points(whittaker_z(1)), key=lambda z: (round(z.real, 6), z.imag))
    ref = sorted((cmath.exp(1j * math.pi * (2 * k + 1) / 3) for k in range(3)), key=lambda z: (round(z.real, 6), z.imag))
    assert len(pts) == 3 and all(abs(a - b) < 1e-12 for a, b in zip(pts, ref))


# -- jets ---------------------------------------------------------------------
def test_flat_jets():
    Q = const_q(0)
    forms = jet_forms(connection_form(Q))
    end = integrate_psi(Q, PathSpec([0, 0.7]))
    # basis (1, x) continued to 0.7 and renormalized: Psi1 = 1, Psi1' = 0
    jet = tau_and_jets(end, Q, forms)
    assert abs(jet.tau - 0.7) < 1e-12 and all(abs(v) < 1e-12 for v in jet.as_tuple())


def test_jets_ignore_second_solution():
    Q = whittaker_z(1)
    forms = jet_forms(connection_form(Q))
    s = integrate_psi(Q, PathSpec([0.3, 0.5 + 0.2j]))
    t = PsiState(s.x, s.Psi1, s.Psi1x, s.Psi2 + 0.7 * s.Psi1, s.Psi2x + 0.7 * s.Psi1x, s.w)
    assert abs(tau_and_jets(s, Q, forms).g0 - tau_and_jets(t, Q, forms).g0) < 1e-10


def test_coordinate_degeneracy():
    Q = const_q(0)
    with pytest.raises(CoordinateDegeneracy):
        tau_and_jets(PsiState(0.5, 0, 1, -1, 0), Q, jet_forms(connection_form(Q)))


def test_jets_match_finite_differences():
    Q = whittaker_z(1)
    conn = build_hyperelliptic_connection(Q.curve, [1])
    forms = jet_forms(connection_form(Q, conn.dlog_density()))
    x0 = 0.35 + 0.15j
    s0 = integrate_psi(Q, PathSpec([0.3, x0]))
    h = 1e-3
    states = [s0 if k == 0 else integrate_psi(Q, PathSpec([x0, x0 + k * h], tolerance=1e-13), s0)
              for k in (-2, -1, 0, 1, 2)]
    jets = [tau_and_jets(s, Q, forms).as_tuple() for s in states]
    for k in range(3):
        vals = [j[k] for j in jets]
        d = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h)
        # d/dtau = Psi1^2 d/dx
        fd = s0.Psi1 ** 2 * d
        assert abs(fd - jets[2][k + 1]) < 1e-5 * max(1.0, abs(jets[2][k + 1]))


def test_scaled_jets():
    jet = lambda_connection_jets(0.2 + 1.1j)
    sc = scaled_jets(jet, 2.0)
    assert sc.tau == jet.tau / 2
    assert sc.g3 == jet.g3 * 16


# -- monodromy ------------------------------------------------------------------
def test_trivial_monodromy():
    M = monodromy(const_q(0), circle_loop(0.2, 0.5))
    assert np.allclose(M, np.eye(2), atol=1e-10)


def test_order_three_and_two():
    M = monodromy(whittaker_w(1), circle_loop(1.0, 0.25))
    assert abs(abs(np.trace(M)) - 1) < 1e-6 and abs(np.linalg.det(M) - 1) < 1e-8
    Q = whittaker_z(1)
    M = monodromy(Q, circle_loop(-1.0, 0.25))
    assert abs(np.trace(M)) < 1e-6


def test_path_composition():
    Q = whittaker_z(1)
    base = 0.1 + 0.1j
    pts = singular_points(Q)
    l1 = based_loop(base, pts[0], 0.25)
    l2 = based_loop(base, pts[1], 0.25)
    both = PathSpec(l1.vertices + l2.vertices[1:])
    M1, M2, M = (monodromy(Q, loop) for loop in (l1, l2, both))
    assert np.allclose(M, M1 @ M2, atol=1e-6)
    assert abs(np.linalg.det(M) - 1) < 1e-8


def test_elliptic_order_examples():
    assert elliptic_order_check(np.eye(2), 1)[0]
    assert elliptic_order_check(np.array([[0, 1], [-1, 1]]), 3)[0]
    assert elliptic_order_check(np.array([[0, 1], [-1, 0]]), 2)[0]
    assert not elliptic_order_check(np.array([[0, 1], [-1, 0]]), 3)[0]


# -- q-series -------------------------------------------------------------------
def test_series_coefficients():
    assert e2_coefficients(4) == [1, -24, -72, -96]
    assert lambda_coefficients(5)[:3] == [0, 16, -128]


def test_lambda_at_i():
    val = qseries_eval(QSeriesOracle("modularLambda"), 1j)[0]
    assert abs(val - 0.5) < 1e-10


def test_e2_at_i():
    val = qseries_eval(QSeriesOracle("eisensteinE2"), 1j)[0]
    assert abs(val - 3 / math.pi) < 1e-12


def test_oracle_domain():
    with pytest.raises(OracleDomain):
        qseries_eval(QSeriesOracle(), 0.2j)
    with pytest.raises(ValueError):
        QSeriesOracle(terms=5)
    with pytest.raises(ValueError):
        QSeriesOracle(kind="theta")


@pytest.mark.parametrize("kind", ["eisensteinE2", "modularLambda"])
def test_derivatives_match_finite_differences(kind):
    orc = QSeriesOracle(kind)
    tau, h = 0.2 + 0.9j, 1e-3
    d = qseries_eval(orc, tau, 5)
    for k in range(4):
        vals = [qseries_eval(orc, tau + j * h, k)[k] for j in (-2, -1, 1, 2)]
        fd = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
        assert abs(fd - d[k + 1]) < 1e-6 * max(1.0, abs(d[k + 1]))


def test_chazy_constant_normalization():
    for tau in (1j, 2j, 0.3 + 1.2j):
        assert chazy_residual(tau, CHAZY_CONSTANT) < 1e-8
    # a third of that constant leaves an O(1) residual at tau = i
    assert chazy_residual(1j, math.pi ** 2 / 36) > 1


def test_quasi_modular_law():
    taus = [0.1 + 1j, -0.2 + 0.95j]
    assert gauto_residual(MobiusMap(1, 1, 0, 1), taus) < 1e-10
    assert gauto_residual(MobiusMap(0, -1, 1, 0), taus) < 1e-8
    assert lambda_periodicity_residual(taus) < 1e-10
