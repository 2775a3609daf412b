"""Jet curvature, relations and elimination to autonomous ODEs."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uniformize.algebra import MultiPoly, parse_poly
from uniformize.connection import build_genus0_connection, build_hyperelliptic_connection, compute_st_identities
from uniformize.curve import HyperellipticCurve
from uniformize.errors import DegreeOverflow, EliminationDegeneracy
from uniformize.fuchsian import OrbifoldSpec, build_orbifold_q, whittaker_z
from uniformize.jets import (
    CURV_VARS,
    JET_VARS,
    CurvePoly,
    DerivedODE,
    build_relations,
    covariant_derivative,
    curvature_by_iteration,
    curvature_to_jets,
    derive_connection_ode,
    derive_psi_ode,
    eliminate,
    formal_derivative,
    jet_curvature,
    jet_weight,
    psi_relations,
    pullback,
)
from uniformize.numerics import lambda_connection_jets, lambda_differential_jets, sample_taus

LAMBDA_Q = build_orbifold_q(OrbifoldSpec(["0", "1", "inf"], ["inf", "inf", "inf"]))
G1 = HyperellipticCurve([1, 0, 0, 1])


@pytest.fixture(scope="module")
def lambda_ode():
    return derive_connection_ode(build_genus0_connection(LAMBDA_Q), LAMBDA_Q)


@pytest.fixture(scope="module")
def psi_ode():
    return derive_psi_ode(LAMBDA_Q)


def jp(text):
    return parse_poly(text, JET_VARS)


# -- curvature --------------------------------------------------------------
def test_curvature_examples():
    K, dK, d2K = jet_curvature()
    assert K.eval_complex({"j0": 1, "j1": 0, "j2": 0, "j3": 0}) == -0.5
    assert dK == jp("j2 - 3*j0*j1 + j0^3")
    assert d2K == jp("j3 - 6*j0*j2 - 3*j1^2 + 12*j0^2*j1 - 3*j0^4")


def test_curvature_by_formal_differentiation():
    K, dK, d2K = jet_curvature()
    assert covariant_derivative(K, 2) == dK
    assert covariant_derivative(dK, 3) == d2K
    assert curvature_by_iteration() == (K, dK, d2K)


def test_curvature_weights():
    for p, w in zip(jet_curvature(), (2, 3, 4)):
        for exps in p.terms:
            assert sum(e * jet_weight(v) for e, v in zip(exps, p.vars)) == w


def test_formal_derivative_rejects_top_jet():
    with pytest.raises(ValueError):
        formal_derivative(jp("j3"))


def test_curvature_against_finite_differences():
    # Gamma = dlog lambda' at nearby points; K from jets matches {lambda, tau}
    tau = 0.15 + 0.9j
    jet = lambda_connection_jets(tau)
    h = 1e-4
    g = [lambda_connection_jets(tau + k * h).g0 for k in (-2, -1, 0, 1, 2)]
    fd1 = (g[0] - 8 * g[1] + 8 * g[3] - g[4]) / (12 * h)
    fd2 = (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * h * h)
    assert abs(fd1 - jet.g1) < 1e-7 * abs(jet.g1)
    assert abs(fd2 - jet.g2) < 1e-5 * abs(jet.g2)


# -- elimination -------------------------------------------------------------
def test_toy_elimination():
    vars = ("z", "j1", "j2")
    ode = eliminate(parse_poly("j1 - z", vars), parse_poly("j2 - z", vars))
    assert ode.Xi in (jp("j1 - j2").with_vars(ode.Xi.vars), jp("j2 - j1").with_vars(ode.Xi.vars))
    assert ode.evaluate((0, 5, 5, 0)) == 0


def test_elimination_degeneracy():
    vars = ("z", "j1", "j2")
    p = parse_poly("j1 - z", vars)
    with pytest.raises(EliminationDegeneracy):
        eliminate(p, p)


def test_degree_overflow():
    vars = ("z", "j1", "j2")
    with pytest.raises(DegreeOverflow):
        eliminate(parse_poly("j1^3 - z", vars), parse_poly("j2^5 - z^2", vars), degree_cap=4)


def test_lambda_ode_shape(lambda_ode):
    assert lambda_ode.curvature_form.degree() == 6
    assert lambda_ode.Xi.degree() == 8 and len(lambda_ode.Xi) == 26
    steps = [e["step"] for e in lambda_ode.log]
    assert "resultant" in steps and "pullback" in steps


def test_lambda_ode_residuals(lambda_ode):
    for tau in sample_taus(5, seed=11) + [0.1 + 1.2j]:
        assert lambda_ode.relative_residual(lambda_connection_jets(tau)) < 1e-6
    rng = np.random.default_rng(2)
    generic = [lambda_ode.relative_residual(rng.normal(size=4) + 1j * rng.normal(size=4)) for _ in range(5)]
    assert min(generic) > 1e-3


def test_elimination_order_independent():
    st_ = compute_st_identities(build_genus0_connection(LAMBDA_Q), LAMBDA_Q)
    rel = build_relations(st_)
    a = eliminate(rel.P1, rel.P2, rel.Pc).Xi
    b = eliminate(rel.P2, rel.P1, rel.Pc).Xi
    assert a == b or a == -b


def test_constant_identities_go_direct():
    ode = derive_connection_ode(build_hyperelliptic_connection(G1, [1]), whittaker_z(1))
    assert ode.curvature_form.with_vars(CURV_VARS) == parse_poly("k1^2 + 8*k0^3", CURV_VARS)
    # Gamma = 1 (flat parametrization) is a solution
    assert ode.evaluate((1, 0, 0, 0)) == 0


def test_flat_connection_gives_curvature():
    ode = derive_connection_ode(build_hyperelliptic_connection(G1, [0], variant="gu"), whittaker_z(1))
    assert ode.Xi == jet_curvature()[0].primitive()
    assert ode.log[0]["step"] == "flat"


def test_psi_relations_displayed_form():
    A1, A2 = psi_relations(LAMBDA_Q)
    Q = LAMBDA_Q.on_curve()
    p = [CurvePoly.gen(v, ("p0", "p1", "p2", "p3"), None, "x") for v in ("p0", "p1", "p2", "p3")]
    assert A1 == p[2] * p[0] * 2 - p[1] ** 2 * 3 - p[0] ** 4 * (Q * 2)
    assert A2 == p[3] * p[0] ** 2 - p[2] * p[1] * p[0] * 6 + p[1] ** 3 * 6 - p[0] ** 6 * Q.derivative()


def test_psi_ode(psi_ode):
    assert psi_ode.Xi.degree() == 18 and len(psi_ode.Xi) == 47
    for tau in sample_taus(5, seed=4):
        assert psi_ode.relative_residual(lambda_differential_jets(tau)) < 1e-6


def test_json_roundtrip(lambda_ode):
    back = DerivedODE.from_json(lambda_ode.dumps())
    assert back.Xi == lambda_ode.Xi and back.names == lambda_ode.names
    assert back.to_json() == lambda_ode.to_json()


def test_pullback_matches_substitution():
    phi = parse_poly("k1^2 - 3*k0^3 + k0*k2", CURV_VARS)
    K, dK, d2K = jet_curvature()
    assert curvature_to_jets(phi) == (dK ** 2 - K ** 3 * 3 + K * d2K).primitive()


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 2), st.integers(0, 1), st.integers(-5, 5)),
                min_size=1, max_size=5))
def test_pullback_is_a_ring_map(terms):
    phi = MultiPoly({(a, b, c): Fraction(v) for a, b, c, v in terms if v}, CURV_VARS)
    if phi.is_zero():
        return
    mapping = dict(zip(CURV_VARS, jet_curvature()))
    direct = MultiPoly.const(0, JET_VARS)
    for exps, c in phi.terms.items():
        term = MultiPoly.const(c, JET_VARS)
        for v, e in zip(CURV_VARS, exps):
            term = term * mapping[v].with_vars(JET_VARS) ** e
        direct = direct + term
    assert pullback(phi, mapping, JET_VARS) == direct
