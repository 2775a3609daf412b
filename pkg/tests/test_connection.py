"""Connections on the canonical bundle and their S, T identities."""
import warnings
from fractions import Fraction

import numpy as np
import pytest

from uniformize.algebra import RatFunc
from uniformize.connection import (
    FlatConnection,
    STIdentity,
    build_genus0_connection,
    build_hyperelliptic_connection,
    compute_st_identities,
    connection_from_json,
    connection_singularities,
    involution_parity,
    transform_connection_numeric,
)
from uniformize.curve import CurveFunction, HyperellipticCurve, Place, order_at
from uniformize.errors import DegenerateCoordinate, ExcessiveAutomorphismRisk, PoleProximity
from uniformize.fuchsian import MobiusMap, OrbifoldSpec, build_orbifold_q, whittaker_z
from uniformize.jets import jet_curvature
from uniformize.numerics import gamma_e2, lambda_connection_jets, sample_taus
from uniformize.numerics.qseries import lambda_taylor

G1 = HyperellipticCurve([1, 0, 0, 1])
G2 = HyperellipticCurve([1, 0, 0, 0, 0, 1])
G2M = HyperellipticCurve([-1, 0, 0, 0, 0, 1])
LAMBDA_Q = build_orbifold_q(OrbifoldSpec(["0", "1", "inf"], ["inf", "inf", "inf"]))


def curvature_values(jet):
    vals = dict(zip(("j0", "j1", "j2", "j3"), jet.as_tuple()))
    return [p.eval_complex(vals) for p in jet_curvature()]


def test_genus0_examples():
    conn = build_genus0_connection(LAMBDA_Q)
    assert conn.D1.is_zero() and not conn.meromorphic
    c2 = build_genus0_connection(LAMBDA_Q, "1/x")
    assert c2.D1.a == RatFunc.parse("1/x", ("x",)) and not c2.meromorphic
    c3 = build_genus0_connection(LAMBDA_Q, "1/(x+1)")
    assert c3.meromorphic


def test_hyperelliptic_examples():
    conn = build_hyperelliptic_connection(G1, [1])
    assert conn.D0 == CurveFunction.parse("1/w", G1) and conn.D1 == CurveFunction.parse("1/w", G1)
    assert build_hyperelliptic_connection(G2M, [0, 1]).D1 == CurveFunction.parse("z/w", G2M)
    with pytest.raises(ExcessiveAutomorphismRisk):
        build_hyperelliptic_connection(G1, [0])
    gu = build_hyperelliptic_connection(G1, [0], variant="gu")
    assert gu.D1.is_zero()


def test_json_roundtrip():
    spec = {"curve": G2.to_json(), "cs": ["1", "0"], "variant": "final"}
    conn = connection_from_json(spec)
    assert conn.to_json()["cs"] == ["1", "0"]
    assert connection_from_json({"variant": "genus0", "R": "0"}, LAMBDA_Q).variant == "genus0"


def test_parity_examples():
    rep = involution_parity(build_hyperelliptic_connection(G2, [Fraction(2, 3), -1]))
    assert (rep.dlog, rep.added, rep.excessive) == ("odd", "even", False)
    rep = involution_parity(build_hyperelliptic_connection(G1, [0], variant="gu"))
    assert rep.excessive and rep.added == "none"
    conn = build_hyperelliptic_connection(G1, [1])
    odd = type(conn)(G1, conn.D0, CurveFunction.parse("z", G1), None, "custom")
    rep = involution_parity(odd)
    assert (rep.dlog, rep.added, rep.excessive) == ("odd", "odd", True)


@pytest.mark.parametrize("curve,cs", [(G1, [1]), (G2, [1, 0]), (G2, [0, 1])])
def test_final_connection_only_singular_at_infinity(curve, cs):
    conn = build_hyperelliptic_connection(curve, cs)
    sing = connection_singularities(conn)
    # in genus one dz/w has no zeros at all
    assert [pl.kind for pl, _, _ in sing] == (["infinite"] if curve.genus > 1 else [])
    # D0 dz = dz/w has its zeros only at infinity, D1 dz is holomorphic
    assert order_at(conn.D0, 1, Place.infinity()) == 2 * curve.genus - 2
    assert order_at(conn.D1, 1, Place.infinity()) >= 0


def test_st_genus1_constant():
    st = compute_st_identities(build_hyperelliptic_connection(G1, [1]), whittaker_z(1))
    assert isinstance(st, STIdentity)
    assert st.S == CurveFunction(-8, 0, G1) and st.T == CurveFunction(-12, 0, G1)
    # flat parametrization zdot = w: Gamma = 1 identically, so the jets are (1, 0, 0, 0)
    K, dK, d2K = (complex(v) for v in [p.eval_complex({"j0": 1, "j1": 0, "j2": 0, "j3": 0}) for p in jet_curvature()])
    assert K == st.Q_tilde.eval_complex(0.3, complex(1.027) ** 0.5)
    assert dK ** 2 / K ** 3 == -8 and d2K / K ** 2 == -12


def test_st_genus2_modified_potential():
    st = compute_st_identities(build_hyperelliptic_connection(G2, [1, 0]), whittaker_z(2))
    assert st.Q_tilde == CurveFunction.parse("-z^3 - 1/2", G2)


def test_flat_connection_signal():
    out = compute_st_identities(build_hyperelliptic_connection(G1, [0], variant="gu"), whittaker_z(1))
    assert isinstance(out, FlatConnection) and not out
    with pytest.raises(DegenerateCoordinate):
        compute_st_identities(build_hyperelliptic_connection(G1, [1]), whittaker_z(1), CurveFunction(0, 0, G1))


def test_st_lambda_against_qseries():
    st = compute_st_identities(build_genus0_connection(LAMBDA_Q), LAMBDA_Q)
    assert st.S == CurveFunction(LAMBDA_Q.Q.a.diff("x") ** 2 / LAMBDA_Q.Q.a ** 3, 0, None, "x")
    for tau in sample_taus(4, seed=5):
        jet = lambda_connection_jets(tau)
        K, dK, d2K = curvature_values(jet)
        lam = complex(lambda_taylor(tau, 1).coeff(0))
        S = st.S.eval_complex(lam)
        T = st.T.eval_complex(lam)
        assert abs(dK ** 2 - S * K ** 3) < 1e-8 * abs(dK) ** 2
        assert abs(d2K - T * K ** 2) < 1e-8 * abs(d2K)


def test_transform_examples():
    taus = [0.1 + 1j, -0.3 + 0.7j]
    S = MobiusMap(0, -1, 1, 0)
    # Gamma = 0 transforms to -2/sigma at sigma = -1/tau
    assert transform_connection_numeric([(t, 0) for t in taus], S, lambda s: -2 / s) < 1e-14
    scale = MobiusMap(2, 0, 0, 1)
    assert transform_connection_numeric([(t, t) for t in taus], scale, lambda s: s / 4) < 1e-14
    samples = [(t, gamma_e2(t)) for t in taus]
    assert transform_connection_numeric(samples, S, gamma_e2) < 1e-8


def test_transform_is_affine_in_differentials():
    # adding a weight-2 form (lambda') to both sides keeps the residual small
    taus = [0.1 + 1j, -0.3 + 1.1j]
    T2 = MobiusMap(1, 2, 0, 1)

    def lam_dot(t):
        return complex(lambda_taylor(t, 1).coeff(1))

    samples = [(t, gamma_e2(t) + 0.5 * lam_dot(t)) for t in taus]
    assert transform_connection_numeric(samples, T2, lambda s: gamma_e2(s) + 0.5 * lam_dot(s)) < 1e-8


def test_transform_skips_poles():
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")

        def sampler(s):
            raise PoleProximity("pole")

        with pytest.raises(PoleProximity):
            transform_connection_numeric([(1j, 0)], MobiusMap(1, 1, 0, 1), sampler)
    with pytest.warns(UserWarning, match="skipped"):
        r = transform_connection_numeric([(1j, 0), (2j, 0)], MobiusMap(1, 1, 0, 1),
                                         lambda s: 0 if s.imag > 1.5 else float("inf"))
    assert np.isfinite(r)
