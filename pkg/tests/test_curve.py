"""Hyperelliptic function fields: derivatives, places, local series, orders, residues."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from uniformize.algebra import RatFunc
from uniformize.curve import (
    CurveFunction,
    HyperellipticCurve,
    PlaneCurve,
    Place,
    curve_from_json,
    divisor,
    local_expansion,
    order_at,
    parity_decompose,
    residue_sum_of_dlog,
    total_derivative,
)
from uniformize.errors import InvalidCurve, InvalidPlace, ZeroFunction
from uniformize.suites import random_differential

G1 = HyperellipticCurve([1, 0, 0, 1])            # w^2 = z^3 + 1
G2M = HyperellipticCurve([-1, 0, 0, 0, 0, 1])    # w^2 = z^5 - 1
G3 = HyperellipticCurve([1, 0, 0, 0, 0, 0, 0, 1])


def cf(text, curve):
    return CurveFunction.parse(text, curve)


def test_total_derivative_examples():
    assert cf("w", G1).derivative() == cf("3*z^2*w/(2*(z^3+1))", G1)
    assert cf("z", G1).derivative() == cf("1", G1)
    assert cf("z*w", G1).derivative() == cf("w*(1 + 3*z^3/(2*(z^3+1)))", G1)


def test_w_squared_derivative_is_P_prime():
    for curve in (G1, G2M, G3):
        w = curve.wfunc()
        assert (w * w).derivative() == CurveFunction(RatFunc(curve.P.diff("z")), 0, curve)


def test_plane_curve_rule_matches_hyperelliptic():
    pc = PlaneCurve("y^2 - x^3 - 1")
    d = pc.total_derivative(RatFunc.parse("x*y", ("x", "y")))
    # y' = 3x^2/(2y), so (xy)' = y + 3x^3/(2y)
    assert d == RatFunc.parse("y + 3*x^3/(2*y)", ("x", "y"))


def test_invalid_curves():
    with pytest.raises(InvalidCurve):
        HyperellipticCurve([1, 0, 1])
    with pytest.raises(InvalidCurve):
        HyperellipticCurve([0, 0, 1, 1])  # z^2 (z + 1) is not square-free
    with pytest.raises(InvalidCurve):
        PlaneCurve("(y - x)^2")


def test_curve_json_forms():
    a = curve_from_json({"type": "hyperelliptic", "P": ["1", "0", "0", "1"]})
    b = curve_from_json({"type": "plane", "F": "w^2 - z^3 - 1"})
    assert a.P == b.P and a.genus == 1
    assert HyperellipticCurve.from_json(a.to_json()).P == a.P


def test_local_expansion_examples():
    s = local_expansion(cf("1/w", G2M), Place.infinity(), 1)
    assert s.valuation() == 2 and s.coeff(2) == -2
    assert all(s.coeff(k) == 0 for k in range(3, 12))
    b = local_expansion(cf("1", G2M), Place.branch(1), 1)
    assert b.valuation() == 1 and b.coeff(1) == 2
    assert local_expansion(cf("z", G2M), Place.infinity(), 0).valuation() == -2


def test_order_examples():
    assert order_at(cf("1/w", G2M), 1, Place.infinity()) == 2
    assert order_at(cf("1/w", G1), 1, Place.infinity()) == 0
    assert order_at(cf("z/w", G2M), 1, Place.branch(1)) == 0
    with pytest.raises(ZeroFunction):
        order_at(cf("0", G1), 1, Place.infinity())
    with pytest.raises(InvalidPlace):
        order_at(cf("z", G1), 0, Place.branch(2))


def test_residue_examples():
    assert residue_sum_of_dlog(cf("1/w", G2M), 1) == 2
    assert residue_sum_of_dlog(cf("1/w", G1), 1) == 0
    assert residue_sum_of_dlog(cf("z/w", G2M), 1) == 2


def test_parity_examples():
    assert parity_decompose(cf("w", G1)) == (RatFunc.parse("0", ("z",)), RatFunc.parse("1", ("z",)))
    assert parity_decompose(cf("z^2 + 3", G1))[1].is_zero()
    a, b = parity_decompose(cf("1 + z*w", G1))
    assert a == RatFunc.parse("1", ("z",)) and b == RatFunc.parse("z", ("z",))
    f = cf("(z + w)/(z - 2)", G2M)
    a, b = parity_decompose(f)
    assert CurveFunction(a, b, G2M) == f


def test_order_matches_expansion_at_places():
    places = [Place.infinity(), Place.branch(1), Place.regular(0), Place.regular(0, -1), Place.regular(2)]
    for text in ("1/w", "z/w", "z^2 + w", "(z - 2)*w", "1/(z^2 * w)"):
        f = cf(text, G2M)
        for k in (0, 1):
            for pl in places:
                s = local_expansion(f, pl, k)
                assert order_at(f, k, pl) == s.valuation(1e-9), (text, k, pl)


@pytest.mark.parametrize("curve", [G1, HyperellipticCurve([1, 0, 0, 0, 0, 1]), G3])
def test_residue_sum_random(curve):
    rng = random.Random(curve.genus)
    for _ in range(5):
        f = random_differential(curve, rng)
        total = residue_sum_of_dlog(f, 1)
        assert total == 2 * curve.genus - 2
        # independent route: sum of the per-place orders
        assert sum(o for _, o in divisor(f, 1)) == total


def test_quadratic_differentials():
    f = cf("1/(z*w)", G2M)
    assert residue_sum_of_dlog(f, 2) == 4


coeff = st.integers(-3, 3)
rf = st.tuples(st.lists(coeff, min_size=1, max_size=3), st.lists(coeff, min_size=1, max_size=2))


def _mk(parts, curve):
    out = []
    for num, den in parts:
        n = " + ".join(f"({c})*z^{i}" for i, c in enumerate(num))
        d = " + ".join(f"({c})*z^{i}" for i, c in enumerate(den))
        if all(c == 0 for c in den):
            d = "1"
        out.append(RatFunc.parse(f"({n})/({d})", ("z",)))
    return CurveFunction(out[0], out[1], curve)


@settings(max_examples=30, deadline=None)
@given(rf, rf, rf, rf)
def test_leibniz(a1, b1, a2, b2):
    f, g = _mk((a1, b1), G1), _mk((a2, b2), G1)
    assert (f * g).derivative() == f.derivative() * g + f * g.derivative()
    assert total_derivative(f + g) == f.derivative() + g.derivative()


@settings(max_examples=30, deadline=None)
@given(rf, rf)
def test_parity_roundtrip(a, b):
    f = _mk((a, b), G2M)
    ea, ob = parity_decompose(f)
    assert CurveFunction(ea, ob, G2M) == f
    assert f.involution() == CurveFunction(ea, -ob, G2M)
