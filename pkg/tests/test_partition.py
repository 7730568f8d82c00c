import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hairlab.mapcore import eval_f
from hairlab.partition import (ETA, REAL_AXIS, ZETA, CurveId, classify, curve_y, eq1_image_sign, eq1_residual,
                               itinerary, sample_curves, theta)
from hairlab.symbolic import Sym


def test_curve_values():
    assert curve_y(CurveId(ZETA, 0), 0.0, 3.0) == 0.0
    y = curve_y(CurveId(ZETA, 1), 0.0, 3.0)
    assert 1.5 * math.pi < y < 2 * math.pi
    assert y == pytest.approx(5.09, abs=5e-3)
    assert abs(eq1_residual(0.0, y, 3.0)) < 1e-12
    assert eq1_image_sign(0.0, y, 3.0) > 0
    assert curve_y(CurveId(ETA, 1), -3.0, 3.0) == 0.0
    assert curve_y(CurveId(ETA, 1), 0.0, 3.0) == pytest.approx(2.29, abs=5e-3)
    assert curve_y(CurveId(ETA, -1), 0.0, 3.0) == -curve_y(CurveId(ETA, 1), 0.0, 3.0)


def test_domains():
    with pytest.raises(ValueError):
        curve_y(CurveId(ZETA, 0), -2.5, 3.0)
    with pytest.raises(ValueError):
        curve_y(CurveId(ETA, 1), -3.5, 3.0)
    with pytest.raises(ValueError):
        CurveId(ETA, 2)


def test_zeta_one_asymptote():
    # 2 pi - zeta_1(x) decays like 2 pi / (x + a - 1)
    for x in (100.0, 1e3, 1e5, 1e8):
        gap = 2 * math.pi - curve_y(CurveId(ZETA, 1), x, 3.0)
        assert gap == pytest.approx(2 * math.pi / (x + 2.0), rel=5e-2)


@pytest.mark.parametrize("curve", [CurveId(ZETA, j) for j in (-2, -1, 1, 2)] + [CurveId(ETA, 1), CurveId(ETA, -1)])
def test_residual_and_image_sign(curve):
    for x in np.linspace(-2.99, 100, 300):
        y = curve_y(curve, float(x), 3.0)
        assert abs(eq1_residual(x, y, 3.0)) < 1e-12
        s = eq1_image_sign(x, y, 3.0)
        assert s > 0 if curve.kind == ZETA else s < 0


def test_zeta_one_strictly_increasing():
    ys = [curve_y(CurveId(ZETA, 1), x, 3.0) for x in np.linspace(-20, 100, 500)]
    assert all(b > a for a, b in zip(ys, ys[1:]))


def test_zeta_image_is_positive_real():
    for x in (-5.0, 0.0, 3.0):
        y = curve_y(CurveId(ZETA, 1), x, 3.0)
        w = eval_f(complex(x, y), 3.0)
        assert w.real > 0 and abs(w.imag) < 1e-9 * abs(w)


def test_classify_examples():
    assert classify(0j, 3.0).kind == "boundary"
    assert classify(0j, 3.0).curve == REAL_AXIS
    assert classify(1j, 3.0).sym == Sym.Z2
    assert classify(5j, 3.0).sym == Sym.O2
    assert classify(-1j, 3.0).sym == Sym.Z1
    assert classify(-5j, 3.0).sym == Sym.O1
    assert classify(9j, 3.0).kind == "strip"


def test_itinerary_examples(P3):
    it = itinerary(-2.9 + 0.01j, 2, 3.0)
    assert it.symbols == [Sym.Z2, Sym.Z2]
    it = itinerary(complex(P3.p_a, 0.0), 3, 3.0)
    assert it.symbols == []


@settings(max_examples=200, deadline=None)
@given(st.floats(-20, 50), st.floats(0.05, 6.2))
def test_classify_matches_theta_band(x, y):
    z = complex(x, y)
    th = theta(z, 3.0)
    lab = classify(z, 3.0, tol=0.0)
    if abs(th - math.pi) < 1e-9 or abs(th - 2 * math.pi) < 1e-9:
        return
    if th < math.pi:
        expected = Sym.Z2
    elif th < 2 * math.pi:
        expected = Sym.O2
    else:
        assert lab.kind == "strip"
        return
    if x < -3.0 and th < math.pi:
        return  # left of -a the eta curve is absent and 0 < Theta < pi is part of T_1
    assert lab.sym == expected


def test_conjugation_symmetry():
    for z in (1 + 2j, -4 + 0.5j, 10 + 6j):
        up, down = classify(z, 3.0), classify(z.conjugate(), 3.0)
        if up.is_refined:
            assert down.sym == up.sym.swapped()


def test_sample_curves_cover_all_families():
    rows = sample_curves(3.0, -8.0, 4.0, 25)
    names = {str(c) for c, _, _ in rows}
    assert names == {"zeta-2", "zeta-1", "zeta0", "zeta+1", "zeta+2", "eta+1", "eta-1"}
    for c, x, y in rows:
        assert abs(eq1_residual(x, y, 3.0)) < 1e-12
