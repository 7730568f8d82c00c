import cmath
import math
import random

import numpy as np
import pytest

from hairlab.inverse import (CutLineError, inverse_branch, inverse_branch_array, pullback, pullback_array)
from hairlab.mapcore import LogPolar, eval_f
from hairlab.partition import classify, itinerary
from hairlab.symbolic import ASeq, Literal, Sym, lift

S = Sym.parse
UPPER_W = {Sym.Z2: 1, Sym.O1: 1, Sym.Z1: -1, Sym.O2: -1}


def _random_w(rng, b):
    r = 10 ** rng.uniform(-6, 8)
    phi = rng.uniform(1e-6, math.pi - 1e-6) * UPPER_W[b]
    return r * cmath.exp(1j * phi)


def test_examples(P3):
    z0 = -2.9 + 0.01j
    assert abs(inverse_branch(Sym.Z2, eval_f(z0, P3), P3).z - z0) < 1e-10
    assert inverse_branch(Sym.Z1, -1.0, P3).z == pytest.approx(-2.1412272409890356, abs=1e-12)
    res = inverse_branch(Sym.O2, 2 - 3j, P3)
    assert res.residual < 1e-10 and classify(res.z, P3).sym == Sym.O2


def test_round_trip_and_region(P3):
    rng = random.Random(2024)
    for _ in range(1000):
        b = rng.choice(list(Sym))
        w = _random_w(rng, b)
        res = inverse_branch(b, w, P3)
        assert res.residual < 1e-10
        lab = classify(res.z, P3, tol=0.0)
        assert lab.is_refined and lab.sym == b
        assert (res.z.imag > 0) == (b.sub == 2)


def test_slits_and_half_planes(P3):
    with pytest.raises(CutLineError):
        inverse_branch(Sym.Z2, -5.0, P3)
    with pytest.raises(CutLineError):
        inverse_branch(Sym.O2, 4.0, P3)
    with pytest.raises(CutLineError):
        inverse_branch(Sym.O1, 0.0, P3)
    with pytest.raises(CutLineError):
        inverse_branch(Sym.Z2, 1 - 1j, P3)
    with pytest.raises(CutLineError):
        inverse_branch(Sym.O2, 1 + 1j, P3)


def test_real_seam_conventions(P3):
    for b in (Sym.Z1, Sym.Z2):
        z = inverse_branch(b, -1.5, P3).z
        assert z.imag == 0 and -3 < z.real < -2
        z = inverse_branch(b, 7.0, P3).z
        assert z.imag == 0 and z.real > -2
    for b in (Sym.O1, Sym.O2):
        z = inverse_branch(b, -1.5, P3).z
        assert z.imag == 0 and z.real < -3
    z = inverse_branch(Sym.O2, 4.0, P3, closure=True).z
    assert abs(eval_f(z, P3) - 4.0) < 1e-10 and z.imag > 0


def test_near_seam_imaginary_sign(P3):
    # tiny imaginary parts must keep their half plane
    for eps in (1e-17, 1e-30, 1e-200):
        for b, sgn in ((Sym.Z2, 1), (Sym.O1, 1), (Sym.Z1, -1), (Sym.O2, -1)):
            w = complex(-0.8, sgn * eps)
            z = inverse_branch(b, w, P3).z
            assert z.imag != 0 and (z.imag > 0) == (b.sub == 2)
            d = 3.0 * (z.real + 3.0) * math.exp(z.real + 3.0)
            assert z.imag == pytest.approx(w.imag / d, rel=1e-6)


def test_huge_logpolar_input(P3):
    w = LogPolar(1e5, -0.3)
    z = inverse_branch(Sym.O2, w, P3).z
    assert classify(z, P3).sym == Sym.O2
    assert inverse_branch(Sym.O2, w, P3).residual < 1e-10


def test_array_matches_scalar(P3):
    rng = random.Random(9)
    for b in Sym:
        ws = np.array([_random_w(rng, b) for _ in range(50)])
        za = inverse_branch_array(b, ws, P3)
        zs = np.array([inverse_branch(b, w, P3).z for w in ws])
        assert np.max(np.abs(za - zs) / np.maximum(1, np.abs(zs))) < 1e-12


def test_pullback_identity_and_contraction(P3):
    rng = np.random.default_rng(1)
    for _ in range(100):
        z0 = complex(rng.uniform(-2.5, 3), rng.uniform(0.01, 2.0))
        if classify(z0, P3, tol=0).sym != Sym.Z2:
            continue
        assert abs(pullback([Sym.Z2], eval_f(z0, P3), P3) - z0) < 1e-9
    prefix = [S(x) for x in ("1_2", "0_1", "1_1")] * 3
    w1, w2 = 60.0 + 0.5j, 61.0 + 0.5j
    gaps = [abs(pullback(prefix[-n:], w1, P3, closure=True) - pullback(prefix[-n:], w2, P3, closure=True))
            for n in range(1, len(prefix) + 1)]
    for n in range(3, len(gaps) - 1):
        assert gaps[n + 1] / gaps[n] < 0.9


def test_pullback_itineraries(P3):
    rng = random.Random(4)
    for _ in range(50):
        cyc = [rng.randint(0, 1) for _ in range(rng.randint(1, 5))]
        if not any(cyc):
            cyc.append(1)
        s = lift(Literal([rng.randint(0, 1) for _ in range(3)], cyc), rng.randint(1, 2))
        syms = s.symbols(9)
        head = syms[:8]
        w = complex(-3.0 + 0.2, 0.2 if syms[8].sub == 2 else -0.2)
        z = pullback(head, w, P3, closure=True)
        got = itinerary(z, 8, P3, tol=0.0).symbols
        assert got == head


def test_pullback_array(P3):
    prefix = lift(Literal((), (1, 0, 1)), 1).symbols(6)
    ws = np.array([-2.8 - 0.1j, -2.8 - 0.2j])
    za = pullback_array(prefix, ws, P3)
    zs = [pullback(prefix, w, P3, closure=True) for w in ws]
    assert np.allclose(za, zs, rtol=1e-12, atol=1e-14)


def test_pullback_error_depth(P3):
    with pytest.raises(CutLineError) as info:
        pullback([Sym.Z2, Sym.O2], 1 + 1j, P3)
    assert info.value.depth == 1
