import math

import numpy as np
import pytest

from hairlab.basin import boundary_point
from hairlab.hairs import (BUDGET, LANDING, NON_CAUCHY, Hair, _dist_to_polyline, accumulation_report, bracket_check,
                           choose_blocks, crossing_predicate, landing_report, mu_linear, probe_itinerary, trace_hair)
from hairlab.inverse import pullback
from hairlab.mapcore import eval_f
from hairlab.partition import itinerary
from hairlab.symbolic import ASeq, Generator, Literal, lift
from hairlab.tails import TailCurve, base_polyline

PROBE = Literal((), (1,))


@pytest.fixture(scope="module")
def hair101_12(P3):
    return trace_hair(lift(Literal((), (1, 0, 1)), 1), 12, P3)


@pytest.fixture(scope="module")
def hair101_30(P3):
    return trace_hair(lift(Literal((), (1, 0, 1)), 1), 30, P3)


def test_tips_contract_geometrically(hair101_12):
    tips = hair101_12.tips
    gaps = [abs(tips[m] - tips[m - 1]) for m in range(1, len(tips))]
    assert all(np.isfinite(hair101_12.points))
    # one period (3 symbols) shrinks every gap by the multiplier ~ 7.4
    for m in range(3, len(gaps) - 3, 3):
        assert gaps[m + 3] < 0.5 * gaps[m]


def test_rejects_all_zero_cycle(P3):
    with pytest.raises(ValueError):
        trace_hair(ASeq(Literal((1,), (0,)), 1), 4, P3)


def test_refinement_and_structure(hair101_12, P3):
    h = hair101_12
    assert isinstance(h, Hair) and h.depth == 12
    assert sorted(set(h.level.tolist())) == list(range(13))
    # pieces are ordered deepest first and glue tip to tip
    assert h.level[0] == 12 and h.level[-1] == 0
    starts = [np.nonzero(h.level == m)[0][0] for m in range(13)]
    for m in range(1, 13):
        end_of_m = h.points[np.nonzero(h.level == m)[0][-1]]
        assert abs(end_of_m - h.tips[m - 1]) < 1e-6 * max(1.0, abs(end_of_m))
    pts = h.points
    inview = (np.abs(pts.real) <= 1000) & (np.abs(pts.imag) <= 10)
    gaps = np.abs(np.diff(pts))
    inner = inview[1:] & inview[:-1] & (h.level[1:] == h.level[:-1])
    assert np.all(gaps[inner] <= 0.02 + 1e-12)
    assert h.flagged == []


def test_telescoping(hair101_12, P3):
    t = hair101_12.itinerary
    hs = trace_hair(t.shift(1), 11, P3)
    rng = np.random.default_rng(0)
    for m in range(1, 11):
        idx = rng.choice(np.nonzero(hair101_12.level == m + 1)[0], 20)
        target = hs.points[hs.level == m]
        for i in idx:
            v = hair101_12.points[i]
            fv = eval_f(v, P3)
            x = hair101_12.param[i]
            exact = pullback(t.shift(1).symbols(m), TailCurve(t.shift(m + 1), P3).point(x), P3, closure=True)
            assert abs(exact - fv) < 1e-7 * max(1.0, abs(fv))
            # polyline surrogate: within the refinement scale of the level-m arc
            assert _dist_to_polyline(np.array([fv]), target)[0] < 0.02


def test_itinerary_fidelity(hair101_12, P3):
    t = hair101_12.itinerary
    rng = np.random.default_rng(1)
    for m in (2, 5, 8):
        idx = np.nonzero(hair101_12.level == m)[0]
        for i in rng.choice(idx, 10):
            got = itinerary(hair101_12.points[i], m, P3, tol=0.0).symbols
            assert got == t.symbols(m)


def test_landing_periodic(hair101_30, P3):
    rep = landing_report(hair101_30, P3)
    assert rep.verdict == LANDING
    assert rep.period == 3 and rep.multiplier > 1
    assert rep.gaps[-1] < 1e-8
    bp = boundary_point(hair101_30.itinerary, 60, P3)
    assert abs(bp.z - rep.endpoint) < 1e-6


def test_landing_period_two(P3):
    t = ASeq.from_symbols([], ["1_1", "1_2"])
    rep = landing_report(trace_hair(t, 40, P3), P3)
    assert rep.verdict == LANDING and rep.period == 2 and rep.multiplier > 1
    z = rep.endpoint
    assert abs(eval_f(eval_f(z, P3), P3) - z) < 1e-8


def test_short_hair_is_inconclusive(hair101_12, P3):
    assert landing_report(hair101_12, P3).verdict == BUDGET


def test_probe_itinerary():
    A, q = probe_itinerary([1], 3, PROBE)
    assert A.base.digits(10) == [1, 1, 1, 0, 0, 0, 1, 1, 1, 1]
    assert q == 2 and A.base.digit(q) == 1 and A.base.digit(q - 1) == 1
    assert A.shift(q).base.digits(5) == [1, 0, 0, 0, 1]


def test_crossing_predicate_regression(P3):
    # the probe hair reaches left of q_a and comes back, but never re-crosses Re = -1, -2, -3
    for k in (1, 2, 4, 8):
        counts = [crossing_predicate([1], k, mu, PROBE, P3)[0] for mu in (1.0, 2.0, 3.0, 4.7, 6.7)]
        assert counts == [1, 1, 1, 2, 2]


def test_choose_blocks_unit_schedule_hits_cap(P3):
    bc = choose_blocks([1], 3, mu_linear(1.0, 3), p=P3, k_cap=10)
    assert not bc.complete and bc.failed_j == 1 and bc.ks == []
    assert all(n == 1 for n in bc.crossings.values())


def test_choose_blocks_offset_schedule(P3):
    mus = mu_linear(1.0, 3, offset=abs(P3.q_a))
    bc = choose_blocks([1], 3, mus, p=P3)
    assert bc.complete and bc.ks == [1, 1, 1]
    # the predicate holds for the chosen prefix and stays true for the next few k
    prefix = [1]
    for j, k in enumerate(bc.ks):
        for kk in range(k, k + 4):
            assert crossing_predicate(prefix, kk, mus[j], PROBE, P3)[0] >= 2
        prefix += [1, 1] + [0] * k


def test_block_length_against_mu_regression(P3):
    ks = {mu: choose_blocks([1], 1, [mu], p=P3, k_cap=30).ks[0] for mu in (3.8, 4.0, 4.7, 6.0, 10.0, 20.0)}
    assert ks == {3.8: 4, 4.0: 2, 4.7: 1, 6.0: 1, 10.0: 2, 20.0: 2}
    # non-decreasing once mu is clear of |q_a|
    tail = [ks[m] for m in (4.7, 6.0, 10.0, 20.0)]
    assert tail == sorted(tail)


def test_accumulation_control_and_monotonicity(hair101_30, P3):
    base = base_polyline(hair101_30.itinerary, P3)
    rep = accumulation_report(hair101_30, base, 0.05)
    assert rep.returning_arcs == 0
    counts = [accumulation_report(hair101_30, base, eps).returning_arcs for eps in (0.01, 0.05, 1.0, 10.0, 1e3)]
    assert counts == sorted(counts)
    # with the tail itself included, level 0 (and the level-1 piece glued to it) touch the base
    assert accumulation_report(hair101_30, base, 0.05, level_window=-1).levels == [0, 1]


def test_generator_hair_does_not_settle(P3):
    T = Generator((1,), (1, 1, 1))
    h = trace_hair(lift(T, 1), 1 + 3 * 3, P3)
    assert landing_report(h, P3).verdict == NON_CAUCHY


@pytest.mark.parametrize("mode", ["periodic", "tail"])
def test_bracketing(P3, mode):
    T = Generator((1,), (2, 3, 5))
    reps = [bracket_check(T, n, P3, mode=mode) for n in (1, 2, 3)]
    assert all(r.ordered for r in reps)
    gaps = [r.arc_gap for r in reps]
    assert gaps[0] > gaps[1] > gaps[2]
    angle_gaps = [r.angle_gap for r in reps]
    assert angle_gaps[0] > angle_gaps[1] > angle_gaps[2]
