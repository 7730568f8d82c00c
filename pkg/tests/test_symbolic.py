import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hairlab.symbolic import (ARC_OF, QUARTERS, ASeq, BoundaryAngleError, Generator, Literal, SequenceError, Sym,
                              angle_bounds, angle_of, bracket_seqs, build_nonlanding, is_allowable, itinerary_of_angle,
                              lift, parse_bseq, project, shift)

S = Sym.parse


def test_allowability():
    assert is_allowable([S("1_1"), S("1_2")])
    assert not is_allowable([S("1_1"), S("1_1")])
    assert is_allowable([S(x) for x in ("0_1", "0_1", "1_1", "1_2", "0_1")])


def test_lifts():
    assert str(lift(Literal((), (1, 1, 0)), 1)) == "(1_1 1_2 0_1)"
    s = lift(Literal((), (1, 0, 1)), 1)
    assert s.symbols(6) == [S(x) for x in ("1_1", "0_2", "1_2", "1_1", "0_2", "1_2")]
    assert s.symbol(6) == S("1_1")
    t = Literal((1, 0), (1, 1, 0))
    assert lift(t, 1).swapped() == lift(t, 2)
    assert [x.swapped() for x in lift(t, 1).symbols(30)] == lift(t, 2).symbols(30)
    assert project(lift(t, 1)) == project(lift(t, 2)) == t
    with pytest.raises(SequenceError):
        lift(Literal((1,), (0,)), 1)


def test_shift():
    s = ASeq.from_symbols([], ["1_1", "1_2"])
    assert shift(s).symbols(4) == ASeq.from_symbols([], ["1_2", "1_1"]).symbols(4)
    g = build_nonlanding([1], [2, 3])
    tail = g.shift(len(g.prefix_digits(2)))
    assert tail.digits(6) == g.digits(30)[len(g.prefix_digits(2)):][:6]


def test_angles_exact():
    assert angle_of(ASeq.from_symbols([], ["1_1", "1_2"])) == Fraction(2, 3)
    assert angle_of(ASeq.from_symbols([], ["1_2", "0_1", "1_1"])) == Fraction(3, 7)
    assert angle_of(ASeq.from_symbols([], ["0_1"])) == 0


def test_itinerary_of_angle_examples():
    assert itinerary_of_angle(Fraction(2, 3)).symbols(4) == [S("1_1"), S("1_2")] * 2
    assert itinerary_of_angle(Fraction(3, 7)).symbols(3) == [S("1_2"), S("0_1"), S("1_1")]
    with pytest.raises(BoundaryAngleError):
        itinerary_of_angle(Fraction(1, 4))
    with pytest.raises(BoundaryAngleError):
        itinerary_of_angle(Fraction(1, 8))


def _random_seq(rng):
    pre = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 5)))
    cyc = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 6)))
    if not any(cyc):
        cyc = cyc + (1,)
    return lift(Literal(pre, cyc), rng.randint(1, 2))


def test_doubling_commutation_and_round_trip():
    rng = random.Random(11)
    for _ in range(200):
        s = _random_seq(rng)
        th = angle_of(s)
        assert angle_of(s.shift(1)) == (2 * th) % 1
        if any(x in QUARTERS for x in _orbit(th)):
            continue
        assert itinerary_of_angle(th).symbols(40) == s.symbols(40)


def _orbit(th):
    seen, x = [], th
    while x not in seen:
        seen.append(x)
        x = (2 * x) % 1
    return seen


def test_quarter_consistency():
    rng = random.Random(3)
    for _ in range(100):
        s = _random_seq(rng)
        th = angle_of(s)
        if th in QUARTERS:
            continue
        lo, hi = ARC_OF[s.symbol(0)]
        assert lo <= th <= hi


def test_lift_windows_are_allowable():
    rng = random.Random(5)
    for _ in range(50):
        s = _random_seq(rng)
        assert is_allowable(s.symbols(50))


def test_generator_expansion_and_positions():
    g = build_nonlanding([1], [2, 3])
    assert g.digits(11) == [1, 1, 1, 0, 0, 1, 1, 0, 0, 0, 1]
    n = len(g.tau)
    for i, p in enumerate((g.pair_position(0), g.pair_position(1))):
        # the second 1 of the i-th pair sits at n + 1 + sum k_j + 2 i
        assert p == n + 1 + sum(g.ks[:i]) + 2 * i
        assert g.digit(p) == 1 and g.digit(p - 1) == 1
    assert sum(g.digits(400)) > 20
    assert str(g) == "tau=1;ks=2,3"


def test_generator_angle_bounds_bracket():
    T = Generator((1,), (2, 3, 5))
    lo, hi = angle_bounds(lift(T, 1), 120)
    assert 0 <= lo < hi <= 1 and hi - lo <= Fraction(1, 2 ** 119)


def test_bracket_sequences():
    T = Generator((1,), (2,))
    s, r = bracket_seqs(T, 1, mode="tail")
    assert r == Literal((1, 1, 1, 0, 0), (1,))
    assert s.digits(6) == [1, 1, 1, 0, 0, 0]
    for mode in ("periodic", "tail"):
        T = Generator((1,), (2, 3, 5))
        prev = None
        for n in (1, 2, 3):
            s, r = bracket_seqs(T, n, mode)
            lo, hi = angle_bounds(lift(T, 1), 200)
            a_s, a_r = angle_of(lift(s, 1)), angle_of(lift(r, 1))
            assert a_s < lo and hi < a_r
            gap = a_r - a_s
            if prev is not None:
                assert gap < prev
            prev = gap


def test_parse_grammar():
    assert parse_bseq("101(10)") == Literal((1, 0, 1), (1, 0))
    g = parse_bseq("tau=1;ks=2,3,5")
    assert isinstance(g, Generator) and g.ks == (2, 3, 5)
    with pytest.raises(SequenceError):
        parse_bseq("12(3)")


def test_literal_canonical_form():
    assert Literal((1, 0), (1, 0)) == Literal((), (1, 0))
    assert Literal((), (1, 1)) == Literal((), (1,))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=6), st.lists(st.integers(0, 1), min_size=1, max_size=6),
       st.integers(1, 2), st.integers(0, 12))
def test_shift_doubles_angle(pre, cyc, which, k):
    if not any(cyc):
        cyc = cyc + [1]
    s = lift(Literal(pre, cyc), which)
    assert angle_of(s.shift(k)) == (2 ** k * angle_of(s)) % 1
    assert s.shift(k).symbols(10) == s.symbols(10 + k)[k:]
