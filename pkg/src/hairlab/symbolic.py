"""Binary (B) and extended (A) itineraries, lifts, shift and the angle dictionary.

A-sequences are never stored symbol by symbol: an A-sequence is a B-sequence plus
the subscript of its first symbol, and every later subscript is forced by the
transition matrix. In angle terms, the k-th binary digit of the boundary angle is
1 exactly when the (k-1)-th symbol carries subscript 1, so

    bit_{k+2} = bit_{k+1} XOR digit_k,

i.e. the angle's binary expansion is the running parity of the B-sequence.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property

# rows/cols ordered (0_1, 0_2, 1_1, 1_2)
TRANSITION = (
    (1, 0, 1, 0),
    (0, 1, 0, 1),
    (0, 1, 0, 1),
    (1, 0, 1, 0),
)


class Sym(Enum):
    """Extended symbols, in transition-matrix order (0_1, 0_2, 1_1, 1_2)."""

    Z1 = 0  # 0_1: T_0, Im < 0
    Z2 = 1  # 0_2: T_0, Im > 0
    O1 = 2  # 1_1: T_1, Im < 0
    O2 = 3  # 1_2: T_1, Im > 0

    @property
    def digit(self) -> int:
        return self.value // 2

    @property
    def sub(self) -> int:
        return self.value % 2 + 1

    @property
    def lower(self) -> bool:
        return self.sub == 1

    @classmethod
    def of(cls, digit: int, sub: int) -> "Sym":
        return cls(2 * digit + sub - 1)

    def swapped(self) -> "Sym":
        return Sym.of(self.digit, 3 - self.sub)

    @property
    def label(self) -> str:
        return f"{self.digit}_{self.sub}"

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"Sym({self.label})"

    @classmethod
    def parse(cls, text: str) -> "Sym":
        t = text.strip().replace("₁", "_1").replace("₂", "_2")
        if "_" not in t and len(t) == 2:
            t = t[0] + "_" + t[1]
        d, s = t.split("_")
        return cls.of(int(d), int(s))


class SequenceError(ValueError):
    """Sequence rejected (e.g. ends in all zeros)."""


class BoundaryAngleError(ValueError):
    """The doubling orbit of the angle meets {0, 1/4, 1/2, 3/4}."""


def allowed(s: Sym, t: Sym) -> bool:
    return TRANSITION[s.value][t.value] == 1


def is_allowable(symbols) -> bool:
    syms = list(symbols)
    return all(allowed(s, t) for s, t in zip(syms, syms[1:]))


# ---------------------------------------------------------------------------
# B-sequences


def _canonical(prefix: tuple, cycle: tuple) -> tuple[tuple, tuple]:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            cycle = cycle[:d]
            break
    while prefix and prefix[-1] == cycle[-1]:
        prefix = prefix[:-1]
        cycle = cycle[-1:] + cycle[:-1]
    return prefix, cycle


class BSeq:
    """Infinite binary sequence with lazy symbol access."""

    def digit(self, k: int) -> int:
        raise NotImplementedError

    def digits(self, n: int) -> list[int]:
        return [self.digit(k) for k in range(n)]

    def ones_before(self, k: int) -> int:
        return sum(self.digits(k))

    def shift(self, k: int) -> "BSeq":
        raise NotImplementedError

    @property
    def eventually_periodic(self) -> bool:
        return False

    def __getitem__(self, k: int) -> int:
        return self.digit(k)


@dataclass(frozen=True, init=False)
class Literal(BSeq):
    """prefix followed by cycle repeated forever (stored in canonical minimal form)."""

    prefix: tuple
    cycle: tuple

    def __init__(self, prefix=(), cycle=(1,)):
        prefix = tuple(int(b) for b in prefix)
        cycle = tuple(int(b) for b in cycle)
        if not cycle:
            raise SequenceError("cycle must be non-empty")
        if any(b not in (0, 1) for b in prefix + cycle):
            raise SequenceError("binary sequences use digits 0 and 1 only")
        prefix, cycle = _canonical(prefix, cycle)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    @property
    def ends_in_zeros(self) -> bool:
        return not any(self.cycle)

    @property
    def eventually_periodic(self) -> bool:
        return True

    def digit(self, k: int) -> int:
        n = len(self.prefix)
        if k < n:
            return self.prefix[k]
        return self.cycle[(k - n) % len(self.cycle)]

    def ones_before(self, k: int) -> int:
        n = len(self.prefix)
        if k <= n:
            return sum(self.prefix[:k])
        q, r = divmod(k - n, len(self.cycle))
        return sum(self.prefix) + q * sum(self.cycle) + sum(self.cycle[:r])

    def shift(self, k: int) -> "Literal":
        n = len(self.prefix)
        if k <= n:
            return Literal(self.prefix[k:], self.cycle)
        r = (k - n) % len(self.cycle)
        return Literal((), self.cycle[r:] + self.cycle[:r])

    def __str__(self) -> str:
        return "".join(map(str, self.prefix)) + "(" + "".join(map(str, self.cycle)) + ")"


@dataclass(frozen=True)
class Generator(BSeq):
    """tau 1 1 0^{k_1} 1 1 0^{k_2} ... ; after the listed blocks either ``tail`` follows or,
    without a tail, block lengths keep growing by one."""

    tau: tuple
    ks: tuple
    tail: BSeq | None = None

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(int(b) for b in self.tau))
        object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))
        if any(k <= 0 for k in self.ks):
            raise SequenceError("block lengths k_j must be positive")
        if self.tail is None and not self.ks:
            raise SequenceError("a generator without tail needs at least one k")

    @cached_property
    def _listed_len(self) -> int:
        return len(self.tau) + sum(k + 2 for k in self.ks)

    def block_k(self, j: int) -> int:
        """k_j, 1-based, extrapolated past the listed blocks."""
        if j <= len(self.ks):
            return self.ks[j - 1]
        return self.ks[-1] + (j - len(self.ks))

    def pair_position(self, i: int) -> int:
        """0-based index of the second 1 of the (i+1)-th "11" pair: n + 1 + sum_{j<=i} k_j + 2i."""
        return len(self.tau) + 1 + sum(self.block_k(j) for j in range(1, i + 1)) + 2 * i

    def prefix_digits(self, nblocks: int) -> list[int]:
        """tau 1 1 0^{k_1} ... 1 1 0^{k_nblocks}."""
        out = list(self.tau)
        for j in range(1, nblocks + 1):
            out += [1, 1] + [0] * self.block_k(j)
        return out

    def digit(self, k: int) -> int:
        if k < len(self.tau):
            return self.tau[k]
        if self.tail is not None and k >= self._listed_len:
            return self.tail.digit(k - self._listed_len)
        pos = k - len(self.tau)
        j = 1
        while True:
            blen = self.block_k(j) + 2
            if pos < blen:
                return 1 if pos < 2 else 0
            pos -= blen
            j += 1

    def ones_before(self, k: int) -> int:
        if k <= len(self.tau):
            return sum(self.tau[:k])
        total = sum(self.tau)
        pos = k - len(self.tau)
        j = 1
        while True:
            if self.tail is not None and j > len(self.ks):
                return total + self.tail.ones_before(pos)
            blen = self.block_k(j) + 2
            if pos <= blen:
                return total + min(pos, 2)
            total += 2
            pos -= blen
            j += 1

    def shift(self, k: int) -> BSeq:
        if self.tail is not None and k >= self._listed_len:
            return self.tail.shift(k - self._listed_len)
        return Shifted(self, k) if k else self

    def __str__(self) -> str:
        s = "tau=" + "".join(map(str, self.tau)) + ";ks=" + ",".join(map(str, self.ks))
        if self.tail is not None:
            s += f";tail={self.tail}"
        return s


@dataclass(frozen=True)
class Shifted(BSeq):
    base: BSeq
    offset: int

    def digit(self, k: int) -> int:
        return self.base.digit(k + self.offset)

    def ones_before(self, k: int) -> int:
        return self.base.ones_before(k + self.offset) - self.base.ones_before(self.offset)

    def shift(self, k: int) -> BSeq:
        return self.base.shift(self.offset + k)


@dataclass(frozen=True)
class Concat(BSeq):
    """finite head followed by another B-sequence."""

    head: tuple
    rest: BSeq

    def digit(self, k: int) -> int:
        if k < len(self.head):
            return self.head[k]
        return self.rest.digit(k - len(self.head))

    def ones_before(self, k: int) -> int:
        n = len(self.head)
        if k <= n:
            return sum(self.head[:k])
        return sum(self.head) + self.rest.ones_before(k - n)

    def shift(self, k: int) -> BSeq:
        if k >= len(self.head):
            return self.rest.shift(k - len(self.head))
        return Concat(self.head[k:], self.rest)

    @property
    def eventually_periodic(self) -> bool:
        return self.rest.eventually_periodic


def concat(head, rest: BSeq) -> BSeq:
    head = tuple(int(b) for b in head)
    if isinstance(rest, Literal):
        return Literal(head + rest.prefix, rest.cycle)
    return Concat(head, rest) if head else rest


def build_nonlanding(tau, ks) -> Generator:
    """The B-sequence tau 1 1 0^{k_1} 1 1 0^{k_2} 1 1 0^{k_3} ..."""
    return Generator(tuple(tau), tuple(ks))


def bracket_seqs(T: Generator, n: int, mode: str = "periodic") -> tuple[Literal, Literal]:
    """Sequences bracketing T from below and above at block n.

    ``mode="periodic"``: s_n = (tau 11 0^{k_1} ... 11 0^{k_n} 0)^inf and r_n the same
    block ending in 1, both repeated. ``mode="tail"``: the block followed by the
    cycle 0^64 1 (for s_n) or (1) (for r_n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if T.tail is not None and n > len(T.ks):
        raise ValueError(f"T has only {len(T.ks)} blocks")
    block = tuple(T.prefix_digits(n))
    if mode == "periodic":
        return Literal((), block + (0,)), Literal((), block + (1,))
    if mode == "tail":
        return Literal(block, (0,) * 64 + (1,)), Literal(block, (1,))
    raise ValueError(f"unknown bracket mode {mode!r}")


# ---------------------------------------------------------------------------
# A-sequences


@dataclass(frozen=True)
class ASeq:
    """The lift of ``base`` whose first subscript is ``lift`` (1 = lower, 2 = upper)."""

    base: BSeq
    lift_index: int = 1

    def __post_init__(self):
        if self.lift_index not in (1, 2):
            raise SequenceError("lift index must be 1 or 2")

    def bit(self, k: int) -> int:
        """k-th binary digit (1-based) of the boundary angle."""
        b1 = 1 if self.lift_index == 1 else 0
        return b1 ^ (self.base.ones_before(k - 1) & 1)

    def symbol(self, k: int) -> Sym:
        return Sym.of(self.base.digit(k), 1 if self.bit(k + 1) else 2)

    def symbols(self, n: int, start: int = 0) -> list[Sym]:
        out = []
        if n <= 0:
            return out
        b = self.bit(start + 1)
        for k in range(start, start + n):
            d = self.base.digit(k)
            out.append(Sym.of(d, 1 if b else 2))
            b ^= d
        return out

    def __getitem__(self, k: int) -> Sym:
        return self.symbol(k)

    def swapped(self) -> "ASeq":
        return ASeq(self.base, 3 - self.lift_index)

    def shift(self, k: int) -> "ASeq":
        if k == 0:
            return self
        return ASeq(self.base.shift(k), self.symbol(k).sub)

    @property
    def eventually_periodic(self) -> bool:
        return self.base.eventually_periodic

    def __str__(self) -> str:
        if isinstance(self.base, Literal):
            pre = [self.symbol(k) for k in range(len(self.base.prefix))]
            n = len(self.base.prefix)
            L = len(self.base.cycle)
            if sum(self.base.cycle) % 2:
                L *= 2
            cyc = self.symbols(L, start=n)
            head = " ".join(map(str, pre))
            return (head + " " if head else "") + "(" + " ".join(map(str, cyc)) + ")"
        return " ".join(map(str, self.symbols(24))) + " ..."

    @classmethod
    def from_symbols(cls, prefix, cycle) -> "ASeq":
        """A-sequence given explicitly as prefix + cycle of extended symbols."""
        pre = [s if isinstance(s, Sym) else Sym.parse(s) for s in prefix]
        cyc = [s if isinstance(s, Sym) else Sym.parse(s) for s in cycle]
        if not cyc:
            raise SequenceError("cycle must be non-empty")
        full = pre + cyc + cyc[:1]
        if not is_allowable(full):
            raise SequenceError("sequence is not allowable under the transition matrix")
        seq = cls(Literal([s.digit for s in pre], [s.digit for s in cyc]), full[0].sub)
        if seq.symbols(len(full)) != full:
            raise SequenceError("cycle does not close up consistently")
        return seq


def project(s: ASeq) -> BSeq:
    """Erase subscripts."""
    return s.base


def lift(t: BSeq, which: int = 1) -> ASeq:
    """The A-sequence over t whose first subscript is ``which``.

    Sequences ending in all zeros are rejected: no point has such an itinerary.
    (ASeq itself accepts them as formal sequences, e.g. for angle bookkeeping.)
    """
    if isinstance(t, Literal) and t.ends_in_zeros:
        raise SequenceError("sequences ending in all zeros have no A-itinerary")
    return ASeq(t, which)


def shift(s, k: int = 1):
    return s.shift(k)


# ---------------------------------------------------------------------------
# angles


def _bits_periodic(s: ASeq) -> tuple[list[int], list[int]]:
    """Binary expansion of the angle of an eventually periodic A-sequence as (prefix, cycle)."""
    base = s.base
    if not isinstance(base, Literal):
        raise SequenceError("exact angles need an eventually periodic sequence")
    P = len(base.prefix)
    L = len(base.cycle) * (1 if sum(base.cycle) % 2 == 0 else 2)
    bits = [s.bit(k) for k in range(1, P + L + 2)]
    # bit_{k+1} depends on digits before k; periodic from bit_{P+1} on
    return bits[:P], bits[P:P + L]


def _fraction_of_bits(prefix: list[int], cycle: list[int]) -> Fraction:
    p = len(prefix)
    q = len(cycle)
    head = int("".join(map(str, prefix)), 2) if prefix else 0
    cyc = int("".join(map(str, cycle)), 2) if cycle else 0
    return Fraction(head, 2 ** p) + Fraction(cyc, (2 ** q - 1) * 2 ** p)


def angle_of(s: ASeq) -> Fraction:
    """Exact angle in [0, 1) (angle 1 is reported as 0) of an eventually periodic A-sequence."""
    th = _fraction_of_bits(*_bits_periodic(s))
    return th % 1


def angle_bounds(s: ASeq, nbits: int = 200) -> tuple[Fraction, Fraction]:
    """Exact enclosing interval of the angle from its first ``nbits`` binary digits."""
    bits = [s.bit(k) for k in range(1, nbits + 1)]
    lo = Fraction(int("".join(map(str, bits)), 2), 2 ** nbits)
    return lo, lo + Fraction(1, 2 ** nbits)


QUARTERS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))

_PAIR_TO_SYM = {(1, 1): Sym.Z1, (1, 0): Sym.O1, (0, 1): Sym.O2, (0, 0): Sym.Z2}

# open arcs of the circle carrying each symbol
ARC_OF = {
    Sym.Z2: (Fraction(0), Fraction(1, 4)),
    Sym.O2: (Fraction(1, 4), Fraction(1, 2)),
    Sym.O1: (Fraction(1, 2), Fraction(3, 4)),
    Sym.Z1: (Fraction(3, 4), Fraction(1)),
}


def doubling_orbit(theta: Fraction) -> tuple[list[Fraction], int]:
    """Orbit of theta under doubling mod 1 and the index where it starts repeating."""
    seen = {}
    orbit = []
    x = Fraction(theta) % 1
    while x not in seen:
        seen[x] = len(orbit)
        orbit.append(x)
        x = (2 * x) % 1
    return orbit, seen[x]


def itinerary_of_angle(theta: Fraction) -> ASeq:
    """A-sequence of the boundary point with angle theta (rational, off the quarter orbit)."""
    orbit, start = doubling_orbit(Fraction(theta))
    if any(x in QUARTERS for x in orbit):
        raise BoundaryAngleError(f"doubling orbit of {theta} meets a quarter point")
    bits = [1 if x >= Fraction(1, 2) else 0 for x in orbit]
    # bits[k] is binary digit k+1; digit_k = bit_{k+1} XOR bit_{k+2}
    P, L = start, len(orbit) - start
    extended = bits + bits[start:start + L] + bits[start:start + 1]
    digits = [extended[k] ^ extended[k + 1] for k in range(P + L)]
    return ASeq(Literal(digits[:P], digits[P:P + L]), 1 if bits[0] else 2)


# ---------------------------------------------------------------------------
# text grammar

_LIT_RE = re.compile(r"^\s*([01]*)\s*\(\s*([01]+)\s*\)\s*$")


def parse_bseq(text: str) -> BSeq:
    """``PREFIX(CYCLE)`` such as ``101(10)``, or ``tau=1;ks=2,3,5``."""
    m = _LIT_RE.match(text)
    if m:
        return Literal([int(c) for c in m.group(1)], [int(c) for c in m.group(2)])
    if "ks=" in text:
        fields = dict(part.split("=", 1) for part in text.replace(" ", "").split(";") if part)
        tau = [int(c) for c in fields.get("tau", "")]
        ks = [int(k) for k in fields["ks"].split(",") if k]
        tail = parse_bseq(fields["tail"]) if "tail" in fields else None
        return Generator(tuple(tau), tuple(ks), tail)
    raise SequenceError(f"cannot parse sequence {text!r}")
