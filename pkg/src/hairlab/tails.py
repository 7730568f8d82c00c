"""Tails over [R, oo), their bases, the target boxes V(xi, eta) and polyline utilities.

A tail point above abscissa x is found in the phase phi of its image: writing
Theta(z) = 2 pi m + phi (m = 0 for T_0, +-1 for T_1) the image is
f(z) = e^L e^{i phi}, and z lies on the tail of t iff the image lies on the tail
of sigma(t), i.e. phi = atan2(Y(X), X) with X = e^L cos phi and Y the next tail.
Because |f| grows doubly exponentially along tails, the recursion bottoms out
after a few levels, where phi falls below double resolution and the tail is its
asymptote: the real axis for T_0 and zeta_{+-1}(x) for T_1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .mapcore import LOG_MAX, LogPolar, _a_of, eval_f_logpolar
from .partition import TWO_PI, ZETA, CurveId, curve_y, solve_theta_level
from .symbolic import ASeq, Literal, Sym

# phi underflows (relative to a y of order 1e-300) past this image logmag
_T0_CUTOFF = 700.0
_T1_REL = 1e-17
MAX_FIXED_POINT = 60


class DomainError(ValueError):
    pass


class TailUniquenessError(RuntimeError):
    """Two sign changes of the tail equation inside one strip."""


def _m_of(sym: Sym) -> int:
    if sym.digit == 0:
        return 0
    return 1 if sym.sub == 2 else -1


def _y_of_phi(x: float, m: int, phi: float, a: float) -> float:
    """y with Theta(x + iy) = 2 pi m + phi (x > 1 - a), accurate to relative precision for m = 0."""
    if m != 0:
        return solve_theta_level(x, TWO_PI * m + phi, a)
    if phi == 0.0:
        return 0.0
    c = x - (1.0 - a)
    y = phi * c / (1.0 + c)
    for _ in range(50):
        g = y + math.atan2(y, c) - phi
        yn = y - g / (1.0 + c / (c * c + y * y))
        if yn == y or abs(yn - y) <= 1e-17 * abs(y):
            return yn
        y = yn
    return y


def _logmag(x: float, y: float, a: float) -> float:
    c = x - (1.0 - a)
    return math.log(a) + x + a + 0.5 * math.log(c * c + y * y)


# ---------------------------------------------------------------------------
# choice of R and targets


def _target_inequalities(xi: float, eta_log: float, a: float) -> tuple[float, float]:
    """Margins (in logs) of the two wall inequalities behind the target nesting.

    left:  log(xi_next - 1) - log|f(xi - 1 + i zeta_1(xi - 1))|  (> 0 wanted)
    right: log f(eta + 1) - log(eta_next + 1)                 (> 0 wanted)

    Both are written as differences of the log-modulus formula, so the unit shift in
    the exponent survives when xi or eta are too large to resolve xi - 1 or eta + 1.
    """
    c = 1.0 - a
    xl = xi - 1.0
    yl = curve_y(CurveId(ZETA, 1), xl, a)
    xi_next = eval_f_logpolar(complex(xi, 0.0), a).logmag
    left = 1.0 + math.log(xi - c) - 0.5 * math.log((xl - c) ** 2 + yl * yl) + (_log_minus_one(xi_next) - xi_next)
    if eta_log > LOG_MAX:
        return left, math.nan
    eta = math.exp(eta_log)
    ye = curve_y(CurveId(ZETA, 1), eta, a)
    eta_next = eval_f_logpolar(complex(eta, ye), a).logmag
    right = 1.0 + math.log(eta + 1.0 - c) - 0.5 * math.log((eta - c) ** 2 + ye * ye) - (_log_plus_one(eta_next) - eta_next)
    return left, right


def _log_minus_one(L: float) -> float:
    return L + math.log1p(-math.exp(-L)) if L < 40 else L


def _log_plus_one(L: float) -> float:
    return L + math.log1p(math.exp(-L)) if L < 40 else L


def _R_ok(R: float, a: float) -> bool:
    fR = eval_f_logpolar(complex(R, 0.0), a).logmag
    if not fR > math.log(100.0 * (R + TWO_PI)):
        return False
    eta0 = eval_f_logpolar(complex(R, curve_y(CurveId(ZETA, 1), R, a)), a).logmag
    left, right = _target_inequalities(R, eta0, a)
    return left > 0 and right > 0


def choose_R(p) -> float:
    """Smallest R in {5, 6, ...} with f(R) > 100 (R + 2 pi) and both target wall
    inequalities holding at level 0."""
    a = _a_of(p)
    R = 5
    while not _R_ok(float(R), a):
        R += 1
        if R > 1000:
            raise DomainError(f"no admissible R found for a={a}")
    return float(R)


@dataclass(frozen=True)
class TargetBox:
    """V(xi_n, eta_{n+l}): Re in (xi - 1, eta + 1), between zeta_{-1} and zeta_1.

    Both abscissas are stored as natural logs; ``xi``/``eta`` give floats (inf when
    beyond the double range).
    """

    n: int
    ell: int
    log_xi: float
    log_eta: float

    @property
    def xi(self) -> float:
        return math.exp(self.log_xi) if self.log_xi <= LOG_MAX else math.inf

    @property
    def eta(self) -> float:
        return math.exp(self.log_eta) if self.log_eta <= LOG_MAX else math.inf

    @property
    def walls(self) -> tuple[float, float]:
        return self.xi - 1.0, self.eta + 1.0

    def contains(self, z: complex, a: float) -> bool:
        lo, hi = self.walls
        if not lo < z.real < hi:
            return False
        return abs(z.imag) < curve_y(CurveId(ZETA, 1), z.real, a)


def _next_log(L: float, a: float, on_zeta: bool) -> float:
    """log of f(X) (on_zeta False) or |f(X + i zeta_1(X))| for X = e^L."""
    if L > LOG_MAX:
        return math.inf
    X = math.exp(L)
    y = curve_y(CurveId(ZETA, 1), X, a) if on_zeta else 0.0
    return _logmag(X, y, a)


def xi_log(n: int, p) -> float:
    a = _a_of(p)
    R = p.R if hasattr(p, "R") else choose_R(a)
    L = math.log(R)
    for _ in range(n):
        L = _next_log(L, a, False)
    return L


def eta_log(m: int, p) -> float:
    a = _a_of(p)
    R = p.R if hasattr(p, "R") else choose_R(a)
    L = eval_f_logpolar(complex(R, curve_y(CurveId(ZETA, 1), R, a)), a).logmag
    for _ in range(m):
        L = _next_log(L, a, True)
    return L


def target_bounds(n: int, ell: int, p) -> TargetBox:
    if n < 0 or ell < 0:
        raise ValueError("n and ell must be >= 0")
    return TargetBox(n, ell, xi_log(n, p), eta_log(n + ell, p))


def nesting_margins(n: int, p) -> tuple[float, float]:
    """Log margins of the two wall inequalities for V(xi_n, eta_n) (nan when not representable)."""
    a = _a_of(p)
    lx = xi_log(n, p)
    if lx > LOG_MAX:
        return math.nan, math.nan
    return _target_inequalities(math.exp(lx), eta_log(n, p), a)


# ---------------------------------------------------------------------------
# tails


class TailCurve:
    """The tail omega_t over [R, oo) as a lazily solved graph x -> y(x)."""

    def __init__(self, itinerary: ASeq, p, R: float | None = None):
        if isinstance(itinerary.base, Literal) and itinerary.base.ends_in_zeros:
            raise DomainError("itineraries ending in all zeros have no tail")
        self.itinerary = itinerary
        self.a = _a_of(p)
        self.R = float(R if R is not None else (p.R if hasattr(p, "R") else choose_R(self.a)))
        self.params = p
        self.memo: dict[float, float] = {}
        self.sym = itinerary.symbol(0)
        nxt = itinerary.symbol(1)
        self.m = _m_of(self.sym)
        self.side = 1 if nxt.sub == 2 else -1
        self._next = None

    @property
    def next(self) -> "TailCurve":
        if self._next is None:
            self._next = TailCurve(self.itinerary.shift(1), self.params, self.R)
        return self._next

    def asymptote(self, x: float) -> float:
        """0 for T_0 tails, zeta_{+-1}(x) for T_1 tails (approached from the ``side`` sign)."""
        if self.m == 0:
            return 0.0
        if not math.isfinite(x) or x > 1e17:
            return TWO_PI * self.m
        return _y_of_phi(x, self.m, 0.0, self.a)

    def _negligible(self, x: float, y0: float) -> bool:
        L0 = _logmag(x, y0, self.a) if math.isfinite(x) else math.inf
        if self.m == 0:
            return L0 > _T0_CUTOFF
        return L0 > math.log(TWO_PI / (_T1_REL * abs(y0)))

    @property
    def x_asym(self) -> float:
        """Abscissa past which the tail equals its asymptote to double precision."""
        def g(x):
            return 1.0 if self._negligible(x, self.asymptote(x)) else -1.0

        hi = self.R
        while g(hi) < 0:
            hi *= 2.0
        if hi == self.R:
            return self.R
        return brentq(g, self.R, hi, xtol=1e-9)

    def y(self, x: float) -> float:
        if x < self.R:
            raise DomainError(f"tail abscissa {x} is left of R={self.R}")
        hit = self.memo.get(x)
        if hit is not None:
            return hit
        v = self._solve(x)
        self.memo[x] = v
        return v

    def _solve(self, x: float) -> float:
        y0 = self.asymptote(x)
        if not math.isfinite(x) or self._negligible(x, y0):
            return y0
        a = self.a
        phi = 0.0
        y = y0
        for _ in range(MAX_FIXED_POINT):
            L = _logmag(x, y, a)
            X = math.exp(L) * math.cos(phi)
            Y = self.next.y(X)
            if (Y > 0) != (self.side > 0) and Y != 0.0:
                raise TailUniquenessError(f"next tail on the wrong side at X={X}")
            phi_new = math.atan2(Y, X)
            y_new = _y_of_phi(x, self.m, phi_new, a)
            if phi_new == phi or abs(phi_new - phi) <= 1e-16 * abs(phi_new):
                return y_new
            phi, y = phi_new, y_new
        return y

    def point(self, x: float) -> complex:
        return complex(x, self.y(x))

    def residual(self, x: float) -> float:
        """|f(z) - tail_{sigma t}(Re f(z))| / max(1, |f(z)|) at z on this tail."""
        z = self.point(x)
        w = eval_f_logpolar(z, self.a)
        if w.logmag > LOG_MAX:
            return 0.0
        fz = w.to_complex()
        return abs(fz.imag - self.next.y(fz.real)) / max(1.0, abs(fz))

    def sample(self, xs) -> np.ndarray:
        return np.array([complex(x, self.y(float(x))) for x in xs], dtype=complex)

    def root_count(self, x: float, step: float = 1e-3) -> int:
        """Roots of the tail equation in y across the closed strip of t_0, scanned at ``step``.

        Values within 1e-12 of zero (relative to |f|) count as roots; this matters for
        T_1 tails, which sit on zeta_{+-1} to double precision once the next tail does.
        """
        a = self.a
        lo, hi = _strip_y_range(self.sym, x, a)
        ys = np.concatenate([[lo], np.arange(lo + step / 2, hi, step), [hi]])
        signs = []
        for y in ys:
            w = eval_f_logpolar(complex(x, float(y)), a)
            if w.logmag > LOG_MAX:
                continue
            fz = w.to_complex()
            if fz.real < self.R:
                continue
            v = (fz.imag - self.next.y(fz.real)) / max(1.0, abs(fz))
            signs.append(0 if abs(v) < 1e-12 else (1 if v > 0 else -1))
        roots, prev, zero_run, zero_since = 0, 0, False, False
        for sg in signs:
            if sg == 0:
                if not zero_run:
                    roots += 1
                zero_run = zero_since = True
                continue
            if prev and sg != prev and not zero_since:
                roots += 1
            prev, zero_run, zero_since = sg, False, False
        return roots


def _strip_y_range(sym: Sym, x: float, a: float) -> tuple[float, float]:
    z1 = curve_y(CurveId(ZETA, 1), x, a)
    eta = solve_theta_level(x, math.pi, a)
    return {
        Sym.Z2: (0.0, eta),
        Sym.O2: (eta, z1),
        Sym.Z1: (-eta, 0.0),
        Sym.O1: (-z1, -eta),
    }[sym]


def tail_point(t: ASeq, x: float, p) -> complex:
    return TailCurve(t, p).point(x)


# ---------------------------------------------------------------------------
# polylines


@dataclass
class Polyline:
    points: np.ndarray
    level: np.ndarray = None
    param: np.ndarray = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        n = len(self.points)
        if self.level is None:
            self.level = np.zeros(n, dtype=int)
        if self.param is None:
            self.param = self.points.real.copy()
        self.level = np.asarray(self.level, dtype=int)
        self.param = np.asarray(self.param, dtype=float)

    def __len__(self) -> int:
        return len(self.points)


def geometric_grid(x0: float, x1: float, n: int) -> np.ndarray:
    if n < 2:
        return np.array([x0])
    return np.geomspace(x0, x1, n)


def base_cutoff(p) -> float:
    """|f(R + i zeta_1(R))|, the radius bounding the base region F_R."""
    a = _a_of(p)
    R = p.R if hasattr(p, "R") else choose_R(a)
    return LogPolar(eta_log(0, p), 0.0).to_complex().real


def base_polyline(t: ASeq, p, samples: int = 64) -> Polyline:
    """The base of the tail: tail vertices with |z| below the F_R radius; the last vertex
    sits just past the boundary circle so the polyline spans the whole base."""
    tail = TailCurve(t, p)
    rho = base_cutoff(p)
    y_end = tail.y(rho)
    x_end = math.sqrt(max(rho * rho - y_end * y_end, tail.R * tail.R))
    xs = geometric_grid(tail.R, x_end * (1.0 + 1e-9), samples)
    return Polyline(tail.sample(xs), np.zeros(samples, dtype=int), xs)


def tail_polyline(t: ASeq, p, x_top: float, ratio: float = 1.25) -> Polyline:
    """Tail sampled geometrically from R to x_top."""
    tail = TailCurve(t, p)
    xs = [tail.R]
    while xs[-1] * ratio < x_top:
        xs.append(xs[-1] * ratio)
    xs.append(x_top)
    xs = np.array(xs)
    return Polyline(tail.sample(xs), np.zeros(len(xs), dtype=int), xs)


def crossing_count(poly, c: float) -> int:
    """Transversal crossings of the vertical line Re = c (touches do not count)."""
    pts = poly.points if isinstance(poly, Polyline) else np.asarray(poly, dtype=complex)
    pts = pts[np.isfinite(pts)]
    s = np.sign(pts.real - c)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))
