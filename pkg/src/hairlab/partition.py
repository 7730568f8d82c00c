"""Partition curves zeta_j, eta_{+-1} and classification into strips and refined regions.

Every curve is a level set of the continuous argument

    Theta(x + iy) = y + atan2(y, x - (1 - a)),

which equals arg f_a(x + iy) modulo 2 pi: zeta_j is {Theta = 2 pi j}, eta_{+-1}
is {Theta = +-pi, x >= -a}, and the refined regions are Theta-bands:
T_{0_2} = (0, pi), T_{1_2} = (pi, 2 pi) for y > 0, mirrored for y < 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .mapcore import LOG_MAX, FOverflowError, LogPolar, _a_of, eval_f, eval_f_logpolar
from .symbolic import Sym

ZETA = "zeta"
ETA = "eta"
TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class CurveId:
    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in (ZETA, ETA):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.kind == ETA and self.index not in (-1, 1):
            raise ValueError("eta curves are indexed by -1 or +1")

    def __str__(self) -> str:
        return f"{self.kind}{self.index:+d}" if self.index else f"{self.kind}0"


REAL_AXIS = "real-axis"


@dataclass(frozen=True)
class RegionLabel:
    """Strip(j), Refined(sym) or Boundary(curve or real axis)."""

    kind: str  # "strip" | "refined" | "boundary"
    strip: int | None = None
    sym: Sym | None = None
    curve: object = None

    @classmethod
    def refined(cls, sym: Sym) -> "RegionLabel":
        return cls("refined", sym=sym)

    @classmethod
    def strip_(cls, j: int) -> "RegionLabel":
        return cls("strip", strip=j)

    @classmethod
    def boundary(cls, curve) -> "RegionLabel":
        return cls("boundary", curve=curve)

    @property
    def is_refined(self) -> bool:
        return self.kind == "refined"

    def __str__(self) -> str:
        if self.kind == "refined":
            return self.sym.label
        if self.kind == "strip":
            return f"T{self.strip}"
        return f"boundary({self.curve})"


# sentinel strip index for images too large to place
HUGE_STRIP = 10**9


def theta(z: complex, a: float) -> float:
    """Continuous argument of f_a along vertical lines (see module docstring)."""
    y = z.imag
    return y + math.atan2(y, z.real - (1.0 - a))


def _theta_y(x: float, y: float, a: float) -> float:
    return y + math.atan2(y, x - (1.0 - a))


def eq1_residual(x: float, y: float, a: float) -> float:
    """(x - (1 - a)) sin y + y cos y: zero exactly on preimages of the real line."""
    return (x - (1.0 - a)) * math.sin(y) + y * math.cos(y)


def eq1_image_sign(x: float, y: float, a: float) -> float:
    """(x - (1 - a)) cos y - y sin y: positive on preimages of R+, negative on R-."""
    return (x - (1.0 - a)) * math.cos(y) - y * math.sin(y)


def solve_theta_level(x: float, level: float, a: float) -> float:
    """y with Theta(x + iy) = level, taking the branch on which Theta increases in y.

    Levels with |level| > pi have a unique solution for every x (it lies in
    (|level| - pi, |level|)). Levels in (0, pi) need x > 1 - a; level pi (the
    eta curves) needs x > -a.
    """
    if level == 0.0:
        if x <= 1.0 - a:
            raise ValueError("Theta = 0 off the real axis needs x > 1 - a")
        return 0.0
    sgn = 1.0 if level > 0 else -1.0
    lev = abs(level)
    c = x - (1.0 - a)
    if lev > math.pi:
        lo, hi = max(lev - math.pi, 1e-300), lev
    elif c > 0:
        lo, hi = 1e-300, min(lev, math.pi)
    elif lev == math.pi and c > -1.0:
        # Theta(0+) = pi here and dips below pi before rising; start past the dip
        lo, hi = max(math.sqrt(max(-c - c * c, 0.0)), 1e-300), math.pi
    else:
        raise ValueError(f"Theta level {level} is not single-valued at x = {x}")
    g = lambda y: _theta_y(x, y, a) - lev  # noqa: E731
    y = brentq(g, lo, hi, xtol=5e-16)
    y = _polish_theta(x, y, lev, a)
    return sgn * y


def _polish_theta(x: float, y: float, lev: float, a: float) -> float:
    c = x - (1.0 - a)
    for _ in range(2):
        d = 1.0 + c / (c * c + y * y)
        if d <= 0:
            break
        yn = y - (_theta_y(x, y, a) - lev) / d
        if abs(_theta_y(x, yn, a) - lev) <= abs(_theta_y(x, y, a) - lev):
            y = yn
        else:
            break
    return y


def curve_y(curve: CurveId, x: float, p) -> float:
    """Ordinate of the partition curve ``curve`` above abscissa ``x``."""
    a = _a_of(p)
    if curve.kind == ZETA:
        j = curve.index
        if j == 0:
            if x <= 1.0 - a:
                raise ValueError(f"zeta_0 is defined for x > 1 - a only (x={x})")
            return 0.0
        return solve_theta_level(x, TWO_PI * j, a)
    if x < -a:
        raise ValueError(f"eta curves are defined for x >= -a only (x={x})")
    if x == -a:
        return 0.0
    return solve_theta_level(x, math.pi * curve.index, a)


def _region_of_theta(th: float, upper: bool) -> RegionLabel:
    if upper:
        if th < math.pi:
            return RegionLabel.refined(Sym.Z2)
        if th < TWO_PI:
            return RegionLabel.refined(Sym.O2)
        return RegionLabel.strip_(int(math.floor(th / TWO_PI)) + 1)
    if th > -math.pi:
        return RegionLabel.refined(Sym.Z1)
    if th > -TWO_PI:
        return RegionLabel.refined(Sym.O1)
    return RegionLabel.strip_(int(math.ceil(th / TWO_PI)))


def _nearest_curve(th: float, x: float, a: float):
    """Nearest partition curve to a Theta value (ignoring the real axis)."""
    k = round(th / math.pi)
    if k == 0:
        return None
    if k % 2 == 0:
        return CurveId(ZETA, k // 2)
    if abs(k) == 1 and x >= -a:
        return CurveId(ETA, k)
    return None


def classify(z: complex, p, tol: float = DEFAULT_TOL) -> RegionLabel:
    """Region label of z; points within ``tol`` (in Im, at fixed Re) of a curve are Boundary."""
    a = _a_of(p)
    z = complex(z)
    x, y = z.real, z.imag
    if abs(y) <= tol:
        return RegionLabel.boundary(REAL_AXIS)
    th = _theta_y(x, y, a)
    curve = _nearest_curve(th, x, a)
    if curve is not None:
        k = round(th / math.pi)
        c = x - (1.0 - a)
        slope = 1.0 + c / (c * c + y * y)
        if abs(th - k * math.pi) <= max(1e-3, 10 * tol * abs(slope)):
            yc = curve_y(curve, x, a)
            if abs(y - yc) <= tol:
                return RegionLabel.boundary(curve)
    return _region_of_theta(th, y > 0)


def classify_logpolar(w: LogPolar, p, tol: float = DEFAULT_TOL) -> RegionLabel:
    """Classify a point given in log-polar form (typically an unrepresentable image)."""
    a = _a_of(p)
    if w.logmag <= LOG_MAX:
        return classify(w.to_complex(), a, tol)
    s = math.sin(w.arg)
    co = math.cos(w.arg)
    if s == 0.0:
        return RegionLabel.boundary(REAL_AXIS)
    e = w.logmag + math.log(abs(s))
    if e > LOG_MAX:
        return RegionLabel.strip_(HUGE_STRIP)
    im = math.copysign(math.exp(e), s)
    if abs(im) <= tol:
        return RegionLabel.boundary(REAL_AXIS)
    if abs(im) > TWO_PI + 1:
        return RegionLabel.strip_(HUGE_STRIP)
    # |Re| is beyond the double range: the atan2 term is 0 (right) or +-pi (left)
    th = im + math.atan2(im, math.copysign(1e308, co))
    return _region_of_theta(th, im > 0)


@dataclass
class Itinerary:
    labels: list
    status: str  # "complete" | "boundary" | "strip" | "overflow"

    @property
    def symbols(self) -> list:
        return [lab.sym for lab in self.labels if lab.is_refined]

    def __len__(self) -> int:
        return len(self.labels)


def itinerary(z: complex, depth: int, p, tol: float = DEFAULT_TOL) -> Itinerary:
    """Labels of z, f(z), ..., f^{depth-1}(z); stops early at a Boundary or a strip T_j."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    a = _a_of(p)
    labels = []
    cur: complex | LogPolar = complex(z)
    for _ in range(depth):
        lab = classify_logpolar(cur, a, tol) if isinstance(cur, LogPolar) else classify(cur, a, tol)
        labels.append(lab)
        if lab.kind == "boundary":
            return Itinerary(labels, "boundary")
        if lab.kind == "strip":
            return Itinerary(labels, "strip")
        if isinstance(cur, LogPolar):
            try:
                cur = cur.to_complex()
            except FOverflowError:
                return Itinerary(labels, "overflow")
        try:
            cur = eval_f(cur, a)
        except FOverflowError:
            cur = eval_f_logpolar(cur, a)
    return Itinerary(labels, "complete")


def sample_curves(p, x0: float, x1: float, n: int = 200, js=(-2, -1, 0, 1, 2)) -> list:
    """(curve, x, y) samples of zeta_j for j in ``js`` and eta_{+-1} on a uniform grid."""
    a = _a_of(p)
    xs = [x0 + (x1 - x0) * k / (n - 1) for k in range(n)] if n > 1 else [x0]
    out = []
    curves = [CurveId(ZETA, j) for j in js] + [CurveId(ETA, 1), CurveId(ETA, -1)]
    for c in curves:
        for x in xs:
            if c.kind == ZETA and c.index == 0 and x <= 1.0 - a:
                continue
            if c.kind == ETA and x < -a:
                continue
            out.append((c, x, curve_y(c, x, a)))
    return out
