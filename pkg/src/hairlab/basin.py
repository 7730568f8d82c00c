"""The immediate basin of -a: quadratic-like check, trap disk and boundary points p(s)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .inverse import inverse_branch_array, pullback
from .mapcore import _a_of, eval_f, real_fixed_points
from .partition import ZETA, CurveId, curve_y
from .symbolic import (ASeq, BoundaryAngleError, Literal, Sym, angle_of, doubling_orbit,
                       itinerary_of_angle, QUARTERS)
from .tails import Polyline

TWO_PI = 2.0 * math.pi


class NonContraction(RuntimeError):
    pass


@dataclass
class QuadLikeReport:
    a: float
    walls: tuple  # (x_left, x_right)
    left_margin: tuple  # (bound on |f| over the left wall, 1/2)
    right_margin: tuple  # (lower bound on |f| over the right wall, outer radius)
    sampled_ok: bool
    worst_sample: float  # smallest exit distance seen in the sampled check (> 0 is good)

    @property
    def verdict(self) -> bool:
        lb, half = self.left_margin
        rb, outer = self.right_margin
        return lb < half < abs(1.0 - self.a) / 2.0 and rb > outer and self.sampled_ok

    def __str__(self) -> str:
        lb, half = self.left_margin
        rb, outer = self.right_margin
        return (f"a={self.a:g} V_a: {self.walls[0]:.6f} < Re z < {self.walls[1]:.6f}\n"
                f"left wall  |f| <= {lb:.6f} < {half}\n"
                f"right wall |f| >= {rb:.6f} > {outer:.6f}\n"
                f"boundary samples mapped outside: {self.sampled_ok}\n"
                f"{'PASS' if self.verdict else 'FAIL'}")


def va_walls(p) -> tuple[float, float]:
    a = _a_of(p)
    return -a - 6.0 * math.log(a), (1.0 - a) / 2.0


def in_va(z: complex, p) -> bool:
    a = _a_of(p)
    xl, xr = va_walls(a)
    if not xl < z.real < xr:
        return False
    return abs(z.imag) < curve_y(CurveId(ZETA, 1), z.real, a)


def va_boundary_samples(p, n: int = 400) -> np.ndarray:
    a = _a_of(p)
    xl, xr = va_walls(a)
    k = n // 4
    zeta = lambda x: curve_y(CurveId(ZETA, 1), x, a)  # noqa: E731
    xs = np.linspace(xl, xr, k)
    top = np.array([complex(x, zeta(x)) for x in xs])
    bottom = top.conj()
    left = np.linspace(-zeta(xl), zeta(xl), k) * 1j + xl
    right = np.linspace(-zeta(xr), zeta(xr), n - 3 * k) * 1j + xr
    return np.concatenate([top, right, bottom[::-1], left[::-1]])


def verify_quadratic_like(p, samples: int = 400) -> QuadLikeReport:
    a = _a_of(p)
    xl, xr = va_walls(a)
    left = math.sqrt((1.0 + 6.0 * math.log(a)) ** 2 + 4.0 * math.pi ** 2) / a ** 5
    right = a * math.exp((a + 1.0) / 2.0) * abs(1.0 - a) / 2.0
    outer = math.sqrt((a + 6.0 * math.log(a)) ** 2 + 4.0 * math.pi ** 2)
    ok = True
    worst = math.inf
    for z in va_boundary_samples(a, samples):
        w = eval_f(complex(z), a)
        if in_va(w, a):
            ok = False
        # distance outside V_a measured in Re (walls) or to the real image of top/bottom
        worst = min(worst, max(w.real - xr, xl - w.real, abs(w) - outer, 0.0) if not in_va(w, a) else -1.0)
    return QuadLikeReport(a, (xl, xr), (left, 0.5), (right, outer), ok, worst)


def trap_disk(p, samples: int = 720, retries: int = 6) -> float:
    """Radius r of a disk about -a mapped strictly inside itself (r = 1/(4a), halved on failure)."""
    a = _a_of(p)
    r = 1.0 / (4.0 * a)
    ang = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    for _ in range(retries + 1):
        z = -a + r * np.exp(1j * ang)
        w = a * (z - (1.0 - a)) * np.exp(z + a)
        if np.max(np.abs(w + a)) < r:
            return r
        r /= 2.0
    raise RuntimeError(f"trap disk verification failed for a={a}")


# ---------------------------------------------------------------------------
# boundary points


def anchor(sym: Sym, p) -> complex:
    """A fixed seed inside T_sym next to -a (c = Re z - (1 - a) = -0.7 or -1.3)."""
    a = _a_of(p)
    x = -a + 0.3 if sym.digit == 0 else -a - 0.3
    y = 0.3 if sym.sub == 2 else -0.3
    return complex(x, y)


@dataclass
class BoundaryPoint:
    z: complex
    itinerary: ASeq
    angle: object
    residual: float  # last Cauchy gap
    gaps: list = None


def _is_all_zero(s: ASeq) -> bool:
    return isinstance(s.base, Literal) and s.base.ends_in_zeros


def boundary_point(s, depth: int = 60, p=None, step: int = 4, seed=None, tol: float = 1e-12) -> BoundaryPoint:
    """p(s) as the limit of pullbacks of a fixed anchor along s_0 ... s_{l-1}.

    ``s`` may be an ASeq or the literal ``Literal((), (0,))``, which returns p_a.
    """
    if isinstance(s, Literal):
        if s.ends_in_zeros:
            q, pa = real_fixed_points(p)
            return BoundaryPoint(complex(pa, 0.0), None, Fraction(0), 0.0, [])
        raise TypeError("pass an ASeq (use lift) for non-degenerate sequences")
    if _is_all_zero(s):
        raise ValueError("sequences ending in all zeros have no A-itinerary")
    try:
        ang = angle_of(s)
    except Exception:
        ang = None
    syms = s.symbols(depth + 1)
    zs = []
    gaps = []
    for ell in range(step, depth + 1, step):
        w = anchor(syms[ell], p)
        if seed is not None:
            # a user seed is used up to conjugation, so it sits in the half plane the branch needs
            w = complex(seed) if (complex(seed).imag > 0) == (w.imag > 0) else complex(seed).conjugate()
        zs.append(pullback(syms[:ell], w, p, closure=True))
        if len(zs) > 1:
            gaps.append(abs(zs[-1] - zs[-2]))
            if gaps[-1] < tol:
                break
    if not gaps or gaps[-1] >= 1e-10:
        raise NonContraction(f"no Cauchy convergence within depth {depth} (last gap {gaps[-1] if gaps else None})")
    return BoundaryPoint(zs[-1], s, ang, gaps[-1], gaps)


def boundary_points(seqs: list, p, depth: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized boundary points for many A-sequences; returns (points, last gaps)."""
    n = len(seqs)
    tab = np.array([[sym.value for sym in s.symbols(depth + 1)] for s in seqs], dtype=int)
    out = []
    for ell in (depth - 8, depth):
        cur = np.array([anchor(Sym(v), p) for v in tab[:, ell]], dtype=complex)
        for k in range(ell - 1, -1, -1):
            col = tab[:, k]
            nxt = np.empty(n, dtype=complex)
            for sym in Sym:
                mask = col == sym.value
                if mask.any():
                    nxt[mask] = inverse_branch_array(sym, cur[mask], p)
            cur = nxt
        out.append(cur)
    return out[1], np.abs(out[1] - out[0])


def angle_grid(m: int) -> list[Fraction]:
    """Angles k / (2^m - 1) whose doubling orbits avoid the quarter points (closed under doubling)."""
    if not 1 <= m <= 12:
        raise ValueError("m must be in 1..12")
    den = 2 ** m - 1
    out = []
    for k in range(den):
        th = Fraction(k, den)
        orbit, _ = doubling_orbit(th)
        if not any(x in QUARTERS for x in orbit):
            out.append(th)
    return out


@dataclass
class BoundaryPolyline(Polyline):
    angles: list = None


def boundary_polyline(p, m: int, depth: int = 60) -> BoundaryPolyline:
    angles = angle_grid(m)
    seqs = [itinerary_of_angle(th) for th in angles]
    pts, gaps = boundary_points(seqs, p, depth)
    if np.max(gaps) >= 1e-8:
        raise NonContraction(f"boundary grid not converged (max gap {np.max(gaps):.3g})")
    poly = BoundaryPolyline(pts, np.zeros(len(pts), dtype=int), np.array([float(t) for t in angles]))
    poly.angles = angles
    return poly


def shoelace_area(points: np.ndarray) -> float:
    """Signed area (positive = counterclockwise) of the closed polygon through points."""
    x, y = points.real, points.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def real_crossings(points: np.ndarray) -> list[float]:
    """Abscissas where the closed polygon crosses the real axis (linear interpolation)."""
    out = []
    n = len(points)
    for i in range(n):
        z0, z1 = points[i], points[(i + 1) % n]
        if (z0.imag > 0) != (z1.imag > 0):
            t = z0.imag / (z0.imag - z1.imag)
            out.append(float(z0.real + t * (z1.real - z0.real)))
    return out
