"""Inverse branches g^{0_1}, g^{0_2}, g^{1_1}, g^{1_2} of f_a and pullbacks along A-sequences.

With u = z - (1 - a) we have f_a(z) = a e u e^u, and the continuous argument
Theta(z) = Im u + Arg u satisfies u + Log u = log(w / (a e)) + i (Theta - arg w).
So the preimage of w inside the region with Theta-band (lo, hi) is

    u = omega(log|w| - log a - 1 + i theta),   theta = arg w + 2 pi m in (lo, hi),

where omega is the (single valued) Wright omega function. No seeds or
continuation are needed, and w may be given in log-polar form.

Near the real seams (w almost real with a real preimage) omega only has absolute
accuracy in Im u, which can flip the half plane of tiny imaginary parts. There the
real preimage z_r is solved with Lambert W and Im z = Im w / f'(z_r) restores
full relative precision.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw, wrightomega

from .mapcore import LOG_MAX, MINUS_INF, LogPolar, _a_of, eval_f_logpolar
from .symbolic import Sym

TWO_PI = 2.0 * math.pi
MAX_ITER = 60
CONV_TOL = 1e-14
# linearize about the real preimage while |Im z| <= SEAM_REL * |z_r + a|
SEAM_REL = 1e-6

# Theta band of each refined region, and the 2 pi m added to arg w
BANDS = {
    Sym.Z2: (0.0, math.pi, 0),
    Sym.Z1: (-math.pi, 0.0, 0),
    Sym.O2: (math.pi, TWO_PI, 1),
    Sym.O1: (-TWO_PI, -math.pi, -1),
}

OK, CUT, HALF_PLANE = 0, 1, 2


class CutLineError(ValueError):
    """w lies outside the domain of the requested branch (slit or wrong half plane)."""

    depth = None


class NoConvergenceError(RuntimeError):
    depth = None


@dataclass(frozen=True)
class InverseResult:
    z: complex
    residual: float
    iterations: int
    branch: Sym


def _polish_omega(zeta: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, int]:
    """Fritsch iteration for omega + log omega = zeta; returns (omega, iterations used)."""
    scale = np.maximum(1.0, np.abs(zeta))
    for it in range(MAX_ITER):
        with np.errstate(all="ignore"):
            r = zeta - w - np.log(w)
        done = ~(np.abs(r) > CONV_TOL * scale)
        if done.all():
            return w, it
        q = 2.0 * (1.0 + w) * (1.0 + w + 2.0 * r / 3.0)
        with np.errstate(all="ignore"):
            step = w * (1.0 + r / (1.0 + w) * (q - r) / (q - 2.0 * r))
        w = np.where(done, w, step)
    raise NoConvergenceError("Wright omega iteration did not converge")


def _omega(zeta: np.ndarray, polish: bool = False) -> tuple[np.ndarray, int]:
    deep = zeta.real < -700.0
    safe = np.where(deep, 0.0, zeta)
    w = wrightomega(safe)
    its = 0
    if polish and (~deep).any():
        w2, its = _polish_omega(safe[~deep], w[~deep])
        w = w.copy()
        w[~deep] = w2
    # omega = e^{zeta - omega} and |omega| < 1e-300 in the deep region
    w = np.where(deep, np.exp(np.minimum(zeta.real, 0.0)) * np.exp(1j * zeta.imag), w)
    return w, its


def _clamp_band(theta: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Move thetas outside [lo, hi] to the circularly nearer band edge."""
    out = (theta < lo) | (theta > hi)
    if not out.any():
        return theta
    d_lo = np.abs(np.remainder(theta - lo + math.pi, TWO_PI) - math.pi)
    d_hi = np.abs(np.remainder(theta - hi + math.pi, TWO_PI) - math.pi)
    return np.where(out, np.where(d_lo <= d_hi, lo, hi), theta)


def _solve(b: Sym, ws: np.ndarray, a: float, closure: bool, polish: bool = False):
    """Preimages of complex ws in T_b; returns (z, status, iterations)."""
    lo, hi, m = BANDS[b]
    ws = np.asarray(ws, dtype=complex)
    z = np.full(ws.shape, np.nan + 0j)
    status = np.zeros(ws.shape, dtype=int)
    mag = np.abs(ws)
    zero = mag == 0
    with np.errstate(divide="ignore"):
        log_v = np.log(np.where(zero, 1.0, mag)) - math.log(a) - 1.0
    re, im = ws.real, ws.imag
    neg = (re < 0) & (im == 0)
    pos = (re > 0) & (im == 0)
    theta = np.angle(ws) + TWO_PI * m
    if b.digit == 0:
        theta = np.where(pos, 0.0, theta)
    # the half-plane law, decided on the sign of Im w (arg w rounds onto the band edges)
    want_up = (b.sub == 2) == (b.digit == 0)
    inside = (im > 0 if want_up else im < 0) | neg | (pos & (b.digit == 0))
    if closure:
        theta = _clamp_band(theta, lo, hi)
    else:
        status[~inside] = HALF_PLANE
        if b.digit == 1:
            status[pos] = CUT
    status[neg & ~(log_v < -1.0)] = CUT
    if b.digit == 0:
        z[zero] = 1.0 - a
    else:
        status[zero] = CUT
    todo = (status == OK) & ~zero

    # near-seam inputs: negative reals in (-a, 0) for every branch, all reals for T_0
    seam_side = ((re < 0) & (mag < a)) if b.digit == 1 else (re != 0)
    cand = todo & seam_side & (np.abs(im) <= 1e-3 * mag)
    if cand.any():
        w_c = ws[cand]
        v = w_c.real / (a * math.e)
        k = 0 if b.digit == 0 else -1
        ok_v = (v > -1.0 / math.e) if b.digit == 0 else (v < 0.0)
        u_r = np.where(ok_v, lambertw(np.where(ok_v, v, -0.1), k).real, np.nan)
        zr = u_r + (1.0 - a)
        d = a * (zr + a) * np.exp(zr + a)  # f'(z_r), real
        with np.errstate(divide="ignore", invalid="ignore"):
            eta = w_c.imag / d
            lin = ok_v & np.isfinite(eta) & (np.abs(eta) <= SEAM_REL * np.abs(zr + a))
        # a wrong-side input (only possible in closure mode) lands on the seam itself
        want = 1.0 if b.sub == 2 else -1.0
        eta = np.where(eta * want < 0, 0.0, eta)
        idx = np.nonzero(cand)[0][lin]
        z[idx] = (zr + 1j * eta)[lin]
        todo[idx] = False

    its = 0
    if todo.any():
        th = theta[todo]
        lv = log_v[todo]
        u, its = _omega(np.maximum(lv, -745.0) + 1j * th, polish)
        zz = u + (1.0 - a)
        # on the branch lines omega's own convention differs from ours: W_0 for T_0, W_{-1} for T_1
        on_line = (np.abs(th) == math.pi) & (lv < -1.0)
        if on_line.any():
            k = 0 if b.digit == 0 else -1
            zz[on_line] = lambertw(-np.exp(lv[on_line]), k).real + (1.0 - a)
        zz = np.where(th == 0.0, zz.real + 0j, zz)
        z[todo] = zz
    return z, status, its


def _as_logpolar(w) -> LogPolar:
    return w if isinstance(w, LogPolar) else LogPolar.from_complex(complex(w))


def _residual(z: complex, w: LogPolar, a: float) -> float:
    """|f(z) - w| / max(1, |w|), evaluated without overflow."""
    fz = eval_f_logpolar(z, a)
    if w.logmag == MINUS_INF or fz.logmag == MINUS_INF:
        return 0.0 if fz.logmag == w.logmag else math.inf
    if w.logmag <= 0.0:
        return abs(fz.to_complex() - w.to_complex())
    d = complex(fz.logmag - w.logmag, math.remainder(fz.arg - w.arg, TWO_PI))
    return abs(cmath.exp(d) - 1.0) if d.real < LOG_MAX else math.inf


def inverse_branch(b: Sym, w, p, seed=None, closure: bool = False) -> InverseResult:
    """The preimage of w in T_b.

    ``w`` may be complex or LogPolar. Real w in (-a, 0) is accepted for every branch
    and real w > 0 for the T_0 branches; the result is then the real preimage.
    With ``closure=True`` the argument is clamped into the closed band, so e.g.
    w > 0 under 1_2 returns its preimage on zeta_1. ``seed`` is ignored (the
    solve is global) and kept for interface compatibility.
    """
    a = _a_of(p)
    wl = _as_logpolar(w)
    if wl.logmag <= LOG_MAX:
        wc = wl.to_complex() if isinstance(w, LogPolar) else complex(w)
        z, status, its = _solve(b, np.array([wc]), a, closure, polish=True)
        z, status = complex(z[0]), int(status[0])
    else:
        # far beyond the double range: only the omega path applies
        lo, hi, m = BANDS[b]
        phi = wl.reduced_arg
        theta = np.array([phi + TWO_PI * m])
        if phi == math.pi or (b.digit == 1 and phi == 0.0 and not closure):
            status, z, its = CUT, complex("nan"), 0
        elif not lo < theta[0] < hi and not closure and not (b.digit == 0 and phi == 0.0):
            status, z, its = HALF_PLANE, complex("nan"), 0
        else:
            theta = _clamp_band(theta, lo, hi)
            u, its = _omega(np.array([complex(wl.logmag - math.log(a) - 1.0, theta[0])]), True)
            z, status = complex(u[0]) + (1.0 - a), OK
    if status == CUT:
        raise CutLineError(f"w={w} lies on a slit of branch {b}")
    if status == HALF_PLANE:
        raise CutLineError(f"w={w} is in the wrong half plane for branch {b}")
    res = _residual(z, wl, a)
    if not res < 1e-10:
        raise NoConvergenceError(f"residual {res:.3g} for branch {b} at w={w}")
    return InverseResult(z, res, its, b)


def inverse_branch_array(b: Sym, ws, p) -> np.ndarray:
    """Vectorized closure-mode branch for complex arrays (no residual check)."""
    z, _, _ = _solve(b, np.asarray(ws, dtype=complex), _a_of(p), closure=True)
    return z


def pullback(prefix, w, p, closure: bool = False) -> complex:
    """g^{s_0} o ... o g^{s_{n-1}}(w) for an allowable window s_0 ... s_{n-1}."""
    syms = list(prefix)
    cur = w
    for depth in range(len(syms) - 1, -1, -1):
        try:
            cur = inverse_branch(syms[depth], cur, p, closure=closure).z
        except (CutLineError, NoConvergenceError) as exc:
            exc.depth = depth
            raise
    return complex(cur)


def pullback_array(prefix, ws, p) -> np.ndarray:
    """Vectorized closure-mode pullback of many points along one window."""
    cur = np.asarray(ws, dtype=complex)
    for sym in reversed(list(prefix)):
        cur = inverse_branch_array(sym, cur, p)
    return cur
