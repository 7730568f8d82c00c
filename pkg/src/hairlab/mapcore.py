"""Evaluation of f_a(z) = a (z - (1 - a)) exp(z + a) and its real anatomy."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from scipy.optimize import brentq

LOG_MAX = math.log(1.7976931348623157e308)  # ~709.78
MINUS_INF = float("-inf")


class FOverflowError(OverflowError):
    """f_a(z) is not representable as a double; use eval_f_logpolar."""


class InvalidParameterError(ValueError):
    pass


@dataclass(frozen=True)
class LogPolar:
    """A complex number stored as (natural log of modulus, unreduced argument)."""

    logmag: float
    arg: float

    def to_complex(self) -> complex:
        if self.logmag > LOG_MAX:
            raise FOverflowError(f"logmag {self.logmag} exceeds the double range")
        if self.logmag == MINUS_INF:
            return 0j
        return cmath.rect(math.exp(self.logmag), self.arg)

    @property
    def reduced_arg(self) -> float:
        return reduce_arg(self.arg)

    @classmethod
    def from_complex(cls, w: complex) -> "LogPolar":
        w = complex(w)
        if w == 0:
            return cls(MINUS_INF, 0.0)
        return cls(math.log(abs(w)), math.atan2(w.imag, w.real))


def reduce_arg(theta: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    r = math.remainder(theta, 2 * math.pi)
    if r == -math.pi:
        r = math.pi
    return r


def _check_a(a: float) -> None:
    if not a >= 3:
        raise InvalidParameterError(f"parameter a must satisfy a >= 3, got {a}")


@dataclass(frozen=True)
class Params:
    """Parameter a together with the derived real anatomy.

    Build with :meth:`from_a`; ``R`` is the tail base abscissa chosen by
    :func:`hairlab.tails.choose_R` unless given explicitly.
    """

    a: float
    R: float
    p_a: float
    q_a: float
    anchors: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @classmethod
    def from_a(cls, a: float, R: float | None = None) -> "Params":
        a = float(a)
        _check_a(a)
        q, pfix = _real_fixed_points(a)
        if R is None:
            R = _choose_R(a)
        return cls(a=a, R=float(R), p_a=pfix, q_a=q)

    @property
    def critical_point(self) -> float:
        return -self.a

    @property
    def shift(self) -> float:
        """1 - a, the zero of f_a."""
        return 1.0 - self.a


# ---------------------------------------------------------------------------
# evaluation


def _a_of(p) -> float:
    return p.a if isinstance(p, Params) else float(p)


def logmag_f(z: complex, a: float) -> float:
    u = complex(z) - (1.0 - a)
    if u == 0:
        return MINUS_INF
    return math.log(a) + z.real + a + math.log(abs(u))


def eval_f(z: complex, p) -> complex:
    """f_a(z); raises FOverflowError when the result is not representable."""
    a = _a_of(p)
    z = complex(z)
    u = z - (1.0 - a)
    if u == 0:
        return 0j
    lm = math.log(a) + z.real + a + math.log(abs(u))
    if lm > LOG_MAX:
        raise FOverflowError(f"|f(z)| = exp({lm:.6g}) overflows at z={z}")
    s = z.real + a
    if s < 700.0:
        return a * u * cmath.exp(z + a)
    return LogPolar(lm, z.imag + math.atan2(u.imag, u.real)).to_complex()


def eval_df(z: complex, p) -> complex:
    """f_a'(z) = a exp(z + a) (z + a)."""
    a = _a_of(p)
    z = complex(z)
    if z == -a:
        return 0j
    lm = math.log(a) + z.real + a + math.log(abs(z + a))
    if lm > LOG_MAX:
        raise FOverflowError(f"|f'(z)| = exp({lm:.6g}) overflows at z={z}")
    if z.real + a < 700.0:
        return a * (z + a) * cmath.exp(z + a)
    return LogPolar(lm, z.imag + cmath.phase(z + a)).to_complex()


def eval_f_logpolar(z, p) -> LogPolar:
    """f_a(z) in log-polar form; never overflows.

    ``z`` may itself be a LogPolar (for far-right points); its real part is then
    recovered from the log form, which must be representable.
    """
    a = _a_of(p)
    if isinstance(z, LogPolar):
        z = z.to_complex()
    z = complex(z)
    c = z.real - (1.0 - a)
    y = z.imag
    if c == 0.0 and y == 0.0:
        return LogPolar(MINUS_INF, 0.0)
    return LogPolar(math.log(a) + z.real + a + 0.5 * math.log(c * c + y * y),
                    y + math.atan2(y, c))


def iterate(z: complex, p, n: int) -> complex:
    for _ in range(n):
        z = eval_f(z, p)
    return z


# ---------------------------------------------------------------------------
# real anatomy


def _newton_polish(g, dg, x: float) -> float:
    d = dg(x)
    if d != 0 and math.isfinite(d):
        x1 = x - g(x) / d
        if abs(g(x1)) <= abs(g(x)):
            return x1
    return x


def _real_f(x: float, a: float) -> float:
    return a * (x - (1 - a)) * math.exp(x + a)


def _real_df(x: float, a: float) -> float:
    return a * (x + a) * math.exp(x + a)


def _real_fixed_points(a: float) -> tuple[float, float]:
    def g(x):
        return _real_f(x, a) - x

    try:
        # g(-a) = 0 at the superattracting point itself; start just to its right
        pa = brentq(g, -a + 1e-6, 1.0 - a, xtol=1e-14)
    except ValueError as exc:  # pragma: no cover - cannot happen for a >= 3
        raise InvalidParameterError(f"no repelling fixed point bracket for a={a}") from exc
    pa = _newton_polish(g, lambda x: _real_df(x, a) - 1.0, pa)

    def h(x):
        return _real_f(x, a) - pa

    # f is decreasing on (-inf, -a); bracket the left preimage of p_a
    lo = -a - 1.0
    while h(lo) < 0:
        lo -= 1.0
        if lo < -a - 200:
            raise InvalidParameterError(f"no left preimage of p_a for a={a}")
    qa = brentq(h, lo, -a, xtol=1e-14)
    qa = _newton_polish(h, lambda x: _real_df(x, a), qa)
    return qa, pa


def real_fixed_points(p) -> tuple[float, float]:
    """(q_a, p_a): the repelling fixed point p_a and its other real preimage q_a."""
    a = _a_of(p)
    _check_a(a)
    return _real_fixed_points(a)


class AnnulusBounds(NamedTuple):
    """Inner and outer radius of f_a(L[x]), kept as natural logs."""

    log_rmin: float
    log_rmax: float

    @property
    def rmin(self) -> float:
        return LogPolar(self.log_rmin, 0.0).to_complex().real

    @property
    def rmax(self) -> float:
        return LogPolar(self.log_rmax, 0.0).to_complex().real


def annulus_bounds(x: float, p) -> AnnulusBounds:
    """Round annulus rmin <= |z| <= rmax containing the image of the vertical segment L[x].

    rmin = f_a(x) and rmax = |f_a(x + i zeta_1(x))|; both are stored as logs so
    far-right abscissas do not overflow (``.rmin``/``.rmax`` raise if they would).
    """
    from .partition import ZETA, CurveId, curve_y

    a = _a_of(p)
    if x <= 1.0 - a:
        raise ValueError(f"annulus bound needs x > 1 - a, got {x}")
    y1 = curve_y(CurveId(ZETA, 1), x, a)
    lo = eval_f_logpolar(complex(x, 0.0), a).logmag
    hi = eval_f_logpolar(complex(x, y1), a).logmag
    return AnnulusBounds(lo, hi)


def _choose_R(a: float) -> float:
    from .tails import choose_R

    return choose_R(a)
