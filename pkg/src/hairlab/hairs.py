"""Hairs as unions of pulled-back tails, landing diagnostics and the block-length search.

The level-m piece of the hair of t is the tail of sigma^m(t) over [R, J_m], pulled
back along t_0 ... t_{m-1}, where J_m = Re f(tail_{sigma^{m-1} t}(R)). Its R end is
the tip E_m; its J_m end meets the tip E_{m-1} of the previous piece, so the
pieces concatenate into one polyline running from E_depth out to the far right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .inverse import pullback_array
from .mapcore import FOverflowError, _a_of, eval_df, eval_f
from .partition import itinerary as region_itinerary
from .symbolic import ASeq, BSeq, Literal, Sym, concat, lift
from .tails import Polyline, TailCurve, crossing_count

DEFAULT_DELTA = 0.02
DEFAULT_BUDGET = 2 ** 12
DEFAULT_VIEW = (-1000.0, 1000.0, -10.0, 10.0)
BASE_SAMPLES = 24

LANDING = "Landing"
NON_CAUCHY = "NonCauchy"
BUDGET = "Budget"


class CapExceeded(RuntimeError):
    def __init__(self, j: int, ks: list):
        super().__init__(f"no block length k <= cap satisfies the crossing predicate at j={j}")
        self.j = j
        self.ks = ks


@dataclass
class Hair:
    itinerary: ASeq
    points: np.ndarray
    level: np.ndarray
    param: np.ndarray
    depth: int
    tips: list
    flagged: list = field(default_factory=list)  # (level, param) of segments over budget
    diagnostics: dict = field(default_factory=dict)

    @property
    def polyline(self) -> Polyline:
        return Polyline(self.points, self.level, self.param)

    def piece(self, m: int) -> np.ndarray:
        return self.points[self.level == m]


def _in_view(z: np.ndarray, view) -> np.ndarray:
    x0, x1, y0, y1 = view
    return np.isfinite(z) & (z.real >= x0) & (z.real <= x1) & (z.imag >= y0) & (z.imag <= y1)


def _refine(tail: TailCurve, prefix, xs: np.ndarray, pts: np.ndarray, p, delta, budget, view):
    """Insert geometric midpoints of tail abscissas until image gaps are <= delta (in view)."""
    origin = np.arange(len(xs) - 1)
    used = np.zeros(max(len(xs) - 1, 1), dtype=int)
    flagged = set()
    while True:
        gaps = np.abs(np.diff(pts))
        both = _in_view(pts[:-1], view) & _in_view(pts[1:], view)
        bad = both & (gaps > delta) & (used[origin] < budget)
        over = both & (gaps > delta) & (used[origin] >= budget)
        flagged.update(int(o) for o in origin[over])
        if not bad.any():
            break
        idx = np.nonzero(bad)[0]
        mids = np.sqrt(xs[idx] * xs[idx + 1])
        keep = (mids > xs[idx]) & (mids < xs[idx + 1])
        idx, mids = idx[keep], mids[keep]
        if len(idx) == 0:
            flagged.update(int(o) for o in origin[bad])
            break
        new_pts = pullback_array(prefix, tail.sample(mids), p)
        np.add.at(used, origin[idx], 1)
        xs = np.insert(xs, idx + 1, mids)
        pts = np.insert(pts, idx + 1, new_pts)
        origin = np.insert(origin, idx + 1, origin[idx])
    return xs, pts, sorted(flagged)


def trace_hair(t: ASeq, depth: int, p, delta: float = DEFAULT_DELTA, x_top: float | None = None,
               samples: int = BASE_SAMPLES, budget: int = DEFAULT_BUDGET, view=DEFAULT_VIEW) -> Hair:
    if isinstance(t.base, Literal) and t.base.ends_in_zeros:
        raise ValueError("itineraries ending in all zeros have no hair")
    R = p.R
    x_top = float(x_top if x_top is not None else 4.0 * R)
    syms = t.symbols(depth + 1)
    pieces = []
    tips = []
    flagged = []
    prev_tail = None
    for m in range(depth + 1):
        tail = TailCurve(t.shift(m), p, R)
        if m == 0:
            x_hi = x_top
        else:
            try:
                x_hi = eval_f(prev_tail.point(R), p).real
            except FOverflowError:
                x_hi = math.inf
            if not x_hi > R:
                raise RuntimeError(f"level {m}: previous tip maps left of R")
            x_hi = min(x_hi, 1e300)
        xs = np.geomspace(R, x_hi, samples)
        pts = pullback_array(syms[:m], tail.sample(xs), p)
        xs, pts, bad = _refine(tail, syms[:m], xs, pts, p, delta, budget, view)
        flagged += [(m, float(xs[i])) for i in bad]
        pieces.append((m, xs, pts))
        tips.append(complex(pts[0]))
        prev_tail = tail
    pieces.reverse()
    points = np.concatenate([pc[2] for pc in pieces])
    level = np.concatenate([np.full(len(pc[1]), pc[0]) for pc in pieces])
    param = np.concatenate([pc[1] for pc in pieces])
    return Hair(t, points, level, param, depth, tips, flagged)


# ---------------------------------------------------------------------------
# landing


@dataclass
class LandingReport:
    verdict: str
    endpoint: complex | None
    rates: list
    gaps: list
    period: int | None = None
    multiplier: float | None = None
    itinerary_ok: bool | None = None


def _period_of(t: ASeq) -> int | None:
    if not isinstance(t.base, Literal) or t.base.prefix:
        return None
    n = len(t.base.cycle)
    return n if sum(t.base.cycle) % 2 == 0 else 2 * n


def polish_periodic(z: complex, period: int, p, iters: int = 30) -> tuple[complex, complex]:
    """Newton on f^period(z) - z; returns (point, multiplier)."""
    for _ in range(iters):
        w, d = z, 1.0 + 0j
        for _ in range(period):
            d *= eval_df(w, p)
            w = eval_f(w, p)
        step = (w - z) / (d - 1.0)
        z = z - step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    w, d = z, 1.0 + 0j
    for _ in range(period):
        d *= eval_df(w, p)
        w = eval_f(w, p)
    return z, d


def landing_report(h: Hair, p, window: int = 6) -> LandingReport:
    tips = h.tips
    gaps = [abs(tips[m] - tips[m - 1]) for m in range(1, len(tips))]
    rates = [gaps[i] / gaps[i - 1] if gaps[i - 1] > 0 else 0.0 for i in range(1, len(gaps))]
    tail_rates = [r for r in rates[-window:]]
    if not tail_rates:
        return LandingReport(BUDGET, None, rates, gaps)
    pos = [r for r in tail_rates if r > 0]
    gmean = math.exp(sum(math.log(r) for r in pos) / len(pos)) if pos else 0.0
    final = gaps[-1]
    endpoint = complex(tips[-1])
    if gmean >= 0.95 or final > 1e-3:
        return LandingReport(NON_CAUCHY, None, rates, gaps)
    if final >= 1e-8:
        return LandingReport(BUDGET, endpoint, rates, gaps)
    rep = LandingReport(LANDING, endpoint, rates, gaps)
    per = _period_of(h.itinerary)
    if per is not None:
        z, mult = polish_periodic(endpoint, per, p)
        rep.period = per
        rep.multiplier = abs(mult)
        if abs(z - endpoint) < 1e-6:
            rep.endpoint = z
        else:
            rep.verdict = BUDGET
    nsym = 20
    got = region_itinerary(rep.endpoint, nsym, _a_of(p), tol=0.0).symbols
    want = h.itinerary.symbols(nsym)
    # iterating a repelling point loses digits; require agreement on the stable prefix
    k = min(len(got), nsym)
    rep.itinerary_ok = got[:k] == want[:k] and k >= 12
    if not rep.itinerary_ok:
        rep.verdict = BUDGET
    return rep


# ---------------------------------------------------------------------------
# block lengths


def probe_itinerary(prefix_digits: list, k: int, probe: BSeq) -> tuple[ASeq, int]:
    """A-sequence lift(prefix 1 1 0^k probe-shifted, 1) and the index of the second 1."""
    head = list(prefix_digits) + [1, 1] + [0] * k
    u = concat(head, probe.shift(len(head)))
    q = len(prefix_digits) + 1
    return lift(u, 1), q


def crossing_predicate(prefix_digits, k, mu, probe, p, **trace_kw) -> tuple[int, Hair]:
    """Crossings of Re = -mu by the extended tail with itinerary 1 0^k (shifted probe)."""
    A, q = probe_itinerary(prefix_digits, k, probe)
    h = trace_hair(A.shift(q), k + 1, p, **trace_kw)
    return crossing_count(h.polyline, -mu), h


@dataclass
class BlockChoice:
    ks: list
    complete: bool
    failed_j: int | None = None
    crossings: dict = field(default_factory=dict)  # (j, k) -> count


def choose_blocks(tau, j_max: int, mu_schedule, probe: BSeq | None = None, p=None,
                  k_cap: int = 60, strict: bool = False, **trace_kw) -> BlockChoice:
    """For j = 1..j_max pick the smallest k_j <= k_cap whose probe hair crosses Re = -mu_j
    at least twice. Returns the partial list (complete=False) when the cap is hit,
    or raises CapExceeded if ``strict``."""
    probe = probe if probe is not None else Literal((), (1,))
    prefix = [int(b) for b in tau]
    ks = []
    log = {}
    for j in range(1, j_max + 1):
        mu = float(mu_schedule[j - 1])
        found = None
        for k in range(1, k_cap + 1):
            n, _ = crossing_predicate(prefix, k, mu, probe, p, **trace_kw)
            log[(j, k)] = n
            if n >= 2:
                found = k
                break
        if found is None:
            if strict:
                raise CapExceeded(j, ks)
            return BlockChoice(ks, False, j, log)
        ks.append(found)
        prefix += [1, 1] + [0] * found
    return BlockChoice(ks, True, None, log)


def mu_linear(step: float, j_max: int, offset: float = 0.0) -> list:
    return [offset + step * j for j in range(1, j_max + 1)]


# ---------------------------------------------------------------------------
# accumulation


def _dist_to_polyline(z: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Distance of each point in z to the polyline through ``poly``."""
    a = poly[:-1][None, :]
    b = poly[1:][None, :]
    zz = z[:, None]
    ab = b - a
    denom = np.abs(ab) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        tt = np.where(denom > 0, ((zz - a) * np.conj(ab)).real / denom, 0.0)
    tt = np.clip(tt, 0.0, 1.0)
    d = np.abs(zz - (a + tt * ab))
    if len(poly) == 1:
        return np.abs(z - poly[0])
    return d.min(axis=1)


@dataclass
class AccumulationReport:
    returning_arcs: int  # distinct level pieces entering the eps-neighbourhood
    runs: int  # maximal runs of consecutive near vertices
    levels: list
    min_distance: float
    one_sided_hausdorff: float
    level_window: int
    eps: float


def accumulation_report(h: Hair, base: Polyline, eps: float, level_window: int = 1,
                        chunk: int = 4096) -> AccumulationReport:
    """Pieces of h at levels > level_window that enter the eps-neighbourhood of ``base``.

    ``one_sided_hausdorff`` is max over base vertices of the distance to those pieces.
    """
    bp = base.points if isinstance(base, Polyline) else np.asarray(base, dtype=complex)
    sel = h.level > level_window
    pts = h.points
    near = np.zeros(len(pts), dtype=bool)
    dmin = np.full(len(pts), np.inf)
    idx = np.nonzero(sel & np.isfinite(pts))[0]
    for s in range(0, len(idx), chunk):
        ii = idx[s:s + chunk]
        d = _dist_to_polyline(pts[ii], bp)
        dmin[ii] = d
        near[ii] = d < eps
    runs = int(np.count_nonzero(near[1:] & ~near[:-1]) + (1 if len(near) and near[0] else 0))
    levels = sorted({int(v) for v in h.level[near]})
    far = pts[idx]
    if len(far):
        hd = max(float(np.min(np.abs(far - b))) for b in bp)
    else:
        hd = math.inf
    return AccumulationReport(len(levels), runs, levels, float(dmin.min()) if len(idx) else math.inf, hd,
                              level_window, eps)


# ---------------------------------------------------------------------------
# bracketing


@dataclass
class BracketReport:
    n: int
    angle_s: object
    angle_T: tuple
    angle_r: object
    ordered: bool
    angle_gap: object
    arc_gap: float
    point_s: complex
    point_r: complex


def bracket_check(T, n: int, p, mode: str = "periodic", depth: int = 80) -> BracketReport:
    from .basin import boundary_point
    from .symbolic import angle_bounds, angle_of, bracket_seqs

    s_n, r_n = bracket_seqs(T, n, mode)
    As, Ar, AT = lift(s_n, 1), lift(r_n, 1), lift(T, 1)
    th_s, th_r = angle_of(As), angle_of(Ar)
    lo, hi = angle_bounds(AT, 400)
    ordered = th_s < lo and hi < th_r
    ps = boundary_point(As, depth, p).z
    pr = boundary_point(Ar, depth, p).z
    return BracketReport(n, th_s, (lo, hi), th_r, ordered, th_r - th_s, abs(pr - ps), ps, pr)
