"""Escape/attraction classification raster of the dynamical plane.

Pixels whose orbit enters the trap disk about -a are Fatou (black, 0); orbits whose
log-modulus passes the escape threshold, or that stay undecided within the budget,
are Julia (white, 255). The Fatou set is the basin of -a, so undecided pixels are
almost always Julia; their count is reported so the budget can be raised.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .mapcore import LOG_MAX, _a_of

FATOU, JULIA = 0, 255
ESCAPE_LOGMAG = 1000.0
DEFAULT_BUDGET = 200
TILE_ROWS = 32


@dataclass(frozen=True)
class RenderJob:
    a: float
    viewport: tuple  # (x_min, x_max, y_min, y_max)
    pixels: tuple  # (width, height)
    budget: int = DEFAULT_BUDGET
    trap_radius: float | None = None  # defaults to 1/(4a)
    escape_logmag: float = ESCAPE_LOGMAG

    def __post_init__(self):
        w, h = self.pixels
        x0, x1, y0, y1 = self.viewport
        if int(w) < 1 or int(h) < 1:
            raise ValueError("raster must be at least 1x1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if not (x1 > x0 and y1 > y0):
            raise ValueError("viewport is degenerate")

    @property
    def radius(self) -> float:
        return self.trap_radius if self.trap_radius is not None else 1.0 / (4.0 * self.a)

    def xs(self) -> np.ndarray:
        w = int(self.pixels[0])
        x0, x1 = self.viewport[:2]
        return x0 + (np.arange(w) + 0.5) * ((x1 - x0) / w)

    def ys(self) -> np.ndarray:
        """Row ordinates, top row first."""
        h = int(self.pixels[1])
        y0, y1 = self.viewport[2:]
        return y1 - (np.arange(h) + 0.5) * ((y1 - y0) / h)


@dataclass
class RenderStats:
    fatou: int = 0
    escaped: int = 0
    undecided: int = 0
    per_row: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {"fatou": self.fatou, "escaped": self.escaped, "undecided": self.undecided}


def classify_points(z0: np.ndarray, a: float, budget: int = DEFAULT_BUDGET, radius: float | None = None,
                    escape_logmag: float = ESCAPE_LOGMAG) -> tuple[np.ndarray, np.ndarray]:
    """Per-point (value 0/255, code) where code is 0 trapped, 1 escaped, 2 undecided."""
    a = float(a)
    r = radius if radius is not None else 1.0 / (4.0 * a)
    z = np.array(z0, dtype=complex).ravel()
    code = np.full(z.shape, 2, dtype=np.int8)
    live = np.ones(z.shape, dtype=bool)
    log_a = math.log(a)
    for _ in range(budget + 1):
        idx = np.nonzero(live)[0]
        if len(idx) == 0:
            break
        zz = z[idx]
        trapped = np.abs(zz + a) < r
        code[idx[trapped]] = 0
        live[idx[trapped]] = False
        keep = ~trapped
        idx, zz = idx[keep], zz[keep]
        u = zz - (1.0 - a)
        with np.errstate(divide="ignore"):
            L = log_a + np.log(np.abs(u)) + zz.real + a
        small = L <= LOG_MAX
        with np.errstate(all="ignore"):
            nxt = np.where(small, a * u * np.exp(np.where(small, zz + a, 0.0)), 0.0)
        # log-polar hand-off: w = e^L e^{i phi} is not representable, but its image is
        # either beyond the escape threshold (Re w > 0) or underflows to the asymptotic value 0
        big = ~small
        if big.any():
            phi = np.angle(u[big]) + zz[big].imag
            c = np.cos(phi)
            with np.errstate(all="ignore"):
                re_w = np.sign(c) * np.exp(np.minimum(L[big] + np.log(np.abs(c)), 1e4))
            esc_big = (L[big] > escape_logmag) | (re_w > 0)
            nb = np.nonzero(big)[0]
            code[idx[nb[esc_big]]] = 1
            live[idx[nb[esc_big]]] = False
            nxt[nb[~esc_big]] = 0.0
        escaped = small & (L > escape_logmag)
        code[idx[escaped]] = 1
        live[idx[escaped]] = False
        z[idx] = nxt
    vals = np.where(code == 0, FATOU, JULIA).astype(np.uint8)
    return vals.reshape(np.shape(z0)), code.reshape(np.shape(z0))


def render_classification(job: RenderJob, workers: int = 1) -> tuple[np.ndarray, RenderStats]:
    """Raster of shape (height, width), uint8, top row = y_max."""
    xs, ys = job.xs(), job.ys()
    h = len(ys)
    tiles = [(s, min(s + TILE_ROWS, h)) for s in range(0, h, TILE_ROWS)]

    def tile(bounds):
        s, e = bounds
        grid = xs[None, :] + 1j * ys[s:e, None]
        return classify_points(grid, job.a, job.budget, job.radius, job.escape_logmag)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(tile, tiles))
    else:
        parts = [tile(t) for t in tiles]
    raster = np.concatenate([pv for pv, _ in parts], axis=0)
    codes = np.concatenate([pc for _, pc in parts], axis=0)
    stats = RenderStats(int(np.count_nonzero(codes == 0)), int(np.count_nonzero(codes == 1)),
                        int(np.count_nonzero(codes == 2)))
    return raster, stats


def render_row(a: float, x_range: tuple, width: int, y: float = 0.0, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """One raster row at ordinate ``y`` with the pixel centers of a ``width``-pixel viewport."""
    job = RenderJob(a, (x_range[0], x_range[1], y - 1.0, y + 1.0), (width, 1), budget)
    vals, _ = classify_points(job.xs() + 1j * y, _a_of(a), budget, job.radius)
    return vals


def transitions(row: np.ndarray, xs: np.ndarray) -> list[float]:
    """Abscissas (midpoints between pixel centers) where the row changes value."""
    k = np.nonzero(row[1:] != row[:-1])[0]
    return [float(0.5 * (xs[i] + xs[i + 1])) for i in k]
