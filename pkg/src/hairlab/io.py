"""Deterministic exports: CSV polylines, P6 rasters, JSON reports and run manifests."""
from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np


class ExportError(OSError):
    pass


def fmt(x: float) -> str:
    """Fixed 17 significant digits (not the shortest round-trip repr)."""
    return format(float(x), ".17g")


def _write_bytes(path, data: bytes) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return path


def _csv(header: str, rows) -> bytes:
    lines = [header]
    lines += [",".join(r) for r in rows]
    return ("\n".join(lines) + "\n").encode("ascii")


def curves_csv(samples) -> bytes:
    """``samples``: iterable of (curve name, x, y)."""
    return _csv("curve,x,y", ((str(c), fmt(x), fmt(y)) for c, x, y in samples))


def polyline_csv(poly) -> bytes:
    pts = np.asarray(poly.points, dtype=complex)
    rows = ((fmt(z.real), fmt(z.imag), str(int(lv)), fmt(t))
            for z, lv, t in zip(pts, poly.level, poly.param))
    return _csv("x,y,level,param", rows)


def boundary_csv(angles, points) -> bytes:
    rows = []
    for th, z in zip(angles, points):
        th = Fraction(th)
        rows.append((str(th.numerator), str(th.denominator), fmt(complex(z).real), fmt(complex(z).imag)))
    return _csv("angle_num,angle_den,x,y", rows)


def ppm_bytes(raster: np.ndarray) -> bytes:
    """Binary P6 pixmap with R = G = B = raster value."""
    img = np.asarray(raster, dtype=np.uint8)
    if img.ndim != 2:
        raise ValueError("raster must be 2-d (height, width)")
    h, w = img.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    return header + np.repeat(img[:, :, None], 3, axis=2).tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a P6 pixmap")
    w, h = (int(v) for v in parts[1].split())
    px = np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)
    return px[:, :, 0].copy()


def _jsonable(obj):
    if isinstance(obj, complex):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    return obj


def json_bytes(obj) -> bytes:
    return (json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n").encode("utf-8")


def diagnostics(verdict, endpoint=None, gap_ratios=(), returning_arcs=None, arc_gap_by_n=None, **extra) -> dict:
    d = {
        "verdict": verdict,
        "endpoint": endpoint,
        "gap_ratios": list(gap_ratios),
        "returning_arcs": returning_arcs,
        "arc_gap_by_n": dict(arc_gap_by_n or {}),
    }
    d.update(extra)
    return d


def write(path, data: bytes) -> Path:
    return _write_bytes(path, data)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def manifest(argv: list, params: dict, outputs: list, version: str, seeds=None) -> dict:
    return {
        "command": list(argv),
        "params": params,
        "seeds": list(seeds or []),
        "version": version,
        "outputs": {str(o): sha256_file(o) for o in outputs},
    }


def read_config(path) -> dict:
    """key=value lines; '#' starts a comment; keys use the long flag names without dashes."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ExportError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out
