"""Uniform tensor grids, complex grid functions, GFN1 files and CSV export."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .kinematics import ModelParams

GFN_MAGIC = "GFN1"
GFN_VERSION = 1

KINDS = ("minkowski-momentum", "lc-momentum", "minkowski-position", "lc-position")
OFFSETS = ("centered", "half-step")


class GFNFormatError(ValueError):
    pass


class InterpolationRangeError(ValueError):
    pass


def _is_integer(x: float, tol: float = 1e-9) -> bool:
    return abs(x - round(x)) <= tol * max(1.0, abs(x))


@dataclass(frozen=True)
class AxisSpec:
    """Uniform axis ``min + j*step``, ``j = 0..count-1``.

    ``offset`` records whether the axis carries a node at 0 (``centered``)
    or sits half a step off it (``half-step``); the tag is checked against
    ``min``.
    """

    min: float
    step: float
    count: int
    offset: str = "centered"

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"axis step must be finite and > 0, got {self.step!r}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"axis count must be an integer >= 2, got {self.count!r}")
        if self.offset not in OFFSETS:
            raise ValueError(f"axis offset must be one of {OFFSETS}, got {self.offset!r}")
        ratio = self.min / self.step
        if self.offset == "centered" and not _is_integer(ratio):
            raise ValueError("centered axis must contain the node 0")
        if self.offset == "half-step" and not _is_integer(ratio + 0.5):
            raise ValueError("half-step axis must sit half a step off 0")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def centered(cls, step: float, count: int) -> "AxisSpec":
        return cls(-(count // 2) * step, step, count, "centered")

    @classmethod
    def half_step(cls, step: float, count: int) -> "AxisSpec":
        return cls((0.5 - count / 2) * step, step, count, "half-step")

    @classmethod
    def symmetric(cls, step: float, count: int, offset: str) -> "AxisSpec":
        return cls.centered(step, count) if offset == "centered" else cls.half_step(step, count)

    @property
    def nodes(self) -> np.ndarray:
        return self.min + self.step * np.arange(self.count)

    @property
    def max(self) -> float:
        return self.min + self.step * (self.count - 1)

    def to_json(self) -> dict:
        return {"min": self.min, "step": self.step, "count": self.count, "offset": self.offset}

    @classmethod
    def from_json(cls, d: dict) -> "AxisSpec":
        return cls(float(d["min"]), float(d["step"]), int(d["count"]), str(d.get("offset", "centered")))


@dataclass(frozen=True)
class MomentumGrid:
    """Tensor grid of ``n`` (spatial) or ``1+n`` (space-time) axes."""

    params: ModelParams
    axes: tuple
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if self.kind not in KINDS:
            raise ValueError(f"grid kind must be one of {KINDS}, got {self.kind!r}")
        if len(self.axes) not in (self.params.n, self.params.n + 1):
            raise ValueError(
                f"grid needs n={self.params.n} or n+1 axes, got {len(self.axes)}"
            )
        if self.kind == "lc-momentum" and self.axes[0].offset != "half-step":
            raise ValueError("lc-momentum grids need a half-step p^+ axis (no node at p^+ = 0)")

    @classmethod
    def uniform(cls, params: ModelParams, kind: str, step: float, count: int) -> "MomentumGrid":
        """Same symmetric axis in every direction; p^+ half-step for lc-momentum."""
        axes = [AxisSpec.centered(step, count) for _ in range(params.n)]
        if kind == "lc-momentum":
            axes[0] = AxisSpec.half_step(step, count)
        return cls(params, tuple(axes), kind)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(a.count for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def spacetime(self) -> bool:
        return self.ndim == self.params.n + 1

    @property
    def steps(self) -> np.ndarray:
        return np.array([a.step for a in self.axes])

    def coords(self) -> list:
        return [a.nodes for a in self.axes]

    def points(self) -> np.ndarray:
        """Node coordinates, shape ``grid.shape + (ndim,)``."""
        mesh = np.meshgrid(*self.coords(), indexing="ij")
        return np.stack(mesh, axis=-1)

    def header(self) -> dict:
        return {
            "version": GFN_VERSION,
            "kind": self.kind,
            "m": self.params.m,
            "n": self.params.n,
            "axes": [a.to_json() for a in self.axes],
        }

    @classmethod
    def from_header(cls, h: dict) -> "MomentumGrid":
        return cls(
            ModelParams(float(h["m"]), int(h["n"])),
            tuple(AxisSpec.from_json(a) for a in h["axes"]),
            h["kind"],
        )


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on a :class:`MomentumGrid` (row-major, last axis fastest)."""

    grid: MomentumGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {vals.size}")
        vals = vals.reshape(self.grid.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    @cached_property
    def _interpolators(self):
        coords = self.grid.coords()
        re = RegularGridInterpolator(coords, self.values.real, method="cubic", bounds_error=True)
        im = RegularGridInterpolator(coords, self.values.imag, method="cubic", bounds_error=True)
        return re, im

    def __call__(self, points) -> np.ndarray:
        """Separable cubic interpolation; points outside the grid are rejected."""
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.grid.ndim:
            raise ValueError(f"expected points of dimension {self.grid.ndim}, got {pts.shape}")
        flat = pts.reshape(-1, self.grid.ndim)
        lo = np.array([a.min for a in self.grid.axes])
        hi = np.array([a.max for a in self.grid.axes])
        bad = np.any((flat < lo) | (flat > hi), axis=1)
        if np.any(bad):
            where = flat[np.argmax(bad)]
            raise InterpolationRangeError(f"point {where.tolist()} outside grid range")
        re, im = self._interpolators
        out = re(flat) + 1j * im(flat)
        return out.reshape(pts.shape[:-1])


def sample(spec, grid: MomentumGrid) -> GridFunction:
    """Evaluate ``spec`` (any callable on point arrays) at every grid node."""
    dim = getattr(spec, "dim", None)
    if dim is not None and dim != grid.ndim:
        raise ValueError(f"spec dimension {dim} does not match grid dimension {grid.ndim}")
    return GridFunction(grid, np.broadcast_to(spec(grid.points()), grid.shape))


def write_gfn(gf: GridFunction, path) -> None:
    header = json.dumps(gf.grid.header(), separators=(",", ":"))
    payload = np.ascontiguousarray(gf.values).astype("<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(f"{GFN_MAGIC}\n{header}\n".encode("ascii"))
        fh.write(payload)


def read_gfn(path) -> GridFunction:
    with open(path, "rb") as fh:
        magic = fh.readline()
        if magic.rstrip(b"\n") != GFN_MAGIC.encode():
            raise GFNFormatError(f"{path}: not a GFN1 file (magic {magic[:8]!r})")
        line = fh.readline()
        try:
            header = json.loads(line.decode("ascii"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise GFNFormatError(f"{path}: malformed header: {exc}") from exc
        if not isinstance(header, dict):
            raise GFNFormatError(f"{path}: header must be a JSON object")
        if header.get("version") != GFN_VERSION:
            raise GFNFormatError(f"{path}: unsupported version {header.get('version')!r}")
        try:
            grid = MomentumGrid.from_header(header)
        except (KeyError, TypeError, ValueError) as exc:
            raise GFNFormatError(f"{path}: invalid header: {exc}") from exc
        payload = fh.read()
    expected = 16 * grid.size
    if len(payload) != expected:
        raise GFNFormatError(f"{path}: payload has {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype="<c16").reshape(grid.shape)
    return GridFunction(grid, values)


_COORD_NAMES = {
    "minkowski-momentum": lambda n: [f"p{i}" for i in range(1, n + 1)],
    "lc-momentum": lambda n: ["p_plus"] + [f"p_perp{i}" for i in range(1, n)],
    "minkowski-position": lambda n: [f"x{i}" for i in range(1, n + 1)],
    "lc-position": lambda n: ["x_minus"] + [f"x_perp{i}" for i in range(1, n)],
}


def coordinate_names(grid: MomentumGrid) -> list:
    if grid.spacetime:
        return [f"c{i}" for i in range(grid.ndim)]
    return _COORD_NAMES[grid.kind](grid.params.n)


def to_csv(gf: GridFunction, path) -> None:
    """One row per node: coordinates, re, im (shortest round-trip repr)."""
    grid = gf.grid
    pts = grid.points().reshape(-1, grid.ndim)
    vals = gf.values.reshape(-1)
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(grid.header(), separators=(",", ":")) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(coordinate_names(grid) + ["re", "im"])
        for pt, v in zip(pts, vals):
            writer.writerow([repr(float(c)) for c in pt] + [repr(float(v.real)), repr(float(v.imag))])


def read_csv(path) -> GridFunction:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise GFNFormatError(f"{path}: missing metadata header row")
        grid = MomentumGrid.from_header(json.loads(first[2:]))
        reader = csv.reader(fh)
        next(reader)
        rows = [row for row in reader if row]
    if len(rows) != grid.size:
        raise GFNFormatError(f"{path}: {len(rows)} data rows, expected {grid.size}")
    data = np.array([[float(c) for c in row[-2:]] for row in rows])
    return GridFunction(grid, data[:, 0] + 1j * data[:, 1])


def write_sidecar(path, representation: str, extra: dict | None = None) -> None:
    """JSON sidecar naming which density representation a GFN1 file holds."""
    doc = {"representation": representation}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True))


def max_rel_error(a: np.ndarray, b: np.ndarray, mask: np.ndarray | None = None) -> float:
    """``max|a-b| / max|b|`` over ``mask`` (0 when both vanish)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if mask is not None:
        a, b = a[mask], b[mask]
    scale = np.max(np.abs(b)) if b.size else 0.0
    diff = np.max(np.abs(a - b)) if b.size else 0.0
    if scale == 0:
        return float(diff)
    return float(diff / scale)


def sequence_axes(steps: Sequence[float], counts: Sequence[int], offsets: Sequence[str]) -> tuple:
    return tuple(AxisSpec.symmetric(s, c, o) for s, c, o in zip(steps, counts, offsets))
