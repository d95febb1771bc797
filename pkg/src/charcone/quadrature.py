"""Deterministic tensor-product quadrature and the mass-shell pairings."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import kinematics as kin

MAX_CHUNK_POINTS = 1 << 16
DEFAULT_LEVEL = 7


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    level: int
    nodes_per_axis: int

    def __complex__(self):
        return complex(self.value)


def default_workers() -> int:
    env = os.environ.get("CHARCONE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def default_extent(params: kin.ModelParams | None = None, sigma_max: float = 1.0) -> float:
    m = params.m if params is not None else 0.0
    return 10.0 * max(1.0, sigma_max) * np.sqrt(1.0 + m)


def nodes_for_level(level: int) -> int:
    return 16 * 2**level


@lru_cache(maxsize=64)
def _gl(count: int):
    u, w = np.polynomial.legendre.leggauss(count)
    return u, w


def axis_rule(level: int, extent: float, half: bool = False):
    """Gauss-Legendre nodes on ``[-extent, extent]`` (or ``(0, extent]``).

    The reference variable is ``u = tanh(x/L)/tanh(extent/L)`` with
    ``L = extent``, which puts more nodes near the centre of the axis.
    """
    count = nodes_for_level(level)
    u, w = _gl(count)
    if half:
        u, w = 0.5 * (u + 1.0), 0.5 * w
    scale = extent
    t = np.tanh(extent / scale)
    x = scale * np.arctanh(u * t)
    dxdu = scale * t / (1.0 - (u * t) ** 2)
    return x, w * dxdu


def pairwise_sum(values: Sequence[complex]) -> complex:
    """Balanced-tree reduction with a fixed shape for a given length."""
    vals = list(values)
    if not vals:
        return 0j
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _tensor_integral(f, rules, workers: int) -> complex:
    xs = [r[0] for r in rules]
    ws = [r[1] for r in rules]
    dim = len(rules)
    counts = [len(x) for x in xs]
    # Trailing axes are taken whole; the axis before them is cut into blocks
    # so that each chunk holds at most MAX_CHUNK_POINTS.
    inner = 1
    split = dim
    while split > 0 and inner * counts[split - 1] <= MAX_CHUNK_POINTS:
        split -= 1
        inner *= counts[split]
    tail_w = np.ones(())
    for w in ws[split:]:
        tail_w = np.multiply.outer(tail_w, w)
    if split == 0:
        jobs = [((), slice(None))]
        block_axis = None
    else:
        block_axis = split - 1
        block = max(1, MAX_CHUNK_POINTS // inner)
        blocks = [slice(i, min(i + block, counts[block_axis])) for i in range(0, counts[block_axis], block)]
        jobs = [(idx, sl) for idx in np.ndindex(*counts[:block_axis]) for sl in blocks]

    def chunk(job):
        idx, sl = job
        if block_axis is None:
            axes_x, axes_w = xs, []
        else:
            axes_x = [xs[block_axis][sl]] + xs[split:]
            axes_w = ws[block_axis][sl]
        shape = tuple(len(x) for x in axes_x)
        pts = kin.empty_points(shape, dim)
        weight = 1.0
        for axis, i in enumerate(idx):
            pts[..., axis] = xs[axis][i]
            weight *= ws[axis][i]
        lead = len(idx)
        for j, x in enumerate(axes_x):
            view = [None] * len(axes_x)
            view[j] = slice(None)
            pts[..., lead + j] = x[tuple(view)]
        w = tail_w if block_axis is None else np.multiply.outer(axes_w, tail_w)
        vals = np.asarray(f(pts))
        total = complex(np.sum(vals * w)) * weight
        # non-finite samples always poison the sum, so one check suffices
        if not np.isfinite(total):
            raise QuadratureError("integrand returned non-finite values")
        return total

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(chunk, jobs))
    else:
        partial = [chunk(j) for j in jobs]
    return pairwise_sum(partial)


def integrate_rn(
    f: Callable,
    n: int,
    level: int = DEFAULT_LEVEL,
    extent: float | None = None,
    half_axes: Sequence[int] = (),
    workers: int | None = None,
    estimate: bool = True,
) -> QuadResult:
    """Integrate ``f`` (vectorised over points ``(..., n)``) over ``R^n``.

    Axes listed in ``half_axes`` are integrated over ``(0, extent]`` only.
    The error is the Richardson difference between ``level`` and
    ``level - 1``; ``estimate=False`` skips the coarse pass and reports
    ``nan``.
    """
    if not 1 <= level <= 12:
        raise ValueError(f"level must be in 1..12, got {level}")
    extent = default_extent() if extent is None else float(extent)
    workers = default_workers() if workers is None else max(1, int(workers))

    def at(lv):
        rules = [axis_rule(lv, extent, half=(ax in half_axes)) for ax in range(n)]
        return _tensor_integral(f, rules, workers)

    fine = at(level)
    if not estimate:
        return QuadResult(fine, float("nan"), level, nodes_for_level(level))
    coarse = at(level - 1)
    return QuadResult(fine, float(abs(fine - coarse)), level, nodes_for_level(level))


def pair_minkowski_delta(a, f, sign, params: kin.ModelParams, level: int = DEFAULT_LEVEL,
                         extent: float | None = None, workers: int | None = None,
                         estimate: bool = True) -> QuadResult:
    """``(a(p) delta_+-(p^2 - m^2), f) = int a(p) f(+-omega, p) / (2 omega) d^n p``."""
    s = kin.sign_value(sign)

    def integrand(p):
        shell = kin.mass_shell(s, p, params)
        half_w = 2.0 * s * shell[..., 0]
        return a(p) * f(shell) / half_w

    ext = default_extent(params) if extent is None else extent
    return integrate_rn(integrand, params.n, level, ext, workers=workers, estimate=estimate)


def pair_lc_delta(b, f, sign, params: kin.ModelParams, level: int = DEFAULT_LEVEL,
                  extent: float | None = None, workers: int | None = None,
                  estimate: bool = True) -> QuadResult:
    """``(b delta_+-(pt^2 - m^2), f)`` computed in Minkowski variables.

    Under ``pt = mu_+-(p)`` the measure ``d^n pt / 2|p^+|`` becomes
    ``d^n p / 2 omega``; ``sign='both'`` sums the two sheets, which is the
    pairing of ``b delta(pt^2 - m^2)``. ``f`` takes light-cone vectors
    ``(p^+, p_perp, p^-)``.
    """
    if sign == "both":
        plus = pair_lc_delta(b, f, "+", params, level, extent, workers, estimate)
        minus = pair_lc_delta(b, f, "-", params, level, extent, workers, estimate)
        return QuadResult(plus.value + minus.value, plus.error + minus.error, level, plus.nodes_per_axis)
    s = kin.sign_value(sign)

    def integrand(p):
        pt, w = kin.mu_squeeze_with_omega(s, p, params)
        try:
            shell = kin.lc_mass_shell(pt, params)
        except ValueError as exc:
            raise QuadratureError("p^+ = 0 reached in light-cone pairing") from exc
        return b(pt) * f(shell) / (2.0 * w)

    ext = default_extent(params) if extent is None else extent
    return integrate_rn(integrand, params.n, level, ext, workers=workers, estimate=estimate)
