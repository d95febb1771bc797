"""Finite-order certificates for squeezed functions and multiplicators.

All suprema are taken over the nodes of light-cone momentum grids, whose
``p^+`` axis never contains 0. A certificate is a statement about a finite
refinement ladder: values are computed on each rung and the growth between
consecutive rungs decides pass/fail.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kinematics as kin
from . import testfn as tf
from .grids import AxisSpec, MomentumGrid

MAX_CERTIFIED_ORDER = 2
LADDER_RATIO = 11
STABLE_GROWTH = 2.0


def _check_grid(grid: MomentumGrid) -> None:
    if grid.axes[0].offset != "half-step":
        raise ValueError("seminorm grids need a half-step p^+ axis")


def _derivative(f, alpha, pts, allow_fd: bool) -> np.ndarray:
    alpha = tuple(int(a) for a in alpha)
    if sum(alpha) > MAX_CERTIFIED_ORDER and not allow_fd:
        raise ValueError(f"|alpha| = {sum(alpha)} exceeds {MAX_CERTIFIED_ORDER}; pass allow_fd=True")
    if not any(alpha):
        return np.asarray(f(pts))
    if isinstance(f, tf.Spec):
        return tf.deriv(f, alpha, pts)
    if hasattr(f, "deriv"):
        return f.deriv(alpha, pts)
    raise TypeError("derivatives need a test-function spec or an object with .deriv(alpha, x)")


def squeezed_seminorm(f, k: int, beta: Sequence[int], alpha: Sequence[int], grid: MomentumGrid,
                      allow_fd: bool = False) -> float:
    """``sup |(p^+)^k p_perp^beta d^alpha f|`` over the grid nodes.

    Negative ``k`` is allowed and probes the vanishing order at ``p^+ = 0``.
    """
    _check_grid(grid)
    pts = grid.points()
    beta = tuple(beta) or (0,) * (grid.ndim - 1)
    if len(beta) != grid.ndim - 1:
        raise ValueError(f"beta needs {grid.ndim - 1} entries")
    weight = pts[..., 0] ** float(k)
    for i, b in enumerate(beta):
        if b:
            weight = weight * pts[..., i + 1] ** b
    vals = _derivative(f, alpha, pts, allow_fd)
    return float(np.max(np.abs(weight * vals)))


def nform_weight(pts: np.ndarray, N: int) -> np.ndarray:
    """``((1 + |pt|) / |p^+|)^N``."""
    return ((1.0 + np.sqrt(kin.sq_norm(pts))) / np.abs(pts[..., 0])) ** N


def squeezed_seminorm_Nform(f, N: int, alpha: Sequence[int], grid: MomentumGrid,
                            allow_fd: bool = False) -> float:
    """``sup ((1 + |pt|) / |p^+|)^N |d^alpha f|`` over the grid nodes."""
    _check_grid(grid)
    pts = grid.points()
    vals = _derivative(f, alpha, pts, allow_fd)
    return float(np.max(nform_weight(pts, N) * np.abs(vals)))


# --------------------------------------------------------------------------
# multiplicators

class Multiplicator:
    """Smooth function on ``{p^+ != 0}`` with closed-form low-order derivatives."""

    def __init__(self, name: str, value, deriv=None):
        self.name = name
        self._value = value
        self._deriv = deriv

    def __call__(self, x):
        return self._value(np.asarray(x, dtype=float))

    def deriv(self, alpha, x):
        if not any(alpha):
            return self(x)
        if self._deriv is None:
            raise ValueError(f"{self.name}: no derivatives available")
        return self._deriv(tuple(alpha), np.asarray(x, dtype=float))

    def __repr__(self):
        return f"Multiplicator({self.name})"


def theta(sign=1) -> Multiplicator:
    s = kin.sign_value(sign)
    return Multiplicator(
        f"Theta({'+' if s > 0 else '-'}p^+)",
        lambda x: (s * x[..., 0] > 0).astype(float),
        lambda alpha, x: np.zeros(x.shape[:-1]),
    )


def pplus_power(k: int) -> Multiplicator:
    """``(p^+)^k`` for any integer ``k``."""

    def d(alpha, x):
        if any(alpha[1:]):
            return np.zeros(x.shape[:-1])
        r = alpha[0]
        coef = 1.0
        for j in range(r):
            coef *= k - j
        return coef * x[..., 0] ** float(k - r)

    return Multiplicator(f"(p^+)^{k}", lambda x: x[..., 0] ** float(k), d)


def abs_pplus_power(k: int) -> Multiplicator:
    """``|p^+|^k``; smooth on each half-space."""

    def d(alpha, x):
        if any(alpha[1:]):
            return np.zeros(x.shape[:-1])
        r = alpha[0]
        coef = 1.0
        for j in range(r):
            coef *= k - j
        t = x[..., 0]
        return coef * np.sign(t) ** r * np.abs(t) ** float(k - r)

    return Multiplicator(f"|p^+|^{k}", lambda x: np.abs(x[..., 0]) ** float(k), d)


def lc_energy(params: kin.ModelParams) -> Multiplicator:
    """``lc_omega = (p_perp^2 + m^2) / (2 p^+)`` with derivatives up to order 2."""

    def d(alpha, x):
        t = x[..., 0]
        perp = x[..., 1:]
        num = kin.sq_norm(x, 1) + params.m**2
        a0 = alpha[0]
        rest = [(i, a) for i, a in enumerate(alpha[1:]) if a]
        order = sum(alpha)
        if order > 2:
            raise ValueError("lc_energy derivatives are available up to order 2")
        if not rest:
            return {1: -num / (2 * t**2), 2: num / t**3}[a0]
        if a0 == 1:
            (i, _), = rest
            return -perp[..., i] / t**2
        if len(rest) == 1 and rest[0][1] == 1:
            return perp[..., rest[0][0]] / t
        if len(rest) == 1:
            return 1.0 / t
        return np.zeros(x.shape[:-1])

    return Multiplicator("lc_omega", lambda x: kin.lc_omega(x, params), d)


@dataclass(frozen=True)
class MultiplicatorResult:
    passed: bool
    max_ratio: float
    worst_node: tuple


def multiplicator_check(M, alpha: Sequence[int], N: int, C: float, grid: MomentumGrid) -> MultiplicatorResult:
    """Check ``|d^alpha M| <= C ((1 + |pt|) / |p^+|)^N`` at every node."""
    _check_grid(grid)
    pts = grid.points()
    vals = np.abs(_derivative(M, alpha, pts, allow_fd=False))
    ratio = vals / (C * nform_weight(pts, N))
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    worst = tuple(float(c) for c in pts[idx])
    max_ratio = float(ratio[idx])
    return MultiplicatorResult(bool(max_ratio <= 1.0), max_ratio, worst)


# --------------------------------------------------------------------------
# refinement ladders

def refine_pplus(grid: MomentumGrid, ratio: int = LADDER_RATIO) -> MomentumGrid:
    """Divide the ``p^+`` step by an odd ``ratio`` over the same extent.

    An odd ratio keeps every old half-step node on the new axis, so suprema
    can only grow along a ladder.
    """
    if ratio % 2 == 0 or ratio < 3:
        raise ValueError("ladder ratio must be odd and >= 3")
    a = grid.axes[0]
    new = AxisSpec.half_step(a.step / ratio, a.count * ratio)
    return MomentumGrid(grid.params, (new,) + tuple(grid.axes[1:]), grid.kind)


def ladder(grid: MomentumGrid, levels: int = 3, ratio: int = LADDER_RATIO) -> list:
    out = [grid]
    for _ in range(levels - 1):
        out.append(refine_pplus(out[-1], ratio))
    return out


@dataclass(frozen=True)
class Certificate:
    passed: bool
    values: tuple
    growth: tuple
    label: str = ""


def _certify(values, label: str, threshold: float = STABLE_GROWTH) -> Certificate:
    values = tuple(float(v) for v in values)
    growth = []
    for a, b in zip(values[:-1], values[1:]):
        growth.append(1.0 if a == 0 and b == 0 else (np.inf if a == 0 else b / a))
    ok = all(np.isfinite(v) for v in values) and all(g < threshold for g in growth)
    return Certificate(bool(ok), values, tuple(growth), label)


def seminorm_certificate(f, k: int, beta, alpha, grids: Sequence[MomentumGrid]) -> Certificate:
    """Stable seminorm along a refinement ladder (growth below ``STABLE_GROWTH``)."""
    vals = [squeezed_seminorm(f, k, beta, alpha, g) for g in grids]
    return _certify(vals, f"k={k} beta={tuple(beta)} alpha={tuple(alpha)}")


def multi_indices(dim: int, max_order: int) -> list:
    out = []
    for total in range(max_order + 1):
        out.extend(_compositions(total, dim))
    return out


def _compositions(total: int, parts: int) -> list:
    if parts == 1:
        return [(total,)]
    return [(i,) + rest for i in range(total, -1, -1) for rest in _compositions(total - i, parts - 1)]


def squeezed_certificates(f, grids: Sequence[MomentumGrid], ks=range(-8, 9), max_beta: int = 2,
                          max_alpha: int = 2) -> list:
    """Certificates for every ``(k, beta, alpha)`` in the ranges; derivatives
    are evaluated once per rung and reused across ``k`` and ``beta``."""
    dim = grids[0].ndim
    alphas = multi_indices(dim, max_alpha)
    betas = multi_indices(dim - 1, max_beta) if dim > 1 else [()]
    table = {}
    for g in grids:
        _check_grid(g)
        pts = g.points()
        pplus = pts[..., 0]
        for alpha in alphas:
            vals = np.abs(_derivative(f, alpha, pts, allow_fd=False))
            for beta in betas:
                w = vals.copy()
                for i, b in enumerate(beta):
                    if b:
                        w = w * np.abs(pts[..., i + 1]) ** b
                for k in ks:
                    table.setdefault((k, beta, alpha), []).append(float(np.max(np.abs(pplus) ** float(k) * w)))
    return [_certify(v, f"k={k} beta={beta} alpha={alpha}") for (k, beta, alpha), v in table.items()]


def filtration_check(f, k: int, grids: Sequence[MomentumGrid]) -> Certificate:
    """Finite-order divisibility: ``f / (p^+)^k`` and its first derivatives
    stay bounded (stable suprema) along the ladder."""
    dim = grids[0].ndim
    vals = []
    for g in grids:
        _check_grid(g)
        pts = g.points()
        t = pts[..., 0]
        f0 = np.asarray(_derivative(f, (0,) * dim, pts, False))
        sup = np.max(np.abs(f0 / t**k))
        for i in range(dim):
            alpha = tuple(1 if j == i else 0 for j in range(dim))
            d = _derivative(f, alpha, pts, False) / t**k
            if i == 0:
                d = d - k * f0 / t ** (k + 1)
            sup = max(sup, np.max(np.abs(d)))
        vals.append(float(sup))
    return _certify(vals, f"f/(p^+)^{k}")
