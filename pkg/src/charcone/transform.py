"""Fourier transforms on grids and specs, and the initial-data conversion laws.

Sign conventions (``n`` spatial axes, ``x.p`` Euclidean):

=====================  =============================================
``euclid``             ``int f(x) exp(-i x.p) dx``
``euclid_inverse``     ``(2 pi)^-n int g(p) exp(+i x.p) dp``
``partial_lc``         ``int f exp(+i (x^- p^+ - x_perp.p_perp))``
``partial_lc_inverse`` ``(2 pi)^-n int g exp(-i (x^- p^+ - x_perp.p_perp))``
``minkowski_full``     ``int f(x) exp(+i <x, p>)`` on ``1+n`` axes
``lc_full``            ``int f exp(+i [x, p])`` on ``(x^+, x_perp, x^-)``
=====================  =============================================

Light-cone positions on spatial grids are ordered ``(x^-, x_perp)`` so the
``x^-`` axis pairs with the ``p^+`` axis. In ``lc_full`` the pairing is
``x^+ p^- + x^- p^+``; the result is reordered to ``(p^+, p_perp, p^-)``.
"""

from __future__ import annotations

import numpy as np

from . import kinematics as kin
from . import massshell as ms
from .grids import AxisSpec, GridFunction, MomentumGrid
from .quadrature import integrate_rn

CONVENTIONS = (
    "euclid",
    "euclid_inverse",
    "partial_lc",
    "partial_lc_inverse",
    "minkowski_full",
    "minkowski_full_inverse",
    "lc_full",
    "lc_full_inverse",
)

_DUAL_KIND = {
    "minkowski-position": "minkowski-momentum",
    "minkowski-momentum": "minkowski-position",
    "lc-position": "lc-momentum",
    "lc-momentum": "lc-position",
}


def _signs(conv: str, ndim: int) -> np.ndarray:
    """Per-axis exponent sign of the forward/inverse kernel."""
    if conv.startswith("euclid"):
        s = -np.ones(ndim)
    elif conv.startswith("partial_lc") or conv.startswith("minkowski_full"):
        s = -np.ones(ndim)
        s[0] = 1.0
    elif conv.startswith("lc_full"):
        s = -np.ones(ndim)
        s[0] = s[-1] = 1.0
    else:
        raise ValueError(f"unknown convention {conv!r}; expected one of {CONVENTIONS}")
    return -s if conv.endswith("_inverse") else s


def _axis_transform(values: np.ndarray, axis: int, src: AxisSpec, dst: AxisSpec, sign: float) -> np.ndarray:
    # sum_j f_j exp(sign i x_j p_k) dx with x_j = x0 + j dx, p_k = p0 + k dp,
    # dx dp = 2 pi / N:  the jk term is the DFT kernel; the rest are ramps.
    n = src.count
    x0, dx, p0, dp = src.min, src.step, dst.min, dst.step
    j = np.arange(n)
    shape = [1] * values.ndim
    shape[axis] = n
    pre = np.exp(sign * 1j * j * dx * p0).reshape(shape)
    post = (dx * np.exp(sign * 1j * x0 * (p0 + j * dp))).reshape(shape)
    data = values * pre
    if sign < 0:
        out = np.fft.fft(data, axis=axis)
    else:
        out = np.fft.ifft(data, axis=axis) * n
    return out * post


def reciprocal_axis(axis: AxisSpec, offset: str = "centered") -> AxisSpec:
    """Axis with ``step' = 2 pi / (count * step)`` and the same node count."""
    return AxisSpec.symmetric(2 * np.pi / (axis.count * axis.step), axis.count, offset)


def target_grid(grid: MomentumGrid, conv: str) -> MomentumGrid:
    """Reciprocal grid produced by :func:`dft` for ``conv``."""
    kind = _DUAL_KIND[grid.kind]
    axes = [reciprocal_axis(a) for a in grid.axes]
    if conv.startswith("lc_full"):
        # x^+ pairs with p^- and x^- with p^+
        axes[0], axes[-1] = axes[-1], axes[0]
    if kind == "lc-momentum":
        a = axes[0]
        axes[0] = AxisSpec.half_step(a.step, a.count)
    return MomentumGrid(grid.params, tuple(axes), kind)


def _check_target(grid: MomentumGrid, target: MomentumGrid, conv: str) -> None:
    expected = target_grid(grid, conv)
    if target.kind != expected.kind or target.shape != expected.shape:
        raise ValueError(f"target grid must be {expected.kind} with shape {expected.shape}")
    if not np.allclose(target.steps, expected.steps, rtol=1e-12, atol=0):
        raise ValueError("target steps must be reciprocal to the source steps")


def dft(gf: GridFunction, conv: str, target: MomentumGrid | None = None) -> GridFunction:
    """Discrete evaluation of the transform ``conv`` of ``gf``.

    The output lives on :func:`target_grid` unless ``target`` (same shape,
    reciprocal steps, any minima) is given. The discrete sum is evaluated
    exactly (FFT plus phase ramps for the axis minima), so a forward/inverse
    pair is the identity up to rounding.
    """
    grid = gf.grid
    if conv.startswith("partial_lc"):
        want = "lc-position" if not conv.endswith("_inverse") else "lc-momentum"
        if grid.kind != want or grid.spacetime:
            raise ValueError(f"{conv} acts on spatial {want} grids, got {grid.kind}")
    if conv.startswith(("minkowski_full", "lc_full")) and not grid.spacetime:
        raise ValueError(f"{conv} needs a 1+n axis grid")
    if conv.startswith("euclid") and grid.spacetime:
        raise ValueError(f"{conv} acts on spatial grids")
    if target is None:
        out_grid = target_grid(grid, conv)
    else:
        _check_target(grid, target, conv)
        out_grid = target
    signs = _signs(conv, grid.ndim)
    dst_axes = list(out_grid.axes)
    swap = conv.startswith("lc_full")
    if swap:
        dst_axes[0], dst_axes[-1] = dst_axes[-1], dst_axes[0]
    vals = np.asarray(gf.values, dtype=complex)
    for axis in range(grid.ndim):
        vals = _axis_transform(vals, axis, grid.axes[axis], dst_axes[axis], signs[axis])
    if conv.endswith("_inverse"):
        vals = vals / (2 * np.pi) ** grid.ndim
    if swap:
        vals = np.swapaxes(vals, 0, -1)
    return GridFunction(out_grid, vals)


def _kernel_phase(conv: str, x, p) -> np.ndarray:
    if conv == "euclid":
        return -np.sum(x * p, axis=-1)
    if conv == "partial_lc":
        return x[..., 0] * p[..., 0] - np.sum(x[..., 1:] * p[..., 1:], axis=-1)
    if conv == "minkowski_full":
        return kin.minkowski_form(x, p)
    if conv == "lc_full":
        return kin.lc_form(x, p)
    raise ValueError(f"quadrature transform supports forward conventions only, got {conv!r}")


def transform_quadrature(f, p, conv: str, level: int = 5, extent: float = 10.0) -> np.ndarray:
    """Transform of ``f`` at the momenta ``p`` (shape ``(k, dim)``) by quadrature."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    dim = p.shape[-1]
    out = np.empty(len(p), dtype=complex)
    for i, q in enumerate(p):
        res = integrate_rn(lambda x: f(x) * np.exp(1j * _kernel_phase(conv, x, q)), dim, level, extent,
                           estimate=False)
        out[i] = res.value
    return out


# --------------------------------------------------------------------------
# initial-data conversions

def convert_m_to_lc(data: ms.CauchyData, lc_grid: MomentumGrid | None = None) -> ms.CharacteristicData:
    """Characteristic data from Cauchy data.

    ``u~(pt) = (nu_+^*(omega u0 + i u1) + nu_-^*(omega u0 - i u1)) / (2|p^+|)``,
    where each term is supported on its own half-space.
    """
    params = data.params
    u0, u1 = data.u0_hat, data.u1_hat

    def branch(sign, x):
        q = kin.nu_unsqueeze(sign, x, params)
        return kin.omega(q, params) * u0(q) + sign * 1j * u1(q)

    def fn(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for sign in (1, -1):
            mask = sign * x[..., 0] > 0
            if np.any(mask):
                sub = x[mask]
                out[mask] = branch(sign, sub) / (2.0 * np.abs(sub[..., 0]))
        return out

    if lc_grid is not None and lc_grid.kind != "lc-momentum":
        raise ValueError("target grid must be of kind lc-momentum")
    return ms.CharacteristicData(ms.on_grid(ms.Pointwise(fn, dim=params.n), lc_grid), params)


def convert_lc_to_m(data: ms.CharacteristicData, grid: MomentumGrid | None = None) -> ms.CauchyData:
    """Cauchy data from characteristic data.

    With ``g(pt) = |p^+| u~(pt)``: ``u0 = (mu_+^* g + mu_-^* g) / omega`` and
    ``u1 = (mu_+^* g - mu_-^* g) / i``.
    """
    params = data.params
    u = data.u0_lc_hat

    def g(sign, x):
        pt = kin.mu_squeeze(sign, x, params)
        return np.abs(pt[..., 0]) * u(pt)

    def u0(x):
        x = np.asarray(x, dtype=float)
        return (g(1, x) + g(-1, x)) / kin.omega(x, params)

    def u1(x):
        x = np.asarray(x, dtype=float)
        return (g(1, x) - g(-1, x)) / 1j

    f0 = ms.on_grid(ms.Pointwise(u0, dim=params.n), grid)
    f1 = ms.on_grid(ms.Pointwise(u1, dim=params.n), grid)
    return ms.CauchyData(f0, f1, params)
