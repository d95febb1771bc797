"""Restriction of the Pauli-Jordan function to ``{x^+ = 0}`` by independent routes.

Test functions live on light-cone positions ``(x^-, x_perp)``. Routes:

* :func:`pj_pairing_quadrature` pairs the characteristic data ``i / (2 p^+)``
  with the partial light-cone transform of ``f`` over the half-space
  ``p^+ > 0`` after symmetrising ``pt -> -pt``;
* :func:`pj_pairing_closed_form` evaluates ``(1/4) int eps(x^-) f(x^-, 0) dx^-``;
* :func:`lc_profile_pairing` pairs an arbitrary characteristic profile with
  ``f`` and is fed from the generic solve/restrict pipeline.
"""

from __future__ import annotations

import numpy as np

from . import kinematics as kin
from . import massshell as ms
from . import testfn as tf
from .evolution import solve_characteristic, tame_profile, tame_restrict
from .grids import MomentumGrid
from .quadrature import QuadResult, QuadratureError, integrate_rn


def pj_value(x) -> np.ndarray:
    """``i / (2 p^+)``; independent of ``p_perp`` and of the mass."""
    x = np.asarray(x, dtype=float)
    return 0.5j / x[..., 0]


def pj_cauchy_data(params: kin.ModelParams) -> ms.CauchyData:
    """``u0 = 0``, ``d_0 u = delta``: transforms ``0`` and ``1``."""
    return ms.CauchyData(tf.Constant(0.0, params.n), tf.Constant(1.0, params.n), params)


def pj_characteristic_data(params: kin.ModelParams, grid: MomentumGrid | None = None) -> ms.CharacteristicData:
    field = ms.Pointwise(pj_value, dim=params.n)
    return ms.CharacteristicData(ms.on_grid(field, grid), params)


def _lc_transform(f):
    """Callable partial light-cone transform of ``f``."""
    if callable(f) and not isinstance(f, tf.Spec):
        return f
    hat = tf.lc_fourier_exact(f)
    if hat is None:
        raise ValueError(f"no closed-form transform for {type(f).__name__}; pass a callable transform")
    return hat


def _check_convergence(fine: QuadResult, tol: float) -> None:
    scale = max(1.0, abs(fine.value))
    if not np.isfinite(fine.value) or fine.error > tol * scale:
        raise QuadratureError(
            f"half-space pairing not converging: Richardson estimate {fine.error:.3e} at level {fine.level}"
        )


def lc_profile_pairing(profile, f, params: kin.ModelParams, level: int | None = None,
                       extent: float | None = None, tol: float = 1e-6) -> QuadResult:
    """``(2 pi)^-n int u~(pt) f^(-pt) d^n pt``, symmetrised onto ``p^+ > 0``.

    ``profile`` is the partial light-cone transform of the characteristic
    data; ``f`` is a spec on ``(x^-, x_perp)`` (or its callable transform).
    The symmetrised integrand is finite at ``p^+ = 0`` when the odd part
    cancels; otherwise the Richardson estimate stalls and an error is raised.
    """
    n = params.n
    hat = _lc_transform(f)
    level = default_level(n) if level is None else level
    extent = 12.0 if extent is None else extent

    def integrand(pt):
        neg = -pt
        return profile(pt) * hat(neg) + profile(neg) * hat(pt)

    res = integrate_rn(integrand, n, level, extent, half_axes=(0,))
    res = QuadResult(res.value / (2 * np.pi) ** n, res.error / (2 * np.pi) ** n, res.level, res.nodes_per_axis)
    _check_convergence(res, tol)
    return res


def default_level(n: int) -> int:
    return {1: 7, 2: 6}.get(n, 4)


def pj_pairing_quadrature(f, params: kin.ModelParams, level: int | None = None,
                          extent: float | None = None, tol: float = 1e-6) -> QuadResult:
    """``(i / (2 pi)^n) int_{p^+ > 0} (f^(-pt) - f^(pt)) / (2 p^+) d^n pt``."""
    n = params.n
    hat = _lc_transform(f)
    level = default_level(n) if level is None else level
    extent = 12.0 if extent is None else extent

    def integrand(pt):
        return (hat(-pt) - hat(pt)) / (2.0 * pt[..., 0])

    res = integrate_rn(integrand, n, level, extent, half_axes=(0,))
    c = 1j / (2 * np.pi) ** n
    res = QuadResult(c * res.value, abs(c) * res.error, res.level, res.nodes_per_axis)
    _check_convergence(res, tol)
    return res


def pj_pairing_closed_form(f, params: kin.ModelParams, level: int = 7, extent: float = 12.0) -> QuadResult:
    """``(1/4) int eps(x^-) f(x^-, 0_perp) dx^-`` by half-line quadrature."""
    n = params.n

    def line(x):
        pts = np.zeros(x.shape[:-1] + (n,))
        pts[..., 0] = x[..., 0]
        return np.asarray(f(pts))

    def integrand(x):
        return line(x) - line(-x)

    res = integrate_rn(integrand, 1, level, extent, half_axes=(0,))
    return QuadResult(0.25 * res.value, 0.25 * res.error, res.level, res.nodes_per_axis)


def default_probe(n: int) -> tf.Spec:
    """``-2 x^- exp(-(x^-)^2) exp(-|x_perp|^2)``."""
    g = tf.GaussHermite((0.0,) * n, 1.0 / np.sqrt(2.0), (1,) + (0,) * (n - 1))
    return tf.scaled(g, -2.0)


def pipeline_profile(params: kin.ModelParams):
    """``x^+ = 0`` tame profile of the solution built from the characteristic data."""
    msd = solve_characteristic(pj_characteristic_data(params))
    return tame_profile(msd, 0.0).profile


def restricted_via_cauchy(params: kin.ModelParams, lc_grid: MomentumGrid | None = None):
    """Characteristic data of the Pauli-Jordan solution via the mass-shell route."""
    msd = ms.from_cauchy(pj_cauchy_data(params))
    return tame_restrict(ms.lc_from_m(msd, lc_grid))

