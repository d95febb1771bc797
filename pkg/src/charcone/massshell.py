"""Mass-shell densities, Cauchy and characteristic data, and their transport.

A "field" below is anything evaluable on spatial momenta: a test-function
spec, a :class:`~charcone.grids.GridFunction` (cubic interpolation off the
nodes) or a plain callable. Pointwise operations on grid functions that share
a grid stay on the grid; anything else becomes a lazily evaluated
:class:`Pointwise` closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kinematics as kin
from .grids import GridFunction, MomentumGrid
from .quadrature import QuadResult, pair_lc_delta, pair_minkowski_delta

FOUR_PI = 4.0 * np.pi


class Pointwise:
    """``fn(x, *(field(x) for field in inputs))`` evaluated on demand."""

    def __init__(self, fn: Callable, *inputs, dim: int | None = None):
        self.fn = fn
        self.inputs = inputs
        self.dim = dim

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.fn(x, *(f(x) for f in self.inputs))


def combine(fn: Callable, *fields, dim: int | None = None):
    """Apply ``fn(points, *values)`` to fields, staying on a grid when possible."""
    grids = [f.grid for f in fields if isinstance(f, GridFunction)]
    if grids and len(grids) == len(fields):
        grid = grids[0]
        if any(g != grid for g in grids[1:]):
            raise ValueError("grid functions live on different grids")
        return GridFunction(grid, fn(grid.points(), *(f.values for f in fields)))
    return Pointwise(fn, *fields, dim=dim)


def on_grid(field, grid: MomentumGrid | None):
    """Sample ``field`` on ``grid``; returns the field unchanged for ``grid=None``."""
    if grid is None:
        return field
    if isinstance(field, GridFunction) and field.grid == grid:
        return field
    return GridFunction(grid, np.broadcast_to(field(grid.points()), grid.shape))


def _zero(x):
    return np.zeros(np.shape(x)[:-1], dtype=complex)


@dataclass(frozen=True)
class CauchyData:
    """Spatial Euclidean transforms of ``u`` and ``d_0 u`` on ``{x^0 = 0}``."""

    u0_hat: object
    u1_hat: object
    params: kin.ModelParams


@dataclass(frozen=True)
class CharacteristicData:
    """Partial light-cone transform of the restriction to ``{x^+ = 0}``."""

    u0_lc_hat: object
    params: kin.ModelParams


@dataclass(frozen=True)
class MassShellDensityM:
    """``a0 delta_+ + a1 delta_-`` in Minkowski spatial momenta."""

    a0: object
    a1: object
    params: kin.ModelParams


class MassShellDensityLC:
    """``b delta(pt^2 - m^2)`` in light-cone spatial momenta.

    The stored quantity is the reduced density ``b / (4 pi |p^+|)``, which is
    also the ``x^+ = 0`` tame profile; ``b`` itself is derived on access.
    Keeping the reduced form makes restriction and the characteristic solve
    exact inverses of each other.
    """

    __slots__ = ("reduced", "params")

    def __init__(self, reduced, params: kin.ModelParams):
        if isinstance(reduced, GridFunction) and reduced.grid.kind != "lc-momentum":
            raise ValueError("light-cone densities need an lc-momentum grid")
        self.reduced = reduced
        self.params = params

    @classmethod
    def from_b(cls, b, params: kin.ModelParams) -> "MassShellDensityLC":
        return cls(combine(lambda x, v: v / (FOUR_PI * np.abs(x[..., 0])), b, dim=params.n), params)

    @property
    def b(self):
        return combine(lambda x, v: (FOUR_PI * np.abs(x[..., 0])) * v, self.reduced, dim=self.params.n)

    def __repr__(self):
        return f"MassShellDensityLC(reduced={self.reduced!r}, params={self.params!r})"


# --------------------------------------------------------------------------

def from_cauchy(data: CauchyData, grid: MomentumGrid | None = None) -> MassShellDensityM:
    """``a0 = 2 pi (omega u0 + i u1)``, ``a1 = 2 pi (omega u0 - i u1)``."""
    params = data.params
    u0, u1 = on_grid(data.u0_hat, grid), on_grid(data.u1_hat, grid)

    def a0(x, v0, v1):
        return 2 * np.pi * (kin.omega(x, params) * v0 + 1j * v1)

    def a1(x, v0, v1):
        return 2 * np.pi * (kin.omega(x, params) * v0 - 1j * v1)

    return MassShellDensityM(combine(a0, u0, u1, dim=params.n), combine(a1, u0, u1, dim=params.n), params)


def cauchy_from_density(msd: MassShellDensityM) -> CauchyData:
    """Algebraic inverse of :func:`from_cauchy`."""
    params = msd.params

    def u0(x, a0, a1):
        return (a0 + a1) / (FOUR_PI * kin.omega(x, params))

    def u1(x, a0, a1):
        return (a0 - a1) / (FOUR_PI * 1j)

    return CauchyData(combine(u0, msd.a0, msd.a1, dim=params.n), combine(u1, msd.a0, msd.a1, dim=params.n), params)


def split_pm(msd: MassShellDensityLC):
    """``(Theta(p^+) b, Theta(-p^+) b)`` as two light-cone densities."""

    def part(sign):
        def fn(x, v):
            return np.where(sign * x[..., 0] > 0, v, 0.0 * v)

        return MassShellDensityLC(combine(fn, msd.reduced, dim=msd.params.n), msd.params)

    return part(1), part(-1)


def _pull(field, sign: int, params: kin.ModelParams, to_minkowski: bool):
    # to_minkowski: field on pt, evaluated at mu(p); otherwise field on p at nu(pt)
    def fn(x):
        x = np.asarray(x, dtype=float)
        if to_minkowski:
            return np.asarray(field(kin.mu_squeeze(sign, x, params)), dtype=complex)
        out = np.zeros(x.shape[:-1], dtype=complex)
        mask = sign * x[..., 0] > 0
        if np.any(mask):
            out[mask] = field(kin.nu_unsqueeze(sign, x[mask], params))
        return out

    return fn


def lc_b_from_m(msd: MassShellDensityM):
    """Callable ``b(pt)``: ``a0 o nu_+`` for ``p^+ > 0``, ``a1 o nu_-`` for ``p^+ < 0``."""
    plus = _pull(msd.a0, 1, msd.params, False)
    minus = _pull(msd.a1, -1, msd.params, False)

    def b(x):
        return plus(x) + minus(x)

    return b


def lc_from_m(msd: MassShellDensityM, lc_grid: MomentumGrid | None = None) -> MassShellDensityLC:
    """Transport a Minkowski density to light-cone momenta through ``nu``."""
    b = lc_b_from_m(msd)
    if lc_grid is not None:
        if lc_grid.kind != "lc-momentum":
            raise ValueError("target grid must be of kind lc-momentum")
        b = on_grid(b, lc_grid)
    return MassShellDensityLC.from_b(b, msd.params)


def m_from_lc(msd: MassShellDensityLC, grid: MomentumGrid | None = None) -> MassShellDensityM:
    """``a0 = b o mu_+``, ``a1 = b o mu_-``."""
    params = msd.params
    b = msd.b
    a0 = on_grid(_pull(b, 1, params, True), grid)
    a1 = on_grid(_pull(b, -1, params, True), grid)
    return MassShellDensityM(a0, a1, params)


def _shell_factor_lc(params: kin.ModelParams, mass_shift: float):
    m2 = params.m**2 + mass_shift

    def q(v):
        return 2.0 * v[..., 0] * v[..., -1] - kin.sq_norm(v, 1, v.shape[-1] - 1) - m2

    return q


def _shell_factor_m(params: kin.ModelParams, mass_shift: float):
    m2 = params.m**2 + mass_shift

    def q(v):
        return v[..., 0] ** 2 - kin.sq_norm(v, 1) - m2

    return q


def division_residual(msd, f, level: int = 6, extent: float | None = None,
                      mass_shift: float = 0.0) -> QuadResult:
    """Pairing of the density with ``(p^2 - m^2) f``; vanishes on the shell.

    ``f`` lives on full momenta in the density's frame (light-cone vectors
    ``(p^+, p_perp, p^-)`` for light-cone densities). ``mass_shift`` moves the
    mass in the factor only, which makes the result nonzero.
    """
    params = msd.params
    if isinstance(msd, MassShellDensityLC):
        q = _shell_factor_lc(params, mass_shift)
        return pair_lc_delta(msd.b, lambda v: q(v) * f(v), "both", params, level, extent)
    q = _shell_factor_m(params, mass_shift)
    plus = pair_minkowski_delta(msd.a0, lambda v: q(v) * f(v), "+", params, level, extent)
    minus = pair_minkowski_delta(msd.a1, lambda v: q(v) * f(v), "-", params, level, extent)
    return QuadResult(plus.value + minus.value, plus.error + minus.error, level, plus.nodes_per_axis)


def zero_density_m(params: kin.ModelParams) -> MassShellDensityM:
    return MassShellDensityM(_zero, _zero, params)
