"""Evolution of Cauchy data, the tame family in light-cone time, and checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kinematics as kin
from . import massshell as ms
from .grids import GridFunction, MomentumGrid
from .transform import dft, target_grid


@dataclass(frozen=True)
class EvolvedProfile:
    """Spatial Fourier transform of a time slice.

    ``frame='minkowski'`` means ``time`` is ``x^0`` and the profile is a field
    on Minkowski momenta; ``frame='lightcone'`` means ``x^+`` and light-cone
    momenta.
    """

    time: float
    frame: str
    profile: object

    def __post_init__(self):
        if self.frame not in ("minkowski", "lightcone"):
            raise ValueError(f"unknown frame {self.frame!r}")
        if isinstance(self.profile, GridFunction):
            want = "minkowski-momentum" if self.frame == "minkowski" else "lc-momentum"
            if self.profile.grid.kind != want:
                raise ValueError(f"{self.frame} profiles need a {want} grid")


def evolve_profile(msd: ms.MassShellDensityM, x0: float, grid: MomentumGrid | None = None) -> EvolvedProfile:
    """``(a0 e^{-i omega x0} + a1 e^{i omega x0}) / (4 pi omega)``."""
    params = msd.params
    t = float(x0)

    def fn(x, a0, a1):
        w = kin.omega(x, params)
        phase = np.exp(-1j * w * t)
        return (a0 * phase + a1 * np.conj(phase)) / (ms.FOUR_PI * w)

    a0, a1 = ms.on_grid(msd.a0, grid), ms.on_grid(msd.a1, grid)
    return EvolvedProfile(t, "minkowski", ms.combine(fn, a0, a1, dim=params.n))


def d0_profile(msd: ms.MassShellDensityM, x0: float, grid: MomentumGrid | None = None) -> EvolvedProfile:
    """``(a0 e^{-i omega x0} - a1 e^{i omega x0}) / (4 pi i)``."""
    params = msd.params
    t = float(x0)

    def fn(x, a0, a1):
        phase = np.exp(-1j * kin.omega(x, params) * t)
        return (a0 * phase - a1 * np.conj(phase)) / (ms.FOUR_PI * 1j)

    a0, a1 = ms.on_grid(msd.a0, grid), ms.on_grid(msd.a1, grid)
    return EvolvedProfile(t, "minkowski", ms.combine(fn, a0, a1, dim=params.n))


def densities_at(u_hat, du_hat, x0: float, params: kin.ModelParams) -> ms.MassShellDensityM:
    """Densities of the solution whose ``x^0 = x0`` slice has transforms ``(u, d0 u)``.

    Inverts the two slice formulas; at ``x0 = 0`` this is :func:`~charcone.massshell.from_cauchy`.
    """
    t = float(x0)

    def a0(x, u, du):
        w = kin.omega(x, params)
        return 2 * np.pi * (w * u + 1j * du) * np.exp(1j * w * t)

    def a1(x, u, du):
        w = kin.omega(x, params)
        return 2 * np.pi * (w * u - 1j * du) * np.exp(-1j * w * t)

    return ms.MassShellDensityM(ms.combine(a0, u_hat, du_hat, dim=params.n),
                                ms.combine(a1, u_hat, du_hat, dim=params.n), params)


def tame_profile(msd: ms.MassShellDensityLC, xplus: float) -> EvolvedProfile:
    """``e^{-i lc_omega x^+} b / (4 pi |p^+|)``."""
    params = msd.params
    t = float(xplus)
    if t == 0.0:
        return EvolvedProfile(0.0, "lightcone", msd.reduced)

    def fn(x, r):
        return np.exp(-1j * kin.lc_omega(x, params) * t) * r

    return EvolvedProfile(t, "lightcone", ms.combine(fn, msd.reduced, dim=params.n))


def tame_restrict(msd: ms.MassShellDensityLC) -> ms.CharacteristicData:
    """Characteristic data ``b / (4 pi |p^+|)`` of the solution."""
    return ms.CharacteristicData(msd.reduced, msd.params)


def solve_characteristic(data: ms.CharacteristicData) -> ms.MassShellDensityLC:
    """Density ``b = 4 pi |p^+| u~`` of the unique solution with these data."""
    return ms.MassShellDensityLC(data.u0_lc_hat, data.params)


def xplus_derivative_error(msd: ms.MassShellDensityLC, grid: MomentumGrid, xplus: float = 0.0,
                           h: float = 1e-3) -> float:
    """Worst per-node relative gap between a central difference of the tame
    profile in ``x^+`` and ``-i lc_omega * profile``.

    Nodes where the profile vanishes exactly are skipped.
    """
    params = msd.params
    pts = grid.points()

    def prof(t):
        return np.asarray(ms.on_grid(tame_profile(msd, t).profile, grid).values)

    fd = (prof(xplus + h) - prof(xplus - h)) / (2 * h)
    exact = -1j * kin.lc_omega(pts, params) * prof(xplus)
    live = np.abs(exact) > 0
    if not np.any(live):
        return 0.0
    return float(np.max(np.abs(fd[live] - exact[live]) / np.abs(exact[live])))


@dataclass(frozen=True)
class KGResidual:
    value: float
    zero_solution: bool
    scale: float


def position_slices(msd: ms.MassShellDensityM, pos_grid: MomentumGrid, times) -> np.ndarray:
    """Position-space samples of the solution at each time (inverse DFT)."""
    if pos_grid.kind != "minkowski-position" or pos_grid.spacetime:
        raise ValueError("position slices need a spatial minkowski-position grid")
    mom = target_grid(pos_grid, "euclid")
    out = []
    for t in times:
        prof = ms.on_grid(evolve_profile(msd, t, mom).profile, mom)
        out.append(dft(prof, "euclid_inverse", target=pos_grid).values)
    return np.array(out)


def kg_residual(msd: ms.MassShellDensityM, pos_grid: MomentumGrid, x0_list) -> KGResidual:
    """Discrete ``(d_0^2 - Laplacian + m^2) u`` over the inner slices.

    Uses second-order centred differences in ``x^0`` (the slices) and in each
    spatial direction (periodic, matching the DFT). Returns the max-norm of
    the residual relative to the max-norm of the solution; a vanishing
    solution returns 0 with ``zero_solution=True``.
    """
    times = np.asarray(list(x0_list), dtype=float)
    if times.size < 5:
        raise ValueError(f"need at least 5 time slices, got {times.size}")
    dt = np.diff(times)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0) or dt[0] <= 0:
        raise ValueError("time slices must be equally spaced and increasing")
    dt = float(dt[0])
    u = position_slices(msd, pos_grid, times)
    scale = float(np.max(np.abs(u)))
    if scale == 0.0:
        return KGResidual(0.0, True, 0.0)
    inner = u[1:-1]
    d2t = (u[2:] - 2 * inner + u[:-2]) / dt**2
    lap = np.zeros_like(inner)
    for axis, a in enumerate(pos_grid.axes):
        ax = axis + 1
        lap += (np.roll(inner, 1, axis=ax) - 2 * inner + np.roll(inner, -1, axis=ax)) / a.step**2
    res = d2t - lap + msd.params.m**2 * inner
    return KGResidual(float(np.max(np.abs(res))) / scale, False, scale)
