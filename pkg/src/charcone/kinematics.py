"""On-shell energies, light-cone coordinates and the squeezing maps.

Array conventions used throughout the package:

* Minkowski spatial momenta ``p`` have shape ``(..., n)`` with components
  ``(p^1, ..., p^n)``.
* Light-cone spatial momenta ``pt`` have shape ``(..., n)`` with components
  ``(p^+, p_perp)``, i.e. ``pt[..., 0]`` is ``p^+``.
* Full Minkowski vectors are ``(x^0, x^1, ..., x^n)``; full light-cone
  vectors are ``(x^+, x_perp, x^-)``.

All functions are vectorised over leading axes and pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

SQRT2 = np.sqrt(2.0)

Sign = Union[int, str]


@dataclass(frozen=True)
class ModelParams:
    """Mass ``m`` (strictly positive) and spatial dimension ``n``."""

    m: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.m) or self.m <= 0:
            raise ValueError(f"mass must be finite and > 0, got {self.m!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"spatial dimension must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "n", int(self.n))


def sign_value(sign: Sign) -> int:
    """Normalise ``'+'``/``'-'``/``+1``/``-1`` to ``+1``/``-1``."""
    if sign in ("+", 1, "plus", "pos"):
        return 1
    if sign in ("-", -1, "minus", "neg"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def _as_points(p, n: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim == 0 or p.shape[-1] != n:
        raise ValueError(f"expected trailing dimension {n}, got shape {p.shape}")
    return p


def empty_points(shape, dim: int) -> np.ndarray:
    """Uninitialised ``shape + (dim,)`` array whose component slices are contiguous."""
    return np.moveaxis(np.empty((dim,) + tuple(shape)), 0, -1)


def sq_norm(x, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Sum of squares over components ``start:stop`` of the last axis."""
    stop = x.shape[-1] if stop is None else stop
    total = np.zeros(x.shape[:-1])
    for i in range(start, stop):
        total += x[..., i] * x[..., i]
    return total


def omega(p, params: ModelParams) -> np.ndarray:
    """Relativistic energy ``sqrt(p^2 + m^2)``."""
    p = _as_points(p, params.n)
    total = sq_norm(p)
    total += params.m**2
    return np.sqrt(total)


def lc_omega(pt, params: ModelParams) -> np.ndarray:
    """Light-cone energy ``(p_perp^2 + m^2) / (2 p^+)``; rejects ``p^+ = 0``."""
    pt = _as_points(pt, params.n)
    pplus = pt[..., 0]
    if np.any(pplus == 0):
        raise ValueError("lc_omega is undefined at p^+ = 0")
    return (sq_norm(pt, 1) + params.m**2) / (2.0 * pplus)


@dataclass(frozen=True)
class FullVector:
    """A (1+n)-vector tagged with the frame its components refer to."""

    components: np.ndarray
    frame: Literal["minkowski", "lightcone"]

    def __post_init__(self):
        if self.frame not in ("minkowski", "lightcone"):
            raise ValueError(f"unknown frame {self.frame!r}")
        object.__setattr__(self, "components", np.asarray(self.components, dtype=float))


def _kappa_array(v: np.ndarray) -> np.ndarray:
    out = empty_points(v.shape[:-1], v.shape[-1])
    for i in range(1, v.shape[-1] - 1):
        out[..., i] = v[..., i]
    out[..., 0] = (v[..., 0] + v[..., -1]) / SQRT2
    out[..., -1] = (v[..., 0] - v[..., -1]) / SQRT2
    return out


def kappa(v):
    """Minkowski ``(x^0, x, x^n)`` to light-cone ``(x^+, x_perp, x^-)``.

    Accepts a raw array (last axis of length 1+n) or a :class:`FullVector`
    in the Minkowski frame.
    """
    if isinstance(v, FullVector):
        if v.frame != "minkowski":
            raise ValueError("kappa expects a Minkowski-frame vector")
        return FullVector(_kappa_array(v.components), "lightcone")
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] < 2:
        raise ValueError("full vectors need at least 2 components")
    return _kappa_array(v)


def kappa_inv(v):
    """Inverse of :func:`kappa` (the map is an involution on the arrays)."""
    if isinstance(v, FullVector):
        if v.frame != "lightcone":
            raise ValueError("kappa_inv expects a light-cone-frame vector")
        return FullVector(_kappa_array(v.components), "minkowski")
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] < 2:
        raise ValueError("full vectors need at least 2 components")
    return _kappa_array(v)


def minkowski_form(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = x[..., 0] * y[..., 0]
    for i in range(1, x.shape[-1]):
        out = out - x[..., i] * y[..., i]
    return out


def lc_form(x, y) -> np.ndarray:
    """``x^+ y^- + x^- y^+ - x_perp . y_perp``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = x[..., 0] * y[..., -1] + x[..., -1] * y[..., 0]
    for i in range(1, x.shape[-1] - 1):
        out = out - x[..., i] * y[..., i]
    return out


def mass_shell(sign: Sign, p, params: ModelParams) -> np.ndarray:
    """Graph parametrisation ``p -> (+-omega(p), p)`` of the upper/lower sheet."""
    s = sign_value(sign)
    p = _as_points(p, params.n)
    out = empty_points(p.shape[:-1], p.shape[-1] + 1)
    out[..., 0] = omega(p, params)
    if s < 0:
        np.negative(out[..., 0], out=out[..., 0])
    for i in range(p.shape[-1]):
        out[..., i + 1] = p[..., i]
    return out


def lc_mass_shell(pt, params: ModelParams) -> np.ndarray:
    """``pt -> (p^+, p_perp, lc_omega(pt))`` on ``{p^+ != 0}``."""
    pt = _as_points(pt, params.n)
    out = empty_points(pt.shape[:-1], pt.shape[-1] + 1)
    for i in range(pt.shape[-1]):
        out[..., i] = pt[..., i]
    out[..., -1] = lc_omega(pt, params)
    return out


def mu_squeeze(sign: Sign, p, params: ModelParams) -> np.ndarray:
    """Unsqueezing ``p -> ((p^n +- omega)/sqrt2, p^1..p^{n-1})``.

    The cancelling branch of ``p^n +- omega`` is rewritten as
    ``+-(p_perp^2 + m^2)/(omega -+ p^n)`` to keep full relative precision.
    """
    return mu_squeeze_with_omega(sign, p, params)[0]


def mu_squeeze_with_omega(sign: Sign, p, params: ModelParams):
    """:func:`mu_squeeze` together with ``omega(p)``, sharing the work."""
    s = sign_value(sign)
    p = _as_points(p, params.n)
    pn = p[..., -1]
    transverse = sq_norm(p, 0, p.shape[-1] - 1)
    transverse += params.m**2
    w = np.sqrt(transverse + pn * pn)
    same = s * pn >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        plus = np.where(same, pn + s * w, s * transverse / (w - s * pn))
    out = empty_points(p.shape[:-1], p.shape[-1])
    out[..., 0] = plus / SQRT2
    for i in range(p.shape[-1] - 1):
        out[..., i + 1] = p[..., i]
    return out, w


def nu_unsqueeze(sign: Sign, pt, params: ModelParams) -> np.ndarray:
    """Squeezing map ``{+-p^+ > 0} -> R^n``, inverse of :func:`mu_squeeze`.

    ``p^n = (p^+ - lc_omega(pt)) / sqrt2`` and ``p_perp`` is copied.
    """
    s = sign_value(sign)
    pt = _as_points(pt, params.n)
    if np.any(s * pt[..., 0] <= 0):
        raise ValueError(f"nu_unsqueeze({'+' if s > 0 else '-'}) needs {'+' if s > 0 else '-'}p^+ > 0")
    out = empty_points(pt.shape[:-1], pt.shape[-1])
    for i in range(pt.shape[-1] - 1):
        out[..., i] = pt[..., i + 1]
    out[..., -1] = (pt[..., 0] - lc_omega(pt, params)) / SQRT2
    return out


def nu_jacobian(pt, params: ModelParams):
    """First and second derivatives of the squeezing map at ``pt``.

    Returns ``(jac, hess)`` with ``jac[..., j, a] = d nu_j / d pt_a`` and
    ``hess[..., j, a, b]``. Only the last component of ``nu`` is nonlinear.
    """
    pt = _as_points(pt, params.n)
    n = params.n
    pplus = pt[..., 0]
    perp = pt[..., 1:]
    t = sq_norm(perp) + params.m**2
    shape = pt.shape[:-1]
    jac = np.zeros(shape + (n, n))
    hess = np.zeros(shape + (n, n, n))
    for i in range(n - 1):
        jac[..., i, i + 1] = 1.0
    jac[..., n - 1, 0] = (1.0 + t / (2.0 * pplus**2)) / SQRT2
    for i in range(n - 1):
        jac[..., n - 1, i + 1] = -perp[..., i] / (SQRT2 * pplus)
    hess[..., n - 1, 0, 0] = -t / (SQRT2 * pplus**3)
    for i in range(n - 1):
        cross = perp[..., i] / (SQRT2 * pplus**2)
        hess[..., n - 1, 0, i + 1] = cross
        hess[..., n - 1, i + 1, 0] = cross
        hess[..., n - 1, i + 1, i + 1] = -1.0 / (SQRT2 * pplus)
    return jac, hess
