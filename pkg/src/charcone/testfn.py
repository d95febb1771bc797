"""Closed-form test-function families.

Every spec is an immutable value that can be called on an array of points
(shape ``(..., dim)``) and returns complex values of shape ``(...)``.

Families:

``GaussHermite``
    ``prod_i (x_i - c_i)^{a_i} exp(-|x - c|^2 / (2 s^2)) exp(i k.x)``.
``FlatAtZero``
    ``base(x) * exp(-scale / t^2)`` with ``t = x[axis]``, extended by 0 at
    ``t = 0``; every derivative vanishes on ``{t = 0}``.
``Pullback``
    ``base(nu_sign(pt))`` on ``{sign * p^+ > 0}`` and 0 elsewhere.
``XMinusDerivative``
    ``d^k base / (dx^-)^k``; light-cone positions are ordered
    ``(x^-, x_perp)`` so ``x^-`` is axis 0.
``Sum`` / ``Product`` / ``Constant``
    Linear combinations with complex coefficients, pointwise products.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import comb

from . import kinematics as kin

FD_STEP = 1e-4


class Spec:
    """Base class of the test-function families."""

    dim: int

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)

    def to_json(self) -> dict:
        raise NotImplementedError

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _tuple_float(v) -> tuple:
    return tuple(float(x) for x in v)


def _encode_complex(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _decode_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


@dataclass(frozen=True)
class GaussHermite(Spec):
    center: tuple
    width: float
    poly: tuple = ()
    wavevector: tuple = ()

    def __post_init__(self):
        c = _tuple_float(self.center)
        object.__setattr__(self, "center", c)
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError(f"width must be > 0, got {self.width!r}")
        object.__setattr__(self, "width", float(self.width))
        poly = tuple(int(a) for a in self.poly) or (0,) * len(c)
        if len(poly) != len(c) or any(a < 0 for a in poly):
            raise ValueError("poly must be a non-negative multi-index matching the center")
        object.__setattr__(self, "poly", poly)
        k = _tuple_float(self.wavevector) or (0.0,) * len(c)
        if len(k) != len(c):
            raise ValueError("wavevector must match the center's dimension")
        object.__setattr__(self, "wavevector", k)

    @property
    def dim(self) -> int:
        return len(self.center)

    def to_json(self) -> dict:
        return {
            "type": "GaussHermite",
            "center": list(self.center),
            "width": self.width,
            "poly": list(self.poly),
            "wavevector": list(self.wavevector),
        }


@dataclass(frozen=True)
class Constant(Spec):
    value: complex
    dim: int

    def to_json(self) -> dict:
        return {"type": "Constant", "value": _encode_complex(self.value), "dim": self.dim}


@dataclass(frozen=True)
class FlatAtZero(Spec):
    base: Spec
    axis: int = 0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("flat-scale must be > 0")
        if not 0 <= self.axis < self.base.dim:
            raise ValueError("flat axis out of range")

    @property
    def dim(self) -> int:
        return self.base.dim

    def to_json(self) -> dict:
        return {"type": "FlatAtZero", "base": self.base.to_json(), "axis": self.axis, "scale": self.scale}


@dataclass(frozen=True)
class Pullback(Spec):
    base: Spec
    sign: int
    m: float

    def __post_init__(self):
        object.__setattr__(self, "sign", kin.sign_value(self.sign))
        kin.ModelParams(self.m, self.base.dim)

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def params(self) -> kin.ModelParams:
        return kin.ModelParams(self.m, self.base.dim)

    def to_json(self) -> dict:
        return {
            "type": "Pullback",
            "base": self.base.to_json(),
            "sign": "+" if self.sign > 0 else "-",
            "m": self.m,
        }


@dataclass(frozen=True)
class XMinusDerivative(Spec):
    base: Spec
    order: int = 1

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise ValueError("x^- derivative order must be >= 1")

    @property
    def dim(self) -> int:
        return self.base.dim

    def to_json(self) -> dict:
        return {"type": "XMinusDerivative", "base": self.base.to_json(), "order": self.order}


@dataclass(frozen=True)
class Sum(Spec):
    children: tuple
    coeffs: tuple = ()

    def __post_init__(self):
        children = tuple(self.children)
        if not children:
            raise ValueError("Sum needs at least one child")
        coeffs = tuple(complex(c) for c in self.coeffs) or (1.0 + 0j,) * len(children)
        if len(coeffs) != len(children):
            raise ValueError("one coefficient per child")
        if len({c.dim for c in children}) != 1:
            raise ValueError("Sum children must share a dimension")
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim(self) -> int:
        return self.children[0].dim

    def to_json(self) -> dict:
        return {
            "type": "Sum",
            "children": [c.to_json() for c in self.children],
            "coeffs": [_encode_complex(c) for c in self.coeffs],
        }


@dataclass(frozen=True)
class Product(Spec):
    children: tuple

    def __post_init__(self):
        children = tuple(self.children)
        if not children:
            raise ValueError("Product needs at least one child")
        if len({c.dim for c in children}) != 1:
            raise ValueError("Product children must share a dimension")
        object.__setattr__(self, "children", children)

    @property
    def dim(self) -> int:
        return self.children[0].dim

    def to_json(self) -> dict:
        return {"type": "Product", "children": [c.to_json() for c in self.children]}


def scaled(spec: Spec, c: complex) -> Sum:
    return Sum((spec,), (c,))


def gaussian(dim: int, width: float = 1.0 / math.sqrt(2.0), center=None) -> GaussHermite:
    """``exp(-|x-c|^2/(2 width^2))``; the default width gives ``exp(-|x|^2)``."""
    return GaussHermite(tuple(center) if center is not None else (0.0,) * dim, width)


def from_json(d) -> Spec:
    if isinstance(d, str):
        d = json.loads(d)
    t = d.get("type")
    if t == "GaussHermite":
        return GaussHermite(
            tuple(d["center"]), float(d["width"]), tuple(d.get("poly", ())), tuple(d.get("wavevector", ()))
        )
    if t == "Constant":
        return Constant(_decode_complex(d["value"]), int(d["dim"]))
    if t == "FlatAtZero":
        return FlatAtZero(from_json(d["base"]), int(d.get("axis", 0)), float(d.get("scale", 1.0)))
    if t == "Pullback":
        return Pullback(from_json(d["base"]), d["sign"], float(d["m"]))
    if t == "XMinusDerivative":
        return XMinusDerivative(from_json(d["base"]), int(d.get("order", 1)))
    if t == "Sum":
        children = tuple(from_json(c) for c in d["children"])
        coeffs = tuple(_decode_complex(c) for c in d.get("coeffs", [])) or ()
        return Sum(children, coeffs)
    if t == "Product":
        return Product(tuple(from_json(c) for c in d["children"]))
    raise ValueError(f"unknown test-function type {t!r}")


# JSON schema used by the CLI to validate spec objects (recursive).
SPEC_SCHEMA = {
    "$id": "testfn-spec",
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {
            "enum": ["GaussHermite", "Constant", "FlatAtZero", "Pullback", "XMinusDerivative", "Sum", "Product"]
        },
        "center": {"type": "array", "items": {"type": "number"}},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "poly": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "wavevector": {"type": "array", "items": {"type": "number"}},
        "dim": {"type": "integer", "minimum": 1},
        "axis": {"type": "integer", "minimum": 0},
        "scale": {"type": "number", "exclusiveMinimum": 0},
        "sign": {"enum": ["+", "-"]},
        "m": {"type": "number", "exclusiveMinimum": 0},
        "order": {"type": "integer", "minimum": 1},
        "base": {"$ref": "#"},
        "children": {"type": "array", "items": {"$ref": "#"}, "minItems": 1},
    },
}


# --------------------------------------------------------------------------
# evaluation and derivatives

def _points(spec: Spec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != spec.dim:
        raise ValueError(f"spec of dimension {spec.dim} evaluated at points of shape {x.shape}")
    return x


def evaluate(spec: Spec, x) -> np.ndarray:
    """Values of ``spec`` at ``x``; real-valued families may return a float array."""
    x = _points(spec, x)
    return _deriv(spec, (0,) * spec.dim, x)


def deriv(spec: Spec, alpha, x) -> np.ndarray:
    """``d^alpha spec`` at ``x``.

    Exact for every family except ``Pullback`` beyond second order, where
    a 4th-order central difference (step ``FD_STEP``, error ``O(h^4)``) is
    layered on top of the exact second derivatives.
    """
    x = _points(spec, x)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != spec.dim or any(a < 0 for a in alpha):
        raise ValueError(f"multi-index {alpha} does not match dimension {spec.dim}")
    return _deriv(spec, alpha, x)


def _gh_axis_factor(y, xi, width, a, k, order) -> np.ndarray:
    # d^order/dx [P(y) E], E = exp(-y^2/(2w^2) + i k x): P -> P' + P*(-y/w^2 + i k)
    coef = np.zeros(a + 1, dtype=complex)
    coef[a] = 1.0
    step = np.array([1j * k, -1.0 / width**2], dtype=complex)
    for _ in range(order):
        coef = P.polyadd(P.polyder(coef), P.polymul(coef, step))
    poly = P.polyval(y, coef) if coef.size else np.zeros_like(y, dtype=complex)
    return poly


def _deriv_gh(spec: GaussHermite, alpha, x) -> np.ndarray:
    k = spec.wavevector
    expo = np.zeros(x.shape[:-1])
    phase = None
    ys = []
    for i, c in enumerate(spec.center):
        y = x[..., i] - c
        ys.append(y)
        expo += y * y
        if k[i] != 0:
            phase = k[i] * x[..., i] if phase is None else phase + k[i] * x[..., i]
    expo *= -1.0 / (2 * spec.width**2)
    if phase is None:
        out = np.exp(expo)
    else:
        out = np.exp(expo + 1j * phase)
    for i in range(spec.dim):
        a, r = spec.poly[i], alpha[i]
        if a == 0 and r == 0:
            continue
        if r == 0 and k[i] == 0:
            out = out * ys[i] ** a
        else:
            out = out * _gh_axis_factor(ys[i], x[..., i], spec.width, a, k[i], r)
    return out


def _flat_factor(t, scale, order) -> np.ndarray:
    # h^(r)(t) = Q_r(1/t) h(t),  Q_{r+1}(u) = -u^2 Q_r'(u) + 2 s u^3 Q_r(u)
    q = np.array([1.0])
    for _ in range(order):
        q = P.polyadd(P.polymul([0, 0, -1.0], P.polyder(q)), P.polymul([0, 0, 0, 2.0 * scale], q))
    out = np.zeros_like(t, dtype=float)
    nz = t != 0
    tt = t[nz]
    arg = scale / tt**2
    live = arg < 740.0
    vals = np.zeros_like(tt)
    u = 1.0 / tt[live]
    vals[live] = P.polyval(u, q) * np.exp(-arg[live])
    out[nz] = vals
    return out


def _leibniz(f_deriv, g_deriv, alpha) -> np.ndarray:
    total = 0
    for beta in iproduct(*(range(a + 1) for a in alpha)):
        c = 1.0
        for a, b in zip(alpha, beta):
            c *= comb(a, b, exact=True)
        rest = tuple(a - b for a, b in zip(alpha, beta))
        total = total + c * f_deriv(beta) * g_deriv(rest)
    return total


def _fd_axis(fun, x, axis, h=FD_STEP) -> np.ndarray:
    e = np.zeros(x.shape[-1])
    e[axis] = h
    return (-fun(x + 2 * e) + 8 * fun(x + e) - 8 * fun(x - e) + fun(x - 2 * e)) / (12 * h)


def _deriv_pullback(spec: Pullback, alpha, x) -> np.ndarray:
    order = sum(alpha)
    if order > 2:
        axis = next(i for i, a in enumerate(alpha) if a > 0)
        lower = list(alpha)
        lower[axis] -= 1
        return _fd_axis(lambda z: _deriv_pullback(spec, tuple(lower), z), x, axis)
    params = spec.params
    s = spec.sign
    mask = s * x[..., 0] > 0
    if order == 0 and np.all(mask):
        return evaluate(spec.base, kin.nu_unsqueeze(s, x, params))
    out = np.zeros(x.shape[:-1], dtype=complex)
    if not np.any(mask):
        return out
    pt = x[mask]
    q = kin.nu_unsqueeze(s, pt, params)
    n = spec.dim
    if order == 0:
        out[mask] = evaluate(spec.base, q)
        return out
    jac, hess = kin.nu_jacobian(pt, params)
    unit = np.eye(n, dtype=int)
    grad = np.stack([_deriv(spec.base, tuple(unit[j]), q) for j in range(n)], axis=-1)
    idx = [i for i, a in enumerate(alpha) for _ in range(a)]
    if order == 1:
        (a,) = idx
        out[mask] = np.einsum("...j,...j->...", grad, jac[..., :, a])
        return out
    a, b = idx
    H = np.empty(pt.shape[:-1] + (n, n), dtype=complex)
    for j in range(n):
        for k in range(j, n):
            H[..., j, k] = _deriv(spec.base, tuple(unit[j] + unit[k]), q)
            H[..., k, j] = H[..., j, k]
    val = np.einsum("...jk,...j,...k->...", H, jac[..., :, a], jac[..., :, b])
    val = val + np.einsum("...j,...j->...", grad, hess[..., :, a, b])
    out[mask] = val
    return out


def _deriv(spec: Spec, alpha, x) -> np.ndarray:
    if isinstance(spec, GaussHermite):
        return _deriv_gh(spec, alpha, x)
    if isinstance(spec, Constant):
        if any(alpha):
            return np.zeros(x.shape[:-1], dtype=complex)
        return np.full(x.shape[:-1], complex(spec.value))
    if isinstance(spec, Sum):
        total = np.zeros(x.shape[:-1], dtype=complex)
        for c, child in zip(spec.coeffs, spec.children):
            total = total + c * _deriv(child, alpha, x)
        return total
    if isinstance(spec, Product):
        first, rest = spec.children[0], spec.children[1:]
        if not rest:
            return _deriv(first, alpha, x)
        tail = Product(rest)
        return _leibniz(lambda b: _deriv(first, b, x), lambda b: _deriv(tail, b, x), alpha)
    if isinstance(spec, XMinusDerivative):
        shifted = (alpha[0] + spec.order,) + tuple(alpha[1:])
        return _deriv(spec.base, shifted, x)
    if isinstance(spec, FlatAtZero):
        ax = spec.axis
        r = alpha[ax]
        t = x[..., ax]
        total = np.zeros(x.shape[:-1], dtype=complex)
        for j in range(r + 1):
            a2 = list(alpha)
            a2[ax] = r - j
            total = total + comb(r, j, exact=True) * _deriv(spec.base, tuple(a2), x) * _flat_factor(
                t, spec.scale, j
            )
        return total
    if isinstance(spec, Pullback):
        return _deriv_pullback(spec, alpha, x)
    raise TypeError(f"not a test-function spec: {spec!r}")


# --------------------------------------------------------------------------
# exact Fourier transforms (convention  int f(x) exp(-i x.p) dx)

def _hermite_he(a: int) -> np.ndarray:
    """Power-basis coefficients of the probabilists' Hermite polynomial He_a."""
    h0, h1 = np.array([1.0]), np.array([0.0, 1.0])
    if a == 0:
        return h0
    for k in range(1, a):
        h0, h1 = h1, P.polysub(P.polymulx(h1), k * h0)
    return h1


def _gh_fourier(spec: GaussHermite) -> Sum:
    # 1-D: F[y^a e^{-y^2/2s^2} e^{ikx}](p) =
    #   sqrt(2pi) s (-i s)^a He_a(s q) e^{-s^2 q^2/2} e^{-i c q} e^{i c k},  q = p - k
    s = spec.width
    c = np.asarray(spec.center)
    k = np.asarray(spec.wavevector)
    per_axis = []
    for i in range(spec.dim):
        a = spec.poly[i]
        he = _hermite_he(a)
        # He_a(s q) = sum_j he_j s^j q^j
        terms = [(j, complex(he[j] * s**j)) for j in range(len(he)) if he[j] != 0]
        per_axis.append([(j, coef * (-1j * s) ** a) for j, coef in terms])
    const = (math.sqrt(2 * math.pi) * s) ** spec.dim * np.exp(1j * float(c @ k))
    children, coeffs = [], []
    for combo in iproduct(*per_axis):
        poly = tuple(j for j, _ in combo)
        coef = const
        for _, cj in combo:
            coef *= cj
        children.append(GaussHermite(tuple(k), 1.0 / s, poly, tuple(-c)))
        coeffs.append(coef)
    return Sum(tuple(children), tuple(coeffs))


def _times_coordinate_power(spec: Spec, axis: int, power: int) -> Optional[Spec]:
    """Closed form of ``x_axis^power * spec`` for GaussHermite / Sum."""
    if power == 0:
        return spec
    if isinstance(spec, Sum):
        kids = [_times_coordinate_power(ch, axis, power) for ch in spec.children]
        if any(k is None for k in kids):
            return None
        return Sum(tuple(kids), spec.coeffs)
    if isinstance(spec, GaussHermite):
        c = spec.center[axis]
        children, coeffs = [], []
        # x^power = sum_j C(power, j) (x - c)^j c^(power - j)
        for j in range(power + 1):
            poly = list(spec.poly)
            poly[axis] += j
            children.append(GaussHermite(spec.center, spec.width, tuple(poly), spec.wavevector))
            coeffs.append(comb(power, j, exact=True) * c ** (power - j))
        return Sum(tuple(children), tuple(coeffs))
    return None


def fourier_exact(spec: Spec) -> Optional[Spec]:
    """Closed-form Euclidean transform, or ``None`` when unavailable.

    Supported: GaussHermite, Sum thereof, and x^- derivatives of those
    (``F[d_0^k f] = (i p_0)^k F f``).
    """
    if isinstance(spec, GaussHermite):
        return _gh_fourier(spec)
    if isinstance(spec, Sum):
        kids = [fourier_exact(ch) for ch in spec.children]
        if any(k is None for k in kids):
            return None
        return Sum(tuple(kids), spec.coeffs)
    if isinstance(spec, XMinusDerivative):
        base = fourier_exact(spec.base)
        if base is None:
            return None
        moved = _times_coordinate_power(base, 0, spec.order)
        if moved is None:
            return None
        return Sum((moved,), ((1j) ** spec.order,))
    return None


def reflect(spec: Spec, axis: int = 0) -> Optional[Spec]:
    """Closed form of ``x -> spec(x with x_axis negated)``."""
    if isinstance(spec, GaussHermite):
        center = list(spec.center)
        k = list(spec.wavevector)
        center[axis] = -center[axis]
        k[axis] = -k[axis]
        sign = (-1) ** spec.poly[axis]
        return Sum((GaussHermite(tuple(center), spec.width, spec.poly, tuple(k)),), (sign,))
    if isinstance(spec, Constant):
        return spec
    if isinstance(spec, Sum):
        kids = [reflect(ch, axis) for ch in spec.children]
        if any(k is None for k in kids):
            return None
        return Sum(tuple(kids), spec.coeffs)
    return None


def lc_fourier_exact(spec: Spec) -> Optional[Spec]:
    """Closed-form partial light-cone transform of a spec on ``(x^-, x_perp)``.

    With kernel ``exp(i(x^- p^+ - x_perp.p_perp))`` the result is the
    Euclidean transform reflected in the first momentum axis.
    """
    f = fourier_exact(spec)
    return None if f is None else reflect(f, 0)
