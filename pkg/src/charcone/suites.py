"""Invariant suites run by ``charcone verify``.

Each suite returns a list of :class:`Check` records. A check compares a
measured value against a tolerance with an explicit direction, so a printed
line carries everything needed to judge it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import evolution as ev
from . import kinematics as kin
from . import massshell as ms
from . import pauli_jordan as pj
from . import seminorms as sn
from . import testfn as tf
from .grids import AxisSpec, GridFunction, MomentumGrid, max_rel_error
from .quadrature import pair_lc_delta, pair_minkowski_delta

SUITES = ("roundtrip", "seminorms", "multiplicators", "transform2", "pauli-jordan")


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    relation: str = "<="

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: measured {self.value:.3e} {self.relation} {self.tol:.3e}"


def _le(name, value, tol) -> Check:
    value = float(value)
    return Check(name, value, tol, bool(value <= tol))


def _ge(name, value, tol) -> Check:
    value = float(value)
    return Check(name, value, tol, bool(value >= tol), ">=")


def random_gaussian(rng: np.random.Generator, dim: int, spread: float = 0.5) -> tf.GaussHermite:
    return tf.GaussHermite(tuple(rng.uniform(-spread, spread, dim)), float(rng.uniform(0.6, 1.2)))


def squeeze_inverse_error(params: kin.ModelParams, count: int = 10_000, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    p = rng.normal(scale=2.0, size=(count, params.n))
    worst = 0.0
    for s in (1, -1):
        back = kin.nu_unsqueeze(s, kin.mu_squeeze(s, p, params), params)
        worst = max(worst, float(np.max(np.abs(back - p))))
        pt = rng.normal(scale=2.0, size=(count, params.n))
        pt[:, 0] = s * np.abs(pt[:, 0]) + s * 1e-3
        again = kin.mu_squeeze(s, kin.nu_unsqueeze(s, pt, params), params)
        worst = max(worst, float(np.max(np.abs(again - pt))))
    return worst


def roundtrip_suite(n: int = 1, m: float = 1.0, tol: float | None = None) -> list:
    params = kin.ModelParams(m, n)
    count = {1: 1024, 2: 64}.get(n, 24)
    grid = MomentumGrid.uniform(params, "minkowski-momentum", 16.0 / count, count)
    u0 = tf.gaussian(n, 1.0)
    u1 = tf.scaled(tf.GaussHermite((0.3,) * n, 0.8, (1,) + (0,) * (n - 1)), 0.7)
    data = ms.CauchyData(ms.on_grid(u0, grid), ms.on_grid(u1, grid), params)
    msd = ms.from_cauchy(data)
    e0 = max_rel_error(ev.evolve_profile(msd, 0.0).profile.values, data.u0_hat.values)
    e1 = max_rel_error(ev.d0_profile(msd, 0.0).profile.values, data.u1_hat.values)

    lc = MomentumGrid.uniform(params, "lc-momentum", 16.0 / count, count)
    rng = np.random.default_rng(1)
    vals = rng.normal(size=lc.shape) + 1j * rng.normal(size=lc.shape)
    char = ms.CharacteristicData(GridFunction(lc, vals), params)
    back = ev.tame_restrict(ev.solve_characteristic(char)).u0_lc_hat.values
    dens = ms.MassShellDensityLC(GridFunction(lc, vals[::-1]), params)
    again = ev.solve_characteristic(ev.tame_restrict(dens))
    mism = int(np.count_nonzero(back != vals)) + int(np.count_nonzero(again.reduced.values != vals[::-1]))
    return [
        _le(f"cauchy round trip u0 (n={n})", e0, tol or 1e-13),
        _le(f"cauchy round trip u1 (n={n})", e1, tol or 1e-13),
        _le(f"characteristic round trip, mismatched values (n={n})", mism, 0),
        _le(f"squeeze inverse (n={n}, m={m})", squeeze_inverse_error(params), tol or 1e-12),
    ]


def seminorm_suite(n: int = 1, m: float = 1.0) -> list:
    params = kin.ModelParams(m, min(n, 2))
    d = params.n
    axes = [AxisSpec.half_step(0.05, 240)] + [AxisSpec.centered(0.25, 33)] * (d - 1)
    grids = sn.ladder(MomentumGrid(params, tuple(axes), "lc-momentum"))
    out = []
    for sign in (1, -1):
        certs = sn.squeezed_certificates(tf.Pullback(tf.gaussian(d), sign, m), grids)
        failed = [c for c in certs if not c.passed]
        worst = max(max(c.growth) for c in certs)
        out.append(Check(f"Pullback({'+' if sign > 0 else '-'}) squeezed, {len(certs)} seminorms, worst growth",
                         worst, sn.STABLE_GROWTH, not failed, "<"))
    gauss = sn.filtration_check(tf.gaussian(d), 1, grids)
    out.append(_ge("plain Gaussian divided by p^+, growth per rung", min(gauss.growth), 10.0))
    flat = [sn.filtration_check(tf.FlatAtZero(tf.gaussian(d), 0, 1.0), k, grids) for k in range(9)]
    out.append(Check("FlatAtZero divisible by (p^+)^k, k <= 8, worst growth",
                     max(max(c.growth) for c in flat), sn.STABLE_GROWTH, all(c.passed for c in flat), "<"))
    return out


def multiplicator_suite(n: int = 1, m: float = 1.0) -> list:
    params = kin.ModelParams(m, n)
    axes = [AxisSpec.half_step(0.05, 120)] + [AxisSpec.centered(0.25, 17)] * (n - 1)
    grid = MomentumGrid(params, tuple(axes), "lc-momentum")
    out = []
    for sign in (1, -1):
        r = sn.multiplicator_check(sn.theta(sign), (0,) * n, 0, 1.0, grid)
        out.append(Check(f"Theta({'+' if sign > 0 else '-'}p^+) N=0 C=1, max ratio", r.max_ratio, 1.0, r.passed))
    r = sn.multiplicator_check(sn.pplus_power(-1), (0,) * n, 1, 1.0, grid)
    out.append(Check("1/p^+ N=1 C=1, max ratio", r.max_ratio, 1.0, r.passed))
    pmax = float(np.max(np.abs(grid.axes[0].nodes)))
    for k in range(-3, 4):
        N, C = (0, pmax**k) if k >= 0 else (-k, 1.0)
        r = sn.multiplicator_check(sn.abs_pplus_power(k), (0,) * n, N, C, grid)
        out.append(Check(f"|p^+|^{k} N={N} C={C:.3g}, max ratio", r.max_ratio, 1.0, r.passed))
    small = MomentumGrid(params, (AxisSpec.half_step(0.05, 80),) + tuple(axes[1:]), "lc-momentum")
    r = sn.multiplicator_check(sn.lc_energy(params), (0,) * n, 2, 1.0, small)
    out.append(Check("lc_omega N=2 C=1 on |p^+| <= 2, max ratio", r.max_ratio, 1.0, r.passed))
    return out


def transform2_suite(n: int = 1, m: float = 1.0, level: int | None = None, pairs: int = 5,
                     tol: float | None = None, seed: int = 7) -> list:
    params = kin.ModelParams(m, n)
    level = level or (7 if n == 1 else 4)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        a = random_gaussian(rng, n)
        f = random_gaussian(rng, n + 1)
        sign = int(rng.choice([1, -1]))
        lhs = pair_minkowski_delta(a, lambda v: f(kin.kappa(v)), sign, params, level, estimate=False).value
        rhs = pair_lc_delta(tf.Pullback(a, sign, m), f, sign, params, level, estimate=False).value
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return [_le(f"pairing identity Minkowski vs light-cone, {pairs} pairs (n={n}, level {level})",
                worst, tol or 1e-8)]


def pauli_jordan_suite(n: int = 1, masses=(0.5, 1.0, 2.0), tol: float | None = None) -> list:
    tol = tol or (1e-8 if n == 1 else 1e-6)
    probe = pj.default_probe(n)
    out = []
    values = []
    for m in masses:
        params = kin.ModelParams(m, n)
        q = pj.pj_pairing_quadrature(probe, params).value
        c = pj.pj_pairing_closed_form(probe, params).value
        g = pj.lc_profile_pairing(ev.tame_profile(ev.solve_characteristic(pj.restricted_via_cauchy(params)), 0.0)
                                  .profile, probe, params).value
        values.extend([q, c, g])
        out.append(_le(f"routes agree (n={n}, m={m})", max(abs(q - c), abs(g - c)), tol))
    spread = max(abs(v - values[0]) for v in values)
    out.append(_le(f"mass independence (n={n})", spread, tol))
    out.append(_le(f"value -1/2 (n={n})", abs(values[1] + 0.5), tol))
    return out


def run(name: str, n: int = 1, m: float = 1.0, tol: float | None = None, level: int | None = None) -> list:
    if name == "roundtrip":
        return roundtrip_suite(n, m, tol)
    if name == "seminorms":
        return seminorm_suite(n, m)
    if name == "multiplicators":
        return multiplicator_suite(n, m)
    if name == "transform2":
        return transform2_suite(n, m, level, tol=tol)
    if name == "pauli-jordan":
        return pauli_jordan_suite(n, tol=tol)
    raise ValueError(f"unknown suite {name!r}")
