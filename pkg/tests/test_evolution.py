import numpy as np
import pytest
from hypothesis import given, strategies as st

from charcone import evolution as ev
from charcone import kinematics as kin
from charcone import massshell as ms
from charcone import testfn as tf
from charcone import transform as tr
from charcone.grids import AxisSpec, GridFunction, MomentumGrid, max_rel_error

P1 = kin.ModelParams(1.0, 1)


def mgrid(params=P1, step=0.05, count=256):
    return MomentumGrid.uniform(params, "minkowski-momentum", step, count)


def lcgrid(params=P1, step=0.05, count=256):
    return MomentumGrid.uniform(params, "lc-momentum", step, count)


def cauchy(params=P1):
    n = params.n
    return ms.CauchyData(tf.gaussian(n, 1.0), tf.scaled(tf.GaussHermite((0.3,) * n, 0.8, (1,) + (0,) * (n - 1)), 0.7),
                         params)


def test_evolve_at_zero_returns_cauchy_data():
    g = mgrid()
    data = cauchy()
    msd = ms.from_cauchy(data, g)
    u0 = ms.on_grid(data.u0_hat, g).values
    u1 = ms.on_grid(data.u1_hat, g).values
    assert max_rel_error(ev.evolve_profile(msd, 0.0).profile.values, u0) <= 1e-15
    assert max_rel_error(ev.d0_profile(msd, 0.0).profile.values, u1) <= 1e-15


@pytest.mark.parametrize("t", [0.3, -1.7, 12.0])
def test_equal_densities_give_standing_waves(t):
    g = mgrid()
    a = ms.on_grid(tf.gaussian(1), g)
    msd = ms.MassShellDensityM(a, a, P1)
    w = kin.omega(g.points(), P1)
    np.testing.assert_allclose(ev.evolve_profile(msd, t).profile.values, a.values * np.cos(w * t) / (2 * np.pi * w),
                               rtol=1e-13, atol=1e-16)
    np.testing.assert_allclose(ev.d0_profile(msd, t).profile.values, -a.values * np.sin(w * t) / (2 * np.pi),
                               rtol=1e-13, atol=1e-16)


def test_time_reversal_swaps_sheets():
    g = mgrid()
    msd = ms.from_cauchy(cauchy(), g)
    swapped = ms.MassShellDensityM(msd.a1, msd.a0, P1)
    for t in (0.4, 2.5):
        fwd = ev.evolve_profile(msd, t).profile.values
        back = ev.evolve_profile(swapped, -t).profile.values
        np.testing.assert_allclose(back, fwd, rtol=1e-14, atol=1e-16)


def test_d0_matches_central_difference():
    g = mgrid()
    msd = ms.from_cauchy(cauchy(), g)
    h = 1e-4
    for t in (0.0, 0.9):
        fd = (ev.evolve_profile(msd, t + h).profile.values - ev.evolve_profile(msd, t - h).profile.values) / (2 * h)
        assert max_rel_error(fd, ev.d0_profile(msd, t).profile.values) <= 1e-7


@given(st.floats(-5, 5), st.floats(0, 5))
def test_group_property(t, s):
    # evolving from the data at time s reproduces the original solution
    g = mgrid(step=0.1, count=64)
    msd = ms.from_cauchy(cauchy(), g)
    u = ev.evolve_profile(msd, s).profile
    du = ev.d0_profile(msd, s).profile
    again = ev.densities_at(u, du, s, P1)
    a = ev.evolve_profile(msd, t).profile.values
    b = ev.evolve_profile(again, t).profile.values
    assert np.max(np.abs(a - b)) <= 1e-13 * max(1.0, np.max(np.abs(a)))


def test_tame_profile_at_zero_recovers_data():
    g = lcgrid()
    ghat = ms.on_grid(tf.GaussHermite((0.2,), 0.9), g)
    msd = ms.MassShellDensityLC.from_b(ms.combine(lambda x, v: 4 * np.pi * np.abs(x[..., 0]) * v, ghat), P1)
    np.testing.assert_allclose(ev.tame_profile(msd, 0.0).profile.values, ghat.values, rtol=1e-15)


@given(st.floats(-20, 20))
def test_tame_profile_modulus_is_constant(xplus):
    g = lcgrid(step=0.1, count=64)
    msd = ev.solve_characteristic(ms.CharacteristicData(ms.on_grid(tf.gaussian(1), g), P1))
    a = np.abs(ev.tame_profile(msd, xplus).profile.values)
    b = np.abs(ev.tame_profile(msd, 0.0).profile.values)
    np.testing.assert_allclose(a, b, rtol=1e-14)


def test_xplus_derivative():
    # |lc_omega| <= 2.1 on this grid, so the h^2 truncation stays below 1e-6
    params = kin.ModelParams(1.0, 2)
    g = MomentumGrid(params, (AxisSpec.half_step(0.6, 16), AxisSpec.centered(0.25, 5)), "lc-momentum")
    msd = ev.solve_characteristic(ms.CharacteristicData(tf.GaussHermite((0.1, 0.0), 1.0), params))
    assert ev.xplus_derivative_error(msd, g, xplus=0.0) <= 1e-6
    assert ev.xplus_derivative_error(msd, g, xplus=0.7) <= 1e-6


def test_xplus_derivative_error_is_pure_truncation():
    # central difference of e^{-i w t}: relative error 1 - sin(w h)/(w h)
    g = lcgrid(step=0.05, count=64)
    msd = ev.solve_characteristic(ms.CharacteristicData(tf.gaussian(1), P1))
    h = 1e-3
    w = np.max(np.abs(kin.lc_omega(g.points(), P1)))
    expected = 1 - np.sin(w * h) / (w * h)
    assert ev.xplus_derivative_error(msd, g, h=h) == pytest.approx(expected, rel=1e-5)


def test_tame_restrict_examples():
    g = lcgrid()
    x = g.points()[..., 0]
    unit = ms.MassShellDensityLC.from_b(GridFunction(g, 4 * np.pi * np.abs(x)), P1)
    np.testing.assert_allclose(ev.tame_restrict(unit).u0_lc_hat.values, 1.0, rtol=1e-15)
    pj = ms.MassShellDensityLC.from_b(GridFunction(g, 2j * np.pi * np.sign(x)), P1)
    np.testing.assert_allclose(ev.tame_restrict(pj).u0_lc_hat.values, 1j / (2 * x), rtol=1e-15)


def test_characteristic_round_trips_bitwise(rng):
    g = lcgrid(kin.ModelParams(1.0, 2), 0.1, 16)
    vals = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    data = ms.CharacteristicData(GridFunction(g, vals), g.params)
    assert np.array_equal(ev.tame_restrict(ev.solve_characteristic(data)).u0_lc_hat.values, vals)
    msd = ms.MassShellDensityLC(GridFunction(g, vals), g.params)
    again = ev.solve_characteristic(ev.tame_restrict(msd))
    assert np.array_equal(again.reduced.values, msd.reduced.values)
    assert np.array_equal(again.b.values, msd.b.values)


def test_solve_characteristic_zero_and_linearity(rng):
    g = lcgrid()
    zero = ev.solve_characteristic(ms.CharacteristicData(GridFunction(g, np.zeros(g.shape)), P1))
    assert np.all(zero.b.values == 0)
    vals = rng.normal(size=g.shape)
    one = ev.solve_characteristic(ms.CharacteristicData(GridFunction(g, vals), P1)).b.values
    three = ev.solve_characteristic(ms.CharacteristicData(GridFunction(g, (2 - 1j) * vals), P1)).b.values
    np.testing.assert_allclose(three, (2 - 1j) * one, rtol=1e-15)


def test_profile_frames_checked():
    with pytest.raises(ValueError):
        ev.EvolvedProfile(0.0, "lightcone", GridFunction(mgrid(), np.ones(256)))
    with pytest.raises(ValueError):
        ev.EvolvedProfile(0.0, "spacelike", None)


def _kg_setup(count, extent=40.0):
    dx = extent / count
    mom = MomentumGrid(P1, (AxisSpec.centered(2 * np.pi / (count * dx), count),), "minkowski-momentum")
    pos = tr.target_grid(mom, "euclid_inverse")
    return mom, pos, pos.axes[0].step


def test_kg_residual_second_order():
    data = ms.CauchyData(tf.gaussian(1, 0.5), tf.scaled(tf.GaussHermite((0.0,), 0.5, (1,)), 0.5), P1)
    msd = ms.from_cauchy(data)
    res = []
    for count in (512, 1024):
        _, pos, dx = _kg_setup(count)
        res.append(ev.kg_residual(msd, pos, 1.0 + (np.arange(5) - 2) * dx).value)
    assert res[0] < 1e-2
    assert 3.5 <= res[0] / res[1] <= 4.5


def test_kg_residual_zero_solution():
    _, pos, dx = _kg_setup(64)
    r = ev.kg_residual(ms.zero_density_m(P1), pos, np.arange(5) * dx)
    assert r.value == 0.0 and r.zero_solution


def test_kg_residual_input_checks():
    _, pos, dx = _kg_setup(64)
    msd = ms.from_cauchy(cauchy())
    with pytest.raises(ValueError):
        ev.kg_residual(msd, pos, [0.0, dx, 2 * dx])
    with pytest.raises(ValueError):
        ev.kg_residual(msd, pos, [0.0, dx, 3 * dx, 4 * dx, 5 * dx])


@pytest.mark.parametrize("count", [512, 1024])
def test_kg_residual_plane_wave_stencil_prediction(count):
    # for e^{i(qx - wt)} the two 3-point stencils leave (w^4 dt^2 - q^4 dx^2)/12
    q = 2.0
    _, pos, dx = _kg_setup(count, 80.0)
    data = ms.CauchyData(tf.GaussHermite((q,), 0.08), tf.Constant(0.0, 1), P1)
    msd = ms.from_cauchy(data)
    forward = ms.MassShellDensityM(msd.a0, lambda x: np.zeros(x.shape[:-1]), P1)
    r = ev.kg_residual(forward, pos, 1.0 + (np.arange(5) - 2) * dx).value
    w = np.sqrt(q**2 + 1)
    predicted = (w**4 - q**4) * dx**2 / 12
    assert predicted / 3 <= r <= 3 * predicted
    assert abs(r / predicted - 1) < 0.02
