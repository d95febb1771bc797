import numpy as np
import pytest

from charcone import kinematics as kin
from charcone import seminorms as sn
from charcone import testfn as tf
from charcone.grids import AxisSpec, MomentumGrid

P1 = kin.ModelParams(1.0, 1)
P2 = kin.ModelParams(1.0, 2)

# max over t of e^{-1/t^2 - t^2} / t^4, attained at |t| = 0.64359 (mpmath)
FLAT_K4_SUP = 0.344493536490079605475275879946

FLAT = tf.FlatAtZero(tf.gaussian(1), 0, 1.0)


def grid1(step=0.05, count=240):
    return MomentumGrid(P1, (AxisSpec.half_step(step, count),), "lc-momentum")


def grid2(step=0.05, count=240):
    return MomentumGrid(P2, (AxisSpec.half_step(step, count), AxisSpec.centered(0.25, 33)), "lc-momentum")


def test_ladder_is_nested():
    grids = sn.ladder(grid1(), 3)
    assert [g.axes[0].count for g in grids] == [240, 240 * 11, 240 * 121]
    coarse, fine = grids[0].axes[0].nodes, grids[1].axes[0].nodes
    assert np.all(np.isin(np.round(coarse, 12), np.round(fine, 12)))
    with pytest.raises(ValueError):
        sn.refine_pplus(grid1(), 4)


def test_flat_seminorm_stable_and_matches_scan_oracle():
    grids = sn.ladder(grid1(), 3)
    cert = sn.seminorm_certificate(FLAT, -4, (), (0,), grids)
    assert cert.passed
    assert max(cert.growth) < 2
    assert cert.values[-1] <= FLAT_K4_SUP * (1 + 1e-12)
    assert cert.values[-1] == pytest.approx(FLAT_K4_SUP, rel=1e-5)


def test_plain_gaussian_divided_by_pplus_diverges():
    grids = sn.ladder(grid1(), 3)
    cert = sn.seminorm_certificate(tf.gaussian(1), -1, (), (0,), grids)
    assert not cert.passed
    assert min(cert.growth) >= 10


def test_zero_function():
    zero = tf.Constant(0.0, 1)
    assert sn.squeezed_seminorm(zero, -3, (), (0,), grid1()) == 0.0
    assert sn.seminorm_certificate(zero, -8, (), (2,), sn.ladder(grid1(), 3)).passed
    for k in range(-2, 9):
        assert sn.filtration_check(zero, k, sn.ladder(grid1(), 3)).passed


def test_nform_examples():
    g = grid1(0.01, 1000)
    val = sn.squeezed_seminorm_Nform(tf.gaussian(1), 0, (0,), g)
    assert val == pytest.approx(1.0, abs=1e-4)
    grids = sn.ladder(grid1(), 3)
    for N in range(9):
        vals = [sn.squeezed_seminorm_Nform(FLAT, N, (0,), gr) for gr in grids]
        assert np.all(np.isfinite(vals))
        assert vals[-1] / vals[0] < 2


def test_k_form_finite_implies_n_form_finite():
    # ((1+|p|)/|p^+|)^N is dominated by sums of |p^+|^{-N} |p|^j, j <= N
    grids = sn.ladder(grid2(), 3)
    f = tf.FlatAtZero(tf.gaussian(2), 0, 1.0)
    certs = sn.squeezed_certificates(f, grids, ks=range(-4, 1), max_beta=2, max_alpha=0)
    assert all(c.passed for c in certs)
    for N in range(3):
        vals = [sn.squeezed_seminorm_Nform(f, N, (0, 0), g) for g in grids]
        assert vals[-1] / vals[0] < 2


def test_high_order_needs_opt_in():
    with pytest.raises(ValueError):
        sn.squeezed_seminorm(FLAT, 0, (), (3,), grid1())
    with pytest.raises(ValueError):
        sn.squeezed_seminorm(FLAT, 0, (), (0,), MomentumGrid.uniform(P1, "minkowski-momentum", 0.1, 10))


@pytest.mark.parametrize("sign", ["+", "-"])
def test_pullback_passes_squeezed_certificates(sign):
    grids = sn.ladder(grid2(), 3)
    certs = sn.squeezed_certificates(tf.Pullback(tf.gaussian(2), sign, 1.0), grids)
    assert len(certs) == 17 * 3 * 6
    assert all(c.passed for c in certs)


def test_multiplicator_examples():
    g = grid2(0.05, 120)
    assert sn.multiplicator_check(sn.theta(1), (0, 0), 0, 1.0, g).passed
    assert sn.multiplicator_check(sn.theta(-1), (0, 0), 0, 1.0, g).passed
    assert sn.multiplicator_check(sn.pplus_power(-1), (0, 0), 1, 1.0, g).passed
    # lc_omega: N=2 passes, N=1 fails at large |p_perp|
    wide = MomentumGrid(P2, (AxisSpec.half_step(0.05, 80), AxisSpec.centered(0.5, 81)), "lc-momentum")
    ok = sn.multiplicator_check(sn.lc_energy(P2), (0, 0), 2, 1.0, wide)
    bad = sn.multiplicator_check(sn.lc_energy(P2), (0, 0), 1, 1.0, wide)
    assert ok.passed and not bad.passed
    assert abs(bad.worst_node[1]) == pytest.approx(20.0)


def test_multiplicator_derivatives_against_differences(rng):
    x = rng.uniform(0.3, 2.0, size=(10, 2))
    x[::2, 0] *= -1
    h = 1e-6
    for M in (sn.pplus_power(-2), sn.abs_pplus_power(3), sn.lc_energy(P2)):
        for a in range(2):
            e = np.zeros(2)
            e[a] = h
            alpha = tuple(int(i == a) for i in range(2))
            fd = (M(x + e) - M(x - e)) / (2 * h)
            np.testing.assert_allclose(M.deriv(alpha, x), fd, rtol=1e-6, atol=1e-8)
            for b in range(2):
                beta = tuple(v + (i == b) for i, v in enumerate(alpha))
                e2 = np.zeros(2)
                e2[b] = h
                fd2 = (M.deriv(alpha, x + e2) - M.deriv(alpha, x - e2)) / (2 * h)
                np.testing.assert_allclose(M.deriv(beta, x), fd2, rtol=1e-5, atol=1e-6)


def test_filtration_examples():
    grids = sn.ladder(grid1(), 3)
    for k in range(9):
        assert sn.filtration_check(FLAT, k, grids).passed
    gauss = sn.filtration_check(tf.gaussian(1), 1, grids)
    assert not gauss.passed and min(gauss.growth) >= 10
    assert sn.filtration_check(tf.gaussian(1), 0, grids).passed


def test_multi_indices():
    assert sn.multi_indices(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(sn.multi_indices(3, 2)) == 10
