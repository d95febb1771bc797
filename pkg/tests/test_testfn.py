import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from charcone import kinematics as kin
from charcone import testfn as tf

SQRT_PI = np.sqrt(np.pi)


def pt(*xs):
    return np.array([xs], dtype=float)


def test_evaluate_examples():
    assert tf.gaussian(1)(pt(0.0))[0] == 1.0
    assert tf.FlatAtZero(tf.gaussian(1), 0, 1.0)(pt(0.0))[0] == 0.0
    assert tf.Pullback(tf.gaussian(1), "+", 1.0)(pt(-1.0))[0] == 0.0


def test_gauss_hermite_formula(rng):
    spec = tf.GaussHermite((0.3, -0.2), 0.8, (2, 1), (0.5, -1.0))
    x = rng.normal(size=(20, 2))
    y = x - np.array([0.3, -0.2])
    ref = y[:, 0] ** 2 * y[:, 1] * np.exp(-np.sum(y**2, 1) / (2 * 0.64)) * np.exp(1j * (0.5 * x[:, 0] - x[:, 1]))
    np.testing.assert_allclose(spec(x), ref, rtol=1e-14)


def test_derivative_examples():
    g = tf.gaussian(1)
    assert tf.deriv(g, (1,), pt(0.0))[0] == 0.0
    assert tf.deriv(g, (2,), pt(0.0))[0] == pytest.approx(-2.0, rel=1e-15)
    flat = tf.FlatAtZero(tf.gaussian(1), 0, 1.0)
    for k in range(3):
        assert tf.deriv(flat, (k,), pt(0.0))[0] == 0.0


def _fd(f, x, axis, h=1e-5):
    e = np.zeros(x.shape[-1])
    e[axis] = h
    return (f(x + e) - f(x - e)) / (2 * h)


SPECS = [
    tf.GaussHermite((0.3, -0.2), 0.8, (2, 1), (0.5, -1.0)),
    tf.FlatAtZero(tf.GaussHermite((0.1, 0.0), 1.1), 0, 0.7),
    tf.Pullback(tf.GaussHermite((0.2, -0.4), 0.9, (1, 0)), "+", 1.3),
    tf.Pullback(tf.gaussian(2), "-", 0.5),
    tf.XMinusDerivative(tf.GaussHermite((0.0, 0.2), 0.7), 2),
    tf.Sum((tf.gaussian(2), tf.GaussHermite((1.0, 0.0), 0.5, (0, 1))), (2.0, -1j)),
    tf.Product((tf.gaussian(2, 1.2), tf.GaussHermite((0.0, 0.5), 0.9, (1, 0), (0.3, 0.0)))),
]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
def test_first_and_second_derivatives_against_differences(spec, rng):
    x = rng.uniform(0.2, 1.5, size=(12, 2)) * rng.choice([-1, 1], size=(12, 2))
    if isinstance(spec, tf.Pullback):
        x[:, 0] = spec.sign * np.abs(x[:, 0])
    for axis in range(2):
        alpha = tuple(int(i == axis) for i in range(2))
        np.testing.assert_allclose(tf.deriv(spec, alpha, x), _fd(spec, x, axis), rtol=1e-6, atol=1e-8)
        for axis2 in range(2):
            beta = tuple(a + (i == axis2) for i, a in enumerate(alpha))
            ref = _fd(lambda y: tf.deriv(spec, alpha, y), x, axis2)
            np.testing.assert_allclose(tf.deriv(spec, beta, x), ref, rtol=1e-5, atol=1e-7)


def test_deriv_checks_multi_index():
    with pytest.raises(ValueError):
        tf.deriv(tf.gaussian(2), (1,), np.zeros((1, 2)))
    with pytest.raises(ValueError):
        tf.gaussian(2)(np.zeros((1, 3)))


def test_fourier_exact_gaussian():
    fhat = tf.fourier_exact(tf.gaussian(1, 1.0))
    p = np.linspace(-5, 5, 21)[:, None]
    np.testing.assert_allclose(fhat(p), np.sqrt(2 * np.pi) * np.exp(-p[:, 0] ** 2 / 2), rtol=1e-14)


def test_fourier_exact_odd_gaussian():
    # x e^{-x^2} -> -i (sqrt(pi)/2) p e^{-p^2/4}
    fhat = tf.fourier_exact(tf.GaussHermite((0.0,), 1 / np.sqrt(2), (1,)))
    p = np.linspace(-6, 6, 25)[:, None]
    ref = -1j * SQRT_PI / 2 * p[:, 0] * np.exp(-p[:, 0] ** 2 / 4)
    np.testing.assert_allclose(fhat(p), ref, rtol=1e-13, atol=1e-16)


def test_fourier_exact_unavailable():
    assert tf.fourier_exact(tf.FlatAtZero(tf.gaussian(1))) is None
    assert tf.lc_fourier_exact(tf.Pullback(tf.gaussian(1), "+", 1.0)) is None


@pytest.mark.parametrize("spec", [
    tf.GaussHermite((0.4,), 0.7, (2,), (1.5,)),
    tf.XMinusDerivative(tf.GaussHermite((-0.3,), 0.9, (1,)), 3),
])
def test_fourier_exact_against_quad(spec):
    fhat = tf.fourier_exact(spec)
    for p in (-2.0, -0.3, 0.0, 1.1):
        re = quad(lambda x: (spec(pt(x))[0] * np.exp(-1j * x * p)).real, -12, 12, epsabs=1e-13, limit=200)[0]
        im = quad(lambda x: (spec(pt(x))[0] * np.exp(-1j * x * p)).imag, -12, 12, epsabs=1e-13, limit=200)[0]
        assert abs(fhat(pt(p))[0] - (re + 1j * im)) < 1e-11


def test_lc_fourier_factor_identity(rng):
    # kernel e^{+i x^- p^+}: d/dx^- becomes multiplication by -i p^+
    base = tf.GaussHermite((0.2, -0.1), 0.8, (0, 1))
    p = rng.normal(size=(20, 2))
    hat = tf.lc_fourier_exact(base)
    for k in range(1, 5):
        dk = tf.lc_fourier_exact(tf.XMinusDerivative(base, k))
        np.testing.assert_allclose(dk(p), (-1j * p[:, 0]) ** k * hat(p), rtol=1e-12, atol=1e-14)


def test_reflect(rng):
    spec = tf.GaussHermite((0.3, 0.1), 0.9, (1, 2), (0.4, -0.2))
    x = rng.normal(size=(10, 2))
    y = x.copy()
    y[:, 1] *= -1
    np.testing.assert_allclose(tf.reflect(spec, 1)(x), spec(y), rtol=1e-14)


def test_pullback_is_base_after_squeezing(rng):
    params = kin.ModelParams(1.5, 2)
    base = tf.GaussHermite((0.2, 0.1), 1.0)
    pb = tf.Pullback(base, "-", 1.5)
    x = rng.normal(size=(30, 2))
    x[:, 0] = -np.abs(x[:, 0]) - 0.01
    np.testing.assert_allclose(pb(x), base(kin.nu_unsqueeze(-1, x, params)), rtol=1e-15)
    x[:, 0] *= -1
    assert np.all(pb(x) == 0)


json_specs = st.recursive(
    st.builds(lambda c, w, a: tf.GaussHermite((c,), w, (a,)), st.floats(-2, 2), st.floats(0.1, 3),
              st.integers(0, 3))
    | st.builds(lambda v: tf.Constant(v, 1), st.complex_numbers(max_magnitude=5)),
    lambda kids: st.builds(lambda b: tf.FlatAtZero(b, 0, 0.5), kids)
    | st.builds(lambda b, s: tf.Pullback(b, s, 1.0), kids, st.sampled_from(["+", "-"]))
    | st.builds(lambda b, k: tf.XMinusDerivative(b, k), kids, st.integers(1, 3))
    | st.builds(lambda ks: tf.Sum(tuple(ks)), st.lists(kids, min_size=1, max_size=3))
    | st.builds(lambda ks: tf.Product(tuple(ks)), st.lists(kids, min_size=1, max_size=2)),
    max_leaves=5,
)


@given(json_specs)
def test_json_round_trip(spec):
    doc = json.loads(spec.dumps())
    jsonschema.validate(doc, tf.SPEC_SCHEMA)
    assert tf.from_json(doc) == spec
    assert tf.from_json(spec.dumps()).dumps() == spec.dumps()


def test_json_rejects_unknown_type():
    with pytest.raises(ValueError):
        tf.from_json({"type": "Spline"})
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"type": "Sum", "children": [{"type": "Spline"}]}, tf.SPEC_SCHEMA)


def test_constructor_validation():
    with pytest.raises(ValueError):
        tf.GaussHermite((0.0,), 0.0)
    with pytest.raises(ValueError):
        tf.FlatAtZero(tf.gaussian(1), 1)
    with pytest.raises(ValueError):
        tf.Sum((tf.gaussian(1), tf.gaussian(2)))
    with pytest.raises(ValueError):
        tf.XMinusDerivative(tf.gaussian(1), 0)
