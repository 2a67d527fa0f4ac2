import math

import jax
import jax.numpy as jnp
import numpy as np
import pytest
import scipy.integrate

from openbook.exceptions import ConfigurationException, OutOfRangeError
from openbook.profile import (
    TwistProfile,
    base_bump,
    bracketed_root,
    f_k_deriv,
    f_k_eval,
    f_k_integral,
    h_aux,
    h_aux_deriv,
    h_aux_fn,
    h_inverse,
    h_k_direct,
    h_k_eval,
    monotone_invert,
    profile_grid,
    profile_table,
)

KS = [1, 2, 3, 5, 8]


def test_default_scale():
    profile = TwistProfile(3)
    assert profile.c_k == pytest.approx(12 * math.pi)
    assert profile.transition == pytest.approx((1 / (12 * math.pi), 2 / (12 * math.pi)))
    assert profile.h_k_floor == pytest.approx(0.25)
    assert profile.supremum == pytest.approx(1 / (3 * math.pi))


@pytest.mark.parametrize("k, c_k", [(0, None), (2, 6 * math.pi), (2, 1.0)])
def test_profile_rejects(k, c_k):
    with pytest.raises(ConfigurationException):
        TwistProfile(k, c_k)


def test_profile_is_hashable():
    assert hash(TwistProfile(2)) == hash(TwistProfile(2))


def test_base_bump_shape():
    assert float(base_bump(0.5)) == 0.0
    assert float(base_bump(1.0)) == 0.0
    assert float(base_bump(2.0)) == 1.0
    assert float(base_bump(1.5)) == pytest.approx(0.5, abs=1e-15)
    assert float(jax.grad(base_bump)(1.5)) == pytest.approx(2.0, abs=1e-12)


def test_base_bump_slope_bound():
    xs = jnp.linspace(1.0, 2.0, 10_001)
    slopes = np.asarray(jax.vmap(jax.grad(base_bump))(xs))
    assert slopes.min() >= 0.0
    assert slopes.max() <= 2.0 + 1e-9


@pytest.mark.parametrize("k", KS)
def test_f_k_plateaus(k):
    profile = TwistProfile(k)
    lo, hi = profile.transition
    assert float(f_k_eval(profile, 0.0)) == 0.0
    assert float(f_k_eval(profile, 0.999 * lo)) == 0.0
    assert float(f_k_eval(profile, hi)) == pytest.approx(k * math.pi)
    assert float(f_k_eval(profile, 10 * hi)) == pytest.approx(k * math.pi)


def test_f_k_rejects_negative(profile):
    with pytest.raises(OutOfRangeError):
        f_k_eval(profile, -1e-3)


def test_f_k_deriv_matches_central_difference(profile):
    x = 1.5 * profile.transition[0]
    step = 1e-7
    fd = (float(f_k_eval(profile, x + step)) - float(f_k_eval(profile, x - step))) / (2 * step)
    assert float(f_k_deriv(profile, x)) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("k", KS)
def test_integral_against_adaptive_quadrature(k):
    profile = TwistProfile(k)
    lo, hi = profile.transition
    for y in (0.5, 1.3, 1.7, 2.0, 5.0):
        y = y * lo
        reference, _ = scipy.integrate.quad(
            lambda s: float(f_k_eval(profile, s)),
            0.0,
            y,
            points=[p for p in (lo, hi) if p < y] or None,
            epsabs=1e-15,
            limit=200,
        )
        assert float(f_k_integral(profile, y)) == pytest.approx(reference, abs=1e-12)


def test_integral_is_linear_past_transition(profile):
    hi = profile.transition[1]
    slope = (float(f_k_integral(profile, 3 * hi)) - float(f_k_integral(profile, 2 * hi))) / hi
    assert slope == pytest.approx(profile.height, rel=1e-12)


@pytest.mark.parametrize("k", KS)
def test_h_k_positive_and_forms_agree(k):
    profile = TwistProfile(k)
    ys = np.linspace(0.0, 20.0 / profile.c_k, 501)
    by_parts = np.asarray(h_k_eval(profile, ys))
    direct = np.asarray(h_k_direct(profile, ys))
    assert by_parts.min() >= profile.h_k_floor
    assert float(h_k_eval(profile, 0.0)) == 1.0
    assert np.max(np.abs(by_parts - direct)) <= 1e-10


def test_h_k_constant_after_transition(profile):
    hi = profile.transition[1]
    assert float(h_k_eval(profile, 5 * hi)) == pytest.approx(float(h_k_eval(profile, hi)), abs=1e-13)


def test_h_aux_identity_below_transition(profile):
    y = 0.5 * profile.transition[0]
    assert float(h_aux(profile, y)) == y


@pytest.mark.parametrize("k", KS)
def test_h_aux_derivative(k):
    profile = TwistProfile(k)
    grad = jax.grad(h_aux_fn(profile))
    for y in np.linspace(0.0, 4.0 / profile.c_k, 17):
        scale = (1.0 + float(f_k_integral(profile, y))) ** 2
        assert float(grad(y)) * scale == pytest.approx(float(h_k_eval(profile, y)), abs=1e-10)
        assert float(grad(y)) == pytest.approx(float(h_aux_deriv(profile, y)), abs=1e-12)


@pytest.mark.parametrize("k", KS)
def test_h_inverse_roundtrip(k):
    profile = TwistProfile(k)
    ys = np.linspace(0.0, 20.0 / profile.c_k, 257)
    recovered = np.asarray(h_inverse(profile, h_aux(profile, ys)))
    assert np.max(np.abs(recovered - ys)) <= 1e-9


def test_h_inverse_scalar_and_large_values(profile):
    y = 1e3
    assert float(h_inverse(profile, float(h_aux(profile, y)))) == pytest.approx(y, rel=1e-9)


@pytest.mark.parametrize("target", [-1e-3, 1 / (2 * math.pi), 1.0])
def test_h_inverse_out_of_range(profile, target):
    with pytest.raises(OutOfRangeError) as excinfo:
        h_inverse(profile, target)
    assert excinfo.value.target == target


def test_h_inverse_derivative(profile):
    """The implicit-function derivative of the inverse is 1 / h'."""
    y = 1.4 * profile.transition[0]
    target = h_aux(profile, y)
    slope = jax.grad(lambda v: h_inverse(profile, v))(target)
    assert float(slope) == pytest.approx(1.0 / float(h_aux_deriv(profile, y)), rel=1e-8)


def test_bracketed_root_and_derivative():
    def cube(y):
        return y**3 + y

    root = bracketed_root(cube, jnp.asarray(10.0), 0.0, 5.0)
    assert float(root) == pytest.approx(2.0, abs=1e-12)
    slope = jax.grad(lambda v: bracketed_root(cube, v, 0.0, 5.0))(10.0)
    assert float(slope) == pytest.approx(1.0 / 13.0, rel=1e-10)


def test_monotone_invert_out_of_bracket():
    with pytest.raises(OutOfRangeError):
        monotone_invert(lambda y: y * y, 5.0, (0.0, 2.0))
    assert float(monotone_invert(lambda y: y * y, 2.0, (0.0, 2.0))) == pytest.approx(
        math.sqrt(2.0), abs=1e-12
    )


def test_profile_table_first_row(profile):
    table = profile_table(profile)
    assert table.shape == (129, 5)
    assert list(table[0]) == [0.0, 0.0, 0.0, 1.0, 0.0]
    assert np.all(np.diff(table[:, 4]) > 0)
    assert table[:, 3].min() >= profile.h_k_floor


def test_profile_grid_spans_ten_transitions(profile):
    grid = profile_grid(profile)
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(20.0 / profile.c_k)
    assert np.all(np.diff(grid) > 0)
