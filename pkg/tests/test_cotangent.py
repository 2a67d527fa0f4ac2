import logging
import math

import jax.numpy as jnp
import numpy as np
import pytest

from openbook.cotangent import (
    beta_k,
    cotangent_manifold,
    deck_map,
    dehn_twist,
    dehn_twist_inverse,
    dt_plus_lambda,
    glue_map,
    lambda_can,
    left_dehn_twist,
    normalize_torus_point,
    period,
    phi_k_glue,
    psi_k,
    psi_k_inverse,
    psi_map,
    psi_pullback_expected,
    reparam_map,
    reproject,
    torus_manifold,
    twist_correction,
    twist_map,
)
from openbook.datastructures import CotangentPoint, TorusModel, TorusPoint
from openbook.forms import contact_volume, pullback, tangent_basis
from openbook.profile import TwistProfile, h_k_eval
from openbook.sampling import cotangent_at_radius, tangent_directions

KS = [1, 2, 3, 5, 8]


def transition_point(profile, rng, n=3, fraction=0.5):
    lo, hi = profile.transition
    return cotangent_at_radius(rng, n, lo + fraction * (hi - lo))


@pytest.mark.parametrize("k", KS)
def test_twist_near_zero_section_is_parity(k, rng):
    profile = TwistProfile(k)
    pt = cotangent_at_radius(rng, 3, 0.5 * profile.transition[0])
    image = dehn_twist(profile, pt)
    sign = (-1) ** k
    assert np.allclose(image.q, sign * pt.q, atol=1e-12)
    assert np.allclose(image.p, sign * pt.p, atol=1e-12)


def test_twist_is_identity_far_out(profile, rng):
    pt = cotangent_at_radius(rng, 3, 3 * profile.transition[1])
    image = dehn_twist(profile, pt)
    assert np.array_equal(image.q, pt.q)
    assert np.array_equal(image.p, pt.p)


def test_twist_on_zero_section(rng):
    profile = TwistProfile(3)
    pt = CotangentPoint([0.0, 1.0, 0.0], np.zeros(3))
    assert np.allclose(dehn_twist(profile, pt).q, [0.0, -1.0, 0.0])


@pytest.mark.parametrize("k", KS)
def test_twist_roundtrip_and_norm(k, rng):
    profile = TwistProfile(k)
    for fraction in (0.1, 0.5, 0.9):
        pt = transition_point(profile, rng, fraction=fraction)
        image = dehn_twist(profile, pt)
        assert abs(image.radius - pt.radius) <= 1e-12
        back = dehn_twist_inverse(profile, image)
        assert np.allclose(back.as_array(), pt.as_array(), atol=1e-10)


def test_left_dehn_twist_alias():
    assert left_dehn_twist is dehn_twist_inverse


@pytest.mark.parametrize("k", KS)
def test_twist_lambda_transform(k, rng):
    """tau* lambda = lambda + |p| d(f_k(|p|)) on the bundle."""
    profile = TwistProfile(k)
    n = 3
    tau, lam, correction = twist_map(profile, n), lambda_can(n), twist_correction(profile, n)
    mfd = cotangent_manifold(n)
    for fraction in np.linspace(0.05, 0.95, 7):
        x = transition_point(profile, rng, n, fraction).as_array()
        for v in tangent_directions(rng, tangent_basis(mfd, x), 3):
            lhs = float(pullback(tau, lam, x, v))
            rhs = float(lam(x, v)) + float(correction(x, v))
            assert lhs == pytest.approx(rhs, abs=1e-8 * max(1.0, abs(rhs)))


def test_twist_is_symplectic(profile, rng):
    n = 2
    tau, d_lam = twist_map(profile, n), lambda_can(n).derivative
    mfd = cotangent_manifold(n)
    x = transition_point(profile, rng, n).as_array()
    u, v = tangent_directions(rng, tangent_basis(mfd, x), 2)
    assert float(pullback(tau, d_lam, x, u, v)) == pytest.approx(float(d_lam(x, u, v)), abs=1e-8)


def test_glue_preserves_dt_plus_lambda(profile, rng):
    n = 3
    form, glue = dt_plus_lambda(n), glue_map(profile, n)
    mfd = torus_manifold(n)
    for fraction in (0.2, 0.6):
        y = np.concatenate([[0.3], transition_point(profile, rng, n, fraction).as_array()])
        (v,) = tangent_directions(rng, tangent_basis(mfd, y), 1)
        assert float(pullback(glue, form, y, v)) == pytest.approx(float(form(y, v)), abs=1e-8)


def test_phi_k_glue_shift(profile, rng):
    pt = transition_point(profile, rng)
    t, image = phi_k_glue(profile, 0.25, pt)
    assert t == pytest.approx(0.25 + float(h_k_eval(profile, pt.radius)))
    assert np.allclose(image.as_array(), dehn_twist(profile, pt).as_array())


@pytest.mark.parametrize("k", KS)
def test_reparametrization_gives_beta(k, rng):
    profile = TwistProfile(k)
    n = 3
    reparam, form, beta = reparam_map(profile, n), dt_plus_lambda(n), beta_k(profile, n)
    mfd = torus_manifold(n)
    for t in (0.0, 0.4, 0.9):
        y = np.concatenate([[t], transition_point(profile, rng, n, 0.3).as_array()])
        (v,) = tangent_directions(rng, tangent_basis(mfd, y), 1)
        assert float(pullback(reparam, form, y, v)) == pytest.approx(
            float(beta(y, v)), abs=1e-8
        )


def test_beta_is_deck_invariant(profile, rng):
    n = 3
    beta, deck = beta_k(profile, n), deck_map(profile, n, TorusModel.TWIST)
    mfd = torus_manifold(n)
    y = np.concatenate([[0.7], transition_point(profile, rng, n, 0.4).as_array()])
    (v,) = tangent_directions(rng, tangent_basis(mfd, y), 1)
    assert float(pullback(deck, beta, y, v)) == pytest.approx(float(beta(y, v)), abs=1e-8)


@pytest.mark.parametrize("n", [2, 3])
def test_beta_is_contact(profile, rng, n):
    beta, mfd = beta_k(profile, n), torus_manifold(n)
    volumes = []
    for fraction in (-0.5, 0.2, 0.5, 0.8, 1.5):
        radius = profile.transition[0] * (1.0 + fraction)
        y = np.concatenate([[0.5], cotangent_at_radius(rng, n, abs(radius)).as_array()])
        volumes.append(contact_volume(beta, mfd, y))
    assert all(abs(v) > 1e-8 for v in volumes)
    assert len({math.copysign(1.0, v) for v in volumes}) == 1


@pytest.mark.parametrize("k", KS)
def test_psi_pullback(k, rng):
    profile = TwistProfile(k)
    n = 3
    psi, beta, expected = psi_map(profile, n), beta_k(profile, n), psi_pullback_expected(profile, n)
    mfd = torus_manifold(n)
    y = np.concatenate([[0.6], transition_point(profile, rng, n, 0.7).as_array()])
    for v in tangent_directions(rng, tangent_basis(mfd, y), 3):
        assert float(pullback(psi, beta, y, v)) == pytest.approx(float(expected(y, v)), abs=1e-8)


@pytest.mark.parametrize("k", KS)
def test_psi_is_well_defined(k, rng):
    """Psi_k carries the (-1)^k deck map to the twist deck map."""
    profile = TwistProfile(k)
    n = 3
    psi = psi_map(profile, n)
    sigma = deck_map(profile, n, TorusModel.M)
    twist_deck = deck_map(profile, n, TorusModel.TWIST)
    y = np.concatenate([[0.35], transition_point(profile, rng, n, 0.45).as_array()])
    assert np.allclose(psi(sigma(y)), twist_deck(psi(y)), atol=1e-9)


def test_psi_roundtrip(profile, rng):
    pt = transition_point(profile, rng)
    torus_pt = psi_k(profile, 0.8, pt)
    assert torus_pt.model is TorusModel.TWIST
    assert abs(torus_pt.base.radius - pt.radius) <= 1e-12
    t, back = psi_k_inverse(profile, torus_pt)
    assert t == 0.8
    assert np.allclose(back.as_array(), pt.as_array(), atol=1e-10)


def test_normalize_twist_model(profile, rng):
    """(1.3; x) reduces to (0.3; tau^-1 x)."""
    pt = transition_point(profile, rng)
    reduced = normalize_torus_point(profile, TorusPoint(1.3, pt, TorusModel.TWIST))
    assert reduced.t == pytest.approx(0.3)
    assert np.allclose(
        reduced.base.as_array(), dehn_twist_inverse(profile, pt).as_array(), atol=1e-12
    )
    raised = normalize_torus_point(profile, TorusPoint(-0.7, pt, TorusModel.TWIST))
    assert raised.t == pytest.approx(0.3)
    assert np.allclose(raised.base.as_array(), dehn_twist(profile, pt).as_array(), atol=1e-12)


def test_normalize_m_model_flips_sign(rng):
    profile = TwistProfile(3)
    pt = transition_point(profile, rng)
    reduced = normalize_torus_point(profile, TorusPoint(2.5, pt, TorusModel.M))
    assert reduced.t == pytest.approx(0.5)
    assert np.allclose(reduced.base.p, pt.p)
    reduced = normalize_torus_point(profile, TorusPoint(1.5, pt, TorusModel.M))
    assert np.allclose(reduced.base.p, -pt.p)


def test_normalize_glued_model(profile, rng):
    pt = transition_point(profile, rng)
    assert period(profile, TorusPoint(0.0, pt, TorusModel.GLUED)) == pytest.approx(
        float(h_k_eval(profile, pt.radius))
    )
    step = float(h_k_eval(profile, pt.radius))
    reduced = normalize_torus_point(profile, TorusPoint(step + 0.1, pt, TorusModel.GLUED))
    assert 0.0 <= reduced.t < step
    assert reduced.t == pytest.approx(0.1)


def test_normalize_keeps_fundamental_domain(profile, rng):
    pt = transition_point(profile, rng)
    same = TorusPoint(0.5, pt, TorusModel.TWIST)
    assert normalize_torus_point(profile, same) is same


def test_reproject_logs_drift(caplog):
    q = np.array([1.0 + 1e-9, 0.0])
    p = np.array([0.0, 0.3])
    with caplog.at_level(logging.WARNING, logger="openbook.cotangent"):
        q2, p2 = reproject(q, p)
    assert np.linalg.norm(q2) == pytest.approx(1.0, abs=1e-15)
    assert "drift" in caplog.text


def test_reproject_leaves_clean_points(rng):
    pt = cotangent_at_radius(rng, 3, 0.1)
    q, p = reproject(pt.q, pt.p)
    assert q is pt.q and p is pt.p


def test_twist_correction_vanishes_off_transition(profile):
    x = jnp.asarray([1.0, 0.0, 0.0, 0.0, 3 * profile.transition[1], 0.0])
    v = jnp.asarray([0.0, 0.0, 0.0, 0.0, 1.0, 0.0])
    assert float(twist_correction(profile, 3)(x, v)) == pytest.approx(0.0, abs=1e-12)
