"""
The cotangent bundle T*S^{n-1}, the k-fold Dehn twist and its mapping tori.

Cotangent points live in R^{2n} as x = (q, p); torus points in R^{1+2n}
as (t, q, p). Kernels named with a leading underscore are traceable and
are wrapped in SmoothMaps; the public functions take and return the value
types of `openbook.datastructures`.
"""

import math
from functools import lru_cache

import jax.numpy as jnp
import numpy as np

from .datastructures import CotangentPoint, TorusModel, TorusPoint
from .forms import ConstraintManifold, DifferentialForm, SmoothMap
from .logger import get_logger
from .profile import TwistProfile, _f_k, _f_k_deriv, _h_k, _integral
from .utils import safe_norm

logger = get_logger(__name__)

DRIFT_TOL = 1e-12
DRIFT_WARN = 1e-10


def _split(x, n: int):
    return x[:n], x[n:]


def _unit(p, r):
    return p / jnp.where(r > 0, r, 1.0)


def _rotate(q, p, r, angle):
    # Rotation by `angle` in the plane spanned by q and p/|p|.
    cos, sin = jnp.cos(angle), jnp.sin(angle)
    return cos * q + sin * _unit(p, r), cos * p - r * sin * q


def _twist(profile: TwistProfile, x, sign: float = 1.0):
    n = x.shape[0] // 2
    q, p = _split(x, n)
    r = safe_norm(p)
    lo, hi = profile.transition
    angle = sign * (math.pi * profile.k + _f_k(profile, r))
    q_rot, p_rot = _rotate(q, p, r, angle)
    parity = -1.0 if profile.k % 2 else 1.0
    q_out = jnp.where(r <= lo, parity * q, jnp.where(r >= hi, q, q_rot))
    p_out = jnp.where(r <= lo, parity * p, jnp.where(r >= hi, p, p_rot))
    return jnp.concatenate([q_out, p_out])


def _left_twist(profile: TwistProfile, x):
    return _twist(profile, x, -1.0)


def _glue(profile: TwistProfile, y):
    n = (y.shape[0] - 1) // 2
    r = safe_norm(y[1 + n :])
    return jnp.concatenate([(y[0] + _h_k(profile, r))[None], _twist(profile, y[1:])])


def _reparametrize(profile: TwistProfile, y):
    n = (y.shape[0] - 1) // 2
    r = safe_norm(y[1 + n :])
    return jnp.concatenate([(_h_k(profile, r) * y[0])[None], y[1:]])


def _psi(profile: TwistProfile, y, sign: float = 1.0):
    n = (y.shape[0] - 1) // 2
    t = y[0]
    q, p = _split(y[1:], n)
    r = safe_norm(p)
    q_out, p_out = _rotate(q, p, r, sign * t * _f_k(profile, r))
    return jnp.concatenate([t[None], q_out, p_out])


def _psi_inverse(profile: TwistProfile, y):
    return _psi(profile, y, -1.0)


def _sigma(profile: TwistProfile, y):
    parity = -1.0 if profile.k % 2 else 1.0
    return jnp.concatenate([(y[0] + 1.0)[None], parity * y[1:]])


def _twist_deck(profile: TwistProfile, y):
    return jnp.concatenate([(y[0] + 1.0)[None], _twist(profile, y[1:])])


def _deck(profile: TwistProfile, model: TorusModel):
    return {
        TorusModel.M: _sigma,
        TorusModel.TWIST: _twist_deck,
        TorusModel.GLUED: _glue,
    }[model]


# Smooth maps, one instance per (profile, n).


@lru_cache(maxsize=None)
def twist_map(profile: TwistProfile, n: int) -> SmoothMap:
    return SmoothMap(lambda x: _twist(profile, x), 2 * n, 2 * n, f"tau_{profile.k}")


@lru_cache(maxsize=None)
def left_twist_map(profile: TwistProfile, n: int) -> SmoothMap:
    return SmoothMap(lambda x: _left_twist(profile, x), 2 * n, 2 * n, f"tau_-{profile.k}")


@lru_cache(maxsize=None)
def glue_map(profile: TwistProfile, n: int) -> SmoothMap:
    return SmoothMap(lambda y: _glue(profile, y), 2 * n + 1, 2 * n + 1, f"phi_{profile.k}")


@lru_cache(maxsize=None)
def reparam_map(profile: TwistProfile, n: int) -> SmoothMap:
    """(t; q, p) -> (h_k(|p|) t; q, p)."""
    return SmoothMap(
        lambda y: _reparametrize(profile, y), 2 * n + 1, 2 * n + 1, "reparam"
    )


@lru_cache(maxsize=None)
def psi_map(profile: TwistProfile, n: int) -> SmoothMap:
    return SmoothMap(lambda y: _psi(profile, y), 2 * n + 1, 2 * n + 1, f"Psi_{profile.k}")


@lru_cache(maxsize=None)
def psi_inverse_map(profile: TwistProfile, n: int) -> SmoothMap:
    return SmoothMap(
        lambda y: _psi_inverse(profile, y), 2 * n + 1, 2 * n + 1, f"Psi_{profile.k}^-1"
    )


@lru_cache(maxsize=None)
def deck_map(profile: TwistProfile, n: int, model: TorusModel) -> SmoothMap:
    kernel = _deck(profile, TorusModel(model))
    return SmoothMap(
        lambda y: kernel(profile, y), 2 * n + 1, 2 * n + 1, f"deck_{TorusModel(model).value}"
    )


# Forms.


@lru_cache(maxsize=None)
def lambda_can(n: int) -> DifferentialForm:
    """The canonical 1-form p . dq on R^{2n}."""

    def coefficients(x):
        return jnp.concatenate([x[n:], jnp.zeros(n)])

    return DifferentialForm.from_coefficients(coefficients, 2 * n, "lambda")


@lru_cache(maxsize=None)
def twist_correction(profile: TwistProfile, n: int) -> DifferentialForm:
    """|p| d(f_k(|p|)) = f_k'(|p|) p . dp on R^{2n}."""

    def coefficients(x):
        p = x[n:]
        return jnp.concatenate([jnp.zeros(n), _f_k_deriv(profile, safe_norm(p)) * p])

    return DifferentialForm.from_coefficients(coefficients, 2 * n, "|p|df_k")


@lru_cache(maxsize=None)
def dt_plus_lambda(n: int) -> DifferentialForm:
    """dt + p . dq on R^{1+2n}."""

    def coefficients(y):
        return jnp.concatenate([jnp.ones(1), y[1 + n :], jnp.zeros(n)])

    return DifferentialForm.from_coefficients(coefficients, 2 * n + 1, "dt+lambda")


@lru_cache(maxsize=None)
def beta_k(profile: TwistProfile, n: int) -> DifferentialForm:
    """beta_k = h_k(|p|) dt - t |p| d(f_k(|p|)) + p . dq on R^{1+2n}."""

    def coefficients(y):
        t, p = y[0], y[1 + n :]
        r = safe_norm(p)
        return jnp.concatenate(
            [_h_k(profile, r)[None], p, -t * _f_k_deriv(profile, r) * p]
        )

    return DifferentialForm.from_coefficients(coefficients, 2 * n + 1, f"beta_{profile.k}")


@lru_cache(maxsize=None)
def psi_pullback_expected(profile: TwistProfile, n: int) -> DifferentialForm:
    """(1 + I(|p|)) dt + p . dq, the pullback of beta_k under Psi_k."""

    def coefficients(y):
        p = y[1 + n :]
        return jnp.concatenate(
            [(1.0 + _integral(profile, safe_norm(p)))[None], p, jnp.zeros(n)]
        )

    return DifferentialForm.from_coefficients(coefficients, 2 * n + 1, "(1+I)dt+lambda")


# Manifolds.


def _sphere_constraints(n: int, offset: int):
    return (
        lambda x: jnp.sum(x[offset : offset + n] ** 2) - 1.0,
        lambda x: jnp.dot(x[offset : offset + n], x[offset + n :]),
    )


@lru_cache(maxsize=None)
def cotangent_manifold(n: int) -> ConstraintManifold:
    return ConstraintManifold(2 * n, _sphere_constraints(n, 0), f"T*S^{n - 1}")


@lru_cache(maxsize=None)
def torus_manifold(n: int) -> ConstraintManifold:
    """R x T*S^{n-1} inside R^{1+2n}."""
    return ConstraintManifold(2 * n + 1, _sphere_constraints(n, 1), f"R x T*S^{n - 1}")


@lru_cache(maxsize=None)
def sphere_bundle(n: int, radius: float) -> ConstraintManifold:
    """S_c T*S^{n-1}: |p| = c; dimension 2n - 3."""
    return ConstraintManifold(
        2 * n,
        (*_sphere_constraints(n, 0), lambda x: jnp.sum(x[n:] ** 2) - radius**2),
        f"S_{radius:g} T*S^{n - 1}",
    )


# Public API on value types.


def reproject(q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Pull (q, p) back onto T*S^{n-1} when drift exceeds 1e-12.

    q is normalized and the q-component of p removed.
    """
    drift = max(abs(np.linalg.norm(q) - 1.0), abs(float(q @ p)))
    if drift <= DRIFT_TOL:
        return q, p
    if drift > DRIFT_WARN:
        logger.warning(f"constraint drift {drift:.3e} exceeds {DRIFT_WARN:.0e}")
    else:
        logger.debug(f"reprojecting cotangent point, drift {drift:.3e}")
    q = q / np.linalg.norm(q)
    return q, p - (q @ p) * q


def _to_point(x: np.ndarray) -> CotangentPoint:
    n = x.size // 2
    return CotangentPoint(*reproject(x[:n], x[n:]))


def dehn_twist(profile: TwistProfile, pt: CotangentPoint) -> CotangentPoint:
    """
    tau_k: rotation by g_k = k pi + f_k(|p|) in the (q, p/|p|) plane.

    (-1)^k id for |p| <= 1/c_k and the identity for |p| >= 2/c_k.
    """
    return _to_point(np.asarray(twist_map(profile, pt.n)(pt.as_array())))


def dehn_twist_inverse(profile: TwistProfile, pt: CotangentPoint) -> CotangentPoint:
    """The left-handed twist, rotating by -g_k."""
    return _to_point(np.asarray(left_twist_map(profile, pt.n)(pt.as_array())))


left_dehn_twist = dehn_twist_inverse


def phi_k_glue(profile: TwistProfile, t: float, pt: CotangentPoint) -> tuple[float, CotangentPoint]:
    """(t; q, p) -> (t + h_k(|p|); tau_k(q, p))."""
    shift = float(_h_k(profile, jnp.asarray(pt.radius)))
    return float(t) + shift, dehn_twist(profile, pt)


def psi_k(profile: TwistProfile, t: float, pt: CotangentPoint) -> TorusPoint:
    """
    Psi_k from the M_k model to the twist model.

    Rotates (q, p/|p|) by t f_k(|p|); the identity wherever f_k vanishes.
    """
    y = np.concatenate([[float(t)], pt.as_array()])
    out = np.asarray(psi_map(profile, pt.n)(y))
    return TorusPoint(out[0], _to_point(out[1:]), TorusModel.TWIST)


def psi_k_inverse(profile: TwistProfile, torus_pt: TorusPoint) -> tuple[float, CotangentPoint]:
    out = np.asarray(psi_inverse_map(profile, torus_pt.base.n)(torus_pt.as_array()))
    return float(out[0]), _to_point(out[1:])


def period(profile: TwistProfile, torus_pt: TorusPoint) -> float:
    """Length of the fundamental domain in t for the point's model."""
    if torus_pt.model is TorusModel.GLUED:
        return float(_h_k(profile, jnp.asarray(torus_pt.base.radius)))
    return 1.0


def normalize_torus_point(profile: TwistProfile, torus_pt: TorusPoint) -> TorusPoint:
    """
    The representative with t in the fundamental domain.

    (t; x) ~ (t + 1; tau_k x) in the twist model, so reducing t by one
    applies tau_k^{-1}. The M model flips signs (-1)^k per step and the
    glued model steps by h_k(|p|).
    """
    step = period(profile, torus_pt)
    turns = math.floor(torus_pt.t / step)
    if turns == 0:
        return torus_pt
    t = torus_pt.t - turns * step
    base = torus_pt.base
    if torus_pt.model is TorusModel.M:
        sign = -1.0 if (profile.k * turns) % 2 else 1.0
        base = CotangentPoint(sign * base.q, sign * base.p)
    else:
        move = dehn_twist_inverse if turns > 0 else dehn_twist
        for _ in range(abs(turns)):
            base = move(profile, base)
    # rounding can leave t a hair outside [0, step)
    t = min(max(t, 0.0), math.nextafter(step, 0.0))
    return TorusPoint(t, base, torus_pt.model)
