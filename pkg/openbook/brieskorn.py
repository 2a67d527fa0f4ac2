"""
The Brieskorn manifold W_k^{2n-1}.

W is the intersection of the sphere |z|^2 = 2 in C^{n+1} with the zero set
of f(z) = z0^k + z1^2 + ... + zn^2. Points are stored as interleaved reals
(x0, y0, x1, y1, ...). This module provides f, the contact form alpha_k,
the fibration theta = z0/|z0|, the SO(n) and R actions, the binding
z0 = 0 and the symplectic normal bases along it.
"""

import math
from functools import lru_cache

import jax
import jax.numpy as jnp
import numpy as np

from .datastructures import AmbientPoint
from .exceptions import NotOrthogonalError, OnBindingError, off_manifold
from .forms import ConstraintManifold, DifferentialForm, SmoothMap
from .params import BrieskornParams
from .sampling import random_orthonormal_pair, sample_rng
from .utils import as_array

DEFECT_TOL = 1e-9
BINDING_TOL = 1e-12
ORTHOGONAL_TOL = 1e-10


def _coords(params: BrieskornParams, z) -> jnp.ndarray:
    if isinstance(z, AmbientPoint):
        z = z.coords
    return as_array(z, params.ambient_dim)


def _split(x):
    return x[0::2], x[1::2]


def _complex_power(re, im, k: int):
    # (re + i im)^k by repeated multiplication; keeps everything real.
    out_re, out_im = jnp.ones_like(re), jnp.zeros_like(im)
    for _ in range(k):
        out_re, out_im = out_re * re - out_im * im, out_re * im + out_im * re
    return out_re, out_im


def _poly_parts(k: int, x):
    xs, ys = _split(x)
    head_re, head_im = _complex_power(xs[0], ys[0], k)
    rest_x, rest_y = xs[1:], ys[1:]
    re = head_re + jnp.sum(rest_x * rest_x - rest_y * rest_y)
    im = head_im + 2.0 * jnp.sum(rest_x * rest_y)
    return re, im


def poly_f(params: BrieskornParams, z) -> complex:
    """f(z) = z0^k + sum z_j^2 in complex arithmetic."""
    zc = np.asarray(_coords(params, z))
    zc = zc[0::2] + 1j * zc[1::2]
    return complex(zc[0] ** params.k + np.sum(zc[1:] ** 2))


def poly_f_real_form(params: BrieskornParams, z) -> complex:
    """f(z) = z0^k + |x|^2 - |y|^2 + 2i<x, y> with z_rest = x + iy."""
    re, im = _poly_parts(params.k, _coords(params, z))
    return complex(float(re), float(im))


def _sphere(x):
    return jnp.sum(x * x) - 2.0


def defect(params: BrieskornParams, z) -> tuple[float, float]:
    """(|f(z)|, ||z|^2 - 2|); both vanish exactly on W."""
    x = _coords(params, z)
    re, im = _poly_parts(params.k, x)
    return float(jnp.hypot(re, im)), float(jnp.abs(_sphere(x)))


def _weights(params: BrieskornParams) -> jnp.ndarray:
    return jnp.asarray([float(params.k)] + [2.0] * params.n)


@lru_cache(maxsize=None)
def alpha_k(params: BrieskornParams) -> DifferentialForm:
    """alpha_k = k (x0 dy0 - y0 dx0) + 2 sum_j (x_j dy_j - y_j dx_j)."""
    weights = _weights(params)

    def coefficients(x):
        xs, ys = _split(x)
        return jnp.stack([-weights * ys, weights * xs], axis=1).reshape(-1)

    return DifferentialForm.from_coefficients(
        coefficients, params.ambient_dim, f"alpha_{params.k}"
    )


def theta(z) -> complex:
    """
    The fibration angle z0/|z0|.

    Raises:
        OnBindingError: If |z0| <= 1e-12.
    """
    coords = np.asarray(z.coords if isinstance(z, AmbientPoint) else z, dtype=np.float64)
    z0 = complex(coords[0], coords[1])
    modulus = abs(z0)
    if modulus <= BINDING_TOL:
        raise OnBindingError(modulus)
    return z0 / modulus


def _rotate_pairs(x, angles):
    xs, ys = _split(x)
    cos, sin = jnp.cos(angles), jnp.sin(angles)
    return jnp.stack([cos * xs - sin * ys, sin * xs + cos * ys], axis=1).reshape(-1)


def _r_angles(params: BrieskornParams, t):
    return jnp.concatenate([jnp.atleast_1d(t), jnp.full(params.n, 0.5 * params.k * t)])


def r_action(params: BrieskornParams, t: float, z) -> AmbientPoint:
    """(e^{it} z0, e^{ikt/2} z1, ..., e^{ikt/2} zn)."""
    x = _coords(params, z)
    return AmbientPoint(np.asarray(_rotate_pairs(x, _r_angles(params, float(t)))))


@lru_cache(maxsize=None)
def _r_action_map(params: BrieskornParams, t: float) -> SmoothMap:
    angles = _r_angles(params, t)
    return SmoothMap(
        lambda x: _rotate_pairs(x, angles), params.ambient_dim, params.ambient_dim, "R"
    )


def r_action_map(params: BrieskornParams, t: float) -> SmoothMap:
    return _r_action_map(params, float(t))


def check_orthogonal(matrix) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    residual = float(np.max(np.abs(matrix.T @ matrix - np.eye(matrix.shape[0]))))
    if not residual <= ORTHOGONAL_TOL:
        raise NotOrthogonalError(residual)
    return matrix


def _apply_rotation(matrix, x):
    xs, ys = _split(x)
    xs = jnp.concatenate([xs[:1], matrix @ xs[1:]])
    ys = jnp.concatenate([ys[:1], matrix @ ys[1:]])
    return jnp.stack([xs, ys], axis=1).reshape(-1)


def so_n_action(matrix, z) -> AmbientPoint:
    """
    A . (z0, z1, ..., zn) = (z0, A (z1, ..., zn)).

    Raises:
        NotOrthogonalError: If |A^T A - 1| > 1e-10.
    """
    matrix = check_orthogonal(matrix)
    coords = z.coords if isinstance(z, AmbientPoint) else z
    x = as_array(coords, 2 * (matrix.shape[0] + 1))
    return AmbientPoint(np.asarray(_apply_rotation(jnp.asarray(matrix), x)))


@lru_cache(maxsize=None)
def _so_n_pullback_kernel(params: BrieskornParams):
    evaluator = alpha_k(params).evaluator

    def kernel(matrix, x, v):
        image, pushed = jax.jvp(lambda y: _apply_rotation(matrix, y), (x,), (v,))
        return evaluator(image, pushed)

    return jax.jit(kernel)


def so_n_pullback(params: BrieskornParams, matrix, z, v) -> float:
    """
    (A^* alpha_k)_z(v). The rotation is a traced argument, so one
    compilation serves every A of the cell.

    Raises:
        NotOrthogonalError: If |A^T A - 1| > 1e-10.
    """
    matrix = jnp.asarray(check_orthogonal(matrix))
    kernel = _so_n_pullback_kernel(params)
    return float(kernel(matrix, _coords(params, z), as_array(v, params.ambient_dim)))


def _constraints(params: BrieskornParams) -> tuple:
    k = params.k
    return (
        lambda x: _poly_parts(k, x)[0],
        lambda x: _poly_parts(k, x)[1],
        _sphere,
    )


@lru_cache(maxsize=None)
def w_manifold(params: BrieskornParams) -> ConstraintManifold:
    return ConstraintManifold(
        params.ambient_dim, _constraints(params), f"W_{params.k}^{params.manifold_dim}"
    )


@lru_cache(maxsize=None)
def binding_manifold(params: BrieskornParams) -> ConstraintManifold:
    """The binding z0 = 0 inside W; dimension 2n - 3."""
    return ConstraintManifold(
        params.ambient_dim,
        (*_constraints(params), lambda x: x[0], lambda x: x[1]),
        f"B_{params.k}",
    )


@lru_cache(maxsize=None)
def page_manifold(params: BrieskornParams, angle: float = 0.0) -> ConstraintManifold:
    """
    The page through theta = e^{i angle}, cut out of W by Im(e^{-i angle} z0) = 0.

    Points must also satisfy Re(e^{-i angle} z0) > 0, which is open and so
    not a constraint.
    """
    cos, sin = math.cos(angle), math.sin(angle)
    return ConstraintManifold(
        params.ambient_dim,
        (*_constraints(params), lambda x: cos * x[1] - sin * x[0]),
        f"P_{params.k}({angle:.6g})",
    )


def sample_binding(params: BrieskornParams, rng_seed: int, index: int = 0) -> AmbientPoint:
    """z0 = 0 and (z1, ..., zn) = u + iv for a random orthonormal pair (u, v)."""
    rng = sample_rng(rng_seed, "binding", params.n, params.k, index)
    u, v = random_orthonormal_pair(rng, params.n)
    return AmbientPoint.from_complex(np.concatenate([[0.0], u + 1j * v]))


def binding_normal_basis(params: BrieskornParams, z) -> tuple[np.ndarray, np.ndarray]:
    """
    A d alpha_k-symplectic basis of the normal bundle of B at z.

    For k != 1: (1, 0, ..., 0)/sqrt(2k) and (i, 0, ..., 0)/sqrt(2k).
    For k = 1: sqrt(2/5)(1, -conj(z_j)/4) and sqrt(2/5)(i, -i conj(z_j)/4).

    Raises:
        ConstraintViolation: If z is not on the binding.
    """
    x = np.asarray(_coords(params, z))
    residual = max(*defect(params, x), abs(x[0]), abs(x[1]))
    if not residual <= DEFECT_TOL:
        raise off_manifold(residual, DEFECT_TOL, "binding point")
    zc = x[0::2] + 1j * x[1::2]
    first = np.zeros(params.n + 1, dtype=np.complex128)
    if params.k == 1:
        scale = math.sqrt(2.0 / 5.0)
        first[0] = 1.0
        first[1:] = -np.conj(zc[1:]) / 4.0
        first *= scale
    else:
        first[0] = 1.0 / math.sqrt(2.0 * params.k)
    second = 1j * first
    return (
        np.asarray(AmbientPoint.from_complex(first).coords),
        np.asarray(AmbientPoint.from_complex(second).coords),
    )
