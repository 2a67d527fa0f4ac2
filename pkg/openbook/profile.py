"""
Twist profile functions.

The smooth step f, the scaled profile f_k(x) = k*pi*f(c_k x), its integral
I(y), the primitive h_k, the auxiliary function h(y) = y / (1 + I(y)) and
the monotone inversions built on top of them. Every function is a pure jax
function, so values and exact derivatives come from the same code.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import lru_cache, partial

import jax
import jax.numpy as jnp
import numpy as np
from jax import lax

from .exceptions import ConfigurationException, out_of_range
from .logger import get_logger
from .utils import concrete_value

logger = get_logger(__name__)

GAUSS_NODES = 64
MAX_BISECTIONS = 200
POLISH_STEPS = 2
INVERT_RTOL = 1e-12


def _exp_ramp(u):
    positive = u > 0
    return jnp.where(positive, jnp.exp(-1.0 / jnp.where(positive, u, 1.0)), 0.0)


def base_bump(x):
    """
    Symmetric exponential smoothstep.

    Zero on (-inf, 1], one on [2, inf), strictly increasing in between with
    derivative at most 2 (attained only at x = 1.5).
    """
    x = jnp.asarray(x, dtype=jnp.float64)
    rise = _exp_ramp(x - 1.0)
    return rise / (rise + _exp_ramp(2.0 - x))


@lru_cache(maxsize=None)
def gauss_legendre(order: int = GAUSS_NODES) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


@dataclass(frozen=True)
class TwistProfile:
    """
    The data of a k-fold twist profile.

    Attributes:
        k: Twist multiplicity.
        c_k: Scale of the transition; f_k rises on [1/c_k, 2/c_k].
            Defaults to 4*k*pi and must exceed 3*k*pi.
        quad_tol: Agreement required between independent quadratures.
        bump: The base smooth step. Any step with the properties of
            `base_bump` may be plugged in.
    """

    k: int
    c_k: float | None = None
    quad_tol: float = 1e-12
    bump: Callable = field(default=base_bump, repr=False)

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
            raise ConfigurationException(f"k must be a positive integer, got {self.k!r}")
        c_k = 4.0 * math.pi * self.k if self.c_k is None else float(self.c_k)
        floor = 3.0 * math.pi * self.k
        if not c_k > floor:
            raise ConfigurationException(f"c_k must exceed 3*k*pi = {floor:.6g}, got {c_k!r}")
        object.__setattr__(self, "c_k", c_k)

    @property
    def transition(self) -> tuple[float, float]:
        return 1.0 / self.c_k, 2.0 / self.c_k

    @property
    def height(self) -> float:
        """The plateau value k*pi of f_k."""
        return math.pi * self.k

    @property
    def h_k_floor(self) -> float:
        return 1.0 - 3.0 * math.pi * self.k / self.c_k

    @property
    def supremum(self) -> float:
        """sup h = 1/(k*pi), never attained."""
        return 1.0 / (math.pi * self.k)


def _require_nonnegative(x, what: str = "y"):
    value = concrete_value(x)
    if value is not None and value.size and not np.all(value >= 0):
        raise out_of_range(float(np.min(value)), 0.0, math.inf, what)


# Kernels. No validation, safe to trace.


def _f_k(profile: TwistProfile, x):
    return profile.height * profile.bump(profile.c_k * x)


def _f_k_deriv(profile: TwistProfile, x):
    return jax.jvp(partial(_f_k, profile), (x,), (jnp.ones_like(x),))[1]


def _transition_quadrature(profile: TwistProfile, y, integrand):
    # Gauss-Legendre on [1/c, min(y, 2/c)]; zero when y <= 1/c.
    lo, hi = profile.transition
    nodes, weights = gauss_legendre()
    b = jnp.clip(y, lo, hi)
    half = 0.5 * (b - lo)
    centre = 0.5 * (b + lo)
    s = centre[..., None] + half[..., None] * nodes
    return half * jnp.sum(weights * integrand(s), axis=-1)


def _integral(profile: TwistProfile, y):
    tail = profile.height * jnp.maximum(y - profile.transition[1], 0.0)
    return _transition_quadrature(profile, y, partial(_f_k, profile)) + tail


def _h_k(profile: TwistProfile, y):
    return 1.0 - y * _f_k(profile, y) + _integral(profile, y)


def _h_aux(profile: TwistProfile, y):
    return y / (1.0 + _integral(profile, y))


# Public API.


def f_k_eval(profile: TwistProfile, x):
    """f_k(x) = k*pi*f(c_k x) for x >= 0."""
    _require_nonnegative(x, "x")
    return _f_k(profile, jnp.asarray(x, dtype=jnp.float64))


def f_k_deriv(profile: TwistProfile, x):
    """Exact derivative of f_k by forward-mode differentiation."""
    _require_nonnegative(x, "x")
    return _f_k_deriv(profile, jnp.asarray(x, dtype=jnp.float64))


def f_k_integral(profile: TwistProfile, y):
    """
    I(y) = integral of f_k over [0, y].

    Quadrature runs only on the transition interval; beyond 2/c_k the tail
    k*pi*(y - 2/c_k) is added in closed form.
    """
    _require_nonnegative(y)
    return _integral(profile, jnp.asarray(y, dtype=jnp.float64))


def h_k_eval(profile: TwistProfile, y):
    """h_k(y) = 1 - y f_k(y) + I(y), the integrated-by-parts form."""
    _require_nonnegative(y)
    return _h_k(profile, jnp.asarray(y, dtype=jnp.float64))


def h_k_direct(profile: TwistProfile, y):
    """h_k(y) = 1 - integral of s f_k'(s) over [0, y], by quadrature."""
    _require_nonnegative(y)
    y = jnp.asarray(y, dtype=jnp.float64)
    return 1.0 - _transition_quadrature(
        profile, y, lambda s: s * _f_k_deriv(profile, s)
    )


def h_aux(profile: TwistProfile, y):
    """h(y) = y / (1 + I(y)); maps [0, inf) onto [0, 1/(k*pi))."""
    _require_nonnegative(y)
    return _h_aux(profile, jnp.asarray(y, dtype=jnp.float64))


def h_aux_deriv(profile: TwistProfile, y):
    """The closed-form derivative h'(y) = h_k(y) / (1 + I(y))**2."""
    _require_nonnegative(y)
    y = jnp.asarray(y, dtype=jnp.float64)
    return _h_k(profile, y) / (1.0 + _integral(profile, y)) ** 2


@lru_cache(maxsize=None)
def h_aux_fn(profile: TwistProfile) -> Callable:
    """A stable scalar function object for `h_aux`, usable as a static argument."""
    return partial(_h_aux, profile)


# Bracketed root finding.


def _bisect(fn, target, lo, hi):
    dtype = jnp.result_type(target, jnp.float64)
    lo = jnp.asarray(lo, dtype)
    hi = jnp.asarray(hi, dtype)

    def cond(state):
        i, a, b = state
        tol = INVERT_RTOL * jnp.maximum(1.0, jnp.abs(target))
        return (i < MAX_BISECTIONS) & (b - a > 0) & (
            jnp.abs(fn(0.5 * (a + b)) - target) > tol
        )

    def body(state):
        i, a, b = state
        mid = 0.5 * (a + b)
        below = fn(mid) < target
        return i + 1, jnp.where(below, mid, a), jnp.where(below, b, mid)

    _, a, b = lax.while_loop(cond, body, (0, lo, hi))
    return 0.5 * (a + b), a, b


def _polish(fn, target, root, a, b):
    # Newton steps that are discarded if they leave the final bracket.
    grad = jax.grad(fn)

    def step(_, y):
        slope = grad(y)
        candidate = y - (fn(y) - target) / jnp.where(slope > 0, slope, 1.0)
        inside = (slope > 0) & (candidate >= a) & (candidate <= b)
        return jnp.where(inside, candidate, y)

    return lax.fori_loop(0, POLISH_STEPS, step, root)


@partial(jax.custom_jvp, nondiff_argnums=(0, 2, 3))
def bracketed_root(fn, target, lo, hi):
    """
    Solve fn(y) = target for y in [lo, hi], fn strictly increasing.

    Bisection with at most 200 halvings, then two guarded Newton steps.
    Differentiable in `target` through the implicit function rule.
    """
    root, a, b = _bisect(fn, target, lo, hi)
    return _polish(fn, target, root, a, b)


@bracketed_root.defjvp
def _bracketed_root_jvp(fn, lo, hi, primals, tangents):
    (target,) = primals
    (target_dot,) = tangents
    root = bracketed_root(fn, target, lo, hi)
    return root, target_dot / jax.grad(fn)(root)


def monotone_invert(fn: Callable, target, bracket: tuple[float, float]):
    """
    Invert a strictly increasing scalar function on a bracket.

    Args:
        fn: Strictly increasing real function.
        target: Value to attain.
        bracket: (lo, hi) with fn(lo) <= target <= fn(hi).

    Returns:
        y with |fn(y) - target| <= 1e-12 * max(1, |target|).

    Raises:
        OutOfRangeError: If the target lies outside [fn(lo), fn(hi)].
    """
    lo, hi = (float(v) for v in bracket)
    value = concrete_value(target)
    if value is not None:
        f_lo, f_hi = float(fn(lo)), float(fn(hi))
        slack = INVERT_RTOL * max(1.0, abs(float(value)))
        if not f_lo - slack <= float(value) <= f_hi + slack:
            raise out_of_range(float(value), f_lo, f_hi)
    return bracketed_root(fn, jnp.asarray(target, dtype=jnp.float64), lo, hi)


@partial(jax.jit, static_argnums=0)
def _h_inverse(profile: TwistProfile, target):
    hi = profile.transition[1]
    knee = _h_aux(profile, hi)
    offset = _integral(profile, hi) - profile.height * hi
    # On the linear tail 1 + I(y) = 1 + offset + k*pi*y, so h is a Moebius map.
    tail = target * (1.0 + offset) / (1.0 - profile.height * target)
    head = bracketed_root(h_aux_fn(profile), jnp.minimum(target, knee), 0.0, hi)
    return jnp.where(target >= knee, tail, head)


def h_inverse(profile: TwistProfile, target):
    """
    The inverse of h on [0, 1/(k*pi)).

    Closed form on the linear tail, bracketed bisection on [0, 2/c_k].

    Raises:
        OutOfRangeError: If the target is negative or not below 1/(k*pi).
    """
    value = concrete_value(target)
    if value is not None and value.size:
        bad = value[~((value >= 0) & (value < profile.supremum))]
        if bad.size:
            raise out_of_range(float(bad.flat[0]), 0.0, profile.supremum)
    target = jnp.asarray(target, dtype=jnp.float64)
    if target.ndim == 0:
        return _h_inverse(profile, target)
    return jax.vmap(partial(_h_inverse, profile))(target.reshape(-1)).reshape(target.shape)


def profile_grid(profile: TwistProfile, points: int = 129) -> np.ndarray:
    """0 followed by a geometric grid up to 10 * (2/c_k)."""
    hi = 10.0 * profile.transition[1]
    return np.concatenate([[0.0], np.geomspace(hi * 1e-5, hi, points - 1)])


def profile_table(profile: TwistProfile, ys=None) -> np.ndarray:
    """Rows of (y, f_k, I, h_k, h_aux) over `ys` (default `profile_grid`)."""
    ys = profile_grid(profile) if ys is None else np.asarray(ys, dtype=np.float64)
    _require_nonnegative(ys)
    y = jnp.asarray(ys)
    columns = (
        y,
        _f_k(profile, y),
        _integral(profile, y),
        _h_k(profile, y),
        _h_aux(profile, y),
    )
    table = np.stack([np.asarray(c) for c in columns], axis=1)
    logger.debug(f"profile table k={profile.k}: {len(ys)} rows, min h_k={table[:, 3].min():.6g}")
    return table
