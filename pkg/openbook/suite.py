"""
Named numerical checks over one (n, k) cell.

Checks register themselves with the module-level `registry` through the
`check` decorator, the way routes register with a router. Each check
receives a `Cell` and returns the per-sample values that are summarized
against its bound.
"""

import cmath
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import jax
import jax.numpy as jnp
import numpy as np
import scipy.integrate

from . import pages
from .brieskorn import (
    alpha_k,
    defect,
    poly_f,
    poly_f_real_form,
    r_action,
    so_n_action,
    so_n_pullback,
    theta,
    w_manifold,
)
from .cotangent import (
    beta_k,
    cotangent_manifold,
    deck_map,
    dt_plus_lambda,
    glue_map,
    lambda_can,
    left_twist_map,
    normalize_torus_point,
    psi_inverse_map,
    psi_map,
    psi_pullback_expected,
    reparam_map,
    torus_manifold,
    twist_correction,
    twist_map,
)
from .datastructures import CotangentPoint, TorusModel, TorusPoint
from .forms import (
    SmoothMap,
    contact_volume,
    fd_relative_error,
    pullback,
    pullback_form,
    tangent_basis,
    wedge_eval,
)
from .logger import get_logger
from .params import BrieskornParams, override_for
from .profile import (
    TwistProfile,
    base_bump,
    f_k_deriv,
    f_k_eval,
    f_k_integral,
    h_aux,
    h_aux_deriv,
    h_aux_fn,
    h_inverse,
    h_k_direct,
    h_k_eval,
)
from .report import MAX_BOUND, MIN_BOUND, CheckReport, CheckResult, run_check
from .sampling import (
    cotangent_at_radius,
    random_cotangent,
    random_page_coords,
    random_rotation,
    random_torus_coords,
    random_unit,
    sample_rng,
    tangent_directions,
)

logger = get_logger(__name__)

FD_PROBES = 100
PAGE_SAMPLE_RADIUS = 0.95
COMPOSITE_FACTOR = 10.0


@dataclass(frozen=True)
class Cell:
    """One (n, k) cell: parameters, profile, sample count and seed."""

    params: BrieskornParams
    profile: TwistProfile
    samples: int
    seed: int

    @property
    def n(self) -> int:
        return self.params.n

    def rng(self, label: str, index: int) -> np.random.Generator:
        return sample_rng(self.seed, label, self.params.n, self.params.k, index)

    def torus_points(self, label: str, count: int | None = None) -> list[np.ndarray]:
        count = count or self.samples
        return [
            random_torus_coords(self.profile, self.n, self.seed, label, i, count)
            for i in range(count)
        ]

    def cotangent_points(self, label: str, count: int | None = None) -> list[np.ndarray]:
        count = count or self.samples
        return [
            random_cotangent(self.profile, self.n, self.seed, label, i, count).as_array()
            for i in range(count)
        ]

    def page_points(self, label: str, count: int | None = None) -> list[np.ndarray]:
        count = count or self.samples
        return [
            random_page_coords(self.n, self.seed, f"{label}/{self.params.k}", i, PAGE_SAMPLE_RADIUS)
            for i in range(count)
        ]

    def direction(self, mfd, x, label: str, index: int, count: int = 1) -> np.ndarray:
        return tangent_directions(self.rng(label + "/direction", index), tangent_basis(mfd, x), count)


@dataclass(frozen=True)
class CheckEntry:
    name: str
    tolerance: float | Callable[[Cell], float]
    bound: str
    measure: Callable[[Cell], Iterable[float]]

    def tolerance_for(self, cell: Cell) -> float:
        if callable(self.tolerance):
            return float(self.tolerance(cell))
        return float(self.tolerance)


class CheckRegistry:
    """
    Ordered collection of checks.

    Attributes:
        entries: Registered checks in registration order.
    """

    def __init__(self) -> None:
        self.entries: list[CheckEntry] = []
        self._by_name: dict[str, CheckEntry] = {}

    def add_check(self, name, tolerance, measure, bound: str = MAX_BOUND) -> None:
        if name in self._by_name:
            raise ValueError(f"check {name!r} registered twice")
        entry = CheckEntry(name, tolerance, bound, measure)
        self.entries.append(entry)
        self._by_name[name] = entry

    def check(self, name: str, tolerance, bound: str = MAX_BOUND):
        """Register the decorated function as check `name`."""

        def decorator(measure):
            self.add_check(name, tolerance, measure, bound)
            return measure

        return decorator

    def names(self) -> list[str]:
        return [entry.name for entry in self.entries]

    def get(self, name: str) -> CheckEntry:
        return self._by_name[name]

    def __len__(self) -> int:
        return len(self.entries)


registry = CheckRegistry()
check = registry.check

COMPOSITE_CHECK = "cmap.composite"
COMPOSITE_TOL = 1e-8
COMPOSITE_PARTS = ("phi.pullback", "rescale.pullback", "psi.pullback")


def _relative(actual, expected) -> float:
    return abs(float(actual) - float(expected)) / max(1.0, abs(float(expected)))


def _y_samples(cell: Cell, label: str) -> np.ndarray:
    hi = 10.0 * cell.profile.transition[1]
    return cell.rng(label, 0).uniform(0.0, hi, cell.samples)


# profile


@check("profile.h_k_positive", lambda cell: cell.profile.h_k_floor, MIN_BOUND)
def _h_k_positive(cell: Cell):
    """h_k stays above 1 - 3 k pi / c_k."""
    ys = np.concatenate([_y_samples(cell, "h_k"), np.linspace(0.0, 3 * cell.profile.transition[1], 301)])
    return np.asarray(h_k_eval(cell.profile, ys))


@check("profile.h_k_identity", 1e-10)
def _h_k_identity(cell: Cell):
    ys = _y_samples(cell, "h_k_identity")
    return np.asarray(h_k_eval(cell.profile, ys)) - np.asarray(h_k_direct(cell.profile, ys))


@check("profile.quadrature", lambda cell: cell.profile.quad_tol)
def _quadrature(cell: Cell):
    """Gauss-Legendre integral of f_k against adaptive quadrature."""
    profile = cell.profile
    lo, hi = profile.transition
    reference, _ = scipy.integrate.quad(
        lambda s: float(f_k_eval(profile, s)), lo, hi, epsabs=1e-15, epsrel=1e-14, limit=200
    )
    return [float(f_k_integral(profile, hi)) - reference]


@check("profile.h_aux_roundtrip", 1e-9)
def _h_aux_roundtrip(cell: Cell):
    ys = _y_samples(cell, "h_aux_roundtrip")
    return np.asarray(h_inverse(cell.profile, h_aux(cell.profile, ys))) - ys


@check("profile.h_aux_derivative", 1e-10)
def _h_aux_derivative(cell: Cell):
    """h'(y) (1 + I(y))^2 = h_k(y), with h' by automatic differentiation."""
    profile = cell.profile
    grad = jax.grad(h_aux_fn(profile))
    values = []
    for y in _y_samples(cell, "h_aux_derivative")[:20]:
        scale = (1.0 + float(f_k_integral(profile, y))) ** 2
        values.append(float(grad(jnp.asarray(y))) * scale - float(h_k_eval(profile, y)))
        values.append((float(grad(jnp.asarray(y))) - float(h_aux_deriv(profile, y))) * scale)
    return values


@check("profile.bump_derivative", 1e-9)
def _bump_derivative(cell: Cell):
    """Excess of f' over 2 on a fine grid of [1, 2]."""
    xs = jnp.linspace(1.0, 2.0, 10_000)
    slopes = jax.vmap(jax.grad(base_bump))(xs)
    return np.maximum(np.asarray(slopes) - 2.0, 0.0)


@check("profile.f_k_fd", 1e-6)
def _f_k_fd(cell: Cell):
    profile = cell.profile
    lo, hi = profile.transition
    xs = cell.rng("f_k_fd", 0).uniform(0.5 * lo, 1.5 * hi, cell.samples)
    values = []
    for x in xs:
        step = 1e-6 * max(1.0, abs(x))
        exact = float(f_k_deriv(profile, x))
        approx = (float(f_k_eval(profile, x + step)) - float(f_k_eval(profile, x - step))) / (2 * step)
        values.append(abs(exact - approx) / max(1.0, abs(exact)))
    return values


# forms


def _registered_maps(cell: Cell) -> list[tuple[SmoothMap, str]]:
    profile, n = cell.profile, cell.n
    torus_maps = [
        glue_map(profile, n),
        reparam_map(profile, n),
        psi_map(profile, n),
        psi_inverse_map(profile, n),
        pages.s_inverse_map(profile, n),
        pages.c_map_smooth(profile, n),
        *(deck_map(profile, n, model) for model in TorusModel),
    ]
    return (
        [(twist_map(profile, n), "cotangent"), (left_twist_map(profile, n), "cotangent")]
        + [(m, "torus") for m in torus_maps]
        + [(pages.phi_map(cell.params), "page"), (pages.s_map(profile, n), "page")]
    )


@check("forms.ad_vs_fd", 1e-6)
def _ad_vs_fd(cell: Cell):
    """Forward-mode differentials against central differences, every map."""
    count = min(cell.samples, FD_PROBES)
    values = []
    for smooth_map, domain in _registered_maps(cell):
        if domain == "cotangent":
            points = cell.cotangent_points("fd", count)
        elif domain == "torus":
            points = cell.torus_points("fd", count)
        else:
            points = cell.page_points("fd", count)
        for i, x in enumerate(points):
            direction = random_unit(cell.rng(f"fd/{smooth_map.name}", i), smooth_map.domain_dim)
            values.append(fd_relative_error(smooth_map, x, direction))
    return values


@check("forms.linearity", 1e-10)
def _linearity(cell: Cell):
    profile, n = cell.profile, cell.n
    values = []
    for smooth_map in (twist_map(profile, n), pages.c_map_smooth(profile, n)):
        dim = smooth_map.domain_dim
        points = cell.cotangent_points("linearity") if dim == 2 * n else cell.torus_points("linearity")
        for i, x in enumerate(points):
            rng = cell.rng(f"linearity/{smooth_map.name}", i)
            u, v = rng.standard_normal(dim), rng.standard_normal(dim)
            a, b = rng.standard_normal(2)
            combined = np.asarray(smooth_map.differential(x, a * u + b * v))
            split = a * np.asarray(smooth_map.differential(x, u)) + b * np.asarray(
                smooth_map.differential(x, v)
            )
            values.append(np.linalg.norm(combined - split) / max(1.0, np.linalg.norm(split)))
    return values


@check("forms.alternation", 1e-10)
def _alternation(cell: Cell):
    """lambda ^ d lambda changes sign when two arguments are swapped."""
    lam = lambda_can(cell.n)
    forms = [lam, lam.derivative]
    values = []
    for i, x in enumerate(cell.cotangent_points("alternation")):
        u, v, w = cell.rng("alternation", i).standard_normal((3, 2 * cell.n))
        forward = wedge_eval(forms, x, u, v, w)
        swapped = wedge_eval(forms, x, v, u, w)
        values.append((forward + swapped) / max(1.0, abs(forward)))
    return values


@check("forms.d_squared", 1e-8)
def _d_squared(cell: Cell):
    dd_beta = beta_k(cell.profile, cell.n).derivative.derivative
    values = []
    for i, y in enumerate(cell.torus_points("d_squared")):
        u, v, w = cell.rng("d_squared", i).standard_normal((3, 2 * cell.n + 1))
        values.append(float(dd_beta(y, u, v, w)))
    return values


@check("forms.functoriality", 1e-8)
def _functoriality(cell: Cell):
    """(tau . tau)* lambda = tau*(tau* lambda)."""
    tau = twist_map(cell.profile, cell.n)
    lam = lambda_can(cell.n)
    twice = tau.compose(tau)
    pulled = pullback_form(tau, lam)
    mfd = cotangent_manifold(cell.n)
    values = []
    for i, x in enumerate(cell.cotangent_points("functoriality")):
        (v,) = cell.direction(mfd, x, "functoriality", i)
        values.append(_relative(pullback(twice, lam, x, v), pullback(tau, pulled, x, v)))
    return values


# twist


@check("twist.lambda_transform", 1e-8)
def _lambda_transform(cell: Cell):
    """tau* lambda - lambda - |p| d(f_k(|p|)) vanishes on tangent directions."""
    tau = twist_map(cell.profile, cell.n)
    lam = lambda_can(cell.n)
    correction = twist_correction(cell.profile, cell.n)
    mfd = cotangent_manifold(cell.n)
    values = []
    for i, x in enumerate(cell.cotangent_points("lambda_transform")):
        (v,) = cell.direction(mfd, x, "lambda_transform", i)
        expected = float(lam(x, v)) + float(correction(x, v))
        values.append(_relative(pullback(tau, lam, x, v), expected))
    return values


@check("twist.symplectic", 1e-8)
def _symplectic(cell: Cell):
    tau = twist_map(cell.profile, cell.n)
    d_lam = lambda_can(cell.n).derivative
    mfd = cotangent_manifold(cell.n)
    values = []
    for i, x in enumerate(cell.cotangent_points("symplectic")):
        u, v = cell.direction(mfd, x, "symplectic", i, 2)
        values.append(_relative(pullback(tau, d_lam, x, u, v), d_lam(x, u, v)))
    return values


@check("twist.roundtrip", 1e-10)
def _twist_roundtrip(cell: Cell):
    tau = twist_map(cell.profile, cell.n)
    tau_inv = left_twist_map(cell.profile, cell.n)
    values = []
    for x in cell.cotangent_points("twist_roundtrip"):
        values.append(np.max(np.abs(np.asarray(tau_inv(tau(x))) - x)))
        values.append(np.max(np.abs(np.asarray(tau(tau_inv(x))) - x)))
    return values


@check("twist.norm_invariance", 1e-12)
def _norm_invariance(cell: Cell):
    """|p| is preserved by tau_k and Psi_k."""
    n = cell.n
    tau = twist_map(cell.profile, n)
    psi = psi_map(cell.profile, n)
    values = []
    for y in cell.torus_points("norm_invariance"):
        radius = np.linalg.norm(y[1 + n :])
        values.append(np.linalg.norm(np.asarray(tau(y[1:]))[n:]) - radius)
        values.append(np.linalg.norm(np.asarray(psi(y))[1 + n :]) - radius)
    return values


# mapping tori


def _torus_pullback_residuals(cell: Cell, label: str, smooth_map, form, expected):
    mfd = torus_manifold(cell.n)
    values = []
    for i, y in enumerate(cell.torus_points(label)):
        (v,) = cell.direction(mfd, y, label, i)
        values.append(_relative(pullback(smooth_map, form, y, v), expected(y, v)))
    return values


@check("glue.preserves_form", 1e-8)
def _glue_preserves(cell: Cell):
    """phi_k*(dt + lambda) = dt + lambda."""
    form = dt_plus_lambda(cell.n)
    return _torus_pullback_residuals(cell, "glue", glue_map(cell.profile, cell.n), form, form)


@check("torus.reparam_beta", 1e-8)
def _reparam_beta(cell: Cell):
    return _torus_pullback_residuals(
        cell,
        "reparam",
        reparam_map(cell.profile, cell.n),
        dt_plus_lambda(cell.n),
        beta_k(cell.profile, cell.n),
    )


@check("torus.beta_deck", 1e-8)
def _beta_deck(cell: Cell):
    """beta_k is invariant under (t, x) -> (t + 1, tau_k x)."""
    beta = beta_k(cell.profile, cell.n)
    return _torus_pullback_residuals(
        cell, "beta_deck", deck_map(cell.profile, cell.n, TorusModel.TWIST), beta, beta
    )


@check("torus.beta_contact", 1e-8, MIN_BOUND)
def _beta_contact(cell: Cell):
    beta = beta_k(cell.profile, cell.n)
    mfd = torus_manifold(cell.n)
    volumes = [contact_volume(beta, mfd, y) for y in cell.torus_points("beta_contact")]
    reference = math.copysign(1.0, volumes[0])
    return [reference * v for v in volumes]


@check("psi.pullback", 1e-8)
def _psi_pullback(cell: Cell):
    """Psi_k* beta_k = (1 + I(|p|)) dt + lambda."""
    return _torus_pullback_residuals(
        cell,
        "psi",
        psi_map(cell.profile, cell.n),
        beta_k(cell.profile, cell.n),
        psi_pullback_expected(cell.profile, cell.n),
    )


@check("psi.well_defined", 1e-9)
def _psi_well_defined(cell: Cell):
    """Psi_k . sigma_k = (deck of the twist model) . Psi_k."""
    profile, n = cell.profile, cell.n
    psi = psi_map(profile, n)
    sigma = deck_map(profile, n, TorusModel.M)
    twist_deck = deck_map(profile, n, TorusModel.TWIST)
    return [
        np.max(np.abs(np.asarray(psi(sigma(y))) - np.asarray(twist_deck(psi(y)))))
        for y in cell.torus_points("psi_well_defined")
    ]


@check("psi.roundtrip", 1e-10)
def _psi_roundtrip(cell: Cell):
    psi = psi_map(cell.profile, cell.n)
    psi_inv = psi_inverse_map(cell.profile, cell.n)
    return [
        np.max(np.abs(np.asarray(psi_inv(psi(y))) - y))
        for y in cell.torus_points("psi_roundtrip")
    ]


# pages


@check("phi.defect", 1e-9)
def _phi_defect(cell: Cell):
    """Phi_k lands on W; five times the usual sample count."""
    phi = pages.phi_map(cell.params)
    values = []
    for y in cell.page_points("phi_defect", 5 * cell.samples):
        values.extend(defect(cell.params, np.asarray(phi(y))))
    return values


@check("phi.pullback", 1e-8)
def _phi_pullback(cell: Cell):
    """Phi_k* alpha_k = 4 pi k dt + 4 F G lambda."""
    phi = pages.phi_map(cell.params)
    alpha = alpha_k(cell.params)
    expected = pages.phi_pullback_expected(cell.params)
    mfd = torus_manifold(cell.n)
    values = []
    for i, y in enumerate(cell.page_points("phi_pullback")):
        (v,) = cell.direction(mfd, y, "phi_pullback", i)
        values.append(_relative(pullback(phi, alpha, y, v), expected(y, v)))
    return values


@check("phi.dt_coefficient", 1e-9)
def _phi_dt_coefficient(cell: Cell):
    phi = pages.phi_map(cell.params)
    alpha = alpha_k(cell.params)
    d_t = np.zeros(cell.params.torus_dim)
    d_t[0] = 1.0
    target = 4.0 * math.pi * cell.params.k
    return [
        (float(pullback(phi, alpha, y, d_t)) - target) / target
        for y in cell.page_points("phi_dt")
    ]


@check("phi.fibration", 1e-10)
def _phi_fibration(cell: Cell):
    """theta . Phi_k = e^{2 pi i t}, and Phi_k(t + 1, x) = Phi_k(t, (-1)^k x)."""
    phi = pages.phi_map(cell.params)
    sign = -1.0 if cell.params.k % 2 else 1.0
    values = []
    for y in cell.page_points("phi_fibration"):
        z = np.asarray(phi(y))
        values.append(abs(theta(z) - cmath.exp(2j * math.pi * y[0])))
        shifted = np.concatenate([[y[0] + 1.0], y[1:]])
        flipped = np.concatenate([[y[0]], sign * y[1:]])
        values.append(np.max(np.abs(np.asarray(phi(shifted)) - np.asarray(phi(flipped)))))
    return values


@check("phi.sphere_identity", 1e-12)
def _phi_sphere_identity(cell: Cell):
    rs = np.linspace(0.0, 0.999, 1000)
    return np.asarray(pages.sphere_identity(cell.params.k, rs))


@check("rescale.equation", 1e-12)
def _rescale_equation(cell: Cell):
    """h(g(r)) = r F G / (k pi) on a 1000-point grid."""
    return pages.rescale_residuals(cell.profile)


@check("rescale.monotone", 0.0, MIN_BOUND)
def _rescale_monotone(cell: Cell):
    rs = np.linspace(0.0, 1.0, 10_001)[:-1]
    return np.diff(np.asarray(pages.rescale_target(cell.params.k, rs)))


@check("rescale.endpoint", 1e-9)
def _rescale_endpoint(cell: Cell):
    """r F G / (k pi) tends to 1/(k pi) as r -> 1."""
    k = cell.params.k
    return [float(pages.rescale_target(k, 1.0 - 1e-10)) - 1.0 / (math.pi * k)]


@check("rescale.roundtrip", 1e-9)
def _rescale_roundtrip(cell: Cell):
    s, s_inv = pages.s_map(cell.profile, cell.n), pages.s_inverse_map(cell.profile, cell.n)
    return [
        np.max(np.abs(np.asarray(s_inv(s(y))) - y)) for y in cell.page_points("rescale_roundtrip")
    ]


@check("rescale.pullback", 1e-8)
def _rescale_pullback(cell: Cell):
    """S_k*((1 + I) dt + lambda) = (1 + I(g)) (dt + F G / (k pi) lambda)."""
    s = pages.s_map(cell.profile, cell.n)
    form = psi_pullback_expected(cell.profile, cell.n)
    expected = pages.rescale_pullback_expected(cell.profile, cell.n)
    mfd = torus_manifold(cell.n)
    values = []
    for i, y in enumerate(cell.page_points("rescale_pullback")):
        (v,) = cell.direction(mfd, y, "rescale_pullback", i)
        values.append(_relative(pullback(s, form, y, v), expected(y, v)))
    return values


# the contactomorphism


@check("cmap.pullback", 1e-6)
def _cmap_pullback(cell: Cell):
    """C_k* alpha_k = mu beta_k, mu = 4 pi k / (1 + I(|p|))."""
    c = pages.c_map_smooth(cell.profile, cell.n)
    alpha = alpha_k(cell.params)
    expected = pages.cmap_expected(cell.profile, cell.n)
    mfd = torus_manifold(cell.n)
    values = []
    for i, y in enumerate(cell.torus_points("cmap_pullback")):
        (v,) = cell.direction(mfd, y, "cmap_pullback", i)
        values.append(_relative(pullback(c, alpha, y, v), expected(y, v)))
    return values


@check("cmap.kernel", 1e-6)
def _cmap_kernel(cell: Cell):
    """Vectors in ker beta_k are in ker C_k* alpha_k."""
    n = cell.n
    c = pages.c_map_smooth(cell.profile, n)
    alpha = alpha_k(cell.params)
    beta = beta_k(cell.profile, n)
    mfd = torus_manifold(n)
    d_t = np.zeros(2 * n + 1)
    d_t[0] = 1.0
    values = []
    for i, y in enumerate(cell.torus_points("cmap_kernel")):
        (v,) = cell.direction(mfd, y, "cmap_kernel", i)
        v = v - float(beta(y, v)) / float(beta(y, d_t)) * d_t
        scale = float(pages.conformal_factor(cell.profile, np.linalg.norm(y[1 + n :])))
        values.append(float(pullback(c, alpha, y, v)) / max(1.0, scale * np.linalg.norm(v)))
    return values


@check("cmap.fibration", 1e-9)
def _cmap_fibration(cell: Cell):
    c = pages.c_map_smooth(cell.profile, cell.n)
    return [
        abs(theta(np.asarray(c(y))) - cmath.exp(2j * math.pi * y[0]))
        for y in cell.torus_points("cmap_fibration")
    ]


@check("cmap.deck", 1e-8)
def _cmap_deck(cell: Cell):
    """C_k(normalize(t + 1, x)) = C_k(t + 1, x)."""
    n = cell.n
    c = pages.c_map_smooth(cell.profile, n)
    values = []
    for y in cell.torus_points("cmap_deck"):
        shifted = np.concatenate([[y[0] + 1.0], y[1:]])
        point = TorusPoint(shifted[0], CotangentPoint(y[1 : 1 + n], y[1 + n :]), TorusModel.TWIST)
        reduced = normalize_torus_point(cell.profile, point)
        direct = np.asarray(c(shifted))
        values.append(np.max(np.abs(np.asarray(c(reduced.as_array())) - direct)))
    return values


@check("cmap.roundtrip", 1e-8)
def _cmap_roundtrip(cell: Cell):
    """C_k(C_k^{-1}(z)) = z at points generated by Phi_k."""
    phi = pages.phi_map(cell.params)
    values = []
    for y in cell.page_points("cmap_roundtrip"):
        z = np.asarray(phi(y))
        torus = pages.c_map_inverse(cell.params, cell.profile, z)
        again = pages.c_map(cell.params, cell.profile, torus)
        values.append(np.max(np.abs(np.asarray(again.coords) - z)))
        turn = (torus.t - y[0]) % 1.0
        values.append(min(turn, 1.0 - turn))
    return values


@check("cmap.layer_spread", 1e-10)
def _cmap_layer_spread(cell: Cell):
    """|z0| of C_k depends on |p| only."""
    c = pages.c_map_smooth(cell.profile, cell.n)
    hi = cell.profile.transition[1]
    values = []
    for group in range(max(1, cell.samples // pages.PLANARITY_FIBER)):
        rng = cell.rng("layer_spread", group)
        radius = rng.uniform(0.0, 2.0 * hi)
        moduli = []
        for _ in range(pages.PLANARITY_FIBER):
            base = cotangent_at_radius(rng, cell.n, radius).as_array()
            y = np.concatenate([[rng.uniform(0.0, 1.0)], base])
            z = np.asarray(c(y))
            moduli.append(math.hypot(z[0], z[1]))
        values.append(max(moduli) - min(moduli))
    return values


# brieskorn


def _w_points(cell: Cell, label: str) -> list[np.ndarray]:
    phi = pages.phi_map(cell.params)
    return [np.asarray(phi(y)) for y in cell.page_points(label)]


@check("brieskorn.alpha_contact", 1e-8, MIN_BOUND)
def _alpha_contact(cell: Cell):
    """alpha ^ (d alpha)^{n-1} has constant sign on W."""
    return pages.alpha_contact_values(cell.params, cell.samples, cell.seed)


@check("brieskorn.so_n_invariance", 1e-10)
def _so_n_invariance(cell: Cell):
    params = cell.params
    alpha = alpha_k(params)
    mfd = w_manifold(params)
    values = []
    for i, z in enumerate(_w_points(cell, "so_n")):
        rotation = random_rotation(cell.rng("so_n", i), params.n)
        moved = so_n_action(rotation, z)
        (v,) = cell.direction(mfd, z, "so_n", i)
        values.append(_relative(so_n_pullback(params, rotation, z, v), alpha(z, v)))
        values.extend(np.subtract(defect(params, moved), defect(params, z)))
        values.append(abs(poly_f(params, moved) - poly_f(params, z)))
        values.append(abs(theta(moved) - theta(z)))
    return values


@check("brieskorn.r_action", 1e-10)
def _r_action(cell: Cell):
    """The R-action preserves W and rotates theta by e^{it}."""
    params = cell.params
    values = []
    for i, z in enumerate(_w_points(cell, "r_action")):
        t = cell.rng("r_action", i).uniform(0.0, 2.0 * math.pi)
        moved = r_action(params, t, z)
        values.extend(np.subtract(defect(params, moved), defect(params, z)))
        values.append(abs(theta(moved) - cmath.exp(1j * t) * theta(z)))
    return values


@check("brieskorn.poly_forms", 1e-12)
def _poly_forms(cell: Cell):
    """Complex and real expressions of f agree at arbitrary points."""
    params = cell.params
    values = []
    for i in range(cell.samples):
        z = cell.rng("poly_forms", i).standard_normal(params.ambient_dim)
        exact = poly_f(params, z)
        values.append(abs(poly_f_real_form(params, z) - exact) / max(1.0, abs(exact)))
    return values


# open book support


def _support(name: str, bound: str, measure):
    registry.add_check(name, pages.SUPPORT_TOLERANCES[name], measure, bound)


_support(
    "book.binding_contact",
    MIN_BOUND,
    lambda cell: pages.binding_contact_values(cell.params, cell.samples, cell.seed),
)
_support(
    "book.page_symplectic",
    MIN_BOUND,
    lambda cell: pages.page_symplectic_values(cell.params, cell.samples, cell.seed),
)
_support(
    "book.page_transport",
    MAX_BOUND,
    lambda cell: pages.page_transport_residuals(cell.params, cell.samples, cell.seed),
)
_support(
    "book.orientation",
    MIN_BOUND,
    lambda cell: pages.orientation_values(cell.n, cell.samples, cell.seed),
)
_support(
    "book.binding_planarity",
    MAX_BOUND,
    lambda cell: pages.binding_planarity_values(
        cell.params, cell.profile, cell.samples, cell.seed
    ),
)
_support(
    "book.normal_basis",
    MAX_BOUND,
    lambda cell: pages.normal_basis_values(cell.params, cell.samples, cell.seed),
)


def known_checks() -> list[str]:
    return [*registry.names(), COMPOSITE_CHECK]


def _composite(report: CheckReport, tolerance: float) -> CheckResult | None:
    # C_k's residual must stay within a fixed multiple of its factors' residuals.
    parts = [report.get(name) for name in COMPOSITE_PARTS]
    whole = report.get("cmap.pullback")
    if whole is None or any(part is None for part in parts):
        return None
    excess = whole.max_abs_err - COMPOSITE_FACTOR * sum(part.max_abs_err for part in parts)
    return CheckResult.from_values(COMPOSITE_CHECK, [max(0.0, excess)], tolerance)


def run_cell(
    params: BrieskornParams,
    samples: int,
    seed: int,
    tolerances: dict[str, float] | None = None,
    selects: Callable[[str], bool] | None = None,
) -> CheckReport:
    """
    Run every selected check for one (n, k) cell.

    Args:
        params: The cell.
        samples: Samples per check.
        seed: Base seed; each check derives its own streams from it.
        tolerances: Overrides keyed by check name or group.
        selects: Predicate on check names; all checks when omitted.
    """
    tolerances = tolerances or {}
    selects = selects or (lambda name: True)
    cell = Cell(params, TwistProfile(params.k), samples, seed)
    report = CheckReport(params.n, params.k, seed)
    for entry in registry.entries:
        if not selects(entry.name):
            continue
        tolerance = override_for(tolerances, entry.name)
        if tolerance is None:
            tolerance = entry.tolerance_for(cell)
        logger.debug(f"n={params.n} k={params.k}: running {entry.name}")
        report.add(
            run_check(entry.name, tolerance, lambda entry=entry: entry.measure(cell), entry.bound)
        )
    if selects(COMPOSITE_CHECK):
        tolerance = override_for(tolerances, COMPOSITE_CHECK)
        composite = _composite(report, COMPOSITE_TOL if tolerance is None else tolerance)
        if composite is not None:
            report.add(composite)
    logger.info(report.summary())
    return report
