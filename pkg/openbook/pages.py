"""
Pages of the open book on W_k and the contactomorphism C_k.

Page coordinates (t, q, p) with |p| < 1 parametrize W minus the binding
through Phi_k. The rescaling S_k stretches the open unit disk bundle onto
all of T*S^{n-1} by solving h(g) = |p| F G / (k pi) for g, and

    C_k = Phi_k . S_k^{-1} . Psi_k^{-1}

carries the twist-model mapping torus into W. C_k pulls alpha_k back to
mu * beta_k with mu = 4 pi k / (1 + I(|p|)) > 0, so it is a
contactomorphism of the contact structures.
"""

import math
from dataclasses import dataclass
from functools import lru_cache, partial

import jax.numpy as jnp
import numpy as np

from .brieskorn import (
    alpha_k,
    binding_manifold,
    binding_normal_basis,
    defect,
    page_manifold,
    r_action,
    r_action_map,
    sample_binding,
    w_manifold,
)
from .cotangent import (
    _psi_inverse,
    beta_k,
    lambda_can,
    psi_k,
    reproject,
    sphere_bundle,
)
from .datastructures import AmbientPoint, CotangentPoint, TorusModel, TorusPoint
from .exceptions import (
    ConfigurationException,
    ModelMismatch,
    OnBindingError,
    PageDomainError,
    SingularOrbitError,
    off_manifold,
)
from .forms import (
    DifferentialForm,
    SmoothMap,
    contact_volume,
    nondegeneracy,
    tangent_basis,
    wedge_eval,
)
from .logger import get_logger
from .params import DEFAULT_SAMPLES, DEFAULT_SEED, BrieskornParams, override_for
from .profile import (
    TwistProfile,
    _h_aux,
    _h_inverse,
    _integral,
    h_inverse,
    monotone_invert,
)
from .report import MIN_BOUND, CheckReport, run_check
from .sampling import cotangent_at_radius, sample_rng
from .utils import concrete_value, safe_norm

logger = get_logger(__name__)

SERIES_CUTOFF = 1e-4
BINDING_TOL = 1e-10
DEFECT_TOL = 1e-9
PAGE_RADIUS = 0.95
PAGE_ANGLES = (0.0, math.pi / 3.0)
ORIENTATION_RADII = (0.2, 0.5, 0.9)
PLANARITY_FIBER = 8

SUPPORT_TOLERANCES = {
    "book.binding_contact": 1e-8,
    "book.page_symplectic": 1e-6,
    "book.page_transport": 1e-9,
    "book.orientation": 1e-9,
    "book.binding_planarity": 1e-9,
    "book.normal_basis": 1e-9,
}


# F and G as functions of s = r^2; both radicands are smooth in s.


def _f_squared(k: int, s):
    small = s <= SERIES_CUTOFF**2
    safe = jnp.where(small, 1.0, s)
    direct = (safe * (2.0 - safe) - jnp.expm1(k * jnp.log1p(-safe))) / (2.0 * safe)
    series = ((2.0 + k) - (1.0 + math.comb(k, 2)) * s + math.comb(k, 3) * s * s) / 2.0
    return jnp.where(small, series, direct)


def _g_squared(k: int, s):
    return (2.0 + s * (2.0 - s) + jnp.expm1(k * jnp.log1p(-s))) / 2.0


def _fg(k: int, s):
    return jnp.sqrt(_f_squared(k, s)), jnp.sqrt(_g_squared(k, s))


def _u(k: int, r):
    big_f, big_g = _fg(k, r * r)
    return r * big_f * big_g / (math.pi * k)


@lru_cache(maxsize=None)
def u_fn(k: int):
    """r -> r F(r) G(r) / (k pi) as a stable function object."""
    return partial(_u, k)


def _require_page_radius(r):
    value = concrete_value(r)
    if value is not None and value.size:
        bad = value[~((value >= 0) & (value < 1))]
        if bad.size:
            raise PageDomainError(float(bad.flat[0]))


def F_cap(k: int, r):
    """F(r) = sqrt((2 - (1-r^2)^2 - (1-r^2)^k) / (2 r^2)); F(0) = sqrt((2+k)/2)."""
    _require_page_radius(r)
    r = jnp.asarray(r, dtype=jnp.float64)
    return jnp.sqrt(_f_squared(k, r * r))


def G_cap(k: int, r):
    """G(r) = sqrt((2 - (1-r^2)^2 + (1-r^2)^k) / 2)."""
    _require_page_radius(r)
    r = jnp.asarray(r, dtype=jnp.float64)
    return jnp.sqrt(_g_squared(k, r * r))


def sphere_identity(k: int, r):
    """|(1-r^2)^2 + r^2 F^2 + G^2 - 2|, zero for all r in [0, 1)."""
    _require_page_radius(r)
    r = jnp.asarray(r, dtype=jnp.float64)
    s = r * r
    return jnp.abs((1.0 - s) ** 2 + s * _f_squared(k, s) + _g_squared(k, s) - 2.0)


def rescale_target(k: int, r):
    """r F(r) G(r) / (k pi); increases from 0 towards 1/(k pi) on [0, 1)."""
    _require_page_radius(r)
    return _u(k, jnp.asarray(r, dtype=jnp.float64))


@dataclass(frozen=True)
class PageCoordinates:
    """(t, q, p) on a page, |p| < 1; one turn of t is 1."""

    t: float
    pt: CotangentPoint

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        if not self.pt.radius < 1.0:
            raise PageDomainError(self.pt.radius)

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.t], self.pt.as_array()])

    @classmethod
    def from_array(cls, y) -> "PageCoordinates":
        y = np.asarray(y, dtype=np.float64)
        return cls(float(y[0]), CotangentPoint.from_array(y[1:]))


# Kernels on R^{1+2n}.


def _phi(k: int, y):
    n = (y.shape[0] - 1) // 2
    t, q, p = y[0], y[1 : 1 + n], y[1 + n :]
    s = jnp.sum(p * p)
    big_f, big_g = _fg(k, s)
    a, b = 2.0 * math.pi * t, math.pi * k * t
    z0 = (1.0 - s) * jnp.stack([jnp.cos(a), jnp.sin(a)])
    re = jnp.cos(b) * big_f * p - jnp.sin(b) * big_g * q
    im = jnp.sin(b) * big_f * p + jnp.cos(b) * big_g * q
    return jnp.concatenate([z0, jnp.stack([re, im], axis=1).reshape(-1)])


def _rescale(profile: TwistProfile, y):
    # page -> torus: p' = (g(|p|)/|p|) p
    n = (y.shape[0] - 1) // 2
    p = y[1 + n :]
    r = safe_norm(p)
    big_f, big_g = _fg(profile.k, r * r)
    slope = big_f * big_g / profile.height
    target = r * slope
    rho = _h_inverse(profile, target)
    # h is the identity below 1/c_k, so there g(r)/r = F G / (k pi) exactly.
    linear = target <= profile.transition[0]
    ratio = jnp.where(linear, slope, rho / jnp.where(linear, 1.0, r))
    return jnp.concatenate([y[: 1 + n], ratio * p])


def _rescale_inverse(profile: TwistProfile, y):
    # torus -> page: solve r F G / (k pi) = h(|p'|) for r in [0, 1)
    n = (y.shape[0] - 1) // 2
    p = y[1 + n :]
    rho = safe_norm(p)
    r = monotone_invert(u_fn(profile.k), _h_aux(profile, rho), (0.0, 1.0))
    big_f, big_g = _fg(profile.k, r * r)
    linear = rho <= profile.transition[0]
    ratio = jnp.where(
        linear, profile.height / (big_f * big_g), r / jnp.where(linear, 1.0, rho)
    )
    return jnp.concatenate([y[: 1 + n], ratio * p])


def _c_map(profile: TwistProfile, y):
    return _phi(profile.k, _rescale_inverse(profile, _psi_inverse(profile, y)))


@lru_cache(maxsize=None)
def phi_map(params: BrieskornParams) -> SmoothMap:
    k = params.k
    return SmoothMap(lambda y: _phi(k, y), params.torus_dim, params.ambient_dim, f"Phi_{k}")


@lru_cache(maxsize=None)
def s_map(profile: TwistProfile, n: int) -> SmoothMap:
    return SmoothMap(lambda y: _rescale(profile, y), 2 * n + 1, 2 * n + 1, f"S_{profile.k}")


@lru_cache(maxsize=None)
def s_inverse_map(profile: TwistProfile, n: int) -> SmoothMap:
    return SmoothMap(
        lambda y: _rescale_inverse(profile, y), 2 * n + 1, 2 * n + 1, f"S_{profile.k}^-1"
    )


@lru_cache(maxsize=None)
def c_map_smooth(profile: TwistProfile, n: int) -> SmoothMap:
    return SmoothMap(lambda y: _c_map(profile, y), 2 * n + 1, 2 * n + 2, f"C_{profile.k}")


# Forms.


@lru_cache(maxsize=None)
def phi_pullback_expected(params: BrieskornParams) -> DifferentialForm:
    """4 pi k dt + 4 F G p . dq on page coordinates."""
    n, k = params.n, params.k

    def coefficients(y):
        p = y[1 + n :]
        big_f, big_g = _fg(k, jnp.sum(p * p))
        return jnp.concatenate(
            [jnp.full(1, 4.0 * math.pi * k), 4.0 * big_f * big_g * p, jnp.zeros(n)]
        )

    return DifferentialForm.from_coefficients(coefficients, 2 * n + 1, "4pik dt+4FG lambda")


@lru_cache(maxsize=None)
def rescale_pullback_expected(profile: TwistProfile, n: int) -> DifferentialForm:
    """
    S_k pulls (1 + I(|p'|)) dt + lambda back to (1 + I(g)) (dt + F G/(k pi) lambda).
    """

    def coefficients(y):
        p = y[1 + n :]
        r = safe_norm(p)
        big_f, big_g = _fg(profile.k, r * r)
        weight = 1.0 + _integral(profile, g_of(profile, r))
        return jnp.concatenate(
            [weight[None], weight * big_f * big_g / profile.height * p, jnp.zeros(n)]
        )

    return DifferentialForm.from_coefficients(coefficients, 2 * n + 1, "S*((1+I)dt+lambda)")


def g_of(profile: TwistProfile, r):
    """g(r) = h^{-1}(r F(r) G(r) / (k pi)), traceable."""
    return _h_inverse(profile, _u(profile.k, r))


def conformal_factor(profile: TwistProfile, rho):
    """mu = 4 pi k / (1 + I(rho)) with rho the torus momentum norm."""
    rho = jnp.asarray(rho, dtype=jnp.float64)
    return 4.0 * math.pi * profile.k / (1.0 + _integral(profile, rho))


@lru_cache(maxsize=None)
def cmap_expected(profile: TwistProfile, n: int) -> DifferentialForm:
    """mu * beta_k, the pullback of alpha_k under C_k."""
    return beta_k(profile, n).scaled(
        lambda y: conformal_factor(profile, safe_norm(y[1 + n :]))
    )


# Public API on value types.


def _check_cell(params: BrieskornParams, profile: TwistProfile):
    if params.k != profile.k:
        raise ConfigurationException(
            f"profile k={profile.k} does not match manifold k={params.k}"
        )


def phi_embed(params: BrieskornParams, t: float, pt: CotangentPoint) -> AmbientPoint:
    """
    Phi_k(t, q, p) = (e^{2 pi i t}(1 - |p|^2), e^{pi k i t}(F p + i G q)).

    Raises:
        PageDomainError: If |p| >= 1.
    """
    page = PageCoordinates(t, pt)
    return AmbientPoint(np.asarray(phi_map(params)(page.as_array())))


def s_rescale(profile: TwistProfile, page: PageCoordinates) -> TorusPoint:
    """S_k: the page point with p replaced by (g(|p|)/|p|) p, in the M model."""
    out = np.asarray(s_map(profile, page.pt.n)(page.as_array()))
    return TorusPoint(out[0], CotangentPoint.from_array(out[1:]), TorusModel.M)


def s_rescale_inverse(profile: TwistProfile, torus_pt: TorusPoint) -> PageCoordinates:
    out = np.asarray(s_inverse_map(profile, torus_pt.base.n)(torus_pt.as_array()))
    return PageCoordinates.from_array(out)


def g_radius(profile: TwistProfile, r):
    """
    g(r) for r in [0, 1).

    Raises:
        PageDomainError: If r is outside [0, 1).
    """
    return h_inverse(profile, rescale_target(profile.k, r))


def g_table(profile: TwistProfile, rs=None) -> np.ndarray:
    """Rows (r, r F G/(k pi), g(r)); r defaults to 1000 points of [0, 0.999]."""
    rs = np.linspace(0.0, 0.999, 1000) if rs is None else np.asarray(rs, dtype=np.float64)
    target = np.asarray(rescale_target(profile.k, rs))
    return np.stack([rs, target, np.asarray(g_radius(profile, rs))], axis=1)


def rescale_residuals(profile: TwistProfile, rs=None) -> np.ndarray:
    """|h(g(r)) - r F G/(k pi)| over an r grid."""
    table = g_table(profile, rs)
    return np.abs(np.asarray(_h_aux(profile, jnp.asarray(table[:, 2]))) - table[:, 1])


def _as_twist_array(profile: TwistProfile, torus_pt) -> np.ndarray:
    if not isinstance(torus_pt, TorusPoint):
        return np.asarray(torus_pt, dtype=np.float64)
    if torus_pt.model is TorusModel.M:
        return psi_k(profile, torus_pt.t, torus_pt.base).as_array()
    if torus_pt.model is not TorusModel.TWIST:
        raise ModelMismatch(TorusModel.TWIST.value, torus_pt.model.value)
    return torus_pt.as_array()


def c_map(params: BrieskornParams, profile: TwistProfile, torus_pt) -> AmbientPoint:
    """
    C_k = Phi_k . S_k^{-1} . Psi_k^{-1} on a twist-model torus point.

    An M-model point is first carried to the twist model by Psi_k. Any
    representative of the class gives the same image.
    """
    _check_cell(params, profile)
    y = _as_twist_array(profile, torus_pt)
    return AmbientPoint(np.asarray(c_map_smooth(profile, params.n)(y)))


def c_map_inverse(params: BrieskornParams, profile: TwistProfile, z) -> TorusPoint:
    """
    The twist-model point with t in [0, 1) mapped to z by C_k.

    Raises:
        ConstraintViolation: If z is off W.
        OnBindingError: If |z0| <= 1e-10.
        SingularOrbitError: If |z0| >= 1.
    """
    _check_cell(params, profile)
    coords = np.asarray(z.coords if isinstance(z, AmbientPoint) else z, dtype=np.float64)
    residual = max(defect(params, coords))
    if not residual <= DEFECT_TOL:
        raise off_manifold(residual, DEFECT_TOL, "W point")
    zc = coords[0::2] + 1j * coords[1::2]
    modulus = abs(zc[0])
    if modulus <= BINDING_TOL:
        raise OnBindingError(modulus)
    if modulus >= 1.0:
        raise SingularOrbitError(modulus)
    t = (math.atan2(zc[0].imag, zc[0].real) / (2.0 * math.pi)) % 1.0
    r = math.sqrt(1.0 - modulus)
    big_f, big_g = (float(v) for v in _fg(params.k, r * r))
    w = np.exp(-1j * math.pi * params.k * t) * zc[1:]
    # z may sit up to DEFECT_TOL off W; CotangentPoint is stricter.
    q, p = reproject(w.imag / big_g, w.real / big_f)
    page = PageCoordinates(t, CotangentPoint(q, p))
    torus = s_rescale(profile, page)
    return psi_k(profile, torus.t, torus.base)


# Open book support: the four clauses plus the normal bundle bases.


def _page_point(params: BrieskornParams, rng, angle: float) -> tuple[np.ndarray, float]:
    base = cotangent_at_radius(rng, params.n, rng.uniform(0.0, PAGE_RADIUS))
    z = phi_embed(params, 0.0, base)
    if angle:
        z = r_action(params, angle, z)
    return np.asarray(z.coords), angle


def binding_contact_values(params: BrieskornParams, samples: int, seed: int) -> list[float]:
    """Contact volume of alpha_k on B, signed relative to the first sample."""
    alpha, mfd = alpha_k(params), binding_manifold(params)
    volumes = [
        contact_volume(alpha, mfd, sample_binding(params, seed, i).coords)
        for i in range(samples)
    ]
    reference = math.copysign(1.0, volumes[0]) if volumes else 1.0
    return [reference * v for v in volumes]


def alpha_contact_values(params: BrieskornParams, samples: int, seed: int) -> list[float]:
    """Contact volume of alpha_k on W at page points, signed relative to the first."""
    alpha, mfd = alpha_k(params), w_manifold(params)
    volumes = []
    for i in range(samples):
        rng = sample_rng(seed, "alpha_contact", params.n, params.k, i)
        base = cotangent_at_radius(rng, params.n, rng.uniform(0.0, PAGE_RADIUS))
        z = phi_embed(params, rng.uniform(0.0, 1.0), base)
        volumes.append(contact_volume(alpha, mfd, z.coords))
    reference = math.copysign(1.0, volumes[0]) if volumes else 1.0
    return [reference * v for v in volumes]


def page_symplectic_values(params: BrieskornParams, samples: int, seed: int) -> list[float]:
    """
    Skew Gram determinants of d alpha_k on page tangent bases.

    Points lie on theta = 1 and, carried by the R-action, on theta = e^{i pi/3}.
    """
    d_alpha = alpha_k(params).derivative
    values = []
    for i in range(samples):
        rng = sample_rng(seed, "page", params.n, params.k, i)
        angle = PAGE_ANGLES[i % len(PAGE_ANGLES)]
        z, angle = _page_point(params, rng, angle)
        basis = tangent_basis(page_manifold(params, angle), z)
        values.append(nondegeneracy(d_alpha, z, basis))
    return values


def page_transport_residuals(params: BrieskornParams, samples: int, seed: int) -> list[float]:
    """
    The R-action by pi/3 carries page tangent vectors to tangent vectors of
    the page theta = e^{i pi/3}; residual of the constraint differentials.
    """
    moved = r_action_map(params, PAGE_ANGLES[1])
    target = page_manifold(params, PAGE_ANGLES[1])
    values = []
    for i in range(samples):
        rng = sample_rng(seed, "page_transport", params.n, params.k, i)
        z, _ = _page_point(params, rng, 0.0)
        basis = tangent_basis(page_manifold(params, 0.0), z)
        image = np.asarray(moved(z))
        jac = target.jacobian(image)
        pushed = np.stack([np.asarray(moved.differential(z, b)) for b in basis])
        values.append(float(np.max(np.abs(jac @ pushed.T))))
    return values


def orientation_values(n: int, samples: int, seed: int, radii=ORIENTATION_RADII) -> list[float]:
    """
    sign(RHS) * LHS at points of S_c T*S^{n-1}, where
    LHS = (d lambda)^{n-1}(nu, b...) with nu = p d/dp and
    RHS = (lambda ^ (d lambda)^{n-2})(b...). Positive iff the orientations agree.
    """
    lam = lambda_can(n)
    d_lam = lam.derivative
    values = []
    for i in range(samples):
        radius = radii[i % len(radii)]
        rng = sample_rng(seed, "orientation", n, i)
        x = cotangent_at_radius(rng, n, radius).as_array()
        basis = tangent_basis(sphere_bundle(n, radius), x)
        liouville = np.concatenate([np.zeros(n), x[n:]])
        lhs = wedge_eval([d_lam] * (n - 1), x, liouville, *basis)
        rhs = wedge_eval([lam] + [d_lam] * (n - 2), x, *basis)
        values.append(math.copysign(1.0, rhs) * lhs if rhs != 0.0 else 0.0)
    return values


def binding_planarity_values(
    params: BrieskornParams, profile: TwistProfile, samples: int, seed: int,
    radii=ORIENTATION_RADII,
) -> list[float]:
    """Spread of z0 over C_k({t0} x S_c) for a random angle t0 and each c."""
    values = []
    groups = max(1, samples // PLANARITY_FIBER)
    for g in range(groups):
        rng = sample_rng(seed, "planarity", params.n, params.k, g)
        t0 = rng.uniform(0.0, 1.0)
        radius = radii[g % len(radii)]
        heads = []
        for _ in range(PLANARITY_FIBER):
            base = cotangent_at_radius(rng, params.n, radius)
            z = c_map(params, profile, TorusPoint(t0, base, TorusModel.TWIST))
            heads.append(complex(z.coords[0], z.coords[1]))
        heads = np.asarray(heads)
        values.append(float(np.max(np.abs(heads - heads[0]))))
    return values


def normal_basis_values(params: BrieskornParams, samples: int, seed: int) -> list[float]:
    """
    Residuals of the normal basis conditions at binding points: tangency
    to W, alpha(e) = 0, d alpha(e, w) = 0 for w tangent to B, and the
    normalization d alpha(e1, e2) = 1 (k != 1) or positivity (k = 1).
    """
    alpha = alpha_k(params)
    d_alpha = alpha.derivative
    w_mfd, b_mfd = w_manifold(params), binding_manifold(params)
    values = []
    for i in range(samples):
        z = np.asarray(sample_binding(params, seed, i).coords)
        e1, e2 = binding_normal_basis(params, z)
        jac = w_mfd.jacobian(z)
        residuals = [float(np.max(np.abs(jac @ np.stack([e1, e2]).T)))]
        residuals += [abs(float(alpha(z, e))) for e in (e1, e2)]
        for w in tangent_basis(b_mfd, z):
            residuals += [abs(float(d_alpha(z, e, w))) for e in (e1, e2)]
        pairing = float(d_alpha(z, e1, e2))
        if params.k == 1:
            logger.debug(f"k=1 normal basis: d alpha(e1, e2) = {pairing:.17g}")
            residuals.append(max(0.0, -pairing))
        else:
            residuals.append(abs(pairing - 1.0))
        values.append(max(residuals))
    return values


def verify_supporting(
    params: BrieskornParams,
    profile: TwistProfile,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: dict[str, float] | None = None,
) -> CheckReport:
    """
    Check that alpha_k is supported by the open book (B, theta) on W.

    Runs the binding contact check, page symplecticity, orientation
    agreement on S_c T*S^{n-1}, planarity of C_k({w0} x S_c) and the normal
    bundle bases. Failures are recorded in the report, never raised.
    """
    _check_cell(params, profile)
    tol = {}
    for name, default in SUPPORT_TOLERANCES.items():
        override = override_for(tolerances or {}, name)
        tol[name] = default if override is None else override
    report = CheckReport(params.n, params.k, seed)
    report.add(
        run_check(
            "book.binding_contact",
            tol["book.binding_contact"],
            lambda: binding_contact_values(params, samples, seed),
            MIN_BOUND,
        )
    )
    report.add(
        run_check(
            "book.page_symplectic",
            tol["book.page_symplectic"],
            lambda: page_symplectic_values(params, samples, seed),
            MIN_BOUND,
        )
    )
    report.add(
        run_check(
            "book.orientation",
            tol["book.orientation"],
            lambda: orientation_values(params.n, samples, seed),
            MIN_BOUND,
        )
    )
    report.add(
        run_check(
            "book.binding_planarity",
            tol["book.binding_planarity"],
            lambda: binding_planarity_values(params, profile, samples, seed),
        )
    )
    report.add(
        run_check(
            "book.normal_basis",
            tol["book.normal_basis"],
            lambda: normal_basis_values(params, samples, seed),
        )
    )
    logger.info(report.summary())
    return report
