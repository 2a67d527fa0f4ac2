"""
Differential-geometry engine.

Smooth maps carry exact first derivatives through forward-mode
differentiation (`jax.jvp`). Differential forms are evaluators
`(x, v1, ..., vl) -> real` that stay traceable, so pullbacks and exterior
derivatives compose: the exterior derivative of a pulled-back form is
computed from the same code path as any other form.

Sign conventions: lambda = sum p_i dq_i and d lambda = sum dp_i ^ dq_i,
wedge products of 1-forms evaluate to determinants.
"""

import itertools
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import cached_property

import jax
import jax.numpy as jnp
import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatch,
    DimensionTooLarge,
    RankDeficiency,
    off_manifold,
)
from .utils import as_array

MAX_WEDGE_DEGREE = 7
RANK_RTOL = 1e-10


class SmoothMap:
    """
    A smooth map R^m -> R^k with exact directional derivatives.

    Args:
        fn: Traceable function from an (m,) array to a (k,) array.
        domain_dim: m.
        codomain_dim: k.
        name: Label used in reports and error messages.
    """

    def __init__(
        self,
        fn: Callable,
        domain_dim: int,
        codomain_dim: int,
        name: str | None = None,
    ):
        self.fn = fn
        self.domain_dim = domain_dim
        self.codomain_dim = codomain_dim
        self.name = name or getattr(fn, "__name__", "map")
        self._value = jax.jit(fn)
        self._push = jax.jit(lambda x, v: jax.jvp(fn, (x,), (v,)))
        self._jacobian = jax.jit(jax.jacfwd(fn))

    def __call__(self, x) -> jax.Array:
        return self._value(as_array(x, self.domain_dim))

    def push(self, x, v) -> tuple[jax.Array, jax.Array]:
        """The image point and the pushed-forward vector."""
        return self._push(as_array(x, self.domain_dim), as_array(v, self.domain_dim))

    def differential(self, x, v) -> jax.Array:
        return self.push(x, v)[1]

    def jacobian(self, x) -> jax.Array:
        return self._jacobian(as_array(x, self.domain_dim))

    def compose(self, inner: "SmoothMap") -> "SmoothMap":
        """self after inner."""
        if inner.codomain_dim != self.domain_dim:
            raise DimensionMismatch(self.domain_dim, inner.codomain_dim, "composition")
        outer_fn, inner_fn = self.fn, inner.fn
        return SmoothMap(
            lambda x: outer_fn(inner_fn(x)),
            inner.domain_dim,
            self.codomain_dim,
            f"{self.name}.{inner.name}",
        )

    __matmul__ = compose

    def __repr__(self):
        return f"<SmoothMap {self.name}: R^{self.domain_dim} -> R^{self.codomain_dim}>"


def differential(smooth_map: SmoothMap, point, direction) -> jax.Array:
    """Exact directional derivative of `smooth_map` at `point`."""
    return smooth_map.differential(point, direction)


def fd_differential(smooth_map: SmoothMap, point, direction, step: float | None = None):
    """Central finite-difference oracle with step 1e-6 * max(1, |point|)."""
    x = np.asarray(as_array(point, smooth_map.domain_dim))
    v = np.asarray(as_array(direction, smooth_map.domain_dim))
    if step is None:
        step = 1e-6 * max(1.0, float(np.linalg.norm(x)))
    forward = np.asarray(smooth_map(x + step * v))
    backward = np.asarray(smooth_map(x - step * v))
    return (forward - backward) / (2.0 * step)


def fd_relative_error(smooth_map: SmoothMap, point, direction) -> float:
    """|AD - FD| / max(1, |AD|) for one direction."""
    exact = np.asarray(differential(smooth_map, point, direction))
    approx = fd_differential(smooth_map, point, direction)
    return float(np.linalg.norm(exact - approx) / max(1.0, np.linalg.norm(exact)))


@dataclass(frozen=True, eq=False)
class DifferentialForm:
    """
    A degree-l form on R^dim given by a traceable evaluator.

    Attributes:
        degree: l.
        dim: Ambient dimension.
        evaluator: `(x, v1, ..., vl) -> real`, multilinear and alternating
            in the vectors.
        name: Label.
        coefficients: For 1-forms built from coordinates, `x -> (dim,)`.
    """

    degree: int
    dim: int
    evaluator: Callable
    name: str = "form"
    coefficients: Callable | None = None

    @classmethod
    def from_coefficients(cls, coefficients: Callable, dim: int, name: str = "form"):
        return cls(1, dim, lambda x, v: jnp.dot(coefficients(x), v), name, coefficients)

    @cached_property
    def _compiled(self):
        return jax.jit(self.evaluator)

    def __call__(self, point, *vectors) -> jax.Array:
        if len(vectors) != self.degree:
            raise DimensionMismatch(self.degree, len(vectors), f"{self.name} arguments")
        x = as_array(point, self.dim)
        return self._compiled(x, *(as_array(v, self.dim) for v in vectors))

    @cached_property
    def derivative(self) -> "DifferentialForm":
        return exterior_derivative(self)

    def pullback(self, smooth_map: SmoothMap) -> "DifferentialForm":
        return pullback_form(smooth_map, self)

    def scaled(self, factor: float | Callable) -> "DifferentialForm":
        """factor * form; `factor` is a constant or a function of the point."""
        weight = factor if callable(factor) else (lambda x: factor)
        evaluator = self.evaluator
        return DifferentialForm(
            self.degree,
            self.dim,
            lambda x, *vs: weight(x) * evaluator(x, *vs),
            f"{self.name}*",
        )

    def _combine(self, other: "DifferentialForm", sign: float) -> "DifferentialForm":
        if other.degree != self.degree or other.dim != self.dim:
            raise DimensionMismatch(self.degree, other.degree, "form degree")
        left, right = self.evaluator, other.evaluator
        op = "+" if sign > 0 else "-"
        return DifferentialForm(
            self.degree,
            self.dim,
            lambda x, *vs: left(x, *vs) + sign * right(x, *vs),
            f"({self.name}{op}{other.name})",
        )

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return self.scaled(-1.0)

    def __repr__(self):
        return f"<DifferentialForm {self.name} degree={self.degree} dim={self.dim}>"


def pullback_form(smooth_map: SmoothMap, form: DifferentialForm) -> DifferentialForm:
    if form.dim != smooth_map.codomain_dim:
        raise DimensionMismatch(smooth_map.codomain_dim, form.dim, "pullback")
    fn, evaluator = smooth_map.fn, form.evaluator

    def pulled(x, *vectors):
        pairs = [jax.jvp(fn, (x,), (v,)) for v in vectors]
        y = pairs[0][0] if pairs else fn(x)
        return evaluator(y, *(w for _, w in pairs))

    return DifferentialForm(
        form.degree, smooth_map.domain_dim, pulled, f"{smooth_map.name}*{form.name}"
    )


def pullback(smooth_map: SmoothMap, form: DifferentialForm, point, *vectors) -> jax.Array:
    """The form evaluated at map(point) on the pushed-forward vectors."""
    if form.dim != smooth_map.codomain_dim:
        raise DimensionMismatch(smooth_map.codomain_dim, form.dim, "pullback")
    if len(vectors) != form.degree:
        raise DimensionMismatch(form.degree, len(vectors), f"{form.name} arguments")
    x = as_array(point, smooth_map.domain_dim)
    image = smooth_map(x)
    pushed = [smooth_map.differential(x, v) for v in vectors]
    return form(image, *pushed)


def exterior_derivative(form: DifferentialForm) -> DifferentialForm:
    """
    d of a form, evaluated on constant vector fields:

        d w(X0, ..., Xl) = sum_i (-1)^i D_{Xi} w(X0, ..., ^Xi, ..., Xl)
    """
    evaluator = form.evaluator

    def derived(x, *vectors):
        total = jnp.zeros((), dtype=jnp.float64)
        for i, v in enumerate(vectors):
            rest = vectors[:i] + vectors[i + 1 :]
            _, slope = jax.jvp(lambda y, rest=rest: evaluator(y, *rest), (x,), (v,))
            total = total + (-1) ** i * slope
        return total

    return DifferentialForm(form.degree + 1, form.dim, derived, f"d{form.name}")


def _shuffles(indices: tuple[int, ...], sizes: Sequence[int]):
    if not sizes:
        yield ()
        return
    head, rest = sizes[0], sizes[1:]
    for block in itertools.combinations(indices, head):
        remaining = tuple(i for i in indices if i not in block)
        for tail in _shuffles(remaining, rest):
            yield (block, *tail)


def _parity(order: Sequence[int]) -> int:
    inversions = sum(
        1 for a in range(len(order)) for b in range(a + 1, len(order)) if order[a] > order[b]
    )
    return -1 if inversions % 2 else 1


def wedge_eval(forms: Sequence[DifferentialForm], point, *vectors) -> float:
    """
    Evaluate w1 ^ ... ^ wm on vectors by the shuffle sum.

    Each (p1, ..., pm)-shuffle contributes once with its sign, so a wedge
    of 1-forms is the determinant of their values.

    Raises:
        DimensionMismatch: If the degrees do not add up to the vector count.
        DimensionTooLarge: If the total degree exceeds 7.
    """
    sizes = [form.degree for form in forms]
    total_degree = sum(sizes)
    if total_degree != len(vectors):
        raise DimensionMismatch(total_degree, len(vectors), "wedge degree")
    if total_degree > MAX_WEDGE_DEGREE:
        raise DimensionTooLarge(total_degree, MAX_WEDGE_DEGREE)

    # keyed by form identity: repeated factors share evaluations
    cache: dict[tuple[int, tuple[int, ...]], float] = {}

    def value(slot: int, block: tuple[int, ...]) -> float:
        key = (id(forms[slot]), block)
        if key not in cache:
            cache[key] = float(forms[slot](point, *(vectors[i] for i in block)))
        return cache[key]

    total = 0.0
    for blocks in _shuffles(tuple(range(total_degree)), sizes):
        order = [i for block in blocks for i in block]
        term = float(_parity(order))
        for slot, block in enumerate(blocks):
            term *= value(slot, block)
            if term == 0.0:
                break
        total += term
    return total


def skew_gram(form: DifferentialForm, point, basis) -> np.ndarray:
    """The matrix form(b_i, b_j) of a 2-form on a basis."""
    basis = list(basis)
    size = len(basis)
    gram = np.zeros((size, size))
    for i in range(size):
        for j in range(i + 1, size):
            gram[i, j] = float(form(point, basis[i], basis[j]))
            gram[j, i] = -gram[i, j]
    return gram


def nondegeneracy(form: DifferentialForm, point, basis) -> float:
    """Determinant of the skew Gram matrix; positive iff nondegenerate."""
    return float(np.linalg.det(skew_gram(form, point, basis)))


@dataclass(frozen=True, eq=False)
class ConstraintManifold:
    """
    The common zero set of smooth constraints in R^ambient_dim.

    Attributes:
        ambient_dim: Dimension of the ambient space.
        constraints: Scalar traceable functions, in a fixed order that also
            fixes the orientation of tangent bases.
        name: Label.
        tolerance: Largest accepted constraint residual.
    """

    ambient_dim: int
    constraints: tuple[Callable, ...]
    name: str = "manifold"
    tolerance: float = 1e-9

    @property
    def dim(self) -> int:
        return self.ambient_dim - len(self.constraints)

    def _stacked(self, x):
        return jnp.stack([c(x) for c in self.constraints])

    @cached_property
    def _residual(self):
        return jax.jit(self._stacked)

    @cached_property
    def _jacobian(self):
        return jax.jit(jax.jacfwd(self._stacked))

    def residual(self, x) -> np.ndarray:
        return np.asarray(self._residual(as_array(x, self.ambient_dim)))

    def max_residual(self, x) -> float:
        return float(np.max(np.abs(self.residual(x))))

    def check(self, x):
        residual = self.max_residual(x)
        if not residual <= self.tolerance:
            raise off_manifold(residual, self.tolerance, f"{self.name} point")

    def jacobian(self, x) -> np.ndarray:
        return np.asarray(self._jacobian(as_array(x, self.ambient_dim)))

    def __repr__(self):
        return f"<ConstraintManifold {self.name} dim={self.dim} in R^{self.ambient_dim}>"


def tangent_basis(mfd: ConstraintManifold, point) -> np.ndarray:
    """
    Orthonormal basis of the tangent space at `point`, one vector per row.

    Computed from a column-pivoted QR factorization of the transposed
    constraint Jacobian, then oriented so that (grad c_1, ..., grad c_m,
    e_1, ..., e_d) is a positive frame.

    Raises:
        ConstraintViolation: If the point is off the manifold.
        RankDeficiency: If the constraint differentials are dependent.
    """
    mfd.check(point)
    jac = mfd.jacobian(point)
    m = jac.shape[0]
    q, r, _ = scipy.linalg.qr(jac.T, pivoting=True)
    diag = np.abs(np.diag(r))
    scale = diag[0] if diag.size else 0.0
    rank = int(np.sum(diag > RANK_RTOL * max(scale, 1.0)))
    if rank < m:
        raise RankDeficiency(rank, m)
    basis = q[:, m:].copy()
    if basis.shape[1] and np.linalg.det(np.column_stack([jac.T, basis])) < 0:
        basis[:, -1] = -basis[:, -1]
    return basis.T


def contact_volume(alpha: DifferentialForm, mfd: ConstraintManifold, point) -> float:
    """
    alpha ^ (d alpha)^l on the oriented tangent basis of a (2l+1)-manifold.

    For l = 0 the signed value alpha(e) on the single basis vector.

    Raises:
        DimensionMismatch: If the manifold is even-dimensional.
    """
    if mfd.dim % 2 == 0:
        raise DimensionMismatch(mfd.dim + 1, mfd.dim, "odd manifold dimension")
    basis = tangent_basis(mfd, point)
    half = (mfd.dim - 1) // 2
    if half == 0:
        return float(alpha(point, basis[0]))
    return wedge_eval([alpha] + [alpha.derivative] * half, point, *basis)

