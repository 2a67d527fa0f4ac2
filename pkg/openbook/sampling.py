"""
Seeded sampling of points, frames and tangent directions.

Every random stream is derived from (seed, *keys) through a numpy
SeedSequence, so a sample depends only on its own label and index and
results do not depend on evaluation order.
"""

import zlib

import numpy as np

from .datastructures import CotangentPoint
from .params import SEED_MASK
from .profile import TwistProfile

PAGE_MAX_RADIUS = 0.99


def _entropy(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key) & SEED_MASK


def sample_rng(seed: int, *keys) -> np.random.Generator:
    """A generator for the stream labelled `keys` under `seed`."""
    entropy = [int(seed) & SEED_MASK, *(_entropy(key) for key in keys)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        v = rng.standard_normal(n)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return v / norm


def random_orthonormal_pair(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt on two Gaussian vectors."""
    u = random_unit(rng, n)
    while True:
        w = rng.standard_normal(n)
        w -= (w @ u) * u
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            return u, w / norm


def random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed element of SO(n)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def stratified_radius(profile: TwistProfile, index: int, count: int, rng) -> float:
    """
    |p| for sample `index` of `count`.

    The first quarter lies in [0, 1/c_k], the middle half in the transition
    [1/c_k, 2/c_k], the last quarter in [2/c_k, 4/c_k].
    """
    lo, hi = profile.transition
    fraction = index / max(count, 1)
    if fraction < 0.25:
        return float(rng.uniform(0.0, lo))
    if fraction < 0.75:
        return float(rng.uniform(lo, hi))
    return float(rng.uniform(hi, 2.0 * hi))


def cotangent_at_radius(rng: np.random.Generator, n: int, radius: float) -> CotangentPoint:
    q, direction = random_orthonormal_pair(rng, n)
    return CotangentPoint(q, radius * direction)


def random_cotangent(
    profile: TwistProfile, n: int, seed: int, label: str, index: int, count: int
) -> CotangentPoint:
    rng = sample_rng(seed, label, index)
    return cotangent_at_radius(rng, n, stratified_radius(profile, index, count, rng))


def random_torus_coords(
    profile: TwistProfile, n: int, seed: int, label: str, index: int, count: int
) -> np.ndarray:
    """(t, q, p) with t uniform in [0, 1) and stratified |p|."""
    rng = sample_rng(seed, label, index)
    t = rng.uniform(0.0, 1.0)
    base = cotangent_at_radius(rng, n, stratified_radius(profile, index, count, rng))
    return np.concatenate([[t], base.as_array()])


def random_page_coords(
    n: int, seed: int, label: str, index: int, max_radius: float = PAGE_MAX_RADIUS
) -> np.ndarray:
    """(t, q, p) with t uniform in [0, 1) and |p| uniform in [0, max_radius]."""
    rng = sample_rng(seed, label, index)
    t = rng.uniform(0.0, 1.0)
    base = cotangent_at_radius(rng, n, rng.uniform(0.0, max_radius))
    return np.concatenate([[t], base.as_array()])


def tangent_directions(rng: np.random.Generator, basis: np.ndarray, count: int) -> np.ndarray:
    """`count` unit vectors spanned by the rows of `basis`."""
    weights = rng.standard_normal((count, basis.shape[0]))
    directions = weights @ basis
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)
