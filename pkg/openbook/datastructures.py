"""Value types exchanged by the public API: cotangent, torus and ambient points."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DimensionMismatch, off_manifold

COTANGENT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CotangentPoint:
    """
    A point (q, p) of T*S^{n-1} inside R^n x R^n.

    Construction checks |q| = 1 and q.p = 0 to within 1e-10.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=np.float64).reshape(-1)
        p = np.array(self.p, dtype=np.float64).reshape(-1)
        if q.shape != p.shape:
            raise DimensionMismatch(q.size, p.size, "momentum length")
        residual = max(abs(np.linalg.norm(q) - 1.0), abs(float(q @ p)))
        if not residual <= COTANGENT_TOL:
            raise off_manifold(residual, COTANGENT_TOL, "cotangent point")
        q.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.p))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_array(cls, x) -> "CotangentPoint":
        x = np.asarray(x, dtype=np.float64)
        n = x.size // 2
        return cls(x[:n], x[n:])

    def __repr__(self):
        return f"<CotangentPoint n={self.n} |p|={self.radius:.6g}>"


class TorusModel(str, Enum):
    """Which quotient of R x T*S^{n-1} a torus point lives in."""

    M = "M"  # sigma_k: (t+1, (-1)^k q, (-1)^k p)
    TWIST = "twist"  # (t+1, tau_k(q, p))
    GLUED = "glued"  # phi_k: (t + h_k(|p|), tau_k(q, p))


@dataclass(frozen=True, eq=False)
class TorusPoint:
    """A representative (t; q, p) of a point in one of the mapping tori."""

    t: float
    base: CotangentPoint
    model: TorusModel = TorusModel.TWIST

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "model", TorusModel(self.model))

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.t], self.base.q, self.base.p])

    @classmethod
    def from_array(cls, x, model=TorusModel.TWIST) -> "TorusPoint":
        x = np.asarray(x, dtype=np.float64)
        return cls(float(x[0]), CotangentPoint.from_array(x[1:]), model)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "q": self.base.q.tolist(),
            "p": self.base.p.tolist(),
            "model": self.model.value,
        }

    def __repr__(self):
        return f"<TorusPoint model={self.model.value} t={self.t:.6g} |p|={self.base.radius:.6g}>"


@dataclass(frozen=True, eq=False)
class AmbientPoint:
    """
    A point of C^{n+1} stored as 2(n+1) interleaved reals (x0, y0, x1, y1, ...).
    """

    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64).reshape(-1)
        if coords.size % 2 or coords.size < 4:
            raise DimensionMismatch(2 * (coords.size // 2 + 1), coords.size, "ambient length")
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.size // 2 - 1

    @property
    def z(self) -> np.ndarray:
        return self.coords[0::2] + 1j * self.coords[1::2]

    @classmethod
    def from_complex(cls, z) -> "AmbientPoint":
        z = np.asarray(z, dtype=np.complex128)
        return cls(np.stack([z.real, z.imag], axis=1).reshape(-1))

    def __repr__(self):
        return f"<AmbientPoint n={self.n} z0={complex(self.z[0]):.6g}>"
