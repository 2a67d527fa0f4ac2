import sys
from typing import Any

import jax
import jax.numpy as jnp
import numpy as np

try:
    if sys.implementation.name == "pypy":
        import json as json_lib
    else:
        import orjson as json_lib
except ImportError:
    import json as json_lib


def json_dumps(obj: Any, indent: bool = True) -> str:
    if json_lib.__name__ == "orjson":
        option = json_lib.OPT_INDENT_2 if indent else 0
        return json_lib.dumps(obj, option=option).decode("utf-8")
    return json_lib.dumps(obj, indent=2 if indent else None)


def concrete_value(x) -> np.ndarray | None:
    """The value of `x` as a float array, or None while `x` is being traced."""
    try:
        return np.asarray(x, dtype=np.float64)
    except (jax.errors.TracerArrayConversionError, jax.errors.ConcretizationTypeError):
        return None


def as_array(x, dim: int | None = None) -> jax.Array:
    from .exceptions import DimensionMismatch

    arr = jnp.asarray(x, dtype=jnp.float64)
    if dim is not None and arr.shape != (dim,):
        actual = arr.shape[0] if arr.ndim == 1 else arr.size
        raise DimensionMismatch(dim, actual)
    return arr


def safe_norm(v, axis=-1):
    """Euclidean norm whose derivative at the origin is zero instead of NaN."""
    sq = jnp.sum(v * v, axis=axis)
    positive = sq > 0
    return jnp.where(positive, jnp.sqrt(jnp.where(positive, sq, 1.0)), 0.0)


def format_float(value: float) -> str:
    # Adding 0.0 turns -0.0 into 0.0.
    return format(float(value) + 0.0, ".17g")
