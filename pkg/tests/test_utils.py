import json

import jax
import jax.numpy as jnp
import numpy as np
import pytest

from openbook.exceptions import DimensionMismatch
from openbook.utils import (
    as_array,
    concrete_value,
    format_float,
    json_dumps,
    safe_norm,
)


def test_json_roundtrip():
    data = {"name": "cmap.pullback", "samples": 200, "pass": True}
    assert json.loads(json_dumps(data)) == data


def test_json_dumps_compact_is_single_line():
    assert "\n" not in json_dumps({"a": [1, 2, 3]}, indent=False)


def test_concrete_value():
    assert concrete_value(1.5) == 1.5
    seen = []

    def traced(x):
        seen.append(concrete_value(x))
        return x

    jax.jit(traced)(jnp.asarray(1.0))
    assert seen == [None]


def test_as_array_checks_length():
    assert as_array([1, 2, 3], 3).dtype == jnp.float64
    with pytest.raises(DimensionMismatch):
        as_array([1, 2, 3], 4)


def test_safe_norm_gradient_at_origin_is_finite():
    grad = jax.grad(lambda v: safe_norm(v))(jnp.zeros(3))
    assert np.all(np.isfinite(np.asarray(grad)))
    assert float(safe_norm(jnp.asarray([3.0, 4.0]))) == 5.0


@pytest.mark.parametrize(
    "value, text",
    [(0.0, "0"), (-0.0, "0"), (1.0, "1"), (0.1, "0.10000000000000001")],
)
def test_format_float(value, text):
    assert format_float(value) == text
