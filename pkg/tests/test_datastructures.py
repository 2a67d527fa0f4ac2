import numpy as np
import pytest

from openbook.datastructures import AmbientPoint, CotangentPoint, TorusModel, TorusPoint
from openbook.exceptions import ConstraintViolation, DimensionMismatch


def test_cotangent_point():
    pt = CotangentPoint([1.0, 0.0, 0.0], [0.0, 0.3, 0.4])
    assert pt.n == 3
    assert pt.radius == pytest.approx(0.5)
    assert np.array_equal(pt.as_array(), [1.0, 0.0, 0.0, 0.0, 0.3, 0.4])


def test_cotangent_point_is_read_only():
    pt = CotangentPoint([1.0, 0.0], [0.0, 0.2])
    with pytest.raises(ValueError):
        pt.q[0] = 2.0


@pytest.mark.parametrize(
    "q, p",
    [([1.1, 0.0], [0.0, 0.1]), ([1.0, 0.0], [0.1, 0.1])],
)
def test_cotangent_point_off_bundle(q, p):
    with pytest.raises(ConstraintViolation):
        CotangentPoint(q, p)


def test_cotangent_point_length_mismatch():
    with pytest.raises(DimensionMismatch):
        CotangentPoint([1.0, 0.0], [0.0, 0.1, 0.0])


def test_torus_point_to_dict():
    pt = TorusPoint(0.25, CotangentPoint([0.0, 1.0], [0.5, 0.0]), TorusModel.M)
    assert pt.to_dict() == {"t": 0.25, "q": [0.0, 1.0], "p": [0.5, 0.0], "model": "M"}


def test_torus_point_model_from_string():
    pt = TorusPoint(0.0, CotangentPoint([1.0, 0.0], [0.0, 0.0]), "glued")
    assert pt.model is TorusModel.GLUED
    assert pt.to_dict()["model"] == "glued"


def test_ambient_point_complex_view():
    z = np.array([0.5 + 0.5j, 1.0 - 1.0j, 0.25j])
    pt = AmbientPoint.from_complex(z)
    assert pt.n == 2
    assert np.allclose(pt.coords, [0.5, 0.5, 1.0, -1.0, 0.0, 0.25])
    assert np.allclose(pt.z, z)


def test_ambient_point_rejects_odd_length():
    with pytest.raises(DimensionMismatch):
        AmbientPoint([1.0, 2.0, 3.0, 4.0, 5.0])
