import pytest

from openbook.exceptions import (
    ConfigurationException,
    ConstraintViolation,
    DimensionMismatch,
    DimensionTooLarge,
    ModelMismatch,
    NotOrthogonalError,
    OnBindingError,
    OpenBookException,
    OutOfRangeError,
    PageDomainError,
    RankDeficiency,
    SingularOrbitError,
    TemplateException,
    off_manifold,
    out_of_range,
)


def test_openbook_exception():
    exc = OpenBookException("Test error")
    assert str(exc) == "Test error"
    assert exc.message == "Test error"
    assert exc.code == "error"


def test_dimension_mismatch():
    exc = DimensionMismatch(7, 5, "vector length")
    assert exc.expected == 7
    assert exc.actual == 5
    assert str(exc) == "vector length mismatch: expected 7, got 5"


def test_dimension_too_large_default_limit():
    exc = DimensionTooLarge(9)
    assert exc.limit == 7
    assert "9" in exc.message


def test_out_of_range_names_target():
    exc = out_of_range(0.5, 0.0, 0.3183)
    assert isinstance(exc, OutOfRangeError)
    assert exc.target == 0.5
    assert "0.5" in exc.message
    assert exc.code == "out_of_range"


def test_off_manifold():
    exc = off_manifold(1e-3, 1e-9, "W point")
    assert isinstance(exc, ConstraintViolation)
    assert exc.residual == 1e-3
    assert exc.message.startswith("W point violates constraints")


def test_singular_orbit_has_its_own_code():
    assert SingularOrbitError(1.0).code != OnBindingError(0.0).code


@pytest.mark.parametrize(
    "exc",
    [
        DimensionMismatch(1, 2),
        DimensionTooLarge(8),
        OutOfRangeError(1.0, 0.0, 0.5),
        ConstraintViolation(1.0, 1e-9),
        RankDeficiency(2, 3),
        OnBindingError(0.0),
        SingularOrbitError(1.2),
        PageDomainError(1.0),
        NotOrthogonalError(0.1),
        ModelMismatch("twist", "glued"),
        TemplateException("boom", "report.txt.j2"),
        ConfigurationException("bad n", {"n": "too big"}),
    ],
)
def test_every_exception_is_an_openbook_exception(exc):
    assert isinstance(exc, OpenBookException)
    assert exc.code and exc.code.islower()


def test_codes_are_unique():
    classes = [
        DimensionMismatch,
        DimensionTooLarge,
        OutOfRangeError,
        ConstraintViolation,
        RankDeficiency,
        OnBindingError,
        SingularOrbitError,
        PageDomainError,
        NotOrthogonalError,
        ModelMismatch,
        TemplateException,
        ConfigurationException,
    ]
    codes = [cls.code for cls in classes]
    assert len(set(codes)) == len(codes)


def test_configuration_exception_errors():
    exc = ConfigurationException("invalid")
    assert exc.errors == {}
    exc = ConfigurationException("invalid", {"samples": "must be >= 1"})
    assert exc.errors["samples"] == "must be >= 1"
