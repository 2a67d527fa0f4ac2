import pytest

from openbook.exceptions import ConfigurationException
from openbook.params import (
    DEFAULT_K,
    DEFAULT_N,
    SEED_MASK,
    BrieskornParams,
    RunConfig,
    override_for,
    parse_tolerance,
)

KNOWN = ["cmap.pullback", "cmap.fibration", "phi.defect"]


def test_brieskorn_params_dimensions():
    params = BrieskornParams(3, 2)
    assert params.ambient_dim == 8
    assert params.manifold_dim == 5
    assert params.torus_dim == 7


@pytest.mark.parametrize("n, k", [(1, 2), (5, 1), (3, 0), (3, -2)])
def test_brieskorn_params_rejects(n, k):
    with pytest.raises(ConfigurationException):
        BrieskornParams(n, k)


def test_brieskorn_params_hashable():
    assert BrieskornParams(2, 3) == BrieskornParams(2, 3)
    assert len({BrieskornParams(2, 3), BrieskornParams(2, 3)}) == 1


def test_parse_tolerance():
    assert parse_tolerance("cmap.pullback=1e-7") == ("cmap.pullback", 1e-7)


@pytest.mark.parametrize("entry", ["cmap.pullback", "=1e-7", "cmap=abc", "cmap=-1", "cmap=nan"])
def test_parse_tolerance_rejects(entry):
    with pytest.raises(ConfigurationException):
        parse_tolerance(entry)


def test_run_config_defaults():
    config = RunConfig().validate(KNOWN)
    assert config.n_list == DEFAULT_N
    assert config.k_list == DEFAULT_K
    assert len(config.cells()) == 15
    assert config.selects("anything")


def test_run_config_rejects_large_n():
    with pytest.raises(ConfigurationException) as excinfo:
        RunConfig(n_list=(5,), k_list=(1,)).validate(KNOWN)
    assert "n" in excinfo.value.errors


def test_run_config_collects_all_errors():
    with pytest.raises(ConfigurationException) as excinfo:
        RunConfig(k_list=(0,), samples=0, format="xml").validate(KNOWN)
    assert set(excinfo.value.errors) == {"k", "samples", "format"}


def test_run_config_unknown_check():
    with pytest.raises(ConfigurationException, match="unknown checks"):
        RunConfig(checks=("nope",)).validate(KNOWN)
    with pytest.raises(ConfigurationException, match="unknown checks"):
        RunConfig(tol_overrides={"nope": 1.0}).validate(KNOWN)


def test_run_config_group_selection():
    config = RunConfig(checks=("cmap",)).validate(KNOWN)
    assert config.selects("cmap.pullback")
    assert not config.selects("phi.defect")
    assert not config.selects("cmapx.other")


def test_run_config_masks_seed():
    config = RunConfig(seed=-1).validate(KNOWN)
    assert config.seed == SEED_MASK


def test_cells_order():
    config = RunConfig(n_list=(2, 3), k_list=(1, 2))
    assert [(c.n, c.k) for c in config.cells()] == [(2, 1), (2, 2), (3, 1), (3, 2)]


def test_override_for_prefers_exact_then_longest_group():
    overrides = {"cmap": 1e-5, "cmap.pullback": 1e-4, "book": 1.0}
    assert override_for(overrides, "cmap.pullback") == 1e-4
    assert override_for(overrides, "cmap.kernel") == 1e-5
    assert override_for(overrides, "book.orientation") == 1.0
    assert override_for(overrides, "phi.defect") is None
    assert override_for({"cm": 1.0}, "cmap.kernel") is None
