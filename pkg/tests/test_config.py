# tests/test_config.py
import json
import pytest
from model.config import DEFAULT_TOLERANCES, RunConfig
from util.enums import ErrorMessage
from util.errors import InputError


def test_defaults():
    config = RunConfig()
    assert config.tau.tau == 1j
    assert config.bands == 4
    assert config.grid == 128
    assert config.tolerances == DEFAULT_TOLERANCES
    assert config.tol("recurrence") == 1e-6
    assert "output_dir" not in config.inputs()


def test_file_then_overrides(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"bands": 3, "grid": 64, "tolerances": {"trace": 1e-4}}))
    config = RunConfig.load(str(path), {"grid": 32, "seed": None, "tolerances": {"kahler": 1e-3}})
    assert config.bands == 3
    assert config.grid == 32
    assert config.seed == 42
    assert config.tol("trace") == 1e-4
    assert config.tol("kahler") == 1e-3
    assert config.tol("wirtinger") == DEFAULT_TOLERANCES["wirtinger"]


@pytest.mark.parametrize(
    "overrides",
    [
        {"grid": 48},
        {"grid": 2},
        {"bands": 2},
        {"tau_im": 0.0},
        {"bands": 3, "level": 3},
        {"tolerances": {"nonsense": 1.0}},
        {"tolerances": {"trace": 0.0}},
        {"colour": "blue"},
    ],
)
def test_invalid_configs(overrides):
    with pytest.raises(InputError) as exc:
        RunConfig.load(None, overrides)
    assert exc.value.error is ErrorMessage.INVALID_CONFIG
    assert exc.value.exit_code == 3


def test_unreadable_config_files(tmp_path):
    with pytest.raises(InputError):
        RunConfig.load(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(InputError) as exc:
        RunConfig.load(str(broken))
    assert "line 1" in exc.value.detail
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    with pytest.raises(InputError):
        RunConfig.load(str(listing))
