"""Tests for run configuration loading and flag merging."""

import json
from pathlib import Path

import numpy as np
import pytest

from orthostat.cli import build_arg_parser
from orthostat.config import (
    DEFAULT_CONFIG_PATH,
    RunConfig,
    _load_config,
    build_run_config,
    load_presets,
)
from orthostat.errors import ConfigurationError


def _config(argv: list[str]) -> RunConfig:
    return build_run_config(build_arg_parser().parse_args(argv))


def _write_config(tmp_path: Path, **overrides: object) -> Path:
    config = json.loads(DEFAULT_CONFIG_PATH.read_text(encoding="utf-8"))
    config.update(overrides)
    path = tmp_path / "conf.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


def test_bundled_defaults() -> None:
    """The bundled config describes the critical x0 run."""
    config = _config(["mc"])
    assert config.mode == "mc"
    assert config.network.n == 50
    assert config.network.depth == 10
    assert config.network.is_critical_default
    assert (config.mc.n_net, config.mc.n_stats) == (200, 5)
    assert config.mc.error_convention == "networks"
    assert config.seed == 12345
    assert config.inputs == ["x0"]
    assert config.io.format == "csv"
    assert config.sweep_cw == []


def test_description_is_dropped() -> None:
    """The description key is documentation only."""
    assert "description" not in _load_config()


def test_flags_win() -> None:
    """Command-line flags override the JSON values."""
    config = _config(
        ["mc", "--cw", "2", "--depth", "4", "--seed", "9", "--gaussian", "--out", "x"]
    )
    assert config.network.c_w == 2.0
    assert config.network.depth == 4
    assert config.seed == 9
    assert config.ensemble == "gaussian"
    assert config.io.out_dir == Path("x")


def test_matrix_size_is_separate_from_width() -> None:
    """--n for weingarten/moments does not pass through the network width check."""
    config = _config(["weingarten", "--n", "2"])
    assert config.matrix_size == 2
    assert config.network.n == 50
    assert _config(["solve", "--n", "7"]).matrix_size == 7


def test_full_scale_flag() -> None:
    """--full-paper-scale uses 600 x 10 unless sizes are given explicitly."""
    config = _config(["mc", "--full-paper-scale"])
    assert (config.mc.n_net, config.mc.n_stats) == (600, 10)
    config = _config(["mc", "--full-paper-scale", "--n-net", "7"])
    assert (config.mc.n_net, config.mc.n_stats) == (7, 10)


def test_sweep_values() -> None:
    """A bare --sweep-cw takes the configured values."""
    assert _config(["mc", "--sweep-cw"]).sweep_cw == [0.5, 1.0, 4.0]
    assert _config(["mc", "--sweep-cw", "2"]).sweep_cw == [2.0]


def test_preset_flag() -> None:
    """--preset replaces the configured inputs."""
    config = _config(["solve", "--preset", "x2"])
    ((label, vector),) = config.input_vectors()
    assert label == "x2"
    assert vector.shape == (50,)


def test_presets_bundled() -> None:
    """Four 50-dimensional presets ship with the package."""
    presets = load_presets()
    assert sorted(presets) == ["x0", "x1", "x2", "x3"]
    assert all(v.shape == (50,) for v in presets.values())
    assert float(presets["x0"] @ presets["x0"]) / 50 == pytest.approx(
        0.238565, rel=1e-4
    )


def test_literal_inputs(tmp_path: Path) -> None:
    """Inputs may be literal vectors."""
    path = _write_config(tmp_path, inputs=[[1.0, 2.0, 3.0]])
    config = _config(["solve", "--config", str(path)])
    ((label, vector),) = config.input_vectors()
    assert label == "input0"
    np.testing.assert_array_equal(vector, [1.0, 2.0, 3.0])


def test_unknown_preset(tmp_path: Path) -> None:
    """An unknown preset name is a configuration error."""
    path = _write_config(tmp_path, inputs=["x7"])
    with pytest.raises(ConfigurationError):
        _config(["solve", "--config", str(path)]).input_vectors()


@pytest.mark.parametrize(
    "overrides",
    [
        {"io": {"out_dir": "out", "format": "parquet"}},
        {"network": "wide"},
        {"inputs": []},
        {"network": {"n": 50, "L": 10, "lambda_b": "sometimes"}},
        {"mc": {"n_net": "many"}},
    ],
)
def test_invalid_values(tmp_path: Path, overrides: dict) -> None:
    """Malformed sections and values raise ConfigurationError."""
    path = _write_config(tmp_path, **overrides)
    with pytest.raises(ConfigurationError):
        _config(["solve", "--config", str(path)])


def test_invalid_json(tmp_path: Path) -> None:
    """Files that are not a JSON object are rejected."""
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        _load_config(bad)
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        _load_config(listed)
