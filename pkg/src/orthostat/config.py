"""Run configuration: bundled JSON defaults merged with command-line flags."""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from orthostat.errors import ConfigurationError, OrthostatError
from orthostat.montecarlo import MonteCarloConfig
from orthostat.recursion import NetworkConfig, parse_schedule

MODES = ("solve", "expand", "mc", "compare", "weingarten", "moments")
OUTPUT_FORMATS = ("csv",)
# Modes where --width is the matrix size n rather than the network width.
MATRIX_MODES = ("weingarten", "moments")

_CONF_DIR = Path(__file__).parent / "conf"
DEFAULT_CONFIG_PATH = _CONF_DIR / "orthostat_conf.json"
PRESETS_PATH = _CONF_DIR / "input_presets.json"


def _load_config(config_path: Union[str, Path, None] = None) -> dict[str, Any]:
    """
    Load configuration from JSON file.

    Args:
        config_path: Path to configuration file. If None, uses default.

    Returns:
        Configuration dictionary

    Raises:
        ConfigurationError: If the file is missing or not a JSON object.
    """
    config_path = DEFAULT_CONFIG_PATH if config_path is None else Path(config_path)
    if not config_path.exists():
        raise ConfigurationError(f"Configuration file not found: {config_path}")

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid JSON in {config_path}: {e}") from e
    if not isinstance(config, dict):
        raise ConfigurationError(f"Configuration must be a JSON object: {config_path}")

    config.pop("description", None)
    return config


def load_presets(path: Union[str, Path, None] = None) -> dict[str, np.ndarray]:
    """
    Named input vectors (x0..x3 in the bundled file).

    Raises:
        ConfigurationError: If the file is missing or a preset is not numeric.
    """
    raw = _load_config(PRESETS_PATH if path is None else path)
    presets: dict[str, np.ndarray] = {}
    for name, values in raw.items():
        try:
            vec = np.asarray(values, dtype=float)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Preset {name!r} is not numeric") from e
        if vec.ndim != 1 or vec.size == 0:
            raise ConfigurationError(f"Preset {name!r} must be a non-empty list")
        presets[name] = vec
    return presets


@dataclass(frozen=True)
class OutputConfig:
    """Where and how results are written."""

    out_dir: Path
    format: str = "csv"


@dataclass
class RunConfig:
    """Everything a subcommand needs."""

    mode: str
    network: NetworkConfig
    mc: MonteCarloConfig
    io: OutputConfig
    seed: int
    inputs: list[Union[str, list[float]]] = field(default_factory=lambda: ["x0"])
    sweep_cw: list[float] = field(default_factory=list)
    width: int | None = None

    @property
    def ensemble(self) -> str:
        return self.network.ensemble

    @property
    def matrix_size(self) -> int:
        """n for the weingarten and moments commands."""
        return self.width if self.width is not None else self.network.n

    def input_vectors(
        self, presets: dict[str, np.ndarray] | None = None
    ) -> list[tuple[str, np.ndarray]]:
        """
        Resolve ``inputs`` to (label, vector) pairs.

        Raises:
            ConfigurationError: On an unknown preset name.
        """
        presets = load_presets() if presets is None else presets
        out: list[tuple[str, np.ndarray]] = []
        for idx, item in enumerate(self.inputs):
            if isinstance(item, str):
                if item not in presets:
                    raise ConfigurationError(
                        f"Unknown preset {item!r}; available: {sorted(presets)}"
                    )
                out.append((item, presets[item]))
            else:
                out.append((f"input{idx}", np.asarray(item, dtype=float)))
        return out


def _section(config: dict[str, Any], key: str) -> dict[str, Any]:
    value = config.get(key, {})
    if not isinstance(value, dict):
        raise ConfigurationError(f"Config section {key!r} must be an object")
    return value


def _flag(args: argparse.Namespace, name: str) -> Any:
    return getattr(args, name, None)


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the JSON config (``--config`` or the bundled default) with flags.

    Flags win over JSON; ``--full-paper-scale`` replaces the ensemble sizes
    unless ``--n-net`` / ``--n-stats`` are also given.

    Raises:
        ConfigurationError: On missing or mistyped config values.
    """
    config = _load_config(_flag(args, "config"))
    net = _section(config, "network")
    mc = _section(config, "mc")
    io = _section(config, "io")

    try:
        mode = str(_flag(args, "command") or "solve")
        width = int(_pick(_flag(args, "width"), net.get("n")))
        if width < 1:
            raise ConfigurationError(f"Width must be positive, got {width}")
        ensemble = "gaussian" if _flag(args, "gaussian") else net.get("ensemble")
        network = NetworkConfig(
            n=int(net.get("n", width)) if mode in MATRIX_MODES else width,
            depth=int(_pick(_flag(args, "depth"), net.get("L"))),
            c_w=float(_pick(_flag(args, "cw"), net.get("c_w", 1.0))),
            lambda_b=parse_schedule(net.get("lambda_b", "1/ell")),
            lambda_w=parse_schedule(net.get("lambda_w", 1.0)),
            ensemble=str(ensemble or "orthogonal"),
        )

        n_net, n_stats = mc.get("n_net", 200), mc.get("n_stats", 5)
        if _flag(args, "full_scale"):
            full = _section(config, "full_scale")
            n_net, n_stats = full.get("n_net", 600), full.get("n_stats", 10)
        convention = _pick(
            _flag(args, "error_convention"), mc.get("error_convention", "networks")
        )
        mc_config = MonteCarloConfig(
            n_net=int(_pick(_flag(args, "n_net"), n_net)),
            n_stats=int(_pick(_flag(args, "n_stats"), n_stats)),
            error_convention=str(convention),
            exclude_diagonal=bool(
                _flag(args, "exclude_diagonal") or mc.get("exclude_diagonal", False)
            ),
            chunk_size=int(mc.get("chunk_size", 25)),
        )

        fmt = str(io.get("format", "csv"))
        if fmt not in OUTPUT_FORMATS:
            raise ConfigurationError(f"Unsupported output format {fmt!r}")
        output = OutputConfig(
            out_dir=Path(_pick(_flag(args, "out"), io.get("out_dir", "."))),
            format=fmt,
        )

        inputs = config.get("inputs", ["x0"])
        if _flag(args, "preset"):
            inputs = [args.preset]
        if not isinstance(inputs, list) or not inputs:
            raise ConfigurationError("Config 'inputs' must be a non-empty list")

        # bare --sweep-cw uses the configured C_W values
        sweep = _flag(args, "sweep_cw")
        if sweep == []:
            sweep = config.get("sweep_cw", [])
        return RunConfig(
            mode=mode,
            network=network,
            mc=mc_config,
            io=output,
            seed=int(_pick(_flag(args, "seed"), config.get("seed", 0))),
            inputs=inputs,
            sweep_cw=[float(v) for v in (sweep or [])],
            width=width,
        )
    except OrthostatError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid configuration value: {e}") from e


def _pick(flag_value: Any, config_value: Any) -> Any:
    if flag_value is not None:
        return flag_value
    if config_value is None:
        raise ConfigurationError("Required configuration value is missing")
    return config_value
