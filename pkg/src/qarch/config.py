"""Experiment configuration and its flat ``key = value`` text format.

Lines are ``key = value``; ``#`` starts a comment. Booleans are
``true``/``false``, tuples are comma-separated. Unknown keys and values of
the wrong type are rejected with the offending key named.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError


@dataclass
class ExperimentConfig:
    name: str = "custom"
    # dataset: "classification" or "moons"
    dataset: str = "classification"
    n_samples: int = 400
    n_features: int = 4
    n_informative: int = 2
    class_sep: float = 1.0
    noise: float = 0.15
    data_seed: int = 1234
    test_fraction: float = 0.25
    # circuit and episode
    n_qubits: int = 4
    max_gates: int = 20
    y_target: float = 0.85
    adaptive: bool = False
    max_epochs: int = 15
    classifier_lr: float = 0.05
    init_angle: float = 0.0
    readout: int = 0
    episodes: int = 800
    test_interval: int = 10
    # agent; gamma = 0 means 0.005 ** (1 / max_gates)
    gamma: float = 0.0
    n_step: int = 3
    batch_size: int = 64
    buffer_capacity: int = 16384
    sync_every: int = 512
    warmup: int = 1000
    lr: float = 1e-4
    hidden: tuple = (128, 128)
    slope: float = 0.01
    dropout: float = 0.1
    eps_start: float = 1.0
    eps_end: float = 0.1
    eps_decay_steps: int = 10000
    # adaptive search
    adaptive_window: int = 12
    adaptive_successes: int = 10
    adaptive_test_streak: int = 5
    adaptive_step: float = 0.01
    adaptive_cap: float = 0.99
    epsilon_cut: float = 0.95
    # run control
    seed: int = 0
    seeds: tuple = (0, 1, 2, 3, 4)
    checkpoint_every: int = 100
    ma_train: int = 40
    ma_test: int = 4
    out_dir: str = ""

    def effective_gamma(self) -> float:
        return self.gamma if self.gamma > 0 else 0.005 ** (1.0 / self.max_gates)

    def output_root(self) -> Path:
        return Path(self.out_dir or os.environ.get("QARCH_OUT", "") or "runs")

    def validate(self) -> "ExperimentConfig":
        def bad(key, why):
            raise ConfigurationError(f"{key}: {why}")

        if self.dataset not in ("classification", "moons"):
            bad("dataset", f"must be 'classification' or 'moons', got {self.dataset!r}")
        features = self.n_features if self.dataset == "classification" else 2
        if self.n_qubits != features:
            bad("n_qubits", f"must equal the dataset feature count ({features})")
        if not 2 <= self.n_qubits <= 14:
            bad("n_qubits", "must be in [2, 14]")
        if not 1 <= self.n_informative <= self.n_features:
            bad("n_informative", "must be in [1, n_features]")
        if self.n_samples < 4 or self.n_samples % 2:
            bad("n_samples", "must be even and >= 4")
        if not 0 < self.test_fraction < 1:
            bad("test_fraction", "must be in (0, 1)")
        if not 0 < self.y_target < 1:
            bad("y_target", "must be in (0, 1)")
        for key in ("max_gates", "max_epochs", "episodes", "test_interval", "n_step",
                    "batch_size", "buffer_capacity", "sync_every", "adaptive_window",
                    "adaptive_successes", "adaptive_test_streak", "ma_train", "ma_test",
                    "checkpoint_every"):
            if getattr(self, key) < 1:
                bad(key, "must be >= 1")
        if not 0 <= self.readout < self.n_qubits:
            bad("readout", "must be a valid qubit index")
        if not 0 <= self.dropout < 1:
            bad("dropout", "must be in [0, 1)")
        if not 0 <= self.eps_end <= self.eps_start <= 1:
            bad("eps_start", "need 0 <= eps_end <= eps_start <= 1")
        if self.gamma < 0 or self.gamma > 1:
            bad("gamma", "must be in [0, 1] (0 = derived from max_gates)")
        if not self.hidden or any(h < 1 for h in self.hidden):
            bad("hidden", "must list positive layer widths")
        return self


def _field_types() -> dict:
    return {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(key: str, kind: str, text: str):
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low not in ("true", "false"):
                raise ValueError(text)
            return low == "true"
        if kind == "tuple":
            return tuple(int(v) for v in text.split(",") if v.strip())
        return text
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse {text!r} as {kind}") from None


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    types = _field_types()
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigurationError(f"{key}: unknown config key (line {lineno})")
        values[key] = _parse_value(key, types[key], value)
    return dataclasses.replace(base or ExperimentConfig(), **values)


def format_config(config: ExperimentConfig) -> str:
    lines = ["# qarch experiment config"]
    for f in fields(config):
        lines.append(f"{f.name} = {_format_value(getattr(config, f.name))}")
    return "\n".join(lines) + "\n"


def preset_names() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files("qarch.presets").iterdir()
                  if p.name.endswith(".cfg"))


def load_config(source: str) -> ExperimentConfig:
    """Load a config file path, or a preset by name."""
    path = Path(source)
    if path.is_file():
        return parse_config(path.read_text()).validate()
    if source in preset_names():
        text = resources.files("qarch.presets").joinpath(f"{source}.cfg").read_text()
        return parse_config(text).validate()
    raise ConfigurationError(f"config {source!r} is neither a file nor a preset "
                             f"(presets: {', '.join(preset_names())})")
