"""Bundled models, timing presets and the flat key=value config format."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from . import frontend
from .core import Config
from .propgen import SignalMap


class ConfigError(Exception):
    pass


BUNDLED_MODELS = {
    "ddr4": "ddr4.dramml",
    "ddr5-delta": "ddr5_delta.dramml",
}

BUNDLED_PRESETS = {
    "ddr4-16bank-example": "ddr4_16bank_example.cfg",
    "ddr4-8bank-example": "ddr4_8bank_example.cfg",
    "ddr5-delta-example": "ddr5_delta_example.cfg",
}

# preset names usable with each bundled model
MODEL_PRESETS = {
    "ddr4": ("ddr4-16bank-example", "ddr4-8bank-example"),
    "ddr5-delta": ("ddr5-delta-example",),
}


def _bundled_text(filename):
    return (resources.files("dramcheck.models") / filename).read_text(
        encoding="utf-8")


@dataclass(frozen=True)
class TimingPreset:
    name: str
    values: Mapping[str, int]
    provenance: Mapping[str, str]  # per-value note


@dataclass(frozen=True)
class ModelBundle:
    name: str
    source: str  # DRAMml text
    default_counts: Mapping[str, int]
    presets: tuple  # compatible preset names

    def spec(self):
        return frontend.parse(self.source)


def model_source(name_or_path) -> tuple:
    """(model name, DRAMml text) for a bundled name or a file path."""
    key = str(name_or_path)
    if key in BUNDLED_MODELS:
        return key, _bundled_text(BUNDLED_MODELS[key])
    path = Path(key)
    if not path.is_file():
        raise ConfigError(
            f"unknown model '{key}' (bundled: "
            f"{', '.join(sorted(BUNDLED_MODELS))}; or pass a .dramml path)")
    return path.stem, path.read_text(encoding="utf-8")


def load_model(name_or_path):
    """Parse a bundled model or a .dramml file into a NetSpec."""
    _, text = model_source(name_or_path)
    return frontend.parse(text)


def load_bundle(name) -> ModelBundle:
    if name not in BUNDLED_MODELS:
        raise ConfigError(f"unknown bundled model '{name}'")
    source = _bundled_text(BUNDLED_MODELS[name])
    presets = MODEL_PRESETS[name]
    counts = parse_config_text(
        _bundled_text(BUNDLED_PRESETS[presets[0]]), presets[0]).instance_counts
    return ModelBundle(name=name, source=source,
                       default_counts=counts, presets=presets)


# ---------------------------------------------------------------------------
# key=value config files


def _parse_kv(text, what):
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{what} line {lineno}: expected key=value, "
                              f"got {line!r}")
        key, _, value = line.partition("=")
        pairs[key.strip()] = value.strip()
    return pairs


def parse_config_text(text, source_name="<config>",
                      provenance="user-supplied") -> Config:
    pairs = _parse_kv(text, source_name)
    fmt = pairs.pop("format", "1")
    if fmt != "1":
        raise ConfigError(f"{source_name}: unsupported format={fmt}")
    standard = pairs.pop("standard", None)
    if standard is None:
        raise ConfigError(f"{source_name}: missing standard=")
    counts = {}
    timings = {}
    for key, value in pairs.items():
        try:
            num = int(value)
        except ValueError:
            raise ConfigError(
                f"{source_name}: value for {key} must be an integer")
        if num < 1:
            raise ConfigError(f"{source_name}: {key} must be >= 1")
        if key.startswith("t"):
            timings[key] = num
        else:
            counts[key] = num
    return Config(standard_name=standard, instance_counts=counts,
                  timing_values=timings)


def load_config(name_or_path) -> Config:
    key = str(name_or_path)
    if key in BUNDLED_PRESETS:
        return parse_config_text(
            _bundled_text(BUNDLED_PRESETS[key]), key,
            provenance="example value for testing")
    path = Path(key)
    if not path.is_file():
        raise ConfigError(
            f"unknown config '{key}' (bundled: "
            f"{', '.join(sorted(BUNDLED_PRESETS))}; or pass a .cfg path)")
    return parse_config_text(path.read_text(encoding="utf-8"), str(path))


def load_preset(name) -> TimingPreset:
    if name in BUNDLED_PRESETS:
        text = _bundled_text(BUNDLED_PRESETS[name])
        note = "example value for testing"
    else:
        path = Path(name)
        if not path.is_file():
            raise ConfigError(f"unknown preset '{name}'")
        text = path.read_text(encoding="utf-8")
        note = "user-supplied"
    cfg = parse_config_text(text, name)
    return TimingPreset(
        name=name, values=dict(cfg.timing_values),
        provenance={k: note for k in cfg.timing_values})


def load_signal_map(path) -> SignalMap:
    pairs = _parse_kv(Path(path).read_text(encoding="utf-8"), str(path))
    pairs.pop("format", None)
    coords = {}
    kwargs = {}
    for key, value in pairs.items():
        if key.startswith("coord."):
            coords[key[len("coord."):]] = value
        elif key in ("clock", "reset", "command", "module_name"):
            kwargs[key] = value
        else:
            raise ConfigError(f"{path}: unknown signal map key '{key}'")
    return SignalMap(coords=coords, **kwargs)
