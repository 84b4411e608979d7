"""Run configuration: TOML file values merged with command-line flags."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .limitgroup import DEFAULT_MULT_CAP, DEFAULT_STAGE_CAP

SUBCOMMANDS = ("certify", "traces", "initial-hom", "tree", "lab", "approx")
FORMATS = ("human", "structured")

# section -> {file key: RunConfig field}
SCHEMA: dict[str, dict[str, str]] = {
    "": {"subcommand": "subcommand", "format": "format", "out": "out"},
    "caps": {"stage": "stage_cap", "multiplier": "mult_cap", "retries": "retries"},
    "sequence": {"prefix": "prefix", "period": "period", "rule": "rule", "rule_period": "rule_period"},
    "traces": {"stages": "trace_stages", "element": "element", "element_stage": "element_stage"},
    "initial": {"pairs": "pairs", "stages": "stages", "verify": "verify"},
    "target": {"dim": "dim", "base": "base", "unit": "unit"},
    "tree": {"weights": "weights", "levels": "levels", "period": "tree_period", "depth": "depth", "export_dot": "export_dot"},
    "lab": {"example": "example", "n": "lab_n", "bound": "bound", "m": "m", "degree": "lab_degree"},
    "approx": {"target": "target", "interval": "interval", "eps": "eps", "degree": "degree"},
}


class ConfigError(ValueError):
    """Invalid configuration (unknown key, bad value)."""


@dataclass
class RunConfig:
    subcommand: str = ""
    format: str = "human"
    out: Optional[str] = None
    stage_cap: int = DEFAULT_STAGE_CAP
    mult_cap: int = DEFAULT_MULT_CAP
    retries: int = 32
    prefix: list = field(default_factory=list)
    period: Optional[list] = None
    rule: Optional[str] = None
    rule_period: int = 1
    trace_stages: int = 10
    element: Optional[str] = None
    element_stage: int = 0
    pairs: list = field(default_factory=list)
    stages: Optional[int] = None
    verify: bool = False
    dim: int = 1
    base: int = 2
    unit: Optional[list] = None
    weights: Optional[list] = None
    levels: Optional[list] = None
    tree_period: Optional[list] = None
    depth: int = 2
    export_dot: bool = False
    example: str = "monomials"
    lab_n: int = 6
    bound: int = 20
    m: int = 2
    lab_degree: int = 6
    target: str = "1/2"
    interval: list = field(default_factory=lambda: ["1/3", "2/3"])
    eps: str = "1/10"
    degree: int = 6

    def validate(self) -> "RunConfig":
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}; choose from {', '.join(SUBCOMMANDS)}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        for name in ("stage_cap", "mult_cap", "retries", "rule_period", "trace_stages", "dim", "lab_n", "bound", "m"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        for name in ("depth", "element_stage", "degree", "lab_degree"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        return self


def flatten(data: dict[str, Any]) -> dict[str, Any]:
    """Map a nested TOML document onto RunConfig field names, rejecting unknown keys."""
    out: dict[str, Any] = {}
    for key, value in data.items():
        if isinstance(value, dict):
            section = SCHEMA.get(key)
            if section is None or key == "":
                raise ConfigError(f"unknown section [{key}]")
            for sub, v in value.items():
                if sub not in section:
                    raise ConfigError(f"unknown key {key}.{sub}")
                out[section[sub]] = v
        elif key in SCHEMA[""]:
            out[SCHEMA[""][key]] = value
        else:
            raise ConfigError(f"unknown key {key}")
    return out


def load_file(path: str) -> dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return flatten(tomllib.load(fh))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def build_config(file_values: dict[str, Any], overrides: dict[str, Any]) -> RunConfig:
    """File values first, then every override that is not None."""
    names = {f.name for f in fields(RunConfig)}
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(merged) - names
    if unknown:
        raise ConfigError(f"unknown settings {sorted(unknown)}")
    try:
        return RunConfig(**merged).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
