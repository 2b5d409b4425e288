"""Strict flat-key configuration files for sweeps.

Format: INI-style sections [model], [sweep], [solver] with key = value
lines.  Unknown sections or keys are hard errors; a silently ignored typo
in a physics parameter is the worst possible failure mode.  Serialization
uses repr-exact floats so parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields

__all__ = ["SweepConfig", "ConfigError", "parse_config", "serialize_config",
           "load_config"]


class ConfigError(ValueError):
    """Malformed, unknown, or inconsistent configuration input."""


def _float_list(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


_SCHEMA = {
    "model": {
        "eps_g": float, "delta_eg": float,
        "t_L": float, "t_R": float, "t_e5": float, "t_5": float,
        "temperature": float, "two_v_F": float,
    },
    "sweep": {
        "gamma_min": float, "gamma_max": float, "gamma_count": int,
        "e_nh": _float_list, "delta_mu": _float_list,
        "output": str,
    },
    "solver": {
        "tolerance": float,
    },
}


@dataclass(frozen=True)
class SweepConfig:
    """Drive-intensity sweep over a Cartesian (gamma, e_nh, delta_mu) grid.

    The drive axis gamma is the laser intensity; the g-e bond amplitude is
    sqrt(gamma).  Bias splits symmetrically, mu_L = -mu_R = delta_mu / 2.
    """

    gamma_min: float = 1e-3
    gamma_max: float = 1e3
    gamma_count: int = 33
    e_nh: tuple = (1.0,)
    delta_mu: tuple = (0.0,)
    eps_g: float = 0.0
    delta_eg: float = 0.0
    t_L: float = 0.5
    t_R: float = 0.5
    t_e5: float = 1.0
    t_5: float = 1.0
    temperature: float = 0.1
    two_v_F: float = 1.0
    tolerance: float = 1e-9
    output: str = "sweep.csv"

    def __post_init__(self):
        if self.gamma_min <= 0:
            raise ConfigError("gamma_min must be > 0")
        if self.gamma_max <= self.gamma_min:
            raise ConfigError("gamma_max must exceed gamma_min")
        if self.gamma_count < 2:
            raise ConfigError("gamma_count must be >= 2")
        if any(e < 1.0 for e in self.e_nh):
            raise ConfigError("every e_nh must be >= 1")
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        if self.two_v_F <= 0:
            raise ConfigError("two_v_F must be > 0")
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be > 0")
        if abs(self.t_5) == 0:
            raise ConfigError("t_5 must be nonzero (the drain must exist)")


_FIELD_SECTION = {}
for _sec, _keys in _SCHEMA.items():
    for _k in _keys:
        _FIELD_SECTION[_k] = _sec
_CFG_KEYS = {f.name for f in fields(SweepConfig)}


def parse_config(text: str) -> SweepConfig:
    """Parse configuration text; unknown sections or keys raise ConfigError."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    values = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            conv = _SCHEMA[section][key]
            try:
                values[key] = conv(raw)
            except ValueError as exc:
                raise ConfigError(
                    f"bad value for {key!r} in [{section}]: {raw!r}") from exc
    try:
        return SweepConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def serialize_config(cfg: SweepConfig) -> str:
    """Canonical text form; floats keep full precision for exact round-trips."""
    def fmt(v):
        if isinstance(v, tuple):
            return ", ".join(repr(float(x)) for x in v)
        if isinstance(v, float):
            return repr(v)
        return str(v)

    out = io.StringIO()
    for section in ("model", "sweep", "solver"):
        out.write(f"[{section}]\n")
        for key in _SCHEMA[section]:
            if key in _CFG_KEYS:
                out.write(f"{key} = {fmt(getattr(cfg, key))}\n")
        out.write("\n")
    return out.getvalue()


def load_config(path) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
