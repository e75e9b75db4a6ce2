"""Key-value experiment configuration.

One ``key = value`` pair per line; ``#`` starts a comment. Model keys:

    system.type = heisenberg | pauli_sum
    system.n_sites, system.b, system.periodic     (heisenberg)
    system.terms = 0.7*X + 0.3*Z                  (pauli_sum)
    bath.beta, bath.omega                         defaults for every bath
    bath[k].beta, bath[k].omega                   per-bath overrides
    interaction[k].site = j                       lowering operator on site j
    interaction[k].pauli_sum = 0.8*X              explicit system operator V
    interaction[k].ancilla = lowering | x         ancilla factor (X+iY)/2 or X/2

Without interaction keys a Heisenberg model gets one lowering interaction per
site. Everything else is a command parameter read through :class:`Config`.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .model import (LOWERING, X, InteractionSpec, OperatorSum, ThermalAncilla, build_heisenberg,
                    lowering_sum)

ANCILLA_OPS = {"lowering": LOWERING, "x": X / 2}
_INDEXED = re.compile(r"^(bath|interaction)\[(\d+)\]\.(\w+)$")


class ConfigError(ValueError):
    pass


def parse_text(text: str) -> dict:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {n}: empty key")
        out[key] = value.strip('"').strip("'")
    return out


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


class Config:
    """String-valued settings with typed accessors that record what was used."""

    def __init__(self, values: dict, defaults: dict | None = None):
        self.values = {**(defaults or {}), **values}

    @classmethod
    def load(cls, path=None, overrides=None, defaults=None) -> "Config":
        values = parse_text(Path(path).read_text()) if path else {}
        values.update(overrides or {})
        return cls(values, defaults)

    def has(self, key: str) -> bool:
        return key in self.values

    def get(self, key: str, default=None) -> str:
        if key not in self.values:
            if default is None:
                raise ConfigError(f"missing config key {key!r}")
            self.values[key] = str(default)
        return self.values[key]

    def float(self, key: str, default=None) -> float:
        try:
            return float(self.get(key, default))
        except ValueError as exc:
            raise ConfigError(f"{key}: not a number") from exc

    def int(self, key: str, default=None) -> int:
        v = self.float(key, default)
        if v != int(v):
            raise ConfigError(f"{key}: not an integer")
        return int(v)

    def bool(self, key: str, default=None) -> bool:
        v = self.get(key, default).lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: not a boolean")

    def floats(self, key: str, default=None) -> list[float]:
        try:
            return [float(s) for s in self.get(key, default).split(",") if s.strip()]
        except ValueError as exc:
            raise ConfigError(f"{key}: not a list of numbers") from exc

    def ints(self, key: str, default=None) -> list[int]:
        return [int(v) for v in self.floats(key, default)]


def build_model(cfg: Config):
    """(H0 as OperatorSum, [(ThermalAncilla, InteractionSpec), ...]) from model keys."""
    kind = cfg.get("system.type", "heisenberg")
    if kind == "heisenberg":
        h0 = build_heisenberg(cfg.int("system.n_sites", 4), cfg.float("system.b", 0.5),
                              cfg.bool("system.periodic", "false"))
    elif kind == "pauli_sum":
        h0 = OperatorSum.parse(cfg.get("system.terms"))
    else:
        raise ConfigError(f"unknown system.type {kind!r}")
    n = h0.n_qubits

    indices = set()
    for key in cfg.values:
        m = _INDEXED.match(key)
        if m and m.group(1) == "interaction":
            indices.add(int(m.group(2)))
    if not indices:
        if kind != "heisenberg":
            raise ConfigError("pauli_sum systems need explicit interaction[k] keys")
        indices = set(range(n))
    if sorted(indices) != list(range(len(indices))):
        raise ConfigError("interaction indices must be 0..m-1 without gaps")

    beta0 = cfg.float("bath.beta", 1.0)
    omega0 = cfg.float("bath.omega", 0.1)
    baths = []
    for k in sorted(indices):
        p = f"interaction[{k}]"
        anc_name = cfg.get(f"{p}.ancilla", "lowering").lower()
        if anc_name not in ANCILLA_OPS:
            raise ConfigError(f"{p}.ancilla must be one of {sorted(ANCILLA_OPS)}")
        if cfg.has(f"{p}.pauli_sum"):
            v = OperatorSum.parse(cfg.get(f"{p}.pauli_sum"))
            if v.n_qubits != n:
                raise ConfigError(f"{p}.pauli_sum acts on {v.n_qubits} qubits, system has {n}")
        else:
            site = cfg.int(f"{p}.site", k)
            if not 0 <= site < n:
                raise ConfigError(f"{p}.site out of range")
            v = lowering_sum(n, site)
        beta = cfg.float(f"bath[{k}].beta", beta0)
        omega = cfg.float(f"bath[{k}].omega", omega0)
        baths.append((ThermalAncilla(beta if np.isfinite(beta) else np.inf, omega),
                      InteractionSpec(v, ANCILLA_OPS[anc_name].copy())))
    return h0, baths
