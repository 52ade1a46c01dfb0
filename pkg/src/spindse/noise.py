"""Fidelity and timing parameters for the success-probability model.

The shipped defaults are optimistic, illustration-grade values; real studies
should load a device-specific profile.  Z rotations realized by shuttling
always cost two shuttles, so the shuttle-based Z duration is pinned to twice
the shuttle duration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .circuit_ir import GateKind

_UNITS = {"ns": 1e-9, "us": 1e-6, "µs": 1e-6, "ms": 1e-3, "s": 1.0}
_DURATION_RE = re.compile(r"^\s*([0-9.eE+-]+)\s*([a-zµ]*)\s*$")


def parse_duration(text: str) -> float:
    """Parse a duration like '100ns', '0.1 us' or '1e-7' (bare value = seconds)."""
    m = _DURATION_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse duration {text!r}")
    value, unit = m.groups()
    scale = 1.0 if not unit else _UNITS.get(unit)
    if scale is None:
        raise ValueError(f"unknown time unit {unit!r}")
    return float(value) * scale


@dataclass(frozen=True)
class NoiseConfig:
    """Per-gate-class fidelities and durations plus the dephasing time."""

    f_single: float = 0.9999
    f_two: float = 0.9998
    f_shuttle: float | None = None  # defaults to f_single
    f_swap: float | None = None  # defaults to f_two**3 (three native two-qubit gates)
    t_single: float = 100e-9
    t_two: float = 200e-9
    t_shuttle: float = 50e-9
    t_swap: float | None = None  # defaults to 3 * t_two
    t2_star: float = 10e-6
    tqg_multiplier: float = 1.0

    def __post_init__(self):
        if self.f_shuttle is None:
            object.__setattr__(self, "f_shuttle", self.f_single)
        if self.f_swap is None:
            object.__setattr__(self, "f_swap", self.f_two**3)
        if self.t_swap is None:
            object.__setattr__(self, "t_swap", 3.0 * self.t_two)
        for name in ("f_single", "f_two", "f_shuttle", "f_swap"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        for name in ("t_single", "t_two", "t_shuttle", "t_swap", "t2_star"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.tqg_multiplier <= 0.0:
            raise ValueError("tqg_multiplier must be positive")

    @property
    def t_zshuttle(self) -> float:
        """Duration of a shuttle-based Z rotation: always two shuttles."""
        return 2.0 * self.t_shuttle

    def to_dict(self) -> dict:
        return {
            "f_single": self.f_single,
            "f_two": self.f_two,
            "f_shuttle": self.f_shuttle,
            "f_swap": self.f_swap,
            "t_single": self.t_single,
            "t_two": self.t_two,
            "t_shuttle": self.t_shuttle,
            "t_swap": self.t_swap,
            "t2_star": self.t2_star,
            "tqg_multiplier": self.tqg_multiplier,
        }


_FIDELITY_KEYS = {"f_single", "f_two", "f_shuttle", "f_swap", "tqg_multiplier"}
_DURATION_KEYS = {"t_single", "t_two", "t_shuttle", "t_swap", "t2_star"}


def parse_noise_config(text: str) -> NoiseConfig:
    """Parse the key-value noise profile format (see data/default.noise)."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("format:"):
            continue
        if "=" not in line:
            raise ValueError(f"noise file, line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _FIDELITY_KEYS:
            values[key] = float(value)
        elif key in _DURATION_KEYS:
            values[key] = parse_duration(value)
        else:
            raise ValueError(f"noise file, line {lineno}: unknown key {key!r}")
    return NoiseConfig(**values)


def load_noise_config(path) -> NoiseConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_noise_config(fh.read())


def gate_fidelity(kind: GateKind, config: NoiseConfig) -> float:
    if kind in (GateKind.RX, GateKind.RY, GateKind.RZ):
        return config.f_single
    if kind is GateKind.TQG:
        return config.f_two**config.tqg_multiplier
    if kind is GateKind.SWAP:
        return config.f_swap
    if kind is GateKind.SHUTTLE:
        return config.f_shuttle
    raise ValueError(f"no fidelity for gate kind {kind}")


def gate_duration(kind: GateKind, config: NoiseConfig) -> float:
    if kind in (GateKind.RX, GateKind.RY, GateKind.RZ):
        return config.t_single
    if kind is GateKind.TQG:
        return config.t_two * config.tqg_multiplier
    if kind is GateKind.SWAP:
        return config.t_swap
    if kind is GateKind.SHUTTLE:
        return config.t_shuttle
    raise ValueError(f"no duration for gate kind {kind}")
