"""Domain types for the single-relay decode-and-forward MIMO link.

All power-like quantities are linear scale. Conversion from dB happens only
at the command-line boundary (:func:`db_to_linear`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import (
    ConfigValidationError,
    InvalidAntennaCount,
    InvalidChannelParameter,
    InvalidModulationOrder,
    InvalidPowerSplit,
    UnsupportedStbcSize,
)

__all__ = [
    "Strategy",
    "PowerSplit",
    "SystemConfig",
    "ChannelSet",
    "ModulationScheme",
    "STBC_SIZES",
    "config_errors",
    "validate_config",
    "db_to_linear",
    "linear_to_db",
]

# relay antenna counts for which an orthogonal design is provided
STBC_SIZES = (2, 3, 4)

_SPLIT_TOL = 1e-12


class Strategy(enum.Enum):
    """Relay-phase transmission scheme."""

    #: one randomly chosen relay antenna towards one random destination antenna
    I = "I"  # noqa: E741
    #: orthogonal space-time block code from all relay antennas
    II = "II"

    @classmethod
    def parse(cls, value) -> "Strategy":
        if isinstance(value, Strategy):
            return value
        text = str(value).strip().upper()
        if text.startswith("STRATEGY"):
            text = text[len("STRATEGY"):].lstrip("_ -")
        aliases = {"1": "I", "2": "II"}
        return cls(aliases.get(text, text))


@dataclass(frozen=True)
class PowerSplit:
    """Fractions of the total power P spent by the source and the relay."""

    beta1: float
    beta2: float

    @classmethod
    def equal(cls) -> "PowerSplit":
        return cls(0.5, 0.5)

    @classmethod
    def from_source_fraction(cls, beta1: float) -> "PowerSplit":
        return cls(float(beta1), 1.0 - float(beta1))


@dataclass(frozen=True)
class SystemConfig:
    """Full parameterization of one operating point.

    Construction does not validate; call :func:`validate_config` (the
    simulator and the experiment runner do so). Analytic formulas accept
    boundary cases such as ``split=PowerSplit(1.0, 0.0)`` on purpose.
    """

    n_s: int = 1
    n_r: int = 1
    n_d: int = 1
    m: int = 4
    total_power: float = 100.0
    split: PowerSplit = field(default_factory=PowerSplit.equal)
    var_sd: float = 1.0
    var_sr: float = 1.0
    var_rd: float = 1.0
    n0: float = 1.0
    strategy: Strategy = Strategy.I

    @property
    def p_s(self) -> float:
        return self.total_power * self.split.beta1

    @property
    def p_r(self) -> float:
        return self.total_power * self.split.beta2

    @property
    def n_sd(self) -> int:
        """Number of source-destination antenna pairs, N_S * N_D."""
        return self.n_s * self.n_d

    @property
    def b(self) -> float:
        return math.sin(math.pi / self.m) ** 2

    @property
    def snr_db(self) -> float:
        return linear_to_db(self.total_power / self.n0)

    def with_split(self, beta1: float) -> "SystemConfig":
        return replace(self, split=PowerSplit.from_source_fraction(beta1))

    def with_powers(self, p_s: float, p_r: float) -> "SystemConfig":
        """Config with the given absolute source and relay powers."""
        total = p_s + p_r
        if total == 0:
            return replace(self, total_power=0.0, split=PowerSplit(0.5, 0.5))
        return replace(self, total_power=total, split=PowerSplit(p_s / total, p_r / total))

    def with_snr_db(self, snr_db: float) -> "SystemConfig":
        """Set total power so that P/N0 equals ``snr_db``; N0 is unchanged."""
        return replace(self, total_power=self.n0 * db_to_linear(snr_db))

    def to_dict(self) -> dict:
        return {
            "n_s": self.n_s,
            "n_r": self.n_r,
            "n_d": self.n_d,
            "m": self.m,
            "total_power": self.total_power,
            "beta1": self.split.beta1,
            "beta2": self.split.beta2,
            "var_sd": self.var_sd,
            "var_sr": self.var_sr,
            "var_rd": self.var_rd,
            "n0": self.n0,
            "strategy": self.strategy.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        data = dict(data)
        beta1 = data.pop("beta1", None)
        beta2 = data.pop("beta2", None)
        if beta1 is not None or beta2 is not None:
            if beta1 is None:
                beta1 = 1.0 - float(beta2)
            if beta2 is None:
                beta2 = 1.0 - float(beta1)
            data["split"] = PowerSplit(float(beta1), float(beta2))
        if "strategy" in data:
            data["strategy"] = Strategy.parse(data["strategy"])
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise KeyError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class ChannelSet:
    """One realization of the three channel matrices.

    ``h_sd`` is N_D x N_S, ``h_sr`` is N_R x N_S and ``h_rd`` is N_D x N_R.
    """

    h_sd: np.ndarray
    h_sr: np.ndarray
    h_rd: np.ndarray

    def check(self, cfg: SystemConfig) -> None:
        expect = {
            "h_sd": (cfg.n_d, cfg.n_s),
            "h_sr": (cfg.n_r, cfg.n_s),
            "h_rd": (cfg.n_d, cfg.n_r),
        }
        for name, shape in expect.items():
            arr = getattr(self, name)
            if arr.shape[-2:] != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected (..., {shape[0]}, {shape[1]})")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite entries")


@dataclass(frozen=True)
class ModulationScheme:
    """Unit-energy M-PSK with zero phase offset (point k at angle 2*pi*k/M)."""

    m: int

    def __post_init__(self):
        if not _is_power_of_two(self.m):
            raise InvalidModulationOrder(f"M={self.m} is not a power of two >= 2")

    @cached_property
    def constellation(self) -> np.ndarray:
        k = np.arange(self.m)
        return np.exp(2j * np.pi * k / self.m)

    @property
    def b(self) -> float:
        return math.sin(math.pi / self.m) ** 2

    def modulate(self, indices) -> np.ndarray:
        return np.exp(2j * np.pi * np.asarray(indices) / self.m)

    def demodulate(self, z) -> np.ndarray:
        """Nearest-point decision; only the phase of ``z`` matters for PSK."""
        phase = np.angle(z)
        return np.rint(phase * self.m / (2 * np.pi)).astype(np.int64) % self.m


def _is_power_of_two(m) -> bool:
    return isinstance(m, (int, np.integer)) and m >= 2 and (m & (m - 1)) == 0


def config_errors(cfg: SystemConfig) -> list:
    """Every violated invariant of ``cfg``, as exception instances."""
    errs = []
    for name in ("n_s", "n_r", "n_d"):
        value = getattr(cfg, name)
        if not isinstance(value, (int, np.integer)) or value < 1:
            errs.append(InvalidAntennaCount(f"{name}={value!r} must be a positive integer"))
    if not _is_power_of_two(cfg.m):
        errs.append(InvalidModulationOrder(f"M={cfg.m!r} is not a power of two >= 2"))

    b1, b2 = cfg.split.beta1, cfg.split.beta2
    if not (0.0 < b1 < 1.0 and 0.0 < b2 < 1.0):
        errs.append(InvalidPowerSplit(f"split ({b1}, {b2}) must lie in (0, 1)"))
    if abs(b1 + b2 - 1.0) > _SPLIT_TOL:
        errs.append(InvalidPowerSplit(f"beta1 + beta2 = {b1 + b2!r}, expected 1"))

    for name in ("total_power", "var_sd", "var_sr", "var_rd", "n0"):
        value = getattr(cfg, name)
        if not (np.isfinite(value) and value > 0):
            errs.append(InvalidChannelParameter(f"{name}={value!r} must be finite and > 0"))

    if cfg.strategy is Strategy.II and cfg.n_r not in STBC_SIZES:
        errs.append(UnsupportedStbcSize(f"Strategy II needs n_r in {STBC_SIZES}, got {cfg.n_r}"))
    return errs


def validate_config(cfg: SystemConfig) -> SystemConfig:
    """Return ``cfg`` unchanged, or raise :class:`ConfigValidationError`
    listing every violated invariant."""
    errs = config_errors(cfg)
    if errs:
        raise ConfigValidationError(errs)
    return cfg


def db_to_linear(x_db):
    if np.ndim(x_db):
        return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)
    return 10.0 ** (float(x_db) / 10.0)


def linear_to_db(x):
    if np.ndim(x):
        return 10.0 * np.log10(np.asarray(x, dtype=float))
    return 10.0 * math.log10(x)
