"""SER curve records and their CSV representation."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import TasRelayError
from .model import SystemConfig

__all__ = ["SerPoint", "SerCurve", "CSV_HEADER", "format_csv", "emit_csv", "read_csv", "format_number"]

CSV_HEADER = ("snr_db", "analytic", "simulated", "ci95", "bound",
              "strategy", "ns", "nr", "nd", "m", "beta1", "seed")


@dataclass(frozen=True)
class SerPoint:
    """One sweep value. ``None`` marks a quantity that was not computed."""

    snr_db: float
    analytic: Optional[float] = None
    simulated: Optional[float] = None
    ci95: Optional[float] = None
    bound: Optional[float] = None
    beta1: Optional[float] = None


@dataclass
class SerCurve:
    config: SystemConfig
    points: list = field(default_factory=list)
    seed: Optional[int] = None
    label: str = ""
    metadata: dict = field(default_factory=dict)
    failed: Optional[str] = None

    def __post_init__(self):
        self.points = sorted(self.points, key=lambda p: p.snr_db)

    def __len__(self):
        return len(self.points)

    def add(self, point: SerPoint) -> None:
        self.points.append(point)
        self.points.sort(key=lambda p: p.snr_db)

    def column(self, name: str) -> list:
        return [getattr(p, name) for p in self.points]

    def snr_db(self) -> list:
        return self.column("snr_db")


def format_number(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    # shortest representation that parses back to the same double
    return repr(value)


def _rows(curve: SerCurve):
    cfg = curve.config
    for p in curve.points:
        beta1 = p.beta1 if p.beta1 is not None else cfg.split.beta1
        yield [
            format_number(p.snr_db),
            format_number(p.analytic),
            format_number(p.simulated),
            format_number(p.ci95),
            format_number(p.bound),
            cfg.strategy.value,
            str(cfg.n_s), str(cfg.n_r), str(cfg.n_d), str(cfg.m),
            format_number(beta1),
            "" if curve.seed is None else str(curve.seed),
        ]


def format_csv(curve: SerCurve) -> str:
    """CSV text of ``curve``.

    Metadata lines start with ``#`` and precede the header; the
    ``# timestamp:`` line is the only one that differs between reruns.
    Missing quantities are empty fields.
    """
    if not curve.points:
        raise TasRelayError("refusing to write an empty SER curve")
    buf = io.StringIO()
    for key, value in curve.metadata.items():
        buf.write(f"# {key}: {value}\n")
    if curve.failed:
        buf.write(f"# FAILED: {curve.failed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(_rows(curve))
    return buf.getvalue()


def emit_csv(curve: SerCurve, path) -> None:
    """Write :func:`format_csv` output to ``path``, creating parent directories."""
    text = format_csv(curve)
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _parse(value: str):
    return None if value == "" else float(value)


def read_csv(path) -> SerCurve:
    """Inverse of :func:`emit_csv` (numeric fields and configuration echo)."""
    from .model import Strategy

    meta = {}
    failed = None
    lines = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                if key == "FAILED":
                    failed = value
                else:
                    meta[key] = value
            else:
                lines.append(line)
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise TasRelayError(f"unexpected CSV header {reader.fieldnames}")
    points = []
    cfg = None
    seed = None
    for row in reader:
        if cfg is None:
            cfg = SystemConfig(n_s=int(row["ns"]), n_r=int(row["nr"]), n_d=int(row["nd"]),
                               m=int(row["m"]), strategy=Strategy.parse(row["strategy"]))
            seed = int(row["seed"]) if row["seed"] else None
        points.append(SerPoint(
            snr_db=float(row["snr_db"]),
            analytic=_parse(row["analytic"]),
            simulated=_parse(row["simulated"]),
            ci95=_parse(row["ci95"]),
            bound=_parse(row["bound"]),
            beta1=_parse(row["beta1"]),
        ))
    if cfg is None:
        raise TasRelayError(f"{path} holds no data rows")
    if points and points[0].beta1 is not None:
        cfg = replace(cfg, split=type(cfg.split).from_source_fraction(points[0].beta1))
    return SerCurve(config=cfg, points=points, seed=seed, metadata=meta, failed=failed)
