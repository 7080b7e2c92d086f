"""SNR sweeps combining analytic SER, Monte Carlo and bounds, plus presets
for the standard figures."""

from __future__ import annotations

import datetime
import json
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .analytic import DEFAULT_RELAY_LIMIT, ser_end_to_end_strategy1, ser_end_to_end_strategy2
from .bounds import upper_bound_strategy1, upper_bound_strategy2
from .curves import SerCurve, SerPoint
from .errors import ConfigError, TasRelayError, UnsupportedStbcSize
from .model import STBC_SIZES, Strategy, SystemConfig, validate_config
from .powers import optimal_split
from .sim import run_strategy1, run_strategy2
from .stbc import build_codebook

__all__ = [
    "OUTPUTS",
    "ExperimentSpec",
    "rate",
    "sweep_values",
    "run_experiment",
    "figure_specs",
    "FIGURES",
    "matched_strategy1",
]

log = logging.getLogger(__name__)

OUTPUTS = frozenset({"analytic", "simulated", "bound", "optimal_power"})
MIN_TRIALS = 1000


def rate(n_r: int, strategy) -> Fraction:
    """Symbols delivered per channel use over both phases."""
    strategy = Strategy.parse(strategy)
    if strategy is Strategy.I:
        return Fraction(1, 2)
    if n_r not in STBC_SIZES:
        raise UnsupportedStbcSize(f"no orthogonal design for n_r={n_r}")
    k, t2 = (2, 2) if n_r == 2 else (4, 8)
    return Fraction(k, k + t2)


@dataclass(frozen=True)
class ExperimentSpec:
    config: SystemConfig = field(default_factory=SystemConfig)
    snr_start_db: float = 0.0
    snr_stop_db: float = 30.0
    snr_step_db: float = 5.0
    trials: int = 100_000
    seed: int = 0
    outputs: frozenset = frozenset({"analytic", "bound"})
    workers: Optional[int] = None
    eq28_variant: str = "printed"
    relay_limit: str = DEFAULT_RELAY_LIMIT
    xi_form: str = "per_pair"
    i3_form: str = "derived"
    label: str = ""

    def validate(self) -> "ExperimentSpec":
        validate_config(self.config)
        unknown = set(self.outputs) - OUTPUTS
        if unknown:
            raise ConfigError(f"unknown outputs {sorted(unknown)}")
        if self.snr_start_db > self.snr_stop_db:
            raise ConfigError("snr_start_db must not exceed snr_stop_db")
        if not self.snr_step_db > 0:
            raise ConfigError("snr_step_db must be positive")
        if "simulated" in self.outputs and self.trials < MIN_TRIALS:
            raise ConfigError(f"trials must be >= {MIN_TRIALS}")
        if "optimal_power" in self.outputs and self.config.strategy is not Strategy.I:
            raise ConfigError("optimal power allocation is only defined for Strategy I")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        data = dict(data)
        sweep = {k: data.pop(k) for k in list(data) if k in cls.__dataclass_fields__ and k != "config"}
        if "outputs" in sweep:
            sweep["outputs"] = frozenset(sweep["outputs"])
        cfg = SystemConfig.from_dict(data.pop("config", data))
        return cls(config=cfg, **sweep)


def sweep_values(spec: ExperimentSpec) -> np.ndarray:
    n = int(np.floor((spec.snr_stop_db - spec.snr_start_db) / spec.snr_step_db + 1e-9)) + 1
    return np.round(spec.snr_start_db + spec.snr_step_db * np.arange(n), 10)


def _metadata(spec: ExperimentSpec) -> dict:
    return {
        "label": spec.label,
        "config": json.dumps(spec.config.to_dict(), sort_keys=True),
        "sweep_db": f"{spec.snr_start_db}:{spec.snr_step_db}:{spec.snr_stop_db}",
        "outputs": ",".join(sorted(spec.outputs)),
        "trials": spec.trials if "simulated" in spec.outputs else "",
        "seed": spec.seed,
        "options": (f"eq28_variant={spec.eq28_variant} relay_limit={spec.relay_limit} "
                    f"xi_form={spec.xi_form} i3_form={spec.i3_form}"),
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }


def _point(spec: ExperimentSpec, snr_db: float, codebook) -> SerPoint:
    cfg = spec.config.with_snr_db(snr_db)
    if "optimal_power" in spec.outputs:
        split = optimal_split(cfg, variant=spec.eq28_variant, i3_form=spec.i3_form)
        cfg = replace(cfg, split=split)
    analytic = bound = sim = ci = None
    if cfg.strategy is Strategy.I:
        if "analytic" in spec.outputs:
            analytic = ser_end_to_end_strategy1(cfg)
        if "bound" in spec.outputs:
            bound = upper_bound_strategy1(cfg, spec.i3_form)
        if "simulated" in spec.outputs:
            res = run_strategy1(cfg, spec.trials, spec.seed, spec.workers)
            sim, ci = res.ser_estimate, res.ci95_halfwidth
    else:
        if "analytic" in spec.outputs:
            analytic = ser_end_to_end_strategy2(codebook, cfg, spec.relay_limit)
        if "bound" in spec.outputs:
            bound = upper_bound_strategy2(codebook, cfg, spec.xi_form, spec.relay_limit)
        if "simulated" in spec.outputs:
            res = run_strategy2(cfg, codebook, spec.trials, spec.seed, spec.workers)
            sim, ci = res.ser_estimate, res.ci95_halfwidth
    return SerPoint(snr_db=float(snr_db), analytic=analytic, simulated=sim, ci95=ci,
                    bound=bound, beta1=cfg.split.beta1)


def run_experiment(spec: ExperimentSpec) -> SerCurve:
    """Evaluate every requested quantity at every sweep value.

    A numerical failure stops the sweep; the points computed so far are
    returned with ``curve.failed`` set.
    """
    spec.validate()
    codebook = build_codebook(spec.config.n_r, spec.config.m) if spec.config.strategy is Strategy.II else None
    curve = SerCurve(config=spec.config, seed=spec.seed, label=spec.label, metadata=_metadata(spec))
    for snr in sweep_values(spec):
        try:
            curve.add(_point(spec, snr, codebook))
        except TasRelayError as exc:
            log.error("sweep %r stopped at %s dB: %s", spec.label, snr, exc)
            curve.failed = f"{type(exc).__name__} at {snr} dB: {exc}"
            break
    return curve


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

def matched_strategy1(cfg: SystemConfig) -> SystemConfig:
    """Strategy I configuration with the same nominal diversity order
    (N_S N_D + 1 = N_S N_D + N_R of ``cfg``), obtained by enlarging N_S."""
    target = cfg.n_sd + cfg.n_r - 1
    if target % cfg.n_d:
        raise ConfigError(f"no integer N_S matches diversity {target + 1} with N_D={cfg.n_d}")
    return replace(cfg, n_s=target // cfg.n_d, strategy=Strategy.I)


def _s1(ant, label, outputs, **kw):
    cfg = SystemConfig(*ant, strategy=Strategy.I)
    return ExperimentSpec(config=cfg, outputs=frozenset(outputs), label=label, **kw)


def _s2(ant, label, outputs, **kw):
    cfg = SystemConfig(*ant, strategy=Strategy.II)
    return ExperimentSpec(config=cfg, outputs=frozenset(outputs), label=label, **kw)


def _tag(ant):
    return "".join(str(a) for a in ant)


def figure_specs(number: int, trials: int = 100_000, seed: int = 0, workers=None,
                 eq28_variant: str = "printed") -> list:
    """Experiment specs reproducing one figure (3 to 7)."""
    common = dict(trials=trials, seed=seed, workers=workers, eq28_variant=eq28_variant,
                  snr_start_db=0.0, snr_stop_db=30.0, snr_step_db=2.0)
    specs = []
    if number == 3:
        for ant in ((1, 1, 1), (2, 2, 2)):
            specs.append(_s1(ant, f"fig3_s1_{_tag(ant)}_equal", {"analytic", "simulated", "bound"}, **common))
            specs.append(_s1(ant, f"fig3_s1_{_tag(ant)}_optimal",
                             {"analytic", "simulated", "bound", "optimal_power"}, **common))
    elif number == 4:
        for ant in ((1, 1, 1), (1, 3, 1), (2, 1, 2), (2, 3, 2)):
            specs.append(_s1(ant, f"fig4_s1_{_tag(ant)}", {"simulated"}, **common))
    elif number == 5:
        for ant in ((1, 1, 1), (2, 1, 2), (2, 2, 2), (3, 3, 3)):
            specs.append(_s1(ant, f"fig5_s1_{_tag(ant)}_equal", {"analytic"}, **common))
            specs.append(_s1(ant, f"fig5_s1_{_tag(ant)}_optimal", {"analytic", "optimal_power"}, **common))
    elif number == 6:
        for ant in ((1, 2, 1), (1, 2, 2), (2, 2, 1), (1, 3, 1), (1, 4, 1)):
            specs.append(_s2(ant, f"fig6_s2_{_tag(ant)}", {"analytic", "bound"}, **common))
    elif number == 7:
        for ant in ((1, 2, 1), (1, 3, 1)):
            s2 = _s2(ant, f"fig7_s2_{_tag(ant)}", {"analytic", "simulated"}, **common)
            s1cfg = matched_strategy1(s2.config)
            specs.append(s2)
            specs.append(ExperimentSpec(config=s1cfg, outputs=frozenset({"analytic", "simulated"}),
                                        label=f"fig7_s1_{_tag((s1cfg.n_s, s1cfg.n_r, s1cfg.n_d))}",
                                        **common))
    else:
        raise ConfigError(f"no preset for figure {number}; choose 3-7")
    return specs


FIGURES = (3, 4, 5, 6, 7)
