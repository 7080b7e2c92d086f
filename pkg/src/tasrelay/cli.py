"""Command-line front end.

Every subcommand builds an :class:`~tasrelay.experiment.ExperimentSpec` from
defaults, an optional JSON config file and command-line flags (in that order
of precedence) and writes the resulting curve as CSV to ``--out`` or stdout.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from . import __version__
from .curves import emit_csv, format_csv
from .errors import ConfigError, TasRelayError
from .experiment import (FIGURES, ExperimentSpec, figure_specs, matched_strategy1, rate,
                         run_experiment)
from .model import Strategy, validate_config
from .powers import DELTA_VARIANTS, optimal_split

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("tasrelay")

CONFIG_SCHEMA = """\
JSON object; every key is optional.
  n_s, n_r, n_d, m          antenna counts and PSK order (integers)
  total_power, n0           linear scale; only used by power-opt
  beta1 (or beta2)          source power fraction
  var_sd, var_sr, var_rd    channel variances
  strategy                  "I" or "II"
  snr_start_db, snr_stop_db, snr_step_db
  trials, seed, workers
  relay_limit ("G"|"F"), xi_form ("per_pair"|"printed"),
  i3_form ("derived"|"printed"), eq28_variant ("printed"|"symmetric")
"""


def _antennas(text: str):
    try:
        parts = tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        parts = ()
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected NSxNRxND, got {text!r}")
    return parts


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with configuration overrides")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int, help="Monte Carlo trials per SNR point")
    common.add_argument("--workers", type=int, help="worker processes (default: $TASRELAY_WORKERS or 1)")
    common.add_argument("--out", help="output CSV file (figure: directory); default stdout")
    common.add_argument("--strategy", choices=["I", "II", "1", "2"])
    common.add_argument("--antennas", type=_antennas, metavar="NSxNRxND")
    common.add_argument("--mod", type=int, metavar="M", help="PSK order")
    common.add_argument("--eq28-variant", choices=DELTA_VARIANTS, dest="eq28_variant")
    common.add_argument("--snr", type=float, metavar="DB", help="single SNR point (overrides the sweep)")
    common.add_argument("--snr-start", type=float, dest="snr_start_db")
    common.add_argument("--snr-stop", type=float, dest="snr_stop_db")
    common.add_argument("--snr-step", type=float, dest="snr_step_db")
    common.add_argument("--optimal-power", action="store_true", help="recompute the power split per point")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="tasrelay", description=__doc__.splitlines()[0],
                                epilog="config file schema:\n" + CONFIG_SCHEMA,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analytic", parents=[common], help="exact SER sweep")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo SER sweep (with analytic column)")
    sub.add_parser("bound", parents=[common], help="high-SNR upper bound sweep (with analytic column)")
    sub.add_parser("power-opt", parents=[common], help="optimal source/relay split at one total power")
    sub.add_parser("rate", parents=[common], help="transmission rate of a strategy")
    fig = sub.add_parser("figure", parents=[common], help="reproduce one figure's curves")
    fig.add_argument("number", type=int, choices=FIGURES)
    sub.add_parser("compare-strategies", parents=[common],
                   help="Strategy II against the Strategy I setup of equal diversity")
    return p


def _load_config(path):
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return data


def _build_spec(args, outputs) -> ExperimentSpec:
    data = _load_config(args.config) if args.config else {}
    try:
        spec = ExperimentSpec.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    cfg = spec.config
    if args.antennas:
        cfg = replace(cfg, n_s=args.antennas[0], n_r=args.antennas[1], n_d=args.antennas[2])
    if args.mod is not None:
        cfg = replace(cfg, m=args.mod)
    if args.strategy:
        cfg = replace(cfg, strategy=Strategy.parse(args.strategy))
    updates = {"config": cfg, "outputs": frozenset(outputs)}
    for key in ("seed", "trials", "workers", "eq28_variant", "snr_start_db", "snr_stop_db", "snr_step_db"):
        value = getattr(args, key)
        if value is not None:
            updates[key] = value
    if args.snr is not None:
        updates.update(snr_start_db=args.snr, snr_stop_db=args.snr)
    if args.optimal_power:
        updates["outputs"] = updates["outputs"] | {"optimal_power"}
    spec = replace(spec, **updates)
    if not spec.label:
        spec = replace(spec, label=f"{args.command}_s{cfg.strategy.value}_{cfg.n_s}{cfg.n_r}{cfg.n_d}")
    return spec.validate()


def _write(curve, out, stdout) -> None:
    if out:
        emit_csv(curve, out)
        log.info("wrote %s", out)
    else:
        stdout.write(format_csv(curve))


def _run_curves(specs, out_dir, stdout) -> int:
    status = EXIT_OK
    for spec in specs:
        curve = run_experiment(spec)
        if out_dir:
            _write(curve, os.path.join(out_dir, f"{spec.label}.csv"), stdout)
        else:
            _write(curve, None, stdout)
        if curve.failed:
            log.error("%s: %s", spec.label, curve.failed)
            status = EXIT_NUMERICAL
    return status


def _dispatch(args, stdout) -> int:
    cmd = args.command
    if cmd == "rate":
        spec = _build_spec(args, {"analytic"})
        r = rate(spec.config.n_r, spec.config.strategy)
        stdout.write(f"{r}\n")
        return EXIT_OK
    if cmd == "power-opt":
        spec = _build_spec(args, {"analytic"})
        cfg = spec.config
        if args.snr is not None:
            cfg = cfg.with_snr_db(args.snr)
        split = optimal_split(validate_config(cfg), variant=spec.eq28_variant, i3_form=spec.i3_form,
                              strict=True)
        stdout.write(f"beta1={split.beta1:.10f} beta2={split.beta2:.10f}\n")
        return EXIT_OK
    if cmd == "figure":
        base = _build_spec(args, {"analytic"})
        specs = figure_specs(args.number, trials=base.trials, seed=base.seed, workers=base.workers,
                             eq28_variant=base.eq28_variant)
        return _run_curves(specs, args.out or f"figure{args.number}", stdout)
    if cmd == "compare-strategies":
        spec = _build_spec(args, {"analytic", "simulated"})
        cfg = spec.config
        if cfg.n_r == 1 and args.antennas is None:
            cfg = replace(cfg, n_r=2)  # default comparison: Alamouti relay
        s2 = replace(spec, config=replace(cfg, strategy=Strategy.II),
                     label=f"compare_sII_{cfg.n_s}{cfg.n_r}{cfg.n_d}")
        s1cfg = matched_strategy1(s2.config)
        s1 = replace(spec, config=s1cfg, label=f"compare_sI_{s1cfg.n_s}{s1cfg.n_r}{s1cfg.n_d}")
        return _run_curves([s2.validate(), s1.validate()], args.out, stdout)
    outputs = {"analytic": {"analytic"},
               "simulate": {"analytic", "simulated"},
               "bound": {"analytic", "bound"}}[cmd]
    spec = _build_spec(args, outputs)
    curve = run_experiment(spec)
    _write(curve, args.out, stdout)
    return EXIT_NUMERICAL if curve.failed else EXIT_OK


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return _dispatch(args, stdout)
    except (ConfigError, json.JSONDecodeError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except TasRelayError as exc:
        # NumericalError, DegenerateCodebook and friends
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
