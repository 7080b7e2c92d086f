"""Symbol error rate analysis and simulation of a decode-and-forward MIMO relay
link with source transmit-antenna selection."""

__version__ = "0.1.0"

from .analytic import (  # noqa: E402
    end_to_end,
    gaussian_q,
    psk_psi,
    ser_direct,
    ser_end_to_end_strategy1,
    ser_end_to_end_strategy2,
    ser_joint_strategy1,
    ser_joint_strategy2,
    ser_source_relay,
)
from .bounds import fit_diversity, upper_bound_strategy1, upper_bound_strategy2  # noqa: E402
from .curves import SerCurve, SerPoint, emit_csv, read_csv  # noqa: E402
from .experiment import ExperimentSpec, rate, run_experiment  # noqa: E402
from .model import ModulationScheme, PowerSplit, Strategy, SystemConfig, validate_config  # noqa: E402
from .powers import optimal_split  # noqa: E402
from .sim import run_strategy1, run_strategy2  # noqa: E402
from .stbc import build_codebook, distance_spectrum  # noqa: E402
