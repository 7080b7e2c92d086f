"""Strategy I: exact SER, Monte Carlo and the high-SNR bound.

A single relay antenna forwards to a random destination antenna; the source
picks its best antenna pair. We sweep P/N0 for two antenna setups with equal
power and print the three quantities side by side.

    python demos/01_strategy1_sweep.py [trials]
"""

import sys

from tasrelay import ExperimentSpec, SystemConfig, emit_csv, run_experiment
from tasrelay.bounds import fit_diversity

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000

for ant in [(1, 1, 1), (2, 2, 2)]:
    spec = ExperimentSpec(config=SystemConfig(*ant), snr_start_db=0, snr_stop_db=20, snr_step_db=4,
                          trials=trials, seed=1,
                          outputs=frozenset({"analytic", "simulated", "bound"}),
                          label=f"strategy1_{''.join(map(str, ant))}")
    curve = run_experiment(spec)
    print(f"\nN_S, N_R, N_D = {ant}")
    print(f"{'dB':>4} {'analytic':>11} {'simulated':>11} {'+-ci95':>9} {'bound':>11}")
    for p in curve.points:
        print(f"{p.snr_db:4.0f} {p.analytic:11.3e} {p.simulated:11.3e} {p.ci95:9.1e} {p.bound:11.3e}")
    emit_csv(curve, f"demo_out/{spec.label}.csv")

# The bound is loose at low SNR but converges on the exact curve. Its slope,
# and that of the exact SER, is N_S N_D + 1.
import numpy as np  # noqa: E402

from tasrelay import ser_end_to_end_strategy1  # noqa: E402

grid = np.arange(25, 41)
for ant in [(1, 1, 1), (2, 1, 2), (2, 2, 2)]:
    cfg = SystemConfig(*ant)
    ser = [ser_end_to_end_strategy1(cfg.with_snr_db(x)) for x in grid]
    print(f"diversity {ant}: fitted {fit_diversity((grid, ser)).slope:.2f}, "
          f"expected {cfg.n_sd + 1}")
