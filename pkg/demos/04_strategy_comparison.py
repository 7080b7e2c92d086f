"""Strategy I against Strategy II at equal rate and diversity.

With two relay antennas both strategies deliver one symbol per two channel
uses. Strategy II (1,2,1) has diversity N_S N_D + N_R = 3, matched by
Strategy I with one more source antenna, (2,2,1).
"""

import sys

from tasrelay import (SystemConfig, Strategy, build_codebook, rate, run_strategy1, run_strategy2,
                      ser_end_to_end_strategy1, ser_end_to_end_strategy2)
from tasrelay.experiment import matched_strategy1

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 300_000

s2 = SystemConfig(1, 2, 1, strategy=Strategy.II)
s1 = matched_strategy1(s2)
cb = build_codebook(2, 4)
print(f"rates: Strategy I {rate(s1.n_r, s1.strategy)}, Strategy II {rate(s2.n_r, s2.strategy)}")
print(f"{'dB':>4} {'II analytic':>12} {'II sim':>10} {'I analytic':>12} {'I sim':>10}")
for snr_db in (10, 15, 20):
    a2 = ser_end_to_end_strategy2(cb, s2.with_snr_db(snr_db))
    a1 = ser_end_to_end_strategy1(s1.with_snr_db(snr_db))
    r2 = run_strategy2(s2.with_snr_db(snr_db), cb, trials, seed=7).ser_estimate
    r1 = run_strategy1(s1.with_snr_db(snr_db), trials, seed=7).ser_estimate
    print(f"{snr_db:4d} {a2:12.3e} {r2:10.3e} {a1:12.3e} {r1:10.3e}")

# In this model Strategy I comes out ahead: its extra source antenna doubles
# the selection diversity of the direct link, while Strategy II splits the
# relay power over two antennas and needs both symbols of a block decoded
# at the relay before it forwards anything.
print("\nrate of Strategy II by relay size:",
      {n: str(rate(n, Strategy.II)) for n in (2, 3, 4)})
