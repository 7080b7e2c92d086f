"""How much of the power budget should the source get?

The Strategy I bound is a two-term polynomial in 1/P whose first term
(relay fails and direct link fails) falls with the source share and whose
second term (relay forwards, both branches fade) needs relay power too. The
stationary point of the bound gives the split.
"""

import numpy as np

from tasrelay import SystemConfig, optimal_split, ser_end_to_end_strategy1

print("Optimal source share beta1 at P = 100 (20 dB), QPSK, unit variances")
for ant in [(1, 1, 1), (2, 2, 2), (3, 3, 3)]:
    cfg = SystemConfig(*ant)
    print(f"  {ant}: beta1 = {optimal_split(cfg).beta1:.4f}")

# beta1 settles as P grows; for (1,1,1) both terms decay as P^-2 and the
# optimum does not move at all.
print("\nbeta1 against P/N0")
for snr_db in (0, 10, 20, 30, 40):
    row = [optimal_split(SystemConfig(*ant).with_snr_db(snr_db)).beta1
           for ant in [(1, 1, 1), (2, 2, 2), (3, 3, 3)]]
    print(f"  {snr_db:3d} dB  " + "  ".join(f"{b:.4f}" for b in row))

# The split minimizes the bound, not the exact SER. Compare with a brute-force
# minimization of the exact SER.
cfg = SystemConfig(2, 2, 2).with_snr_db(20)
grid = np.linspace(0.5, 0.98, 97)
exact = [ser_end_to_end_strategy1(cfg.with_split(b)) for b in grid]
b_exact = grid[int(np.argmin(exact))]
b_bound = optimal_split(cfg).beta1
print(f"\n(2,2,2) at 20 dB: bound optimum {b_bound:.3f}, exact-SER optimum ~{b_exact:.3f}")
print(f"  SER at bound optimum {ser_end_to_end_strategy1(cfg.with_split(b_bound)):.3e}, "
      f"equal split {ser_end_to_end_strategy1(cfg.with_split(0.5)):.3e}")
