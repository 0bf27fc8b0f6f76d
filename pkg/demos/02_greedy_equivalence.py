"""
Direct greedy vs Gram-Schmidt greedy selection
==============================================

Both searches add one codeword per iteration. The Gram-Schmidt version
scores the orthogonalized candidate against the previous projected channel
instead of re-evaluating the full RF matrix, yet ends on the same columns.
"""

import time

import numpy as np

from hybrid_precode import (ChannelConfig, approx_gs_hp, beamsteering_codebook, dg_hp,
                            exhaustive_hp, generate_channel, gs_hp, svd_bound)

cfg = ChannelConfig(n_bs=16, n_ms=8, k_subcarriers=16, cp_length=4)
cb = beamsteering_codebook(16, 16)
rho = 10.0

same = 0
for seed in range(20):
    real = generate_channel(cfg, seed)
    d = dg_hp(real, cb, 3, rho)
    g = gs_hp(real, cb, 3, rho)
    same += d.rf_indices == g.rf_indices
    if seed < 3:
        print(f"seed {seed}: DG {d.rf_indices} trace {np.round(d.mi_trace, 4)}")
        print(f"         GS {g.rf_indices} trace {np.round(g.mi_trace, 4)}")
print(f"identical selections on {same}/20 channels")

# How close the SNR-free approximation and the greedy searches get to the
# best RF set, on one channel
real = generate_channel(cfg, 99)
for name, run in [
    ("svd_bound", lambda: svd_bound(real, rho, 2)),
    ("exhaustive_hp", lambda: exhaustive_hp(real, cb, 2, rho, 2)),
    ("dg_hp", lambda: dg_hp(real, cb, 2, rho, 2)),
    ("gs_hp (fast eig)", lambda: gs_hp(real, cb, 2, rho, 2, fast_eig=True)),
    ("approx_gs_hp", lambda: approx_gs_hp(real, cb, 2, 2, rho)),
]:
    t0 = time.perf_counter()
    res = run()
    ms = 1e3 * (time.perf_counter() - t0)
    print(f"{name:18s} rate {res.rate:7.3f} bps/Hz  RF {res.rf_indices}  {ms:7.1f} ms")
