"""
Wideband channel and beamsteering codebook
==========================================

Draws one clustered channel, shows how its energy spreads across subcarriers
and which codewords line up with its dominant directions.
"""

import numpy as np

from hybrid_precode import ChannelConfig, beamsteering_codebook, generate_channel

cfg = ChannelConfig(n_bs=32, n_ms=16, k_subcarriers=512, cp_length=128)
real = generate_channel(cfg, 0)
print("channel stack:", real.h.shape)

# Frobenius energy per subcarrier, normalized so the ensemble mean is 1
energy = np.linalg.norm(real.h, axis=(1, 2)) ** 2 / (cfg.n_bs * cfg.n_ms)
print(f"per-subcarrier energy: min {energy.min():.2f}, mean {energy.mean():.2f}, "
      f"max {energy.max():.2f}")

# Delays up to the cyclic prefix make the channel frequency selective.
# Correlation between h[0] and h[k] decays with k.
h0 = real.h[0].ravel()
for k in (1, 4, 16, 64):
    hk = real.h[k].ravel()
    corr = abs(np.vdot(h0, hk)) / (np.linalg.norm(h0) * np.linalg.norm(hk))
    print(f"|corr(h[0], h[{k}])| = {corr:.3f}")

cb = beamsteering_codebook(cfg.n_bs, 64)
print("codebook:", cb.words.shape, "max | |w| - 1 | =", np.abs(np.abs(cb.words) - 1).max())

# Average beamforming gain of each codeword over all subcarriers
gain = np.mean(np.linalg.norm(real.h @ cb.words, axis=1) ** 2, axis=0) / cfg.n_bs
top = np.argsort(gain)[::-1][:5]
for n in top:
    print(f"codeword {n:2d}  steering angle {np.degrees(cb.steering_angles[n]):7.2f} deg  "
          f"gain {gain[n]:.2f}")
