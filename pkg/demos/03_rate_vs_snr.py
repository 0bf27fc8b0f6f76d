"""
Spectral efficiency versus SNR
==============================

Monte Carlo sweep on the reduced "desk" scenario, which is small enough to
include exhaustive search. Writes raw and aggregate CSVs and an SVG chart to
the current directory. Pass ``paper`` as the first argument for the
full-size scenario (no exhaustive search, a few seconds per trial).
"""

import sys

from hybrid_precode.bench import (PROFILES, aggregate, emit_svg, run_experiment, write_csv)

profile = sys.argv[1] if len(sys.argv) > 1 else "desk"
cfg = PROFILES[profile](trials=20 if profile == "desk" else 3, seed=1)

rows = run_experiment(cfg)
agg = aggregate(rows)

write_csv(rows, f"{profile}_results.csv")
write_csv(agg, f"{profile}_aggregate.csv")
emit_svg(agg, f"{profile}_rate_vs_snr.svg", title=f"Spectral efficiency ({profile} profile)")

print(f"{'snr_db':>7s}  " + "  ".join(f"{a.value:>13s}" for a in cfg.algorithms))
for snr in cfg.snr_db:
    means = {a.algorithm: a.mean_rate for a in agg if a.snr_db == snr}
    print(f"{snr:7.1f}  " + "  ".join(f"{means[a.value]:13.3f}" for a in cfg.algorithms))
