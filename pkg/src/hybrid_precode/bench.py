"""Seeded Monte Carlo runner for spectral efficiency versus SNR.

Each trial draws its own generator from ``SeedSequence([seed, trial])``, so a
trial's numbers do not depend on which worker ran it or in what order.
Rows are merged by ``(trial, snr index, algorithm index)``.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from html import escape

import numpy as np

from .channel import ChannelConfig, generate_channel
from .codebook import beamsteering_codebook
from .errors import ConfigInvalid, EmptyResults, TooLarge
from .precoding import (EXHAUSTIVE_LIMIT, Algorithm, approx_gs_hp, approx_gs_select, dg_hp,
                        exhaustive_hp, gs_hp, svd_bound)

THREADS_ENV = "HYBRID_PRECODE_THREADS"
RAW_HEADER = ["snr_db", "algorithm", "trial", "rate_bps_hz", "wall_time_us"]
AGG_HEADER = ["snr_db", "algorithm", "mean_rate", "std_rate", "n"]

DEFAULT_SNR_DB = (-10.0, -5.0, 0.0, 5.0, 10.0)
ALL_ALGORITHMS = tuple(Algorithm)


@dataclass(frozen=True)
class SimConfig:
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    n_rf: int = 3
    n_s: int = 3
    n_cb: int = 64
    snr_db: tuple[float, ...] = DEFAULT_SNR_DB
    trials: int = 100
    seed: int = 0
    algorithms: tuple[Algorithm, ...] = (Algorithm.DGHP, Algorithm.GSHP,
                                         Algorithm.APPROX_GSHP, Algorithm.SVD_BOUND)
    fast_eig_path: bool = False

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        try:
            algs = tuple(Algorithm(a) for a in self.algorithms)
        except ValueError as exc:
            raise ConfigInvalid(str(exc)) from None
        # canonical order keeps output layout independent of how the set was spelled
        object.__setattr__(self, "algorithms", tuple(a for a in ALL_ALGORITHMS if a in algs))
        self.validate()

    def validate(self):
        ch = self.channel
        if not 1 <= self.n_s <= self.n_rf <= min(ch.n_bs, ch.n_ms):
            raise ConfigInvalid(
                f"need 1 <= n_s <= n_rf <= min(n_bs, n_ms); got n_s={self.n_s}, "
                f"n_rf={self.n_rf}, n_bs={ch.n_bs}, n_ms={ch.n_ms}")
        if self.n_cb < self.n_rf:
            raise ConfigInvalid("codebook smaller than n_rf")
        if self.trials < 1:
            raise ConfigInvalid("trials must be >= 1")
        if not self.snr_db:
            raise ConfigInvalid("snr_db must be nonempty")
        if not 0 <= self.seed < 2**64:
            raise ConfigInvalid("seed must be a 64-bit unsigned integer")
        if not self.algorithms:
            raise ConfigInvalid("no algorithms selected")

    @classmethod
    def from_dict(cls, doc: dict, base: "SimConfig | None" = None) -> "SimConfig":
        """Build from a JSON-style dict; missing keys fall back to ``base``."""
        base = base or cls()
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
        kw = dict(doc)
        if "channel" in kw:
            ch = kw["channel"]
            ch_known = {f.name for f in fields(ChannelConfig)}
            if set(ch) - ch_known:
                raise ConfigInvalid(f"unknown channel keys: {sorted(set(ch) - ch_known)}")
            kw["channel"] = replace(base.channel, **ch)
        try:
            return replace(base, **kw)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigInvalid):
                raise
            raise ConfigInvalid(str(exc)) from None

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["snr_db"] = list(self.snr_db)
        doc["algorithms"] = [a.value for a in self.algorithms]
        return doc


def paper_profile(**overrides) -> SimConfig:
    """Full-size scenario; exhaustive search is left out (C(64, 3) RF sets)."""
    cfg = SimConfig(
        channel=ChannelConfig(n_bs=32, n_ms=16, k_subcarriers=512, cp_length=128,
                              n_clusters=6, rays_per_cluster=5, angle_spread_deg=10.0),
        n_rf=3, n_s=3, n_cb=64,
    )
    return replace(cfg, **overrides)


def desk_profile(**overrides) -> SimConfig:
    """Reduced scenario small enough to include exhaustive search."""
    cfg = SimConfig(
        channel=ChannelConfig(n_bs=16, n_ms=8, k_subcarriers=16, cp_length=4,
                              n_clusters=6, rays_per_cluster=5, angle_spread_deg=10.0),
        n_rf=2, n_s=2, n_cb=16,
        algorithms=ALL_ALGORITHMS,
    )
    return replace(cfg, **overrides)


PROFILES = {"paper": paper_profile, "desk": desk_profile}


@dataclass(frozen=True)
class ResultRow:
    snr_db: float
    algorithm: str
    trial: int
    rate: float
    wall_time_us: int = 0


@dataclass(frozen=True)
class AggregateRow:
    snr_db: float
    algorithm: str
    mean_rate: float
    std_rate: float
    n: int


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def run_trial(config: SimConfig, trial: int, timing: bool = False) -> list[ResultRow]:
    cb = beamsteering_codebook(config.channel.n_bs, config.n_cb)
    real = generate_channel(config.channel, trial_rng(config.seed, trial))
    n_rf, n_s = config.n_rf, config.n_s

    def timed(fn):
        t0 = time.perf_counter_ns()
        out = fn()
        return out, (time.perf_counter_ns() - t0) // 1000 if timing else 0

    approx_sel = approx_us = None
    if Algorithm.APPROX_GSHP in config.algorithms:
        (approx_sel, _), approx_us = timed(lambda: approx_gs_select(real, cb, n_rf, n_s))

    rows = []
    for snr in config.snr_db:
        rho = 10.0 ** (snr / 10.0)
        for alg in config.algorithms:
            if alg is Algorithm.EXHAUSTIVE:
                res, us = timed(lambda: exhaustive_hp(real, cb, n_rf, rho, n_s))
            elif alg is Algorithm.DGHP:
                res, us = timed(lambda: dg_hp(real, cb, n_rf, rho, n_s))
            elif alg is Algorithm.GSHP:
                res, us = timed(lambda: gs_hp(real, cb, n_rf, rho, n_s,
                                              fast_eig=config.fast_eig_path))
            elif alg is Algorithm.APPROX_GSHP:
                res, us = timed(lambda: approx_gs_hp(real, cb, n_rf, n_s, rho, selection=approx_sel))
                us += approx_us
            else:
                res, us = timed(lambda: svd_bound(real, rho, n_s))
            rows.append(ResultRow(snr, alg.value, trial, float(res.rate), int(us)))
    return rows


def worker_count(requested: int | None = None) -> int:
    if requested is None:
        env = os.environ.get(THREADS_ENV)
        requested = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(requested))


def run_experiment(config: SimConfig, workers: int | None = None,
                   timing: bool = False) -> list[ResultRow]:
    """Run every trial and return rows ordered by trial, SNR, then algorithm.

    ``wall_time_us`` is only measured when ``timing`` is set; otherwise it is 0
    so the table is reproducible byte for byte.
    """
    config.validate()
    if Algorithm.EXHAUSTIVE in config.algorithms:
        n_sets = math.comb(config.n_cb, config.n_rf)
        if n_sets > EXHAUSTIVE_LIMIT:
            raise TooLarge(f"exhaustive search over {n_sets} RF sets exceeds {EXHAUSTIVE_LIMIT}")
    n = min(worker_count(workers), config.trials)
    trials = range(config.trials)
    if n == 1:
        per_trial = [run_trial(config, t, timing) for t in trials]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            per_trial = list(pool.map(lambda t: run_trial(config, t, timing), trials))
    return [row for rows in per_trial for row in rows]


def aggregate(rows) -> list[AggregateRow]:
    """Mean and sample standard deviation of rate per ``(snr_db, algorithm)``.

    Groups appear in first-seen order. A single-row group reports std 0.
    """
    rows = list(rows)
    if not rows:
        raise EmptyResults("nothing to aggregate")
    groups: dict[tuple[float, str], list[float]] = {}
    for r in rows:
        groups.setdefault((r.snr_db, r.algorithm), []).append(r.rate)
    out = []
    for (snr, alg), rates in groups.items():
        arr = np.asarray(rates)
        std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
        out.append(AggregateRow(snr, alg, float(np.mean(arr)), std, int(arr.size)))
    return out


def write_csv(rows, path, kind: str | None = None) -> None:
    """Write a raw (:class:`ResultRow`) or aggregate (:class:`AggregateRow`) table.

    ``kind`` is ``"raw"`` or ``"aggregate"``; by default it is inferred from
    the rows, and an empty table gets the raw header. Floats are written with
    ``repr`` so they parse back exactly.
    """
    rows = list(rows)
    if kind is None:
        kind = "aggregate" if rows and isinstance(rows[0], AggregateRow) else "raw"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if kind == "aggregate":
            w.writerow(AGG_HEADER)
            for r in rows:
                w.writerow([repr(r.snr_db), r.algorithm, repr(r.mean_rate), repr(r.std_rate), r.n])
        elif kind == "raw":
            w.writerow(RAW_HEADER)
            for r in rows:
                w.writerow([repr(r.snr_db), r.algorithm, r.trial, repr(r.rate), r.wall_time_us])
        else:
            raise ValueError(f"unknown table kind {kind!r}")


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        body = list(reader)
    if header == RAW_HEADER:
        return [ResultRow(float(s), a, int(t), float(r), int(us)) for s, a, t, r, us in body]
    if header == AGG_HEADER:
        return [AggregateRow(float(s), a, float(m), float(sd), int(n)) for s, a, m, sd, n in body]
    raise ValueError(f"unrecognized header {header}")


_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]


def emit_svg(agg, path, title: str = "Spectral efficiency vs SNR") -> None:
    """Line chart with one polyline per algorithm (x: SNR in dB, y: mean rate)."""
    agg = list(agg)
    width, height = 640, 420
    left, right, top, bottom = 70, 170, 40, 55
    pw, ph = width - left - right, height - top - bottom

    series: dict[str, list[tuple[float, float]]] = {}
    for r in agg:
        series.setdefault(r.algorithm, []).append((r.snr_db, r.mean_rate))
    xs = [x for pts in series.values() for x, _ in pts] or [0.0, 1.0]
    ys = [y for pts in series.values() for _, y in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = 0.0, max(max(ys), 1e-9) * 1.05
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>']
    for x in sorted(set(xs)):
        out.append(f'<text x="{sx(x):.1f}" y="{top + ph + 18}" text-anchor="middle">{x:g}</text>')
    for t in np.linspace(y0, y1, 6):
        out.append(f'<text x="{left - 8}" y="{sy(t) + 4:.1f}" text-anchor="end">{t:.1f}</text>')
        out.append(f'<line x1="{left}" y1="{sy(t):.1f}" x2="{left + pw}" y2="{sy(t):.1f}" '
                   f'stroke="#ddd"/>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">SNR (dB)</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.1f})">Spectral efficiency (bps/Hz)</text>')

    for i, (name, pts) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = sorted(pts)
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = top + 10 + 20 * i
        out.append(f'<line x1="{left + pw + 12}" y1="{ly}" x2="{left + pw + 36}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 42}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
