import math
import re

import numpy as np
import pytest

from hybrid_precode.bench import (AGG_HEADER, RAW_HEADER, AggregateRow, ResultRow, SimConfig,
                                  aggregate, desk_profile, emit_svg, paper_profile, read_csv,
                                  run_experiment, run_trial, write_csv)
from hybrid_precode.channel import ChannelConfig
from hybrid_precode.errors import ConfigInvalid, EmptyResults, TooLarge
from hybrid_precode.precoding import Algorithm


@pytest.fixture(scope="module")
def desk_rows():
    return run_experiment(desk_profile(trials=4, seed=77), workers=1)


def test_paper_profile_snapshot():
    cfg = paper_profile()
    ch = cfg.channel
    assert (ch.n_clusters, ch.rays_per_cluster, ch.angle_spread_deg) == (6, 5, 10.0)
    assert (ch.k_subcarriers, ch.cp_length) == (512, 128)
    assert (ch.n_bs, ch.n_ms, cfg.n_cb, cfg.n_s, cfg.n_rf) == (32, 16, 64, 3, 3)
    assert Algorithm.EXHAUSTIVE not in cfg.algorithms
    assert cfg.snr_db == (-10.0, -5.0, 0.0, 5.0, 10.0)
    assert cfg.trials == 100


def test_desk_profile_snapshot():
    cfg = desk_profile()
    assert (cfg.channel.k_subcarriers, cfg.n_cb, cfg.channel.n_bs, cfg.channel.n_ms, cfg.n_rf) == \
        (16, 16, 16, 8, 2)
    assert Algorithm.EXHAUSTIVE in cfg.algorithms


@pytest.mark.parametrize("kw", [
    dict(n_s=3, n_rf=2),
    dict(n_rf=9, n_s=1),
    dict(trials=0),
    dict(snr_db=()),
    dict(seed=-1),
    dict(n_cb=1),
    dict(algorithms=("bogus",)),
])
def test_config_invalid(kw):
    with pytest.raises(ConfigInvalid):
        desk_profile(**kw)


def test_from_dict_overrides():
    cfg = SimConfig.from_dict({"channel": {"n_bs": 8, "n_ms": 4}, "n_rf": 2, "n_s": 1,
                               "snr_db": [0, 5], "algorithms": ["svd_bound", "dg_hp"]},
                              base=desk_profile())
    assert cfg.channel.n_bs == 8 and cfg.channel.k_subcarriers == 16
    assert cfg.snr_db == (0.0, 5.0)
    assert cfg.algorithms == (Algorithm.DGHP, Algorithm.SVD_BOUND)
    with pytest.raises(ConfigInvalid):
        SimConfig.from_dict({"nope": 1})
    with pytest.raises(ConfigInvalid):
        SimConfig.from_dict({"channel": {"n_bs": 0}})


def test_row_cardinality():
    cfg = desk_profile(trials=2, snr_db=(-5, 0, 5), algorithms=("dg_hp", "svd_bound"))
    assert len(run_experiment(cfg, workers=1)) == 12


def test_rows_valid_and_ordered(desk_rows):
    cfg = desk_profile()
    assert len(desk_rows) == 4 * len(cfg.snr_db) * len(cfg.algorithms)
    assert all(math.isfinite(r.rate) and r.rate >= 0 for r in desk_rows)
    keys = [(r.trial, cfg.snr_db.index(r.snr_db), cfg.algorithms.index(Algorithm(r.algorithm)))
            for r in desk_rows]
    assert keys == sorted(keys)


def test_ordering_chain_from_rows(desk_rows):
    groups = {}
    for r in desk_rows:
        groups.setdefault((r.trial, r.snr_db), {})[r.algorithm] = r.rate
    for g in groups.values():
        assert g["svd_bound"] >= g["exhaustive_hp"] - 1e-9
        assert g["exhaustive_hp"] >= g["dg_hp"] - 1e-9
        assert g["exhaustive_hp"] >= g["approx_gs_hp"] - 1e-9
        assert g["dg_hp"] == pytest.approx(g["gs_hp"], rel=1e-9)


def test_determinism_and_thread_equivalence(tmp_path):
    cfg = desk_profile(trials=5, seed=3, algorithms=("dg_hp", "gs_hp", "approx_gs_hp"))
    paths = []
    for i, workers in enumerate((1, 1, 3)):
        p = tmp_path / f"r{i}.csv"
        write_csv(run_experiment(cfg, workers=workers), p)
        paths.append(p.read_bytes())
    assert paths[0] == paths[1] == paths[2]


def test_trial_independent_of_trial_count():
    cfg = desk_profile(trials=3, seed=9, algorithms=("svd_bound",))
    rows = run_experiment(cfg, workers=1)
    assert [r for r in rows if r.trial == 2] == run_trial(cfg, 2)


def test_seed_changes_results():
    a = run_experiment(desk_profile(trials=1, seed=1, algorithms=("svd_bound",)), workers=1)
    b = run_experiment(desk_profile(trials=1, seed=2, algorithms=("svd_bound",)), workers=1)
    assert [r.rate for r in a] != [r.rate for r in b]


def test_timing_is_opt_in():
    cfg = desk_profile(trials=1, algorithms=("dg_hp",), snr_db=(0,))
    assert run_experiment(cfg, workers=1)[0].wall_time_us == 0
    assert run_experiment(cfg, workers=1, timing=True)[0].wall_time_us > 0


def test_exhaustive_too_large():
    cfg = SimConfig(channel=ChannelConfig(n_bs=32, n_ms=16, k_subcarriers=8, cp_length=2),
                    n_rf=8, n_s=1, n_cb=64, algorithms=("exhaustive_hp",), trials=1)
    with pytest.raises(TooLarge):
        run_experiment(cfg)


def test_aggregate_single_and_equal():
    [one] = aggregate([ResultRow(0.0, "dg_hp", 0, 3.5)])
    assert (one.mean_rate, one.std_rate, one.n) == (3.5, 0.0, 1)
    [two] = aggregate([ResultRow(0.0, "dg_hp", 0, 2.0), ResultRow(0.0, "dg_hp", 1, 2.0)])
    assert two.std_rate == 0.0 and two.n == 2


def test_aggregate_fixture():
    rows = [ResultRow(5.0, "a", t, r) for t, r in enumerate([1.0, 2.0, 3.0, 4.0])]
    rows.append(ResultRow(0.0, "a", 0, 7.0))
    agg = {(r.snr_db, r.algorithm): r for r in aggregate(rows)}
    g = agg[(5.0, "a")]
    # mean 10/4; sample variance (2.25+0.25+0.25+2.25)/3 = 5/3
    assert g.mean_rate == 2.5
    assert g.std_rate == pytest.approx(math.sqrt(5 / 3), rel=1e-15)
    assert g.n == 4
    assert agg[(0.0, "a")].n == 1


def test_aggregate_empty():
    with pytest.raises(EmptyResults):
        aggregate([])


def test_csv_headers_and_roundtrip(tmp_path, desk_rows):
    raw = tmp_path / "raw.csv"
    write_csv(desk_rows, raw)
    assert raw.read_text().splitlines()[0] == ",".join(RAW_HEADER)
    assert read_csv(raw) == desk_rows

    agg_rows = aggregate(desk_rows)
    agg = tmp_path / "agg.csv"
    write_csv(agg_rows, agg)
    assert agg.read_text().splitlines()[0] == ",".join(AGG_HEADER)
    assert read_csv(agg) == agg_rows


def test_empty_aggregate_csv_is_header_only(tmp_path):
    p = tmp_path / "agg.csv"
    write_csv([], p, kind="aggregate")
    assert p.read_text() == ",".join(AGG_HEADER) + "\n"


def test_svg_one_polyline_per_algorithm(tmp_path):
    agg = [AggregateRow(s, alg, m + s / 10, 0.1, 3)
           for alg, m in (("dg_hp", 5.0), ("approx_gs_hp", 4.5), ("svd_bound", 6.0))
           for s in (-10.0, 0.0, 10.0)]
    p = tmp_path / "plot.svg"
    emit_svg(agg, p)
    text = p.read_text()
    assert text.startswith("<svg")
    assert len(re.findall(r"<polyline ", text)) == 3
    for alg in ("dg_hp", "approx_gs_hp", "svd_bound"):
        assert f">{alg}</text>" in text
    pts = re.findall(r'points="([^"]+)"', text)
    assert all(len(s.split()) == 3 for s in pts)
