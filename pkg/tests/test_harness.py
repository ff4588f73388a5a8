import csv
import io
import math
import statistics

import numpy as np
import pytest

from linkhide.cli import main, read_config
from linkhide.evasion import EvasionInstance, run_ctr_pq
from linkhide.generators import generate, parse_spec, rng_for
from linkhide.graph import save_edge_list
from linkhide.harness import (
    BenchConfig,
    ExperimentConfig,
    HarnessError,
    SingleLinkConfig,
    SweepConfig,
    mean_ci,
    relative_change,
    resolve_budget,
    resolve_hidden_size,
    run_runtime_benchmark,
    run_single_link_scenario,
    run_tolerance_sweep,
    run_trajectory_experiment,
    select_hidden,
    top_ranked_nonedges,
)
from linkhide.local_indices import LOCAL_INDICES, LocalIndex, local_score_all
from linkhide.scoring import evaluate_hidden


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ----------------------------------------------------------------- helpers


def test_auto_size_rules():
    assert resolve_hidden_size("auto", 294) == 10
    assert resolve_hidden_size("auto", 5000) == 50
    assert resolve_budget("auto", 10) == 40
    assert resolve_hidden_size(7, 294) == 7 and resolve_budget(3, 10) == 3


def test_mean_ci_matches_statistics():
    xs = [0.3, 0.5, 0.45, 0.61, 0.2]
    m, h = mean_ci(xs)
    assert m == pytest.approx(statistics.mean(xs))
    assert h == pytest.approx(1.96 * statistics.stdev(xs) / math.sqrt(len(xs)))
    assert mean_ci([0.4]) == (0.4, 0.0)
    assert math.isnan(mean_ci([])[0])


def test_relative_change():
    assert relative_change(0.5, 0.25) == -0.5
    assert math.isnan(relative_change(0.0, 0.3))


def test_remove_random_edges_strategy():
    g = generate(parse_spec("sf:80,3"))
    h, hidden = select_hidden(g, "remove-random-edges", 12, rng_for(1))
    assert len(hidden) == 12 and h.m == g.m - 12
    assert all(g.has_edge(*e) and not h.has_edge(*e) for e in hidden)
    with pytest.raises(HarnessError):
        select_hidden(g, "remove-random-edges", g.m + 1, rng_for(1))


def test_random_nonedges_strategy():
    g = generate(parse_spec("sf:80,3"))
    h, hidden = select_hidden(g, "random-nonedges", 12, rng_for(1))
    assert h is g and len(set(hidden)) == 12
    assert not any(g.has_edge(*e) for e in hidden)


def test_top_ranked_nonedges_against_full_sort():
    g = generate(parse_spec("sf:60,3", seed=4))
    scores = local_score_all(g, LocalIndex.RA)
    expected = sorted(scores, key=lambda e: (-scores[e], e))[:25]
    assert top_ranked_nonedges(g, LocalIndex.RA, 25) == expected


# ------------------------------------------------------------ trajectories


def test_trajectory_row_counts(tmp_path):
    out = tmp_path / "t.csv"
    agg = run_trajectory_experiment(ExperimentConfig(network="sf:100,3", reps=3, seed=1, out=str(out)))
    rows = read_rows(out)
    assert len(rows) == 9 * 41
    for k in LOCAL_INDICES:
        its = [int(r["iteration"]) for r in rows if r["index"] == k.value]
        assert its == list(range(41))
    assert {r["hidden_size"] for r in rows} == {"10"} and {r["budget"] for r in rows} == {"40"}
    assert agg.iterations == 41


def test_single_rep_has_zero_ci():
    agg = run_trajectory_experiment(ExperimentConfig(network="sf:80,3", reps=1, seed=3))
    for k in agg.config.indices:
        assert not agg.auc_ci[k].any() and not agg.ap_ci[k].any()


def test_trajectory_matches_hand_run():
    cfg = ExperimentConfig(network="sf:90,3", indices=["cn", "jaccard"], reps=3, seed=11)
    agg = run_trajectory_experiment(cfg)
    starts, ends = [], []
    for rep in range(3):
        rng = rng_for(11, rep)
        g = generate(parse_spec("sf:90,3"), rng)
        g, hidden = select_hidden(g, "remove-random-edges", 10, rng)
        plan, _ = run_ctr_pq(EvasionInstance(g, "cn", frozenset(hidden), 40), track=False)
        starts.append(evaluate_hidden(g, "jaccard", hidden).auc)
        ends.append(evaluate_hidden(plan.apply(g), "jaccard", hidden).auc)
    j = LocalIndex.JACCARD
    assert agg.auc_mean[j][0] == pytest.approx(np.mean(starts), abs=1e-12)
    # early stops are forward-filled, so the last row is the final value
    assert agg.auc_mean[j][-1] == pytest.approx(np.mean(ends), abs=1e-12)
    assert agg.delta(j)[0] == pytest.approx(np.mean(ends) - np.mean(starts), abs=1e-12)


def test_trajectory_is_deterministic(tmp_path):
    paths = []
    for name in ("a.csv", "b.csv"):
        p = tmp_path / name
        run_trajectory_experiment(ExperimentConfig(network="sf:70,3", heuristic="otc", reps=2, seed=5, out=str(p)))
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_parallel_reps_match_serial(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = dict(network="sf:60,3", indices=["cn", "ra"], heuristic="alt", reps=3, seed=2)
    run_trajectory_experiment(ExperimentConfig(**base, out=str(a)))
    run_trajectory_experiment(ExperimentConfig(**base, out=str(b), workers=2))
    assert a.read_bytes() == b.read_bytes()


def test_trajectory_from_file(tmp_path):
    g = generate(parse_spec("sf:50,2", seed=8))
    path = tmp_path / "g.txt"
    save_edge_list(g, path)
    agg = run_trajectory_experiment(ExperimentConfig(network=str(path), indices=["cn"], reps=2, hidden_size=5, budget=4))
    assert agg.iterations == 5
    assert next(agg.rows())[1] == "file"


@pytest.mark.parametrize(
    "kw",
    [
        dict(heuristic="greedy"),
        dict(hidden="everything"),
        dict(reps=0),
        dict(hidden_size=0),
        dict(budget=-1),
        dict(indices=[]),
        dict(indices=["nope"]),
    ],
)
def test_config_validation(kw):
    with pytest.raises((HarnessError, ValueError)):
        ExperimentConfig(**kw)


def test_infeasible_hidden_set():
    with pytest.raises(HarnessError):
        run_trajectory_experiment(ExperimentConfig(network="sf:20,2", hidden_size=500, reps=1))
    with pytest.raises(HarnessError):
        run_trajectory_experiment(ExperimentConfig(network="missing-file.txt", reps=1))


def test_global_guard():
    with pytest.raises(HarnessError):
        run_trajectory_experiment(ExperimentConfig(network="sf:2500,2", indices=["katz"], reps=1))


# ------------------------------------------------------------------ sweeps


def test_sweep_marginals(tmp_path):
    out = tmp_path / "s.csv"
    res = run_tolerance_sweep(SweepConfig(n_values=[200, 400], d_values=[2, 4], indices=["cn", "aa"],
                                          reps=2, seed=3, out=str(out)))
    rows = read_rows(out)
    for section, col in (("by_n", "n"), ("by_d", "d")):
        for k in ("cn", "aa"):
            sel = [r for r in rows if r["section"] == section and r["index"] == k]
            assert len(sel) == 2
    assert len([r for r in rows if r["section"] == "cell"]) == 4 * 2
    cells = {(c.n, c.d): np.mean(c.auc_rel[LocalIndex.CN]) for c in res.cells}
    by_n = res.marginal("ctr", LocalIndex.CN, "n")
    assert by_n[200] == pytest.approx((cells[200, 2] + cells[200, 4]) / 2)
    by_d = res.marginal("ctr", LocalIndex.CN, "d")
    assert by_d[4] == pytest.approx((cells[200, 4] + cells[400, 4]) / 2)


def test_one_cell_sweep_equals_trajectory_endpoints():
    sw = run_tolerance_sweep(SweepConfig(n_values=[150], d_values=[3], indices=["cn", "salton"],
                                         hidden_size=20, budget=30, reps=3, seed=9))
    tr = run_trajectory_experiment(ExperimentConfig(network="sf:150,3", indices=["cn", "salton"],
                                                    hidden_size=20, budget=30, reps=3, seed=9))
    for k in (LocalIndex.CN, LocalIndex.SALTON):
        for rep, r in enumerate(tr.reps):
            t = r.trajectories[k].padded(31)
            assert sw.cells[0].auc_rel[k][rep] == pytest.approx((t.auc[-1] - t.auc[0]) / t.auc[0], abs=1e-12)
            assert sw.cells[0].ap_rel[k][rep] == pytest.approx((t.ap[-1] - t.ap[0]) / t.ap[0], abs=1e-12)


def test_sweep_validation():
    with pytest.raises(HarnessError):
        SweepConfig(n_values=[])
    with pytest.raises(HarnessError):
        SweepConfig(heuristics=["nope"])


# ------------------------------------------------------------- single link


def test_single_link_k1_b0_is_initial_metric():
    cfg = SingleLinkConfig(network="sf:60,3", indices=["ra"], k=1, budget=0, seed=6)
    res = run_single_link_scenario(cfg)
    g = generate(parse_spec("sf:60,3"), rng_for(6, 0))
    top = top_ranked_nonedges(g, LocalIndex.RA, 1)
    ev = evaluate_hidden(g, "ra", top)
    rows = list(res.rows())
    assert len(rows) == 1
    assert rows[0][8] == pytest.approx(ev.auc, abs=1e-15) and rows[0][10] == pytest.approx(ev.ap, abs=1e-15)


@pytest.mark.parametrize("heuristic", ["ctr", "otc", "alt"])
def test_single_link_moves_touch_the_evader(heuristic):
    cfg = SingleLinkConfig(network="sf:60,3", indices=["cn", "aa"], heuristic=heuristic, k=15, budget=10, seed=1)
    res = run_single_link_scenario(cfg)
    plans = res.reps[0].plans
    assert len(plans) == 30
    for target, evader, steps in plans:
        assert evader in target
        assert all(evader in s.edge for s in steps)
        assert all(s.edge != target for s in steps)
    assert len(list(res.rows())) == 2 * 11


def test_single_link_k_too_large():
    with pytest.raises(HarnessError):
        run_single_link_scenario(SingleLinkConfig(network="sf:10,3", k=10_000))


# -------------------------------------------------------------------- bench


def test_bench_single_row(tmp_path):
    out = tmp_path / "bench.csv"
    rows = run_runtime_benchmark(BenchConfig(n_values=[300], heuristics=["ctr"], hidden_size=20, budget=40, out=str(out)))
    assert len(rows) == 1 and rows[0].n == 300
    assert rows[0].run_seconds[0] <= rows[0].total_seconds[0]
    assert len(read_rows(out)) == 1


# ---------------------------------------------------------------------- cli


def test_cli_trajectory(tmp_path):
    out = tmp_path / "t.csv"
    code = main(["trajectory", "--network", "sf:60,3", "--index", "cn,ra", "--reps", "2",
                 "--hidden-size", "5", "--budget", "6", "--out", str(out)])
    assert code == 0
    rows = read_rows(out)
    assert len(rows) == 2 * 7 and rows[0]["reps"] == "2"


def test_cli_config_file_with_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\nnetwork = sf:60,3\nindex = cn\nreps = 2\nbudget = 9\nhidden-size = 5\n")
    assert read_config(cfg)["budget"] == 9
    out = tmp_path / "t.csv"
    assert main(["trajectory", "--config", str(cfg), "--budget", "3", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 4 and rows[0]["budget"] == "3" and rows[0]["reps"] == "2"


def test_cli_score_matches_library(tmp_path, capsys):
    assert main(["score", "--network", "sf:30,2", "--index", "jaccard"]) == 0
    text = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["a", "b", "score"]
    g = generate(parse_spec("sf:30,2"), rng_for(0))
    want = local_score_all(g, LocalIndex.JACCARD)
    got = {(int(a), int(b)): float(s) for a, b, s in rows[1:]}
    assert got == want


def test_cli_oracle(tmp_path):
    out = tmp_path / "plan.txt"
    assert main(["oracle", "--network", "er:8,3", "--budget", "1", "--out", str(out)]) == 0
    text = out.read_text()
    assert "# auc" in text and "# hidden" in text


def test_cli_sweep_and_single_link(capsys):
    assert main(["sweep", "--n-values", "60", "--d-values", "2", "--index", "cn", "--reps", "1",
                 "--hidden-size", "5", "--budget", "5"]) == 0
    assert "by_n" in capsys.readouterr().out
    assert main(["single-link", "--network", "sf:40,2", "--index", "cn", "--k", "2", "--budget", "2"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 1 + 3


def test_cli_errors(tmp_path, capsys):
    assert main(["trajectory", "--network", str(tmp_path / "nope.txt")]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["trajectory", "--network", "sf:60,3", "--index", "bogus"]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["trajectory", "--config", str(bad)]) == 2
    with pytest.raises(SystemExit):
        main(["nosuchcommand"])


def test_cli_bench(capsys):
    assert main(["bench", "--n-values", "200", "--heuristic", "ctr,otc", "--hidden-size", "10", "--budget", "20"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["heuristic"] for r in rows] == ["ctr", "otc"]
    assert main(["bench", "--n-values", "200", "--hidden-size", "auto"]) == 2
