"""Acceptance run: each criterion at its full case count and time limit.

Every test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary and printed when this file is run as a script.
"""

import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from linkhide.cli import main
from linkhide.evasion import PROOF_CONSTANTS, GadgetSpec, build_gamma, degree_audit, verify_lemma1
from linkhide.graph import path_graph
from linkhide.harness import (
    BenchConfig,
    ExperimentConfig,
    SweepConfig,
    run_runtime_benchmark,
    run_tolerance_sweep,
    run_trajectory_experiment,
)
from linkhide.local_indices import LOCAL_INDICES, LocalIndex, local_score

import suites
from oracles import PATH_VALUES

pytestmark = pytest.mark.slow

RESULTS = []


def record(number, ok, detail, seconds):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  ({seconds:.1f} s) {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def summarize(failures, limit=3):
    return f"{len(failures)} failures" + (f", e.g. {failures[:limit]}" if failures else "")


def test_criterion_01_local_indices():
    t0 = time.perf_counter()
    g = path_graph(4)
    path_bad = [k for k, v in PATH_VALUES.items() if abs(local_score(g, (0, 2), LocalIndex(k)) - v) > 1e-12]
    bad = suites.local_crosscheck(200, seed=100)
    dt = time.perf_counter() - t0
    ok = not path_bad and not bad and dt < 10
    record(1, ok, f"path mismatches {path_bad}; 200 graphs: {summarize(bad)}", dt)


def test_criterion_02_removal_monotonicity():
    t0 = time.perf_counter()
    bad = suites.removal_monotonicity_violations(1000, seed=200)
    dt = time.perf_counter() - t0
    record(2, not bad and dt < 30, f"1000 configurations x 9 indices: {summarize(bad)}", dt)


def test_criterion_03_factor_signs():
    t0 = time.perf_counter()
    bad = suites.factor_violations(500, seed=300)
    dt = time.perf_counter() - t0
    record(3, not bad, f"500 cases per type x 9 indices: {summarize(bad)}", dt)


def test_criterion_04_metrics():
    t0 = time.perf_counter()
    bad = suites.metric_mismatches(1000, seed=400)
    dt = time.perf_counter() - t0
    record(4, not bad, f"1000 tie-laden assignments: {summarize(bad)}", dt)


def test_criterion_05_naive_fast_equivalence():
    t0 = time.perf_counter()
    bad = suites.heuristic_mismatches(500, seed=500)
    dt = time.perf_counter() - t0
    record(5, not bad, f"500 instances, ctr and otc: {summarize(bad)}", dt)


def test_criterion_06_oracle_dominance():
    t0 = time.perf_counter()
    bad = suites.oracle_violations(200, seed=600)
    dt = time.perf_counter() - t0
    record(6, not bad, f"200 instances, two enumeration orders: {summarize(bad)}", dt)


def test_criterion_07_gadget():
    t0 = time.perf_counter()
    failures = []
    cover = ({1, 2, 3}, {3, 4, 5})
    for kind in LOCAL_INDICES:
        spec = GadgetSpec(PROOF_CONSTANTS[kind], 5, cover)
        net = build_gamma(spec)
        audit = degree_audit(net)
        if not all(audit.values()):
            failures.append(f"{kind.value}: audit {audit}")
        for subsets in [(), (1,), (2,), (1, 2)]:
            rep = verify_lemma1(spec, kind, subsets)
            if not rep.passed:
                failures.append(f"{kind.value} {subsets}: {rep.counterexamples[:2]}")
    dt = time.perf_counter() - t0
    record(7, not failures, f"9 indices x 4 subsets plus degree audits: {summarize(failures)}", dt)


def below_zero(mean_and_halfwidth):
    mean, half = mean_and_halfwidth
    return mean + half < 0


def trajectory_config(heuristic, out=None):
    return ExperimentConfig(network="sf:100,3", heuristic=heuristic, hidden="remove-random-edges",
                            hidden_size="auto", budget="auto", reps=50, seed=0, out=out)


def test_criterion_08_trajectories(tmp_path):
    t0 = time.perf_counter()
    ctr = run_trajectory_experiment(trajectory_config("ctr", str(tmp_path / "ctr.csv")))
    otc = run_trajectory_experiment(trajectory_config("otc", str(tmp_path / "otc.csv")))
    dt = time.perf_counter() - t0
    ctr_ok = [k.value for k in LOCAL_INDICES if below_zero(ctr.delta(k, "auc"))]
    otc_ok = [k.value for k in LOCAL_INDICES if below_zero(otc.delta(k, "ap"))]
    ok = len(ctr_ok) == 9 and len(otc_ok) >= 7 and dt < 600
    detail = (f"CTR dAUC<0 with CI excluding 0 for {len(ctr_ok)}/9; "
              f"OTC dAP<0 with CI excluding 0 for {len(otc_ok)}/9")
    record(8, ok, detail, dt)


def test_criterion_09_tolerance_trends():
    t0 = time.perf_counter()
    res = run_tolerance_sweep(SweepConfig(model="sf", n_values=[200, 400, 600, 800, 1000],
                                          d_values=[2, 4, 6, 8, 10], heuristics=["ctr"],
                                          hidden_size=100, budget=400, reps=10, seed=0))
    dt = time.perf_counter() - t0
    rho_n, rho_d = {}, {}
    for k in LOCAL_INDICES:
        by_n = res.marginal("ctr", k, "n")
        by_d = res.marginal("ctr", k, "d")
        rho_n[k.value] = spearmanr(list(by_n), np.abs(list(by_n.values())))[0]
        rho_d[k.value] = spearmanr(list(by_d), np.abs(list(by_d.values())))[0]
    ok = all(r < 0 for r in rho_n.values()) and all(r > 0 for r in rho_d.values()) and dt < 7200
    detail = (f"Spearman |dAUC| vs n in [{min(rho_n.values()):.2f}, {max(rho_n.values()):.2f}], "
              f"vs d in [{min(rho_d.values()):.2f}, {max(rho_d.values()):.2f}] over 9 indices")
    record(9, ok, detail, dt)


def test_criterion_10_runtime():
    t0 = time.perf_counter()
    grid = [1000, 10000, 100000]
    rows = run_runtime_benchmark(BenchConfig(model="sf", n_values=grid, d=3, heuristics=["ctr", "otc"],
                                             hidden_size=100, budget=400, reps=1, seed=0))
    dt = time.perf_counter() - t0
    total = {(r.heuristic, r.n): r.total_seconds[0] for r in rows}
    run = {(r.heuristic, r.n): r.run_seconds[0] for r in rows}
    otc_run = [run["otc", n] for n in grid]
    ok = (total["ctr", 100000] < 60 and total["otc", 10000] < 900
          and all(a < b for a, b in zip(otc_run, otc_run[1:])))
    detail = (f"CTR sf:100000 {total['ctr', 100000]:.2f} s end to end; OTC sf:10000 {total['otc', 10000]:.2f} s; "
              f"OTC run seconds over n={grid}: {[round(x, 2) for x in otc_run]}")
    record(10, ok, detail, dt)


def test_criterion_11_determinism(tmp_path):
    t0 = time.perf_counter()
    same = {}
    for heuristic in ("ctr", "otc"):
        outs = []
        for run in ("first", "second"):
            out = tmp_path / f"{heuristic}-{run}.csv"
            code = main(["trajectory", "--network", "sf:100,3", "--index", "local", "--heuristic", heuristic,
                         "--hidden", "remove-random-edges", "--hidden-size", "auto", "--budget", "auto",
                         "--reps", "50", "--seed", "0", "--out", str(out)])
            assert code == 0
            outs.append(out.read_bytes())
        same[heuristic] = outs[0] == outs[1]
    dt = time.perf_counter() - t0
    record(11, all(same.values()), f"byte-identical CSV on rerun: {same}", dt)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
