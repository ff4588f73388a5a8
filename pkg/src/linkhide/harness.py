"""Experiment protocols: trajectories, tolerance sweeps, single-link runs, timings."""

from __future__ import annotations

import csv
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .evasion import HEURISTICS, EvasionInstance, Trajectory, replay
from .global_indices import MAX_GLOBAL_NODES, GlobalIndex, GlobalParams
from .graph import Edge, Graph, GraphError, edge, load_edge_list
from .generators import GeneratorSpec, generate, looks_like_spec, parse_spec, rng_for
from .local_indices import LocalIndex
from .scoring import IndexKind, evaluate_hidden_many, parse_index, parse_index_list, score_graph

HIDDEN_STRATEGIES = ("remove-random-edges", "random-nonedges", "top-ranked-nonedges")
Z95 = 1.96


class HarnessError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    network: str = "sf:100,3"
    indices: List[IndexKind] = field(default_factory=lambda: list(LocalIndex))
    heuristic: str = "ctr"
    hidden: str = "remove-random-edges"
    hidden_size: Union[int, str] = "auto"
    budget: Union[int, str] = "auto"
    reps: int = 50
    seed: int = 0
    out: Optional[str] = None
    params: GlobalParams = field(default_factory=GlobalParams)
    workers: int = 1

    def __post_init__(self):
        self.indices = [parse_index(k) for k in self.indices]
        if not self.indices:
            raise HarnessError("at least one index is required")
        if self.heuristic not in HEURISTICS:
            raise HarnessError(f"unknown heuristic {self.heuristic!r}; expected one of {sorted(HEURISTICS)}")
        if self.hidden not in HIDDEN_STRATEGIES:
            raise HarnessError(f"unknown hidden-set strategy {self.hidden!r}")
        if self.reps < 1:
            raise HarnessError("repetitions must be at least 1")
        for name in ("hidden_size", "budget"):
            v = getattr(self, name)
            if v != "auto" and (not isinstance(v, int) or v < 0):
                raise HarnessError(f"{name} must be a non-negative integer or 'auto', got {v!r}")
        if self.hidden_size == 0:
            raise HarnessError("hidden_size must be positive")


# ---------------------------------------------------------------- helpers


def load_network(source: str, rng: Optional[np.random.Generator] = None) -> Graph:
    if looks_like_spec(source):
        return generate(parse_spec(source), rng)
    path = Path(source)
    if not path.is_file():
        raise HarnessError(f"cannot read network file {source!r}")
    return load_edge_list(path)


def network_meta(source: str) -> Dict[str, str]:
    if looks_like_spec(source):
        s = parse_spec(source)
        return {"model": s.model, "n": str(s.n), "d": str(s.d), "p": repr(s.p) if s.model == "sw" else ""}
    return {"model": "file", "n": "", "d": "", "p": ""}


def resolve_hidden_size(rule: Union[int, str], m: int) -> int:
    return max(10, m // 100) if rule == "auto" else int(rule)


def resolve_budget(rule: Union[int, str], hidden_size: int) -> int:
    return 4 * hidden_size if rule == "auto" else int(rule)


def _sample_nonedges(g: Graph, k: int, rng: np.random.Generator) -> List[Edge]:
    total = g.num_non_edges()
    if total < k:
        raise HarnessError(f"need {k} non-edges but the graph has {total}")
    if g.n <= 2000 or total < 4 * k:
        pool = list(g.non_edges())
        idx = rng.choice(len(pool), size=k, replace=False)
        return sorted(pool[i] for i in idx)
    out = set()
    while len(out) < k:
        a, b = (int(x) for x in rng.integers(g.n, size=2))
        if a != b and not g.has_edge(a, b):
            out.add(edge(a, b))
    return sorted(out)


def top_ranked_nonedges(g: Graph, kind: IndexKind, k: int, params: Optional[GlobalParams] = None) -> List[Edge]:
    """The ``k`` best-scored non-edges, ties to the smaller pair."""
    ss = score_graph(g, kind, params)
    order = np.lexsort((ss.cols, ss.rows, -ss.values))
    picked = [(int(ss.rows[i]), int(ss.cols[i])) for i in order if ss.values[i] > 0][:k]
    if len(picked) < k:
        # fill with zero-scored pairs in lexicographic order
        have = set(picked)
        for e in g.non_edges():
            if len(picked) >= k:
                break
            if e not in have:
                picked.append(e)
    if len(picked) < k:
        raise HarnessError(f"need {k} non-edges but the graph has {g.num_non_edges()}")
    return picked


def select_hidden(
    g: Graph, strategy: str, k: int, rng: np.random.Generator, rank_by: IndexKind = LocalIndex.CN,
    params: Optional[GlobalParams] = None,
) -> Tuple[Graph, List[Edge]]:
    """Returns the seeker's graph and the hidden pairs.

    ``remove-random-edges`` deletes ``k`` uniformly drawn edges and hides
    them; the other strategies leave the graph unchanged.
    """
    if strategy == "remove-random-edges":
        edges = list(g.edges())
        if len(edges) < k:
            raise HarnessError(f"cannot hide {k} edges of a graph with {len(edges)}")
        idx = rng.choice(len(edges), size=k, replace=False)
        hidden = sorted(edges[i] for i in idx)
        g = g.copy()
        for e in hidden:
            g.remove_edge(*e)
        return g, hidden
    if strategy == "random-nonedges":
        return g, _sample_nonedges(g, k, rng)
    if strategy == "top-ranked-nonedges":
        return g, top_ranked_nonedges(g, rank_by, k, params)
    raise HarnessError(f"unknown hidden-set strategy {strategy!r}")


def guard_global(indices: Sequence[IndexKind], n: int) -> None:
    if n > MAX_GLOBAL_NODES and any(isinstance(k, GlobalIndex) for k in indices):
        raise HarnessError(f"global indices need n <= {MAX_GLOBAL_NODES}; this network has {n} nodes")


def mean_ci(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and 95% normal-approximation half-width."""
    x = np.asarray(values, dtype=np.float64)
    x = x[~np.isnan(x)]
    if len(x) == 0:
        return math.nan, math.nan
    if len(x) == 1:
        return float(x[0]), 0.0
    return float(x.mean()), float(Z95 * x.std(ddof=1) / math.sqrt(len(x)))


def fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows to ``path``; ``-`` means standard output."""
    if str(path) == "-":
        _write_rows(sys.stdout, header, rows)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        _write_rows(fh, header, rows)


def _write_rows(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def _map(fn: Callable, items: List, workers: int) -> List:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# ------------------------------------------------------------ trajectories


@dataclass
class RepResult:
    rep: int
    hidden_size: int
    budget: int
    steps: int
    trajectories: Dict[IndexKind, Trajectory]


def _trajectory_rep(job: Tuple[ExperimentConfig, int]) -> RepResult:
    cfg, rep = job
    rng = rng_for(cfg.seed, rep)
    g = load_network(cfg.network, rng)
    guard_global(cfg.indices, g.n)
    h = resolve_hidden_size(cfg.hidden_size, g.m)
    g, hidden = select_hidden(g, cfg.hidden, h, rng, cfg.indices[0], cfg.params)
    b = resolve_budget(cfg.budget, h)
    inst = EvasionInstance(g, cfg.indices[0], frozenset(hidden), b, params=cfg.params)
    plan, _ = HEURISTICS[cfg.heuristic](inst, track=False)
    traj = replay(g, plan, hidden, cfg.indices, cfg.params)
    return RepResult(rep, h, b, len(plan), traj)


@dataclass
class AggregatedTrajectory:
    """Per-index, per-iteration means and 95% half-widths across repetitions."""

    config: ExperimentConfig
    iterations: int
    auc_mean: Dict[IndexKind, np.ndarray]
    auc_ci: Dict[IndexKind, np.ndarray]
    ap_mean: Dict[IndexKind, np.ndarray]
    ap_ci: Dict[IndexKind, np.ndarray]
    reps: List[RepResult]

    HEADER = (
        "network", "model", "n", "d", "p", "index", "heuristic", "hidden", "hidden_size", "budget",
        "reps", "seed", "iteration", "auc_mean", "auc_ci", "ap_mean", "ap_ci",
    )

    def delta(self, kind: IndexKind, metric: str = "auc") -> Tuple[float, float]:
        """Mean and half-width of the final-minus-initial change over repetitions."""
        vals = []
        for r in self.reps:
            t = r.trajectories[kind]
            series = t.auc if metric == "auc" else t.ap
            vals.append(series[-1] - series[0])
        return mean_ci(vals)

    def rows(self):
        cfg = self.config
        meta = network_meta(cfg.network)
        hs = {r.hidden_size for r in self.reps}
        bs = {r.budget for r in self.reps}
        h_out = hs.pop() if len(hs) == 1 else cfg.hidden_size
        b_out = bs.pop() if len(bs) == 1 else cfg.budget
        for k in cfg.indices:
            for it in range(self.iterations):
                yield (
                    cfg.network, meta["model"], meta["n"], meta["d"], meta["p"], k.value, cfg.heuristic,
                    cfg.hidden, h_out, b_out, cfg.reps, cfg.seed, it,
                    float(self.auc_mean[k][it]), float(self.auc_ci[k][it]),
                    float(self.ap_mean[k][it]), float(self.ap_ci[k][it]),
                )

    def write_csv(self, path) -> None:
        write_csv(path, self.HEADER, self.rows())


def run_trajectory_experiment(cfg: ExperimentConfig) -> AggregatedTrajectory:
    results = _map(_trajectory_rep, [(cfg, r) for r in range(cfg.reps)], cfg.workers)
    results.sort(key=lambda r: r.rep)
    length = max(r.budget for r in results) + 1
    out = {name: {} for name in ("auc_mean", "auc_ci", "ap_mean", "ap_ci")}
    for k in cfg.indices:
        padded = [r.trajectories[k].padded(length) for r in results]
        for metric in ("auc", "ap"):
            table = np.array([getattr(t, metric) for t in padded])
            stats = [mean_ci(table[:, i]) for i in range(length)]
            out[f"{metric}_mean"][k] = np.array([s[0] for s in stats])
            out[f"{metric}_ci"][k] = np.array([s[1] for s in stats])
    agg = AggregatedTrajectory(cfg, length, reps=results, **out)
    if cfg.out:
        agg.write_csv(cfg.out)
    return agg


# ------------------------------------------------------------------ sweeps


@dataclass
class SweepConfig:
    model: str = "sf"
    n_values: List[int] = field(default_factory=lambda: [200, 400, 600, 800, 1000])
    d_values: List[int] = field(default_factory=lambda: [2, 4, 6, 8, 10])
    p: float = 0.1
    indices: List[IndexKind] = field(default_factory=lambda: list(LocalIndex))
    heuristics: List[str] = field(default_factory=lambda: ["ctr"])
    hidden: str = "remove-random-edges"
    hidden_size: Union[int, str] = 100
    budget: Union[int, str] = 400
    reps: int = 10
    seed: int = 0
    out: Optional[str] = None
    params: GlobalParams = field(default_factory=GlobalParams)
    workers: int = 1

    def __post_init__(self):
        self.indices = [parse_index(k) for k in self.indices]
        if not self.n_values or not self.d_values:
            raise HarnessError("sweep grids must be nonempty")
        for h in self.heuristics:
            if h not in HEURISTICS:
                raise HarnessError(f"unknown heuristic {h!r}")
        if self.reps < 1:
            raise HarnessError("repetitions must be at least 1")

    def network(self, n: int, d: int) -> str:
        return f"sw:{n},{d},{self.p}" if self.model == "sw" else f"{self.model}:{n},{d}"


def relative_change(initial: float, final: float) -> float:
    """``(final - initial) / initial``; NaN when the initial value is zero."""
    if initial == 0:
        return math.nan
    return (final - initial) / initial


@dataclass
class SweepCell:
    n: int
    d: int
    heuristic: str
    auc_rel: Dict[IndexKind, List[float]]
    ap_rel: Dict[IndexKind, List[float]]


def _sweep_cell_rep(job) -> Tuple[Dict[IndexKind, float], Dict[IndexKind, float]]:
    cfg, n, d, heuristic, rep, cell = job
    rng = rng_for(cfg.seed, cell * 1_000_003 + rep)
    g = load_network(cfg.network(n, d), rng)
    guard_global(cfg.indices, g.n)
    h = resolve_hidden_size(cfg.hidden_size, g.m)
    g, hidden = select_hidden(g, cfg.hidden, h, rng, cfg.indices[0], cfg.params)
    b = resolve_budget(cfg.budget, h)
    inst = EvasionInstance(g, cfg.indices[0], frozenset(hidden), b, params=cfg.params)
    plan, _ = HEURISTICS[heuristic](inst, track=False)
    before = evaluate_hidden_many(g, cfg.indices, hidden, cfg.params)
    after = evaluate_hidden_many(plan.apply(g), cfg.indices, hidden, cfg.params)
    auc = {k: relative_change(before[k].auc, after[k].auc) for k in cfg.indices}
    ap = {k: relative_change(before[k].ap, after[k].ap) for k in cfg.indices}
    return auc, ap


@dataclass
class SweepResult:
    config: SweepConfig
    cells: List[SweepCell]

    HEADER = (
        "section", "model", "n", "d", "index", "heuristic", "hidden_size", "budget", "reps", "seed",
        "auc_rel_mean", "auc_rel_ci", "ap_rel_mean", "ap_rel_ci",
    )

    def marginal(self, heuristic: str, kind: IndexKind, by: str, metric: str = "auc") -> Dict[int, float]:
        """Average relative change per ``n`` (over d) or per ``d`` (over n)."""
        groups: Dict[int, List[float]] = {}
        for c in self.cells:
            if c.heuristic != heuristic:
                continue
            key = c.n if by == "n" else c.d
            vals = c.auc_rel[kind] if metric == "auc" else c.ap_rel[kind]
            groups.setdefault(key, []).append(float(np.nanmean(vals)) if not all(map(math.isnan, vals)) else math.nan)
        return {k: float(np.nanmean(v)) for k, v in sorted(groups.items())}

    def rows(self):
        cfg = self.config
        common = (cfg.hidden_size, cfg.budget, cfg.reps, cfg.seed)
        for c in self.cells:
            for k in cfg.indices:
                am, ac = mean_ci(c.auc_rel[k])
                pm, pc = mean_ci(c.ap_rel[k])
                yield ("cell", cfg.model, c.n, c.d, k.value, c.heuristic, *common, am, ac, pm, pc)
        for by in ("n", "d"):
            for heur in cfg.heuristics:
                for k in cfg.indices:
                    auc = self.marginal(heur, k, by, "auc")
                    ap = self.marginal(heur, k, by, "ap")
                    for key in auc:
                        n_col, d_col = (key, "*") if by == "n" else ("*", key)
                        yield (f"by_{by}", cfg.model, n_col, d_col, k.value, heur, *common, auc[key], "", ap[key], "")

    def write_csv(self, path) -> None:
        write_csv(path, self.HEADER, self.rows())


def run_tolerance_sweep(cfg: SweepConfig) -> SweepResult:
    jobs = []
    cell_keys = []
    cell = 0
    for heur in cfg.heuristics:
        for n in cfg.n_values:
            for d in cfg.d_values:
                cell_keys.append((n, d, heur))
                jobs.extend((cfg, n, d, heur, rep, cell) for rep in range(cfg.reps))
                cell += 1
    results = _map(_sweep_cell_rep, jobs, cfg.workers)
    cells = []
    for i, (n, d, heur) in enumerate(cell_keys):
        chunk = results[i * cfg.reps:(i + 1) * cfg.reps]
        cells.append(SweepCell(
            n, d, heur,
            {k: [r[0][k] for r in chunk] for k in cfg.indices},
            {k: [r[1][k] for r in chunk] for k in cfg.indices},
        ))
    res = SweepResult(cfg, cells)
    if cfg.out:
        res.write_csv(cfg.out)
    return res


# -------------------------------------------------------------- single link


@dataclass
class SingleLinkConfig:
    network: str = "sf:200,3"
    indices: List[IndexKind] = field(default_factory=lambda: list(LocalIndex))
    heuristic: str = "ctr"
    k: int = 1000
    budget: int = 10
    reps: int = 1
    seed: int = 0
    out: Optional[str] = None
    params: GlobalParams = field(default_factory=GlobalParams)
    workers: int = 1

    def __post_init__(self):
        self.indices = [parse_index(x) for x in self.indices]
        if self.heuristic not in HEURISTICS:
            raise HarnessError(f"unknown heuristic {self.heuristic!r}")
        if self.k < 1 or self.budget < 0 or self.reps < 1:
            raise HarnessError("k and reps must be positive and the budget non-negative")


def evader_instance(g: Graph, target: Edge, evader: int, kind: IndexKind, budget: int,
                    params: Optional[GlobalParams] = None) -> EvasionInstance:
    """Hide ``target`` using only pairs that touch ``evader``."""
    nb = g.adj(evader)
    target = edge(*target)
    addable = frozenset(edge(evader, u) for u in range(g.n) if u != evader and u not in nb) - {target}
    removable = frozenset(edge(evader, u) for u in nb)
    return EvasionInstance(g, kind, frozenset([target]), budget, addable=addable, removable=removable, params=params)


@dataclass
class SingleLinkRep:
    rep: int
    plans: List[Tuple[Edge, int, list]]
    auc: Dict[IndexKind, np.ndarray]
    ap: Dict[IndexKind, np.ndarray]


def _single_link_rep(job: Tuple[SingleLinkConfig, int]) -> SingleLinkRep:
    cfg, rep = job
    rng = rng_for(cfg.seed, rep)
    g = load_network(cfg.network, rng)
    guard_global(cfg.indices, g.n)
    if cfg.k > g.num_non_edges():
        raise HarnessError(f"k={cfg.k} exceeds the {g.num_non_edges()} non-edges")
    targets = top_ranked_nonedges(g, cfg.indices[0], cfg.k, cfg.params)
    length = cfg.budget + 1
    auc = {k: np.zeros(length) for k in cfg.indices}
    ap = {k: np.zeros(length) for k in cfg.indices}
    plans = []
    runs = 0
    for t in targets:
        for evader in t:
            inst = evader_instance(g, t, evader, cfg.indices[0], cfg.budget, cfg.params)
            plan, _ = HEURISTICS[cfg.heuristic](inst, track=False)
            plans.append((t, evader, list(plan.steps)))
            for k, traj in replay(g, plan, [t], cfg.indices, cfg.params).items():
                tp = traj.padded(length)
                auc[k] += tp.auc
                ap[k] += tp.ap
            runs += 1
    return SingleLinkRep(rep, plans, {k: v / runs for k, v in auc.items()}, {k: v / runs for k, v in ap.items()})


@dataclass
class SingleLinkResult:
    config: SingleLinkConfig
    reps: List[SingleLinkRep]

    HEADER = ("network", "index", "heuristic", "k", "budget", "reps", "seed", "iteration",
              "auc_mean", "auc_ci", "ap_mean", "ap_ci")

    def rows(self):
        cfg = self.config
        for k in cfg.indices:
            for it in range(cfg.budget + 1):
                am, ac = mean_ci([r.auc[k][it] for r in self.reps])
                pm, pc = mean_ci([r.ap[k][it] for r in self.reps])
                yield (cfg.network, k.value, cfg.heuristic, cfg.k, cfg.budget, cfg.reps, cfg.seed, it, am, ac, pm, pc)

    def write_csv(self, path) -> None:
        write_csv(path, self.HEADER, self.rows())


def run_single_link_scenario(cfg: SingleLinkConfig) -> SingleLinkResult:
    reps = _map(_single_link_rep, [(cfg, r) for r in range(cfg.reps)], cfg.workers)
    res = SingleLinkResult(cfg, sorted(reps, key=lambda r: r.rep))
    if cfg.out:
        res.write_csv(cfg.out)
    return res


# ------------------------------------------------------------------ timing


@dataclass
class BenchConfig:
    model: str = "sf"
    n_values: List[int] = field(default_factory=lambda: [1000, 10000, 100000])
    d: int = 3
    p: float = 0.1
    heuristics: List[str] = field(default_factory=lambda: ["ctr", "otc"])
    hidden_size: int = 100
    budget: int = 400
    reps: int = 1
    seed: int = 0
    out: Optional[str] = None

    def network(self, n: int) -> str:
        return f"sw:{n},{self.d},{self.p}" if self.model == "sw" else f"{self.model}:{n},{self.d}"


@dataclass
class BenchRow:
    n: int
    heuristic: str
    steps: List[int]
    run_seconds: List[float]
    total_seconds: List[float]


def time_heuristic(network: str, heuristic: str, hidden_size: int, budget: int, seed: int, rep: int = 0):
    """Seconds for the heuristic alone and end to end, plus the plan length."""
    t0 = time.perf_counter()
    rng = rng_for(seed, rep)
    g = load_network(network, rng)
    g, hidden = select_hidden(g, "remove-random-edges", hidden_size, rng)
    t1 = time.perf_counter()
    inst = EvasionInstance(g, LocalIndex.CN, frozenset(hidden), budget)
    plan, _ = HEURISTICS[heuristic](inst, track=False)
    t2 = time.perf_counter()
    return t2 - t1, t2 - t0, len(plan)


def run_runtime_benchmark(cfg: BenchConfig) -> List[BenchRow]:
    rows = []
    for heur in cfg.heuristics:
        for n in cfg.n_values:
            run, total, steps = [], [], []
            for rep in range(cfg.reps):
                a, b, s = time_heuristic(cfg.network(n), heur, cfg.hidden_size, cfg.budget, cfg.seed, rep)
                run.append(a)
                total.append(b)
                steps.append(s)
            rows.append(BenchRow(n, heur, steps, run, total))
    if cfg.out:
        header = ("model", "n", "d", "heuristic", "hidden_size", "budget", "reps", "seed", "steps",
                  "run_seconds_mean", "run_seconds_ci", "total_seconds_mean", "total_seconds_ci")
        body = []
        for r in rows:
            rm, rc = mean_ci(r.run_seconds)
            tm, tc = mean_ci(r.total_seconds)
            body.append((cfg.model, r.n, cfg.d, r.heuristic, cfg.hidden_size, cfg.budget, cfg.reps, cfg.seed,
                         min(r.steps), rm, rc, tm, tc))
        write_csv(cfg.out, header, body)
    return rows
