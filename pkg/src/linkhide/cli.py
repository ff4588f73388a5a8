"""Command-line entry point: ``linkhide <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .evasion import EvasionInstance, Metric, brute_force_optimum
from .generators import rng_for
from .global_indices import GlobalParams
from .harness import (
    BenchConfig,
    ExperimentConfig,
    HarnessError,
    SingleLinkConfig,
    SweepConfig,
    guard_global,
    load_network,
    resolve_budget,
    resolve_hidden_size,
    run_runtime_benchmark,
    run_single_link_scenario,
    run_tolerance_sweep,
    run_trajectory_experiment,
    select_hidden,
    write_csv,
)
from .scoring import parse_index_list, score_graph


def _int_or_auto(text: str):
    text = str(text).strip()
    return "auto" if text == "auto" else int(text)


def _int_list(text: str) -> List[int]:
    return [int(x) for x in str(text).split(",") if x.strip()]


def _str_list(text: str) -> List[str]:
    return [x.strip() for x in str(text).split(",") if x.strip()]


CONVERTERS = {
    "network": str,
    "index": str,
    "heuristic": str,
    "hidden": str,
    "hidden_size": _int_or_auto,
    "budget": _int_or_auto,
    "reps": int,
    "seed": int,
    "out": str,
    "workers": int,
    "model": str,
    "n_values": _int_list,
    "d_values": _int_list,
    "d": int,
    "p": float,
    "k": int,
    "metric": str,
    "nonzero_only": lambda s: str(s).lower() in ("1", "true", "yes", "on"),
    "cap": int,
}


def read_config(path) -> Dict[str, object]:
    """``key = value`` lines; ``#`` starts a comment."""
    out: Dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise HarnessError(f"{path}:{lineno}: expected key=value")
        key = key.strip().replace("-", "_")
        if key not in CONVERTERS:
            raise HarnessError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = CONVERTERS[key](value.strip())
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    common.add_argument("--network", help="edge-list path or model string (sf:n,d | sw:n,d,p | er:n,d)")
    common.add_argument("--index", help="comma list of indices, or local/global/all")
    common.add_argument("--heuristic", help="ctr, otc or alt (sweep/bench accept a comma list)")
    common.add_argument("--hidden", help="remove-random-edges, random-nonedges or top-ranked-nonedges")
    common.add_argument("--hidden-size", type=_int_or_auto, help="integer or 'auto'")
    common.add_argument("--budget", type=_int_or_auto, help="integer or 'auto'")
    common.add_argument("--reps", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path")
    common.add_argument("--workers", type=int, help="parallel worker processes")

    p = argparse.ArgumentParser(prog="linkhide", description="Link-prediction evasion experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("trajectory", parents=[common], help="metric trajectories while a heuristic runs")
    sw = sub.add_parser("sweep", parents=[common], help="relative metric change over an (n, d) grid")
    sw.add_argument("--model", choices=["sf", "sw", "er"])
    sw.add_argument("--n-values", type=_int_list)
    sw.add_argument("--d-values", type=_int_list)
    sw.add_argument("--p", type=float, help="rewiring probability for sw")
    sl = sub.add_parser("single-link", parents=[common], help="hide top-ranked pairs one at a time")
    sl.add_argument("--k", type=int, help="number of top-ranked non-edges")
    be = sub.add_parser("bench", parents=[common], help="wall-clock runtime of the heuristics")
    be.add_argument("--model", choices=["sf", "sw", "er"])
    be.add_argument("--n-values", type=_int_list)
    be.add_argument("--d", type=int)
    be.add_argument("--p", type=float)
    sc = sub.add_parser("score", parents=[common], help="dump non-edge scores for one index")
    sc.add_argument("--nonzero-only", action="store_const", const=True)
    orc = sub.add_parser("oracle", parents=[common], help="exhaustive optimum on a small instance")
    orc.add_argument("--metric", choices=["auc", "ap"])
    orc.add_argument("--cap", type=int)
    return p


def merged_options(args: argparse.Namespace) -> Dict[str, object]:
    opts: Dict[str, object] = {}
    if args.config:
        opts.update(read_config(args.config))
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        opts[key] = value
    return opts


def _pick(opts, keys, rename=None) -> Dict[str, object]:
    rename = rename or {}
    return {rename.get(k, k): opts[k] for k in keys if k in opts}


def cmd_trajectory(opts) -> int:
    kw = _pick(opts, ["network", "heuristic", "hidden", "hidden_size", "budget", "reps", "seed", "out", "workers"])
    if "index" in opts:
        kw["indices"] = parse_index_list(opts["index"])
    agg = run_trajectory_experiment(ExperimentConfig(**kw))
    if not agg.config.out:
        agg.write_csv("-")
    return 0


def cmd_sweep(opts) -> int:
    kw = _pick(opts, ["model", "n_values", "d_values", "p", "hidden", "hidden_size", "budget", "reps", "seed", "out", "workers"])
    if "index" in opts:
        kw["indices"] = parse_index_list(opts["index"])
    if "heuristic" in opts:
        kw["heuristics"] = _str_list(opts["heuristic"])
    res = run_tolerance_sweep(SweepConfig(**kw))
    if not res.config.out:
        res.write_csv("-")
    return 0


def cmd_single_link(opts) -> int:
    kw = _pick(opts, ["network", "heuristic", "k", "budget", "reps", "seed", "out", "workers"])
    if kw.get("budget") == "auto":
        kw["budget"] = 10
    if "index" in opts:
        kw["indices"] = parse_index_list(opts["index"])
    res = run_single_link_scenario(SingleLinkConfig(**kw))
    if not res.config.out:
        res.write_csv("-")
    return 0


def cmd_bench(opts) -> int:
    kw = _pick(opts, ["model", "n_values", "d", "p", "hidden_size", "budget", "reps", "seed"])
    if "heuristic" in opts:
        kw["heuristics"] = _str_list(opts["heuristic"])
    for key in ("hidden_size", "budget"):
        if kw.get(key) == "auto":
            raise HarnessError(f"bench needs an explicit --{key.replace('_', '-')}")
    kw["out"] = opts.get("out", "-")
    run_runtime_benchmark(BenchConfig(**kw))
    return 0


def cmd_score(opts) -> int:
    kinds = parse_index_list(opts.get("index", "cn"))
    if len(kinds) != 1:
        raise HarnessError("score takes exactly one index")
    g = load_network(opts.get("network", "sf:100,3"), rng_for(opts.get("seed", 0)))
    guard_global(kinds, g.n)
    ss = score_graph(g, kinds[0])
    if opts.get("nonzero_only"):
        rows = ((int(a), int(b), float(s)) for a, b, s in zip(ss.rows, ss.cols, ss.values) if s != 0)
    else:
        rows = ((a, b, s) for (a, b), s in ss.as_dict(g).items())
    write_csv(opts.get("out", "-"), ("a", "b", "score"), rows)
    return 0


def cmd_oracle(opts) -> int:
    kinds = parse_index_list(opts.get("index", "cn"))
    rng = rng_for(opts.get("seed", 0))
    g = load_network(opts.get("network", "er:8,3"), rng)
    h = resolve_hidden_size(opts.get("hidden_size", 1), g.m)
    g, hidden = select_hidden(g, opts.get("hidden", "remove-random-edges"), h, rng, kinds[0])
    b = resolve_budget(opts.get("budget", 2), h)
    inst = EvasionInstance(g, kinds[0], frozenset(hidden), b, metric=Metric(opts.get("metric", "auc")))
    plan, value = brute_force_optimum(inst, cap=opts.get("cap", 2_000_000))
    header = "".join(f"# hidden {a} {b}\n" for a, b in sorted(hidden))
    text = header + f"# {inst.metric.value} {value!r}\n" + plan.to_text()
    if "out" in opts:
        Path(opts["out"]).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "trajectory": cmd_trajectory,
    "sweep": cmd_sweep,
    "single-link": cmd_single_link,
    "bench": cmd_bench,
    "score": cmd_score,
    "oracle": cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = merged_options(args)
        return COMMANDS[args.command](opts)
    except (HarnessError, ValueError, OSError) as exc:
        print(f"linkhide {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
