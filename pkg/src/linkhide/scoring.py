"""One scorer interface over local and global indices, plus hidden-set evaluation."""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .global_indices import GlobalIndex, GlobalParams, global_scores_sparse
from .graph import Edge, Graph, GraphError, edge
from .local_indices import LocalIndex, SparseScores, all_local_scores_sparse
from .metrics import RankingEvaluation, ap_from_arrays, auc_from_arrays

IndexKind = Union[LocalIndex, GlobalIndex]


def parse_index(name: Union[str, LocalIndex, GlobalIndex]) -> IndexKind:
    if isinstance(name, (LocalIndex, GlobalIndex)):
        return name
    key = name.strip().lower()
    for enum_cls in (LocalIndex, GlobalIndex):
        try:
            return enum_cls(key)
        except ValueError:
            pass
    raise ValueError(f"unknown similarity index {name!r}")


def parse_index_list(text: str) -> List[IndexKind]:
    """Comma-separated names; ``local``, ``global`` and ``all`` expand to groups."""
    out: List[IndexKind] = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        if tok in ("local", "all"):
            out.extend(LocalIndex)
        if tok in ("global", "all"):
            out.extend(GlobalIndex)
        if tok not in ("local", "global", "all"):
            out.append(parse_index(tok))
    seen = set()
    return [k for k in out if not (k in seen or seen.add(k))]


def score_graph(g: Graph, kind: IndexKind, params: Optional[GlobalParams] = None) -> SparseScores:
    kind = parse_index(kind)
    if isinstance(kind, LocalIndex):
        return all_local_scores_sparse(g, [kind])[kind]
    return global_scores_sparse(g, kind, params)


def score_graph_many(g: Graph, kinds: Sequence[IndexKind], params: Optional[GlobalParams] = None) -> Dict[IndexKind, SparseScores]:
    kinds = [parse_index(k) for k in kinds]
    local = [k for k in kinds if isinstance(k, LocalIndex)]
    out: Dict[IndexKind, SparseScores] = {}
    if local:
        out.update(all_local_scores_sparse(g, local))
    for k in kinds:
        if isinstance(k, GlobalIndex):
            out[k] = global_scores_sparse(g, k, params)
    return {k: out[k] for k in kinds}


def evaluate_scores(ss: SparseScores, hidden: Iterable[Edge]) -> RankingEvaluation:
    """AUC and AP with probe set ``hidden`` against every other non-edge.

    When the hidden pairs are the only non-edges left there is nothing to
    compare against; AUC is then reported as 0.5 and AP is 1.
    """
    hk = np.array(sorted(a * ss.n + b for a, b in (edge(*h) for h in hidden)), dtype=np.int64)
    keys = ss.keys
    pos = np.searchsorted(keys, hk)
    found = pos < len(keys)
    found[found] = keys[pos[found]] == hk[found]
    probe = np.zeros(len(hk))
    probe[found] = ss.values[pos[found]]
    if ss.dense and not found.all():
        raise GraphError("a hidden pair is not a non-edge of the scored graph")
    mask = np.ones(len(keys), dtype=bool)
    mask[pos[found]] = False
    zeros = ss.implicit_zeros() - int((~found).sum())
    if zeros < 0:
        raise GraphError("hidden pairs outnumber the non-edges")
    rest = np.concatenate([ss.values[mask], [0.0]])
    counts = np.concatenate([np.ones(int(mask.sum()), dtype=np.int64), [zeros]])
    if zeros == 0:
        rest, counts = rest[:-1], counts[:-1]
    if counts.sum() == 0:
        return RankingEvaluation(0.5, ap_from_arrays(probe, rest, counts))
    return RankingEvaluation(auc_from_arrays(probe, rest, counts), ap_from_arrays(probe, rest, counts))


def evaluate_hidden(g: Graph, kind: IndexKind, hidden: Iterable[Edge], params: Optional[GlobalParams] = None) -> RankingEvaluation:
    hidden = list(hidden)
    for a, b in hidden:
        if g.has_edge(a, b):
            raise GraphError(f"hidden pair {(a, b)} is an edge of the graph")
    return evaluate_scores(score_graph(g, kind, params), hidden)


def evaluate_hidden_many(
    g: Graph, kinds: Sequence[IndexKind], hidden: Iterable[Edge], params: Optional[GlobalParams] = None
) -> Dict[IndexKind, RankingEvaluation]:
    hidden = list(hidden)
    for a, b in hidden:
        if g.has_edge(a, b):
            raise GraphError(f"hidden pair {(a, b)} is an edge of the graph")
    return {k: evaluate_scores(ss, hidden) for k, ss in score_graph_many(g, kinds, params).items()}
