"""Tie-aware ranking metrics: AUC, average precision, ROC and PR points.

Ties are exact floating-point equality. AUC counts a tied (probe, rest)
pair as one half; AP uses the tie-corrected rank of each probe element.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import AbstractSet, List, Mapping, Optional, Tuple

import numpy as np

from .graph import Edge


class MetricError(ValueError):
    pass


@dataclass
class ScoredRanking:
    """Scores over all non-edges, split into the probe set and the rest."""

    scores: Mapping[Edge, float]
    probe: AbstractSet[Edge]
    rest: AbstractSet[Edge] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        probe = frozenset(self.probe)
        missing = [e for e in probe if e not in self.scores]
        if missing:
            raise MetricError(f"probe elements are not scored non-edges: {sorted(missing)[:5]}")
        if self.rest is None:
            self.rest = frozenset(e for e in self.scores if e not in probe)
        else:
            rest = frozenset(self.rest)
            if rest & probe:
                raise MetricError("probe and rest overlap")
            if len(rest) + len(probe) != len(self.scores) or any(e not in self.scores for e in rest):
                raise MetricError("probe and rest must partition the scored non-edges")
            self.rest = rest
        self.probe = probe

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        q = np.array([self.scores[e] for e in sorted(self.probe)], dtype=np.float64)
        x = np.array([self.scores[e] for e in sorted(self.rest)], dtype=np.float64)
        return q, x


@dataclass(frozen=True)
class RankingEvaluation:
    auc: float
    ap: float


def _compress(values: np.ndarray, counts: Optional[np.ndarray] = None):
    """Sorted distinct values with multiplicities."""
    if counts is None:
        return np.unique(values, return_counts=True)
    order = np.argsort(values, kind="stable")
    v, c = values[order], np.asarray(counts)[order]
    starts = np.flatnonzero(np.r_[True, v[1:] != v[:-1]]) if len(v) else np.zeros(0, dtype=np.int64)
    return v[starts], np.add.reduceat(c, starts) if len(v) else c


def _below_and_equal(sorted_vals: np.ndarray, counts: np.ndarray, query: np.ndarray):
    """For each query value: multiplicity strictly below, and equal to it."""
    cum = np.r_[0, np.cumsum(counts)]
    lo = np.searchsorted(sorted_vals, query, side="left")
    hi = np.searchsorted(sorted_vals, query, side="right")
    return cum[lo], cum[hi] - cum[lo]


def auc_from_arrays(probe: np.ndarray, rest: np.ndarray, rest_counts: Optional[np.ndarray] = None) -> float:
    """AUC of probe scores against rest scores.

    ``rest_counts`` optionally gives a multiplicity for each rest value, so a
    large block of identical scores can be passed as a single entry.
    """
    probe = np.asarray(probe, dtype=np.float64)
    rest = np.asarray(rest, dtype=np.float64)
    vals, counts = _compress(rest, rest_counts)
    n_rest = int(counts.sum()) if len(counts) else 0
    if len(probe) == 0 or n_rest == 0:
        raise MetricError("AUC needs a nonempty probe set and a nonempty rest set")
    below, equal = _below_and_equal(vals, counts, probe)
    # integer-valued numerator: 2*below + equal, halved once at the end
    twice = int(2 * below.sum() + equal.sum())
    return twice / (2 * len(probe) * n_rest)


def ap_from_arrays(probe: np.ndarray, rest: np.ndarray, rest_counts: Optional[np.ndarray] = None) -> float:
    """Tie-aware average precision of probe scores among probe and rest."""
    probe = np.asarray(probe, dtype=np.float64)
    rest = np.asarray(rest, dtype=np.float64)
    if len(probe) == 0:
        raise MetricError("average precision needs a nonempty probe set")
    qv, qc = _compress(probe)
    rv, rc = _compress(rest, rest_counts)
    n_q = len(probe)
    n_r = int(rc.sum()) if len(rc) else 0
    q_below, q_eq = _below_and_equal(qv, qc, probe)
    if len(rv):
        r_below, r_eq = _below_and_equal(rv, rc, probe)
    else:
        r_below = r_eq = np.zeros(len(probe), dtype=np.int64)
    q_above = n_q - q_below - q_eq
    r_above = n_r - r_below - r_eq
    # q_eq includes the element itself
    num = 2 * q_above + 2 + (q_eq - 1)
    den = 2 * (q_above + r_above) + 2 + (q_eq - 1 + r_eq)
    return float(np.mean(num / den))


def auc(r: ScoredRanking) -> float:
    q, x = r.arrays()
    return auc_from_arrays(q, x)


def average_precision(r: ScoredRanking) -> float:
    q, x = r.arrays()
    return ap_from_arrays(q, x)


def evaluate(r: ScoredRanking) -> RankingEvaluation:
    return RankingEvaluation(auc(r), average_precision(r))


def _tie_broken_order(r: ScoredRanking) -> Tuple[List[Edge], bool]:
    """Non-edges by descending score, ties broken by normalized edge order."""
    items = sorted(r.scores.items(), key=lambda kv: (-kv[1], kv[0]))
    vals = [s for _, s in items]
    tied = any(a == b for a, b in zip(vals, vals[1:]))
    return [e for e, _ in items], tied


@dataclass
class Curve:
    points: List[Tuple[float, float]]
    tie_broken: bool

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y"])
            for x, y in self.points:
                w.writerow([repr(float(x)), repr(float(y))])


def _require_split(r: ScoredRanking) -> None:
    if not r.probe or not r.rest:
        raise MetricError("curves need nonempty probe and rest sets")


def roc_points(r: ScoredRanking) -> Curve:
    _require_split(r)
    order, tied = _tie_broken_order(r)
    nq, nx = len(r.probe), len(r.rest)
    hits = 0
    pts = []
    for k, e in enumerate(order, start=1):
        hits += e in r.probe
        pts.append(((k - hits) / nx, hits / nq))
    return Curve(pts, tied)


def pr_points(r: ScoredRanking) -> Curve:
    _require_split(r)
    order, tied = _tie_broken_order(r)
    nq = len(r.probe)
    hits = 0
    pts = []
    for k, e in enumerate(order, start=1):
        hits += e in r.probe
        pts.append((hits / nq, hits / k))
    return Curve(pts, tied)
