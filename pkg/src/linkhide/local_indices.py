"""Local (neighbourhood-based) similarity indices.

Each index scores a non-edge ``(v, w)`` from ``|N(v, w)|``, the endpoint
degrees and, for Adamic-Adar and Resource Allocation, the degrees of the
common neighbours. Adamic-Adar uses the natural logarithm; any other base
rescales every score by the same constant, so rankings do not change.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

import numpy as np
import scipy.sparse as ssp

from .graph import Edge, Graph, GraphError, edge


class LocalIndex(str, enum.Enum):
    CN = "cn"
    SALTON = "salton"
    JACCARD = "jaccard"
    SORENSEN = "sorensen"
    HPI = "hpi"
    HDI = "hdi"
    LHN = "lhn"
    AA = "aa"
    RA = "ra"

    @classmethod
    def parse(cls, name: str) -> "LocalIndex":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown local index {name!r}") from None


LOCAL_INDICES: Tuple[LocalIndex, ...] = tuple(LocalIndex)


@dataclass(frozen=True)
class FactorProfile:
    increases_with_common_neighbors: bool
    sensitive_to_endpoint_degree: bool
    sensitive_to_common_neighbor_degree: bool


_DEGREE_FREE = {LocalIndex.CN, LocalIndex.AA, LocalIndex.RA}
_NEIGHBOUR_DEGREE = {LocalIndex.AA, LocalIndex.RA}


def factor_profile(kind: LocalIndex) -> FactorProfile:
    kind = LocalIndex(kind)
    return FactorProfile(
        increases_with_common_neighbors=True,
        sensitive_to_endpoint_degree=kind not in _DEGREE_FREE,
        sensitive_to_common_neighbor_degree=kind in _NEIGHBOUR_DEGREE,
    )


class NotANonEdgeError(GraphError):
    pass


def _from_counts(kind: LocalIndex, cn: int, dv: int, dw: int) -> float:
    if kind is LocalIndex.CN:
        return float(cn)
    if kind is LocalIndex.SALTON:
        return cn / math.sqrt(dv * dw)
    if kind is LocalIndex.JACCARD:
        return cn / (dv + dw - cn)
    if kind is LocalIndex.SORENSEN:
        return 2 * cn / (dv + dw)
    if kind is LocalIndex.HPI:
        return cn / min(dv, dw)
    if kind is LocalIndex.HDI:
        return cn / max(dv, dw)
    if kind is LocalIndex.LHN:
        return cn / (dv * dw)
    raise AssertionError(kind)


def _neighbour_weight(kind: LocalIndex, d: int) -> float:
    return 1.0 / math.log(d) if kind is LocalIndex.AA else 1.0 / d


def local_score(g: Graph, e: Tuple[int, int], kind: LocalIndex) -> float:
    """Score of the non-edge ``e`` under ``kind``.

    Raises :class:`NotANonEdgeError` when ``e`` is an edge of ``g``.
    """
    kind = LocalIndex(kind)
    v, w = edge(*e)
    if g.has_edge(v, w):
        raise NotANonEdgeError(f"{(v, w)} is an edge; indices are defined on non-edges only")
    common = g.common_neighbors(v, w)
    if not common:
        return 0.0
    if kind is LocalIndex.AA or kind is LocalIndex.RA:
        degs = sorted(g.degree(u) for u in common)
        # every common neighbour touches both v and w, so log(d) > 0
        assert degs[0] >= 2
        total = 0.0
        for d in degs:
            total += _neighbour_weight(kind, d)
        return total
    return _from_counts(kind, len(common), g.degree(v), g.degree(w))


def local_score_all(g: Graph, kind: LocalIndex) -> Dict[Edge, float]:
    """Every non-edge of ``g`` mapped to its score, in lexicographic order."""
    return {e: local_score(g, e, kind) for e in g.non_edges()}


@dataclass
class SparseScores:
    """Non-edge scores where every unlisted non-edge scores exactly zero.

    ``rows < cols`` elementwise and the pairs are sorted lexicographically.
    ``dense`` marks results that list every non-edge explicitly.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    num_non_edges: int
    dense: bool = False

    @property
    def keys(self) -> np.ndarray:
        return self.rows.astype(np.int64) * self.n + self.cols

    def implicit_zeros(self) -> int:
        return self.num_non_edges - len(self.values)

    def as_dict(self, g: Graph) -> Dict[Edge, float]:
        """Expand to a full non-edge map of ``g`` (small graphs only)."""
        explicit = {(int(a), int(b)): float(s) for a, b, s in zip(self.rows, self.cols, self.values)}
        if self.dense:
            return explicit
        return {e: explicit.get(e, 0.0) for e in g.non_edges()}


def _two_hop_pairs(A: ssp.csr_matrix, mask: ssp.csr_matrix):
    """Upper-triangular non-adjacent pairs with at least one common neighbour."""
    C = (A @ A).tocoo()
    keep = C.row < C.col
    r, c = C.row[keep], C.col[keep]
    if len(r) == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    adjacent = np.asarray(mask[r, c]).ravel() != 0
    r, c = r[~adjacent], c[~adjacent]
    vals = C.data[keep][~adjacent]
    order = np.lexsort((c, r))
    return r[order].astype(np.int64), c[order].astype(np.int64), vals[order]


def _common_layout(A: ssp.csr_matrix, deg: np.ndarray, r: np.ndarray, c: np.ndarray):
    """Common neighbours of each pair ``(r, c)``, ascending by degree.

    Returns the flat neighbour array and, per pair, its segment start and
    length. Every listed pair has at least one common neighbour.
    """
    M = A[r].multiply(A[c]).tocsr()
    M.sort_indices()
    lengths = np.diff(M.indptr)
    row = np.repeat(np.arange(M.shape[0]), lengths)
    u = M.indices
    order = np.lexsort((deg[u], row))
    return u[order], M.indptr[:-1], lengths


def _weighted_common(layout, weight: np.ndarray) -> np.ndarray:
    """Sum ``weight[u]`` over each pair's common neighbours.

    Terms are added one at a time in ascending degree order, the same
    order :func:`local_score` uses, so both paths give identical bits.
    """
    u, starts, lengths = layout
    if len(lengths) == 0:
        return np.zeros(0)
    terms = weight[u]
    # longest segments first, so the pairs still summing at step j are a prefix
    by_len = np.argsort(-lengths, kind="stable")
    seg_start = starts[by_len]
    live = np.searchsorted(-lengths[by_len], -np.arange(int(lengths.max())), side="left")
    acc = np.zeros(len(lengths))
    for j, k in enumerate(live):
        acc[:k] += terms[seg_start[:k] + j]
    out = np.empty_like(acc)
    out[by_len] = acc
    return out


def local_scores_sparse(g: Graph, kind: LocalIndex) -> SparseScores:
    """Batch-score all non-edges with a nonzero score.

    Agrees with :func:`local_score` to floating-point rounding; all pairs not
    listed have no common neighbour and therefore score zero.
    """
    return all_local_scores_sparse(g, [kind])[LocalIndex(kind)]


def all_local_scores_sparse(g: Graph, kinds: Iterable[LocalIndex] = LOCAL_INDICES) -> Dict[LocalIndex, SparseScores]:
    """Like :func:`local_scores_sparse` for several kinds, sharing the 2-hop pass."""
    kinds = [LocalIndex(k) for k in kinds]
    n = g.n
    A = g.adjacency_matrix()
    r, c, cn = _two_hop_pairs(A, A)
    deg = g.degrees().astype(np.float64)
    dv, dw = deg[r], deg[c]
    out: Dict[LocalIndex, SparseScores] = {}
    layout = None
    for kind in kinds:
        if kind is LocalIndex.CN:
            vals = cn.astype(np.float64)
        elif kind is LocalIndex.SALTON:
            vals = cn / np.sqrt(dv * dw)
        elif kind is LocalIndex.JACCARD:
            vals = cn / (dv + dw - cn)
        elif kind is LocalIndex.SORENSEN:
            vals = 2 * cn / (dv + dw)
        elif kind is LocalIndex.HPI:
            vals = cn / np.minimum(dv, dw)
        elif kind is LocalIndex.HDI:
            vals = cn / np.maximum(dv, dw)
        elif kind is LocalIndex.LHN:
            vals = cn / (dv * dw)
        else:
            table = {int(d): _neighbour_weight(kind, int(d)) for d in np.unique(deg) if d >= 2}
            w = np.array([table.get(int(d), 0.0) for d in deg])
            if layout is None:
                layout = _common_layout(A, deg, r, c)
            vals = _weighted_common(layout, w)
        out[kind] = SparseScores(n, r, c, np.asarray(vals, dtype=np.float64), g.num_non_edges())
    return out
