"""Global similarity indices computed from dense whole-graph matrices.

All routines here are dense O(n^3); callers keep ``n`` to a few thousand.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, fields, replace
from typing import Dict, Mapping, Optional

import numpy as np
import scipy.linalg as sla

from .graph import Edge, Graph, GraphError
from .local_indices import SparseScores

MAX_GLOBAL_NODES = 2000


class GlobalIndex(str, enum.Enum):
    KATZ = "katz"
    LHNG = "lhng"
    ACT = "act"
    COS = "cos"
    RWR = "rwr"
    SIMRANK = "simrank"
    MFI = "mfi"

    @classmethod
    def parse(cls, name: str) -> "GlobalIndex":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown global index {name!r}") from None


GLOBAL_INDICES = tuple(GlobalIndex)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} after {iterations} iterations")
        self.iterations = iterations


class SingularSystemError(GraphError):
    pass


@dataclass(frozen=True)
class GlobalParams:
    """Parameters of the global indices.

    Katz uses ``beta = katz_beta_factor / lambda*``; the default factor 1/2
    keeps beta strictly below the convergence radius.
    """

    katz_beta_factor: float = 0.5
    lhn_phi: float = 0.97
    rwr_return: float = 0.75
    simrank_decay: float = 0.8
    simrank_max_iters: int = 100
    simrank_tolerance: float = 1e-6
    eigen_tolerance: float = 1e-10
    eigen_max_iters: int = 10_000

    def __post_init__(self):
        if not 0 < self.katz_beta_factor < 1:
            raise ValueError("katz_beta_factor must lie in (0, 1)")
        if not 0 < self.rwr_return < 1:
            raise ValueError("rwr_return must lie in (0, 1)")
        if not 0 < self.simrank_decay < 1:
            raise ValueError("simrank_decay must lie in (0, 1)")
        if not 0 < self.lhn_phi < 1:
            raise ValueError("lhn_phi must lie in (0, 1)")
        if self.simrank_max_iters < 1 or self.eigen_max_iters < 1:
            raise ValueError("iteration limits must be positive")
        if self.simrank_tolerance <= 0 or self.eigen_tolerance <= 0:
            raise ValueError("tolerances must be positive")

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "GlobalParams":
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise KeyError(f"unknown global parameter {key!r}")
            kwargs[key] = int(raw) if key.endswith("iters") else float(raw)
        return replace(cls(), **kwargs)


@dataclass
class SimilarityMatrix:
    kind: GlobalIndex
    S: np.ndarray

    @property
    def n(self) -> int:
        return self.S.shape[0]


def largest_eigenvalue(g: Graph, params: GlobalParams = GlobalParams()) -> float:
    """Spectral radius of the adjacency matrix by power iteration.

    Iterates with ``A + I`` so that bipartite graphs (eigenvalues ``±lambda``)
    still converge; the shift is removed from the Rayleigh quotient.
    """
    if g.m == 0:
        raise GraphError("largest eigenvalue is zero on an edgeless graph")
    A = g.adjacency_matrix()
    x = np.full(g.n, 1.0 / np.sqrt(g.n))
    lam = 0.0
    for it in range(1, params.eigen_max_iters + 1):
        y = A @ x + x
        norm = np.linalg.norm(y)
        y /= norm
        new = float(y @ (A @ y))
        if abs(new - lam) <= params.eigen_tolerance * max(1.0, abs(new)) and np.linalg.norm(y - x) < 1e-6:
            return new
        lam, x = new, y
    raise ConvergenceError("power iteration did not converge", params.eigen_max_iters)


def laplacian(g: Graph) -> np.ndarray:
    A = g.adjacency_matrix(dense=True)
    return np.diag(A.sum(axis=1)) - A


def laplacian_pseudoinverse(g: Graph) -> np.ndarray:
    """Moore-Penrose pseudoinverse of ``D - A`` via symmetric eigendecomposition."""
    L = laplacian(g)
    if g.n == 0:
        return L
    vals, vecs = np.linalg.eigh(L)
    top = max(abs(vals).max(), 0.0)
    keep = vals > 1e-10 * top if top > 0 else np.zeros_like(vals, dtype=bool)
    inv = np.zeros_like(vals)
    inv[keep] = 1.0 / vals[keep]
    return (vecs * inv) @ vecs.T


def _solve_inverse(M: np.ndarray, what: str) -> np.ndarray:
    try:
        with warnings.catch_warnings():
            # exact singularity is reported below as an exception
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(M, check_finite=True)
    except (ValueError, sla.LinAlgError) as exc:
        raise SingularSystemError(f"{what} is singular") from exc
    if np.any(np.abs(np.diag(lu)) < 1e-14 * max(1.0, np.abs(M).max())):
        raise SingularSystemError(f"{what} is singular")
    return sla.lu_solve((lu, piv), np.eye(M.shape[0]))


def _katz(g: Graph, params: GlobalParams) -> np.ndarray:
    lam = largest_eigenvalue(g, params)
    beta = params.katz_beta_factor / lam
    A = g.adjacency_matrix(dense=True)
    n = g.n
    return _solve_inverse(np.eye(n) - beta * A, "I - beta*A") - np.eye(n)


def _lhng(g: Graph, params: GlobalParams) -> np.ndarray:
    lam = largest_eigenvalue(g, params)
    A = g.adjacency_matrix(dense=True)
    n = g.n
    deg = A.sum(axis=1)
    dinv = np.zeros(n)
    dinv[deg > 0] = 1.0 / deg[deg > 0]
    core = _solve_inverse(np.eye(n) - (params.lhn_phi / lam) * A, "I - phi*A/lambda")
    return 2 * g.m * lam * (dinv[:, None] * core * dinv[None, :])


def _act(Lp: np.ndarray) -> np.ndarray:
    diag = np.diag(Lp)
    denom = diag[:, None] + diag[None, :] - 2 * Lp
    S = np.zeros_like(Lp)
    ok = denom > 1e-12
    S[ok] = 1.0 / denom[ok]
    np.fill_diagonal(S, 0.0)
    return S


def _cosine(Lp: np.ndarray) -> np.ndarray:
    diag = np.diag(Lp)
    norm = np.sqrt(np.clip(np.outer(diag, diag), 0.0, None))
    S = np.zeros_like(Lp)
    ok = norm > 1e-15
    S[ok] = Lp[ok] / norm[ok]
    return S


def transition_matrix(g: Graph) -> np.ndarray:
    A = g.adjacency_matrix(dense=True)
    deg = A.sum(axis=1)
    P = np.zeros_like(A)
    nz = deg > 0
    # isolated nodes keep an all-zero row: the walker is absorbed
    P[nz] = A[nz] / deg[nz, None]
    return P


def rwr_matrix(g: Graph, params: GlobalParams = GlobalParams()) -> np.ndarray:
    c = params.rwr_return
    n = g.n
    P = transition_matrix(g)
    return (1 - c) * _solve_inverse(np.eye(n) - c * P.T, "I - c*P^T")


def simrank(g: Graph, params: GlobalParams = GlobalParams()) -> np.ndarray:
    A = g.adjacency_matrix(dense=True)
    n = g.n
    deg = A.sum(axis=1)
    W = np.zeros_like(A)
    nz = deg > 0
    W[nz] = A[nz] / deg[nz, None]
    c = params.simrank_decay
    S = np.eye(n)
    for it in range(1, params.simrank_max_iters + 1):
        new = c * (W @ S @ W.T)
        np.fill_diagonal(new, 1.0)
        delta = np.abs(new - S).max()
        S = new
        if delta < params.simrank_tolerance:
            return S
    raise ConvergenceError("SimRank did not converge", params.simrank_max_iters)


def global_similarity(g: Graph, kind: GlobalIndex, params: GlobalParams = GlobalParams()) -> SimilarityMatrix:
    kind = GlobalIndex(kind)
    if g.n > MAX_GLOBAL_NODES:
        raise GraphError(f"global indices are limited to {MAX_GLOBAL_NODES} nodes (got {g.n})")
    if kind is GlobalIndex.KATZ:
        S = _katz(g, params)
    elif kind is GlobalIndex.LHNG:
        S = _lhng(g, params)
    elif kind is GlobalIndex.ACT:
        S = _act(laplacian_pseudoinverse(g))
    elif kind is GlobalIndex.COS:
        S = _cosine(laplacian_pseudoinverse(g))
    elif kind is GlobalIndex.RWR:
        Q = rwr_matrix(g, params)
        S = Q + Q.T
    elif kind is GlobalIndex.SIMRANK:
        S = simrank(g, params)
    else:
        S = _solve_inverse(np.eye(g.n) + laplacian(g), "I + L")
    return SimilarityMatrix(kind, S)


def matrix_to_nonedge_scores(sm: SimilarityMatrix, g: Graph) -> Dict[Edge, float]:
    if sm.n != g.n:
        raise ValueError(f"matrix is {sm.n}x{sm.n} but the graph has {g.n} nodes")
    S = sm.S
    return {(a, b): float(S[a, b]) for a, b in g.non_edges()}


def matrix_to_sparse_scores(sm: SimilarityMatrix, g: Graph) -> SparseScores:
    """Every non-edge listed explicitly, in lexicographic order."""
    if sm.n != g.n:
        raise ValueError(f"matrix is {sm.n}x{sm.n} but the graph has {g.n} nodes")
    n = g.n
    r, c = np.triu_indices(n, k=1)
    A = g.adjacency_matrix(dense=True)
    keep = A[r, c] == 0
    r, c = r[keep].astype(np.int64), c[keep].astype(np.int64)
    return SparseScores(n, r, c, sm.S[r, c].astype(np.float64), g.num_non_edges(), dense=True)


def global_scores_sparse(g: Graph, kind: GlobalIndex, params: Optional[GlobalParams] = None) -> SparseScores:
    return matrix_to_sparse_scores(global_similarity(g, kind, params or GlobalParams()), g)
