"""Undirected simple graphs over dense integer node ids, plus edge-list I/O."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Hashable, Iterable, Iterator, List, Optional, Set, Tuple

import numpy as np
import scipy.sparse as ssp

Edge = Tuple[int, int]


class GraphError(ValueError):
    """Base class for rejected graph operations."""


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class MissingEdgeError(GraphError):
    pass


class NodeRangeError(GraphError, IndexError):
    pass


class EdgeListFormatError(GraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def edge(a: int, b: int) -> Edge:
    """Return the normalized form ``(min, max)`` of an unordered pair."""
    a, b = int(a), int(b)
    if a == b:
        raise SelfLoopError(f"self-loop ({a}, {a}) is not allowed")
    return (a, b) if a < b else (b, a)


class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    Adjacency is a list of Python sets; iteration that must be
    deterministic goes through :meth:`neighbors`, which sorts.
    """

    __slots__ = ("_adj", "_m")

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("node count must be non-negative")
        self._adj: List[Set[int]] = [set() for _ in range(n)]
        self._m = 0
        for a, b in edges:
            self.add_edge(a, b)

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    def _check(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < len(self._adj):
            raise NodeRangeError(f"node {v} outside [0, {len(self._adj)})")
        return v

    def add_edge(self, a: int, b: int) -> None:
        a, b = self._check(a), self._check(b)
        if a == b:
            raise SelfLoopError(f"self-loop ({a}, {a}) is not allowed")
        if b in self._adj[a]:
            raise DuplicateEdgeError(f"edge {edge(a, b)} already present")
        self._adj[a].add(b)
        self._adj[b].add(a)
        self._m += 1

    def remove_edge(self, a: int, b: int) -> None:
        a, b = self._check(a), self._check(b)
        if b not in self._adj[a]:
            raise MissingEdgeError(f"edge {edge(a, b) if a != b else (a, b)} not present")
        self._adj[a].discard(b)
        self._adj[b].discard(a)
        self._m -= 1

    def has_edge(self, a: int, b: int) -> bool:
        return int(b) in self._adj[self._check(a)]

    def adj(self, v: int) -> Set[int]:
        """The live neighbour set of ``v``. Do not mutate."""
        return self._adj[v]

    def neighbors(self, v: int) -> List[int]:
        return sorted(self._adj[self._check(v)])

    def degree(self, v: int) -> int:
        return len(self._adj[self._check(v)])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(s) for s in self._adj), dtype=np.int64, count=self.n)

    def common_neighbors(self, v: int, w: int) -> Set[int]:
        v, w = self._check(v), self._check(w)
        if v == w:
            raise SelfLoopError("common_neighbors needs two distinct nodes")
        a, b = self._adj[v], self._adj[w]
        if len(a) > len(b):
            a, b = b, a
        return {u for u in a if u in b}

    def edges(self) -> Iterator[Edge]:
        """Edges in lexicographic order."""
        for a in range(self.n):
            for b in sorted(self._adj[a]):
                if b > a:
                    yield (a, b)

    def non_edges(self) -> Iterator[Edge]:
        """Lazily yield every unordered non-adjacent pair, lexicographically."""
        n = self.n
        for a in range(n):
            nb = self._adj[a]
            for b in range(a + 1, n):
                if b not in nb:
                    yield (a, b)

    def num_non_edges(self) -> int:
        return self.n * (self.n - 1) // 2 - self._m

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g._adj = [set(s) for s in self._adj]
        g._m = self._m
        return g

    __copy__ = copy

    def __deepcopy__(self, memo) -> "Graph":
        return self.copy()

    def edge_set(self) -> Set[Edge]:
        return set(self.edges())

    def adjacency_matrix(self, dense: bool = False):
        rows: List[int] = []
        cols: List[int] = []
        for a, nb in enumerate(self._adj):
            rows.extend([a] * len(nb))
            cols.extend(nb)
        data = np.ones(len(rows), dtype=np.float64)
        A = ssp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
        return A.toarray() if dense else A

    def check_invariants(self) -> None:
        total = 0
        for v, nb in enumerate(self._adj):
            if v in nb:
                raise AssertionError(f"self-loop at {v}")
            for w in nb:
                if v not in self._adj[w]:
                    raise AssertionError(f"asymmetric adjacency {v}->{w}")
            total += len(nb)
        if total != 2 * self._m:
            raise AssertionError(f"edge count {self._m} != {total}/2")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def load_edge_list(path, return_mapping: bool = False):
    """Read a whitespace-separated edge list.

    Tokens are relabelled to dense ids in first-seen order, unless they are
    already exactly the integers ``0..k-1``. Lines that are
    blank or start with ``#`` are skipped. Self-loops and repeated edges are
    rejected with the offending line number.

    With ``return_mapping`` the result is ``(graph, labels)`` where
    ``labels[i]`` is the original token of node ``i``.
    """
    index: Dict[Hashable, int] = {}
    labels: List[str] = []
    pairs: List[Edge] = []
    seen: Dict[Edge, int] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListFormatError(f"expected two node tokens, got {len(parts)}", lineno)
        if parts[0] == parts[1]:
            raise EdgeListFormatError(f"self-loop on node {parts[0]!r}", lineno)
        ids = []
        for tok in parts:
            if tok not in index:
                index[tok] = len(labels)
                labels.append(tok)
            ids.append(index[tok])
        e = edge(*ids)
        if e in seen:
            raise EdgeListFormatError(f"duplicate edge (first seen at line {seen[e]})", lineno)
        seen[e] = lineno
        pairs.append(e)
    dense = _dense_integer_relabel(labels)
    if dense is not None:
        labels = [str(i) for i in range(len(labels))]
        pairs = [edge(dense[a], dense[b]) for a, b in pairs]
    g = Graph(len(labels), pairs)
    return (g, labels) if return_mapping else g


def _dense_integer_relabel(labels: List[str]) -> Optional[List[int]]:
    # Tokens that already spell 0..k-1 keep their own numbering.
    try:
        values = [int(tok) for tok in labels]
    except ValueError:
        return None
    if any(str(v) != tok for v, tok in zip(values, labels)):
        return None
    if sorted(values) != list(range(len(values))):
        return None
    return values


def save_edge_list(g: Graph, path, labels: Optional[List[str]] = None) -> None:
    lines = []
    for a, b in g.edges():
        if labels is None:
            lines.append(f"{a} {b}")
        else:
            lines.append(f"{labels[a]} {labels[b]}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def complete_graph(n: int) -> Graph:
    return Graph(n, ((a, b) for a in range(n) for b in range(a + 1, n)))


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)))


def star_graph(n: int) -> Graph:
    """Star with centre 0 and ``n - 1`` leaves."""
    return Graph(n, ((0, i) for i in range(1, n)))
