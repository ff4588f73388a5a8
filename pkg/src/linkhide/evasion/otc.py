"""Open-triad creation: add decoy edges that open triads near hidden pairs."""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from ..graph import Edge, Graph, edge
from .ctr import best_edge
from .instance import Add, EvasionInstance, ModificationPlan, Trajectory

NEG_INF = float("-inf")


def hidden_adjacency(hidden: Iterable[Edge]) -> Dict[int, Set[int]]:
    out: Dict[int, Set[int]] = {}
    for a, b in hidden:
        out.setdefault(a, set()).add(b)
        out.setdefault(b, set()).add(a)
    return out


def otc_candidates(inst: EvasionInstance) -> List[Edge]:
    """Addable non-edges with at least one endpoint in a hidden pair."""
    hn = inst.hidden_nodes()
    if inst.addable is not None:
        hs = set(hn)
        return sorted(e for e in inst.addable if e[0] in hs or e[1] in hs)
    g = inst.graph
    out = set()
    for h in hn:
        nb = g.adj(h)
        for u in range(g.n):
            if u != h and u not in nb:
                e = edge(h, u)
                if e not in inst.hidden:
                    out.add(e)
    return sorted(out)


def otc_score(g: Graph, hadj: Dict[int, Set[int]], v: int, w: int) -> float:
    nv, nw = g.adj(v), g.adj(w)
    # adding (v, w) must not give any hidden pair a new common neighbour
    for u in hadj.get(w, ()):
        if u in nv:
            return NEG_INF
    for u in hadj.get(v, ()):
        if u in nw:
            return NEG_INF
    return float(len(nv ^ nw))


def otc_choose(g: Graph, hadj: Dict[int, Set[int]], active: Set[Edge]) -> Optional[Edge]:
    scores = {e: otc_score(g, hadj, *e) for e in active}
    e = best_edge(scores)
    if e is None or scores[e] == NEG_INF:
        return None
    return e


def run_otc(inst: EvasionInstance, track: bool = True) -> Tuple[ModificationPlan, Trajectory]:
    """Rescore every candidate at each step."""
    g = inst.graph.copy()
    hadj = hidden_adjacency(inst.hidden)
    active = set(otc_candidates(inst))
    plan, traj = ModificationPlan(), Trajectory()
    if track:
        traj.record(g, inst)
    for _ in range(inst.budget):
        e = otc_choose(g, hadj, active)
        if e is None:
            break
        g.add_edge(*e)
        active.discard(e)
        plan.steps.append(Add(*e))
        if track:
            traj.record(g, inst)
    return plan, traj


class _ScoreTable:
    """Candidate scores in a (hidden node) x (node) matrix.

    A candidate ``(a, b)`` lives in the row of its smallest hidden
    endpoint; every other cell holds ``-inf``.
    """

    def __init__(self, inst: EvasionInstance, g: Graph):
        self.g = g
        n = g.n
        self.hn = np.array(inst.hidden_nodes(), dtype=np.int64)
        self.row_of = np.full(n, -1, dtype=np.int64)
        self.row_of[self.hn] = np.arange(len(self.hn))
        self.hadj = hidden_adjacency(inst.hidden)
        k = len(self.hn)
        S = np.full((k, n), NEG_INF)
        cand = np.zeros((k, n), dtype=bool)
        if inst.addable is None:
            is_hidden = self.row_of >= 0
            for r, h in enumerate(self.hn):
                row = cand[r]
                row[:] = True
                row[h] = False
                row[list(g.adj(h))] = False
                row[list(self.hadj[h])] = False
                # pairs of two hidden nodes belong to the smaller one
                row[: h][is_hidden[:h]] = False
        else:
            for e in otc_candidates(inst):
                r, c = self._cell(*e)
                cand[r, c] = True
        deg = g.degrees().astype(np.float64)
        for r, h in enumerate(self.hn):
            if not cand[r].any():
                continue
            common = np.zeros(n)
            for u in g.adj(h):
                common[list(g.adj(u))] += 1
            score = deg[h] + deg - 2 * common
            guard = np.zeros(n, dtype=bool)
            for p in self.hadj[h]:
                guard[list(g.adj(p))] = True
            for u in g.adj(h):
                if u in self.hadj:
                    guard[list(self.hadj[u])] = True
            ok = cand[r] & ~guard
            S[r, ok] = score[ok]
        self.S = S

    def _cell(self, a: int, b: int) -> Tuple[int, int]:
        ra, rb = self.row_of[a], self.row_of[b]
        if ra >= 0 and (rb < 0 or a < b):
            return int(ra), b
        return int(rb), a

    def best(self) -> Optional[Edge]:
        S = self.S
        if S.size == 0:
            return None
        top = S.max()
        if top == NEG_INF:
            return None
        rows, cols = np.nonzero(S == top)
        h = self.hn[rows]
        lo, hi = np.minimum(h, cols), np.maximum(h, cols)
        i = np.lexsort((hi, lo))[0]
        return int(lo[i]), int(hi[i])

    def added(self, v: int, w: int) -> None:
        """Update after ``(v, w)`` joined the graph."""
        S, g, n = self.S, self.g, self.g.n
        for z, other in ((v, w), (w, v)):
            near = np.zeros(n, dtype=bool)
            near[list(g.adj(other))] = True
            blocked = np.zeros(n, dtype=bool)
            blocked[list(self.hadj.get(other, ()))] = True
            # |N(z) ^ N(u)| gains one unless u already neighbours `other`
            delta = np.where(near, -1.0, 1.0)
            rz = self.row_of[z]
            if rz >= 0:
                S[rz] += delta
                S[rz, blocked] = NEG_INF
            S[:, z] += delta[self.hn]
            S[blocked[self.hn], z] = NEG_INF
        r, c = self._cell(v, w)
        S[r, c] = NEG_INF


def run_otc_fast(inst: EvasionInstance, track: bool = True) -> Tuple[ModificationPlan, Trajectory]:
    """Same plan as :func:`run_otc`, with incremental score updates."""
    g = inst.graph.copy()
    table = _ScoreTable(inst, g)
    plan, traj = ModificationPlan(), Trajectory()
    if track:
        traj.record(g, inst)
    for _ in range(inst.budget):
        e = table.best()
        if e is None:
            break
        g.add_edge(*e)
        table.added(*e)
        plan.steps.append(Add(*e))
        if track:
            traj.record(g, inst)
    return plan, traj
