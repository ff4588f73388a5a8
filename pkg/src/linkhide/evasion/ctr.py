"""Closed-triad removal: delete edges that close triads around hidden pairs."""

from __future__ import annotations

import heapq
from typing import Dict, Iterable, List, Optional, Set, Tuple

from ..graph import Edge, Graph, edge
from .instance import EvasionInstance, ModificationPlan, Remove, Trajectory


def ctr_candidates(inst: EvasionInstance) -> List[Edge]:
    """Removable edges with at least one endpoint in a hidden pair."""
    hn = set(inst.hidden_nodes())
    if inst.removable is None:
        g = inst.graph
        return sorted({edge(h, u) for h in hn for u in g.adj(h)})
    return sorted(e for e in inst.removable if e[0] in hn or e[1] in hn)


def ctr_scores(g: Graph, hidden: Iterable[Edge], candidates: Iterable[Edge]) -> Dict[Edge, int]:
    """Closed triads through a hidden pair that each candidate edge belongs to."""
    sigma = dict.fromkeys(candidates, 0)
    for x, w in hidden:
        for v in g.common_neighbors(x, w):
            e1, e2 = edge(v, w), edge(v, x)
            if e1 in sigma:
                sigma[e1] += 1
            if e2 in sigma:
                sigma[e2] += 1
    return sigma


def best_edge(scores: Dict[Edge, float]) -> Optional[Edge]:
    """Highest score, ties to the smallest edge."""
    if not scores:
        return None
    return min(scores, key=lambda e: (-scores[e], e))


def ctr_choose(g: Graph, hidden: Iterable[Edge], active: Set[Edge]) -> Optional[Edge]:
    sigma = ctr_scores(g, hidden, active)
    e = best_edge(sigma)
    if e is None or sigma[e] <= 0:
        return None
    return e


def run_ctr(inst: EvasionInstance, track: bool = True) -> Tuple[ModificationPlan, Trajectory]:
    """Recompute every score from scratch at each step."""
    g = inst.graph.copy()
    hidden = sorted(inst.hidden)
    active = set(ctr_candidates(inst))
    plan, traj = ModificationPlan(), Trajectory()
    if track:
        traj.record(g, inst)
    for _ in range(inst.budget):
        e = ctr_choose(g, hidden, active)
        if e is None:
            break
        g.remove_edge(*e)
        active.discard(e)
        plan.steps.append(Remove(*e))
        if track:
            traj.record(g, inst)
    return plan, traj


def run_ctr_pq(inst: EvasionInstance, track: bool = True) -> Tuple[ModificationPlan, Trajectory]:
    """Same plan as :func:`run_ctr`, with a lazy max-heap and local score updates."""
    g = inst.graph.copy()
    hidden = inst.hidden
    hadj: Dict[int, Set[int]] = {}
    for x, w in hidden:
        hadj.setdefault(x, set()).add(w)
        hadj.setdefault(w, set()).add(x)
    active = set(ctr_candidates(inst))
    sigma = ctr_scores(g, sorted(hidden), active)
    heap = [(-s, e) for e, s in sigma.items() if s > 0]
    heapq.heapify(heap)
    plan, traj = ModificationPlan(), Trajectory()
    if track:
        traj.record(g, inst)

    def bump(e: Edge) -> None:
        if e in active:
            sigma[e] -= 1
            if sigma[e] > 0:
                heapq.heappush(heap, (-sigma[e], e))

    for _ in range(inst.budget):
        chosen = None
        while heap:
            neg, e = heapq.heappop(heap)
            if e in active and -neg == sigma[e]:
                chosen = e
                break
        if chosen is None:
            break
        v, w = chosen
        g.remove_edge(v, w)
        active.discard(chosen)
        plan.steps.append(Remove(v, w))
        # each destroyed triad (v, w, z) with (z, w) or (z, v) hidden loses
        # its other edge's credit
        for z in g.adj(v):
            if w in hadj.get(z, ()):
                bump(edge(z, v))
        for z in g.adj(w):
            if v in hadj.get(z, ()):
                bump(edge(z, w))
        if track:
            traj.record(g, inst)
    return plan, traj
