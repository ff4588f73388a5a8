"""Budget split between edge additions and removals, one step at a time."""

from __future__ import annotations

from typing import Tuple

from .ctr import ctr_candidates, ctr_choose
from .instance import Add, EvasionInstance, ModificationPlan, Remove, Trajectory
from .otc import hidden_adjacency, otc_candidates, otc_choose


def run_alternating(inst: EvasionInstance, track: bool = True) -> Tuple[ModificationPlan, Trajectory]:
    """OTC on odd steps, CTR on even steps, each on the current graph.

    When the scheduled heuristic has no admissible move the other one takes
    the step instead; the run ends once neither can move.
    """
    g = inst.graph.copy()
    hidden = sorted(inst.hidden)
    hadj = hidden_adjacency(hidden)
    # both candidate pools are fixed against the unmodified graph
    add_pool = set(otc_candidates(inst))
    rem_pool = set(ctr_candidates(inst))
    plan, traj = ModificationPlan(), Trajectory()
    if track:
        traj.record(g, inst)

    def try_add():
        e = otc_choose(g, hadj, add_pool)
        if e is None:
            return False
        g.add_edge(*e)
        add_pool.discard(e)
        plan.steps.append(Add(*e))
        return True

    def try_remove():
        e = ctr_choose(g, hidden, rem_pool)
        if e is None:
            return False
        g.remove_edge(*e)
        rem_pool.discard(e)
        plan.steps.append(Remove(*e))
        return True

    for step in range(1, inst.budget + 1):
        first, second = (try_add, try_remove) if step % 2 else (try_remove, try_add)
        if not (first() or second()):
            break
        if track:
            traj.record(g, inst)
    return plan, traj
