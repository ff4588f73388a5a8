"""Exhaustive search for the best plan on tiny instances."""

from __future__ import annotations

import itertools
import math
from typing import List, Optional, Tuple

from ..global_indices import GlobalIndex
from .instance import EvasionInstance, InstanceError, ModificationPlan, Step

DEFAULT_CAP = 2_000_000
MAX_GLOBAL_ORACLE_NODES = 200


class SearchSpaceError(RuntimeError):
    """The exhaustive search would exceed its evaluation cap; use a heuristic."""


def candidate_moves(inst: EvasionInstance) -> List[Step]:
    adds = [Step("+", e) for e in sorted(inst.addable_set())]
    rems = [Step("-", e) for e in sorted(inst.removable_set())]
    return sorted(adds + rems)


def search_size(num_moves: int, budget: int) -> int:
    return sum(math.comb(num_moves, k) for k in range(min(budget, num_moves) + 1))


def _value(inst: EvasionInstance, steps) -> float:
    return inst.objective(ModificationPlan(list(steps)).apply(inst.graph))


def brute_force_optimum(
    inst: EvasionInstance, cap: int = DEFAULT_CAP, order: str = "size"
) -> Tuple[ModificationPlan, float]:
    """Minimise the instance metric over every feasible plan.

    Ties go to the plan with fewer steps, then to the lexicographically
    smaller sorted step list. ``order`` picks the enumeration order: ``size``
    walks subsets by size, ``bitmask`` walks integer masks. Both return the
    same answer; the second exists to cross-check the first.
    """
    if isinstance(inst.scorer, GlobalIndex) and inst.graph.n > MAX_GLOBAL_ORACLE_NODES:
        raise InstanceError(f"global-index oracle runs are limited to {MAX_GLOBAL_ORACLE_NODES} nodes")
    moves = candidate_moves(inst)
    total = search_size(len(moves), inst.budget)
    if total > cap:
        raise SearchSpaceError(f"{total} candidate plans exceed the cap of {cap}")
    best: Optional[Tuple[float, int, tuple]] = None
    if order == "size":
        for k in range(min(inst.budget, len(moves)) + 1):
            for combo in itertools.combinations(moves, k):
                key = (_value(inst, combo), k, combo)
                if best is None or key < best:
                    best = key
    elif order == "bitmask":
        for mask in range(1 << len(moves)):
            if bin(mask).count("1") > inst.budget:
                continue
            combo = tuple(m for i, m in enumerate(moves) if mask >> i & 1)
            key = (_value(inst, combo), len(combo), combo)
            if best is None or key < best:
                best = key
    else:
        raise ValueError(f"unknown enumeration order {order!r}")
    assert best is not None
    return ModificationPlan(list(best[2])), best[0]
