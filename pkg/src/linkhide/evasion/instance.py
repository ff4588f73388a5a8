"""Evasion instances, modification plans and metric trajectories."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set

from ..global_indices import GlobalParams
from ..graph import Edge, Graph, GraphError, edge
from ..scoring import IndexKind, evaluate_hidden, evaluate_hidden_many, parse_index


class InstanceError(GraphError):
    pass


class Metric(str, enum.Enum):
    AUC = "auc"
    AP = "ap"


@dataclass
class EvasionInstance:
    """Graph as the seeker sees it, plus what the evader hides and may change.

    ``addable=None`` stands for every non-edge outside ``hidden``;
    ``removable=None`` stands for every edge. Both are resolved lazily so
    that large graphs never materialise the full non-edge set.
    """

    graph: Graph
    scorer: IndexKind
    hidden: FrozenSet[Edge]
    budget: int
    metric: Metric = Metric.AUC
    addable: Optional[FrozenSet[Edge]] = None
    removable: Optional[FrozenSet[Edge]] = None
    params: Optional[GlobalParams] = None

    def __post_init__(self):
        self.scorer = parse_index(self.scorer)
        self.metric = Metric(self.metric)
        self.hidden = frozenset(edge(*e) for e in self.hidden)
        if self.addable is not None:
            self.addable = frozenset(edge(*e) for e in self.addable)
        if self.removable is not None:
            self.removable = frozenset(edge(*e) for e in self.removable)
        self.validate()

    def validate(self) -> None:
        g = self.graph
        if isinstance(self.budget, bool) or int(self.budget) != self.budget or self.budget < 0:
            raise InstanceError(f"budget must be a non-negative integer, got {self.budget!r}")
        self.budget = int(self.budget)
        if not self.hidden:
            raise InstanceError("the hidden set must be nonempty")
        for a, b in self.hidden:
            g._check(a), g._check(b)
            if g.has_edge(a, b):
                raise InstanceError(f"hidden pair {(a, b)} is an edge")
        if self.addable is not None:
            for a, b in self.addable:
                g._check(a), g._check(b)
                if g.has_edge(a, b):
                    raise InstanceError(f"addable pair {(a, b)} is already an edge")
            clash = self.addable & self.hidden
            if clash:
                raise InstanceError(f"addable pairs overlap the hidden set: {sorted(clash)[:3]}")
        if self.removable is not None:
            for a, b in self.removable:
                g._check(a), g._check(b)
                if not g.has_edge(a, b):
                    raise InstanceError(f"removable pair {(a, b)} is not an edge")

    def hidden_nodes(self) -> List[int]:
        return sorted({v for e in self.hidden for v in e})

    def addable_set(self) -> Set[Edge]:
        if self.addable is not None:
            return set(self.addable)
        return {e for e in self.graph.non_edges() if e not in self.hidden}

    def removable_set(self) -> Set[Edge]:
        if self.removable is not None:
            return set(self.removable)
        return self.graph.edge_set()

    def is_addable(self, e: Edge) -> bool:
        if self.addable is not None:
            return e in self.addable
        return e not in self.hidden and not self.graph.has_edge(*e)

    def is_removable(self, e: Edge) -> bool:
        if self.removable is not None:
            return e in self.removable
        return self.graph.has_edge(*e)

    def evaluate(self, g: Graph):
        return evaluate_hidden(g, self.scorer, sorted(self.hidden), self.params)

    def objective(self, g: Graph) -> float:
        ev = self.evaluate(g)
        return ev.auc if self.metric is Metric.AUC else ev.ap


class Step(NamedTuple):
    op: str  # "+" or "-"
    edge: Edge

    def __str__(self) -> str:
        return f"{self.op} {self.edge[0]} {self.edge[1]}"


def Add(a: int, b: int) -> Step:
    return Step("+", edge(a, b))


def Remove(a: int, b: int) -> Step:
    return Step("-", edge(a, b))


@dataclass
class ModificationPlan:
    steps: List[Step] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)

    @property
    def added(self) -> List[Edge]:
        return [s.edge for s in self.steps if s.op == "+"]

    @property
    def removed(self) -> List[Edge]:
        return [s.edge for s in self.steps if s.op == "-"]

    def apply(self, g: Graph, inplace: bool = False) -> Graph:
        out = g if inplace else g.copy()
        for s in self.steps:
            if s.op == "+":
                out.add_edge(*s.edge)
            else:
                out.remove_edge(*s.edge)
        return out

    def check_feasible(self, inst: EvasionInstance) -> None:
        if len(self.steps) > inst.budget:
            raise InstanceError(f"plan has {len(self.steps)} steps but the budget is {inst.budget}")
        seen = set()
        for s in self.steps:
            if s.edge in seen:
                raise InstanceError(f"plan repeats {s.edge}")
            seen.add(s.edge)
            if s.op == "+" and not inst.is_addable(s.edge):
                raise InstanceError(f"{s.edge} is not addable")
            if s.op == "-" and not inst.is_removable(s.edge):
                raise InstanceError(f"{s.edge} is not removable")

    def to_text(self) -> str:
        return "".join(f"{s}\n" for s in self.steps)

    @classmethod
    def from_text(cls, text: str) -> "ModificationPlan":
        steps = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] not in "+-":
                raise ValueError(f"line {lineno}: expected '+ a b' or '- a b', got {raw!r}")
            steps.append(Step(parts[0], edge(int(parts[1]), int(parts[2]))))
        return cls(steps)

    def write(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")


class TrajectoryPoint(NamedTuple):
    iteration: int
    auc: float
    ap: float


@dataclass
class Trajectory:
    points: List[TrajectoryPoint] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def record(self, g: Graph, inst: EvasionInstance) -> None:
        ev = inst.evaluate(g)
        self.points.append(TrajectoryPoint(len(self.points), ev.auc, ev.ap))

    @property
    def auc(self) -> List[float]:
        return [p.auc for p in self.points]

    @property
    def ap(self) -> List[float]:
        return [p.ap for p in self.points]

    def padded(self, length: int) -> "Trajectory":
        """Forward-fill the last point up to ``length`` points."""
        pts = list(self.points)
        if not pts:
            raise ValueError("cannot pad an empty trajectory")
        while len(pts) < length:
            pts.append(TrajectoryPoint(len(pts), pts[-1].auc, pts[-1].ap))
        return Trajectory(pts)


def replay(
    g: Graph,
    plan: ModificationPlan,
    hidden: Iterable[Edge],
    kinds: Sequence[IndexKind],
    params: Optional[GlobalParams] = None,
) -> Dict[IndexKind, Trajectory]:
    """Trajectories for several indices along one plan.

    The heuristics never look at the scorer, so one plan serves every index.
    """
    hidden = sorted(edge(*e) for e in hidden)
    kinds = [parse_index(k) for k in kinds]
    out = {k: Trajectory() for k in kinds}
    cur = g.copy()

    def snap():
        for k, ev in evaluate_hidden_many(cur, kinds, hidden, params).items():
            t = out[k]
            t.points.append(TrajectoryPoint(len(t.points), ev.auc, ev.ap))

    snap()
    for s in plan:
        ModificationPlan([s]).apply(cur, inplace=True)
        snap()
    return out
