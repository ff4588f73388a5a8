"""The set-cover gadget network and an empirical check of its ranking claims.

Nodes: ``v0``, ``v1``, the clique ``u0..um``, one node ``Pj`` per cover
subset, ``c`` nodes ``a{i},{l}`` per ``ui`` (wired to ``ui``, ``v0``, ``v1``)
and ``q - |P(ui)|`` nodes ``d{i},{l}`` per ``ui`` (wired to ``ui``, ``v1``).
Every ``ui``, ``u0`` included, is adjacent to ``v1``, which gives all the
``u`` nodes the same degree ``m + c + q + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from ..graph import Edge, Graph, edge
from ..local_indices import LocalIndex, local_score_all

# constants under which the ranking claims hold
PROOF_CONSTANTS: Dict[LocalIndex, int] = {
    LocalIndex.CN: 6,
    LocalIndex.SALTON: 1,
    LocalIndex.JACCARD: 1,
    LocalIndex.SORENSEN: 1,
    LocalIndex.HPI: 1,
    LocalIndex.HDI: 1,
    LocalIndex.LHN: 1,
    LocalIndex.AA: 3,
    LocalIndex.RA: 3,
}


class GadgetError(ValueError):
    pass


@dataclass(frozen=True)
class GadgetSpec:
    c: int
    m: int
    cover: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "cover", tuple(frozenset(int(x) for x in p) for p in self.cover))
        if int(self.c) != self.c or self.c < 1:
            raise GadgetError(f"c must be a positive integer, got {self.c!r}")
        if int(self.m) != self.m or self.m < 5:
            raise GadgetError(f"the universe needs at least 5 elements, got m={self.m!r}")
        if not self.cover:
            raise GadgetError("the cover is empty")
        for j, p in enumerate(self.cover, start=1):
            if len(p) != 3:
                raise GadgetError(f"subset P{j} has {len(p)} elements; exactly 3 are required")
            if not all(1 <= x <= self.m for x in p):
                raise GadgetError(f"subset P{j} has elements outside 1..{self.m}")
        union = frozenset().union(*self.cover)
        if union != frozenset(range(1, self.m + 1)):
            missing = sorted(set(range(1, self.m + 1)) - union)
            raise GadgetError(f"the subsets do not cover the universe; missing {missing}")

    @property
    def q(self) -> int:
        return len(self.cover)

    def containing(self, i: int) -> List[int]:
        """1-based indices of the subsets containing ``u_i``."""
        return [j for j, p in enumerate(self.cover, start=1) if i in p]

    def expected_nodes(self) -> int:
        q, m = self.q, self.m
        return 3 + m + q + self.c * (m + 1) + sum(q - len(self.containing(i)) for i in range(m + 1))


@dataclass
class GammaNetwork:
    spec: GadgetSpec
    graph: Graph
    labels: List[str]
    index: Dict[str, int] = field(default_factory=dict)

    def node(self, label: str) -> int:
        return self.index[label]

    def u(self, i: int) -> int:
        return self.index[f"u{i}"]

    def P(self, j: int) -> int:
        return self.index[f"P{j}"]

    @property
    def v0(self) -> int:
        return self.index["v0"]

    @property
    def v1(self) -> int:
        return self.index["v1"]

    def nodes_of(self, prefix: str) -> List[int]:
        return [v for v, lab in enumerate(self.labels) if lab.startswith(prefix)]

    def addition(self, subsets: Iterable[int]) -> List[Edge]:
        return sorted(edge(self.P(j), self.v0) for j in subsets)


def build_gamma(spec: GadgetSpec) -> GammaNetwork:
    labels: List[str] = ["v0", "v1"]
    labels += [f"u{i}" for i in range(spec.m + 1)]
    labels += [f"P{j}" for j in range(1, spec.q + 1)]
    for i in range(spec.m + 1):
        labels += [f"a{i},{l}" for l in range(1, spec.c + 1)]
    for i in range(spec.m + 1):
        labels += [f"d{i},{l}" for l in range(1, spec.q - len(spec.containing(i)) + 1)]
    idx = {lab: v for v, lab in enumerate(labels)}
    g = Graph(len(labels))
    v0, v1 = idx["v0"], idx["v1"]
    for j, p in enumerate(spec.cover, start=1):
        g.add_edge(idx[f"P{j}"], v1)
        for i in sorted(p):
            g.add_edge(idx[f"P{j}"], idx[f"u{i}"])
    for i in range(spec.m + 1):
        ui = idx[f"u{i}"]
        g.add_edge(ui, v1)
        for k in range(i + 1, spec.m + 1):
            g.add_edge(ui, idx[f"u{k}"])
        for l in range(1, spec.c + 1):
            a = idx[f"a{i},{l}"]
            g.add_edge(a, ui)
            g.add_edge(a, v0)
            g.add_edge(a, v1)
        for l in range(1, spec.q - len(spec.containing(i)) + 1):
            d = idx[f"d{i},{l}"]
            g.add_edge(d, ui)
            g.add_edge(d, v1)
    return GammaNetwork(spec, g, labels, idx)


def degree_audit(net: GammaNetwork, g: Graph = None) -> Dict[str, bool]:
    g = net.graph if g is None else g
    return {
        "a_degree_3": all(g.degree(v) == 3 for v in net.nodes_of("a")),
        "d_degree_2": all(g.degree(v) == 2 for v in net.nodes_of("d")),
        "P_degree_4_to_5": all(4 <= g.degree(v) <= 5 for v in net.nodes_of("P")),
    }


def _cmp(x: float, y: float) -> int:
    if math.isclose(x, y, rel_tol=1e-12, abs_tol=1e-12):
        return 0
    return 1 if x > y else -1


@dataclass
class LemmaReport:
    kind: LocalIndex
    subsets: Tuple[int, ...]
    point_a: bool
    point_b: bool
    point_c: bool
    counterexamples: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.point_a and self.point_b and self.point_c


def verify_lemma1(spec: GadgetSpec, kind: LocalIndex, subsets: Iterable[int] = ()) -> LemmaReport:
    """Check the three ranking claims for adding ``(P_j, v0)`` for ``j`` in ``subsets``.

    Scores are compared with a relative tolerance of ``1e-12`` so that sums
    of equal terms in different orders still count as ties.
    """
    kind = LocalIndex(kind)
    if spec.c != PROOF_CONSTANTS[kind]:
        raise GadgetError(f"{kind.value} needs c={PROOF_CONSTANTS[kind]}, got c={spec.c}")
    subsets = tuple(sorted(set(int(j) for j in subsets)))
    if any(not 1 <= j <= spec.q for j in subsets):
        raise GadgetError(f"subset indices must lie in 1..{spec.q}")
    net = build_gamma(spec)
    before = local_score_all(net.graph, kind)
    g2 = net.graph.copy()
    for e in net.addition(subsets):
        g2.add_edge(*e)
    after = local_score_all(g2, kind)
    v0 = net.v0
    ref = edge(net.u(0), v0)
    s0, s1 = before[ref], after[ref]
    bad: List[str] = []

    ok_a = True
    for i in range(spec.m + 1):
        e = edge(net.u(i), v0)
        if _cmp(before[e], s0) != 0:
            ok_a = False
            bad.append(f"(a) before: s(u{i},v0)={before[e]!r} != s(u0,v0)={s0!r}")
        hit = any(i in spec.cover[j - 1] for j in subsets)
        want = 1 if hit else 0
        if _cmp(after[e], s1) != want:
            ok_a = False
            bad.append(f"(a) after: s(u{i},v0)={after[e]!r} vs s(u0,v0)={s1!r}, expected sign {want}")

    ok_b = True
    for j in range(1, spec.q + 1):
        e = edge(net.P(j), v0)
        if _cmp(before[e], s0) >= 0:
            ok_b = False
            bad.append(f"(b) before: s(P{j},v0)={before[e]!r} not below {s0!r}")
        if j not in subsets and _cmp(after[e], s1) >= 0:
            ok_b = False
            bad.append(f"(b) after: s(P{j},v0)={after[e]!r} not below {s1!r}")

    special = {edge(net.u(i), v0) for i in range(spec.m + 1)}
    special |= {edge(net.P(j), v0) for j in range(1, spec.q + 1)}
    ok_c = True
    for e, s in after.items():
        if e in special:
            continue
        if _cmp(before[e], s0) != _cmp(s, s1):
            ok_c = False
            a, b = e
            bad.append(
                f"(c) ({net.labels[a]},{net.labels[b]}): {before[e]!r} vs {s0!r} before, {s!r} vs {s1!r} after"
            )
    return LemmaReport(kind, subsets, ok_a, ok_b, ok_c, bad)
