"""Seeded random network models: preferential attachment, small world, G(n, p).

All randomness comes from numpy's PCG64. Repetition ``k`` of an experiment
with master seed ``s`` draws from the ``k``-th child of ``SeedSequence(s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .graph import Graph


class GeneratorSpecError(ValueError):
    pass


MODELS = ("sf", "sw", "er")


@dataclass(frozen=True)
class GeneratorSpec:
    model: str  # sf | sw | er
    n: int
    d: int
    p: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise GeneratorSpecError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.n < max(3, self.d + 1):
            raise GeneratorSpecError(f"need n >= max(3, d+1), got n={self.n}, d={self.d}")
        if self.d < 1:
            raise GeneratorSpecError("d must be positive")
        if self.model == "sw":
            if self.d % 2:
                raise GeneratorSpecError("small-world degree d must be even")
            if not 0.0 <= self.p <= 1.0:
                raise GeneratorSpecError("rewiring probability must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise GeneratorSpecError("seed must be an unsigned 64-bit integer")

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(self.model, self.n, self.d, self.p, seed)

    def label(self) -> str:
        if self.model == "sw":
            return f"sw:{self.n},{self.d},{self.p:g}"
        return f"{self.model}:{self.n},{self.d}"


def parse_spec(text: str, seed: int = 0) -> GeneratorSpec:
    """Parse ``sf:n,d``, ``sw:n,d,p`` or ``er:n,d``."""
    model, sep, rest = text.strip().partition(":")
    model = model.lower()
    if not sep or model not in MODELS:
        raise GeneratorSpecError(f"cannot parse network spec {text!r}")
    parts = [x.strip() for x in rest.split(",")]
    want = 3 if model == "sw" else 2
    if len(parts) != want:
        raise GeneratorSpecError(f"{model} spec takes {want} parameters, got {len(parts)}")
    try:
        n, d = int(parts[0]), int(parts[1])
        p = float(parts[2]) if model == "sw" else 0.0
    except ValueError:
        raise GeneratorSpecError(f"non-numeric parameter in {text!r}") from None
    return GeneratorSpec(model, n, d, p, seed)


def looks_like_spec(text: str) -> bool:
    return text.split(":", 1)[0].lower() in MODELS and ":" in text


def substreams(seed: int, count: int) -> List[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(count)]


def rng_for(seed: int, stream: Optional[int] = None) -> np.random.Generator:
    ss = np.random.SeedSequence(seed) if stream is None else np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


def scale_free(n: int, d: int, rng: np.random.Generator) -> Graph:
    """Clique on ``d`` nodes, then each new node attaches to ``d`` distinct
    existing nodes drawn proportionally to degree (duplicates redrawn)."""
    g = Graph(n)
    for a in range(d):
        for b in range(a + 1, d):
            g.add_edge(a, b)
    # every edge endpoint once: uniform draws from it are degree-proportional
    ends = np.empty(2 * (d * (d - 1) // 2 + d * (n - d)), dtype=np.int64)
    k = 0
    for a, b in g.edges():
        ends[k], ends[k + 1] = a, b
        k += 2
    for v in range(d, n):
        chosen: List[int] = []
        picked = set()
        while len(chosen) < d:
            if k == 0:
                u = int(rng.integers(v))
            else:
                u = int(ends[rng.integers(k)])
            if u not in picked:
                picked.add(u)
                chosen.append(u)
        for u in chosen:
            g.add_edge(v, u)
            ends[k], ends[k + 1] = v, u
            k += 2
    return g


def small_world(n: int, d: int, p: float, rng: np.random.Generator) -> Graph:
    """Ring lattice of degree ``d``; each lattice edge is rewired with
    probability ``p`` to a uniform new endpoint, avoiding loops and repeats."""
    g = Graph(n)
    half = d // 2
    for j in range(1, half + 1):
        for v in range(n):
            g.add_edge(v, (v + j) % n)
    if p == 0.0:
        return g
    for j in range(1, half + 1):
        for v in range(n):
            w = (v + j) % n
            if rng.random() >= p:
                continue
            if g.degree(v) >= n - 1:
                continue
            while True:
                u = int(rng.integers(n))
                if u != v and not g.has_edge(v, u):
                    break
            g.remove_edge(v, w)
            g.add_edge(v, u)
    return g


def random_graph(n: int, d: int, rng: np.random.Generator) -> Graph:
    """G(n, p) with ``p = d / (n - 1)`` via geometric gaps between kept pairs."""
    p = d / (n - 1)
    g = Graph(n)
    if p >= 1.0:
        for a in range(n):
            for b in range(a + 1, n):
                g.add_edge(a, b)
        return g
    lp = math.log1p(-p)
    v, w = 1, -1
    while v < n:
        w += 1 + int(math.log(1.0 - rng.random()) / lp)
        while w >= v and v < n:
            w -= v
            v += 1
        if v < n:
            g.add_edge(v, w)
    return g


def generate(spec: GeneratorSpec, rng: Optional[np.random.Generator] = None) -> Graph:
    rng = rng if rng is not None else rng_for(spec.seed)
    if spec.model == "sf":
        return scale_free(spec.n, spec.d, rng)
    if spec.model == "sw":
        return small_world(spec.n, spec.d, spec.p, rng)
    return random_graph(spec.n, spec.d, rng)


def scale_free_edge_count(n: int, d: int) -> int:
    return d * (d - 1) // 2 + d * (n - d)
