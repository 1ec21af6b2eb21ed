"""Seeded random graph generators and test fixtures."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .graph import Graph


def default_er_p(n: int) -> float:
    return min(1.0, math.log(n) / n) if n > 1 else 0.0


def default_bipartite_p(n1: int, n2: int) -> float:
    n = n1 + n2
    return min(1.0, 5 * math.log(n) / n) if n > 1 else 0.0


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")


def _skips(rng: random.Random, p: float, total: int):
    """Indices in ``range(total)`` each drawn independently with probability ``p``.

    Geometric skipping, so the cost is proportional to the number of hits.
    """
    if p <= 0.0 or total <= 0:
        return
    if p >= 1.0:
        yield from range(total)
        return
    lp = math.log1p(-p)
    idx = -1
    while True:
        idx += 1 + int(math.log1p(-rng.random()) / lp)
        if idx >= total:
            return
        yield idx


def gen_er(n: int, p: float | None = None, seed: int = 0) -> Graph:
    """G(n, p) on vertices ``0..n-1``; ``p`` defaults to ln(n)/n."""
    if p is None:
        p = default_er_p(n)
    _check_p(p)
    rng = random.Random(seed)
    edges = []
    # pair index k enumerates (v, w) with w < v row by row
    v, row_start = 1, 0
    for k in _skips(rng, p, n * (n - 1) // 2):
        while k >= row_start + v:
            row_start += v
            v += 1
        edges.append((k - row_start, v))
    return Graph.from_edges(edges, range(n))


def gen_bipartite(n1: int, n2: int, p: float | None = None, seed: int = 0) -> Graph:
    """Random bipartite graph: left ``0..n1-1``, right ``n1..n1+n2-1``."""
    if p is None:
        p = default_bipartite_p(n1, n2)
    _check_p(p)
    rng = random.Random(seed)
    edges = [(k // n2, n1 + k % n2) for k in _skips(rng, p, n1 * n2)]
    return Graph.from_edges(edges, range(n1 + n2))


def thin_edges(g: Graph, q: float, seed: int = 0) -> Graph:
    """Delete each edge independently with probability ``q``; keeps every vertex."""
    _check_p(q)
    rng = random.Random(seed)
    kept = [e for e in g.edges() if rng.random() >= q]
    out = Graph.from_edges(kept, g.vertices)
    out.labels = g.labels
    return out


def planted_biclique(n: int = 2000, p: float | None = None, a: int = 8, b: int = 8,
                     inner_p: float = 0.5, seed: int = 0) -> Graph:
    """Sparse G(n, p) with a complete ``K_{a,b}`` planted on the lowest ids.

    Left side ``0..a-1``, right side ``a..a+b-1``; pairs inside each side are
    joined with probability ``inner_p``. With a lexicographic order the
    smallest planted ids own nearly every dense biclique.
    """
    base = gen_er(n, p, seed)
    rng = random.Random(seed + 1)
    edges = list(base.edges())
    left, right = range(a), range(a, a + b)
    edges += [(u, v) for u in left for v in right]
    for side in (left, right):
        for i in side:
            for j in side:
                if i < j and rng.random() < inner_p:
                    edges.append((i, j))
    return Graph.from_edges(edges, range(n))


def skew_fixture(seed: int = 0) -> Graph:
    """Planted ``K_{8,8}`` in sparse ER on 2000 vertices, the load-balance test graph.

    The background density is twice the connectivity threshold so that the
    planted ids also carry a noticeable share of ordinary work.
    """
    n = 2000
    return planted_biclique(n, p=2 * math.log(n) / n, a=8, b=8, inner_p=0.5, seed=seed)


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int = 0
    n1: int = 0
    n2: int = 0
    p: float | None = None
    seed: int = 0

    def build(self, base: Graph | None = None) -> Graph:
        if self.kind == "er":
            return gen_er(self.n, self.p, self.seed)
        if self.kind == "bipartite":
            return gen_bipartite(self.n1, self.n2, self.p, self.seed)
        if self.kind == "planted":
            return planted_biclique(self.n or 2000, self.p, seed=self.seed)
        if self.kind == "skew":
            return skew_fixture(self.seed)
        if self.kind == "thin":
            if base is None:
                raise ValueError("thin needs a base graph")
            return thin_edges(base, self.p if self.p is not None else 0.0, self.seed)
        raise ValueError(f"unknown generator kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "er":
            return f"ER-{self.n}-s{self.seed}"
        if self.kind == "bipartite":
            return f"Bipartite-{self.n1}-{self.n2}-s{self.seed}"
        if self.kind == "planted":
            return f"Planted-{self.n or 2000}-s{self.seed}"
        if self.kind == "skew":
            return f"Skew-s{self.seed}"
        return f"thin-{self.p}-s{self.seed}"

    @classmethod
    def parse(cls, text: str) -> "GenSpec":
        """``er:n=1000,p=0.01,seed=3`` style description."""
        kind, _, rest = text.partition(":")
        kw: dict = {}
        for item in filter(None, rest.split(",")):
            k, _, v = item.partition("=")
            k = k.strip()
            if k in ("n", "n1", "n2", "seed"):
                kw[k] = int(v)
            elif k in ("p", "q"):
                kw["p"] = float(v)
            else:
                raise ValueError(f"unknown generator field {k!r}")
        return cls(kind.strip(), **kw)
