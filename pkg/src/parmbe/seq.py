"""Sequential maximal biclique enumerators.

All enumerators push results into a ``sink`` callable instead of building the
full result set, and return an :class:`EnumSummary` with the count and the
output size (sum of ``|L| * |R|``).
"""
from __future__ import annotations

import enum
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .graph import Biclique, Cluster, Graph, GraphError

Sink = Callable[[Biclique], None]

ORACLE_MAX_N = 20


class OrderKind(str, enum.Enum):
    LEXICOGRAPHIC = "lexicographic"
    DEGREE = "degree"
    TWO_NEIGHBORHOOD = "two-neighborhood"


@dataclass(frozen=True)
class VertexOrder:
    """Total order on vertices: ascending ``(property[v], v)``.

    The lexicographic order carries no property map and compares ids alone.
    """

    kind: OrderKind = OrderKind.LEXICOGRAPHIC
    property: Mapping[int, int] | None = None

    @classmethod
    def lexicographic(cls) -> "VertexOrder":
        return cls()

    @classmethod
    def by_degree(cls, g: Graph) -> "VertexOrder":
        return cls(OrderKind.DEGREE, {v: g.degree(v) for v in g.vertices})

    @classmethod
    def by_two_neighborhood(cls, g: Graph) -> "VertexOrder":
        from .graph import two_neighborhood
        return cls(OrderKind.TWO_NEIGHBORHOOD, {v: len(two_neighborhood(g, v)) for v in g.vertices})

    def sort_key(self, v: int):
        if self.property is None:
            return v
        return (self.property[v], v)

    def ranks(self, vertices: Iterable[int]) -> dict[int, int]:
        """Map each vertex to its position among ``vertices`` under this order."""
        vs = list(vertices)
        if self.property is None:
            return {v: v for v in vs}
        missing = [v for v in vs if v not in self.property]
        if missing:
            raise GraphError(f"no order property for vertices {sorted(missing)[:10]}")
        return {v: i for i, v in enumerate(sorted(vs, key=self.sort_key))}

    def smallest(self, vertices: Iterable[int]) -> int:
        return min(vertices, key=self.sort_key)


@dataclass
class EnumSummary:
    count: int = 0
    edge_sum: int = 0

    def add(self, b: Biclique) -> None:
        self.count += 1
        self.edge_sum += b.edge_weight()

    def __iadd__(self, other: "EnumSummary") -> "EnumSummary":
        self.count += other.count
        self.edge_sum += other.edge_sum
        return self


class _Search:
    """Depth-first closed-set search shared by PA, CD0_Seq and CDL_Seq.

    With ``key`` unset this is the plain algorithm. With ``key`` set, the
    tail starts without vertices ranked below the key, branches whose closure
    reaches below the key are cut, and only bicliques whose smallest vertex
    is the key are emitted.

    Each closed pair is reached once per side, so ``<Y, N>`` is emitted only
    when the smallest vertex of ``Y | N`` lies in ``Y``.

    ``strict_key`` additionally drops a branch once the key is neither in the
    closure nor left in the tail: nothing below it can be emitted.
    """

    def __init__(self, g: Graph, s: int, rank: Mapping[int, int], sink: Sink,
                 key: int | None = None, check_growth: bool = False, strict_key: bool = False):
        if s < 1:
            raise ValueError(f"size threshold must be >= 1, got {s}")
        self.adj = {v: g.nbr_set(v) for v in g.vertices}
        self.s = s
        self.rank = rank
        self.sink = sink
        self.key = key
        self.key_rank = rank[key] if key is not None else None
        self.check_growth = check_growth
        self.strict_key = strict_key
        self.summary = EnumSummary()
        self.nodes = 0

    def common(self, vertices: frozenset[int]) -> frozenset[int]:
        adj = self.adj
        it = sorted(vertices, key=lambda u: len(adj[u]))
        acc = adj[it[0]]
        for u in it[1:]:
            acc = acc & adj[u]
            if not acc:
                break
        return acc

    def run(self) -> EnumSummary:
        tail = set(self.adj)
        if self.key is not None:
            kr = self.key_rank
            tail = {v for v in tail if self.rank[v] >= kr}
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 10 * len(self.adj) + 1000))
        try:
            self._expand(frozenset(), None, tail)
        finally:
            sys.setrecursionlimit(limit)
        return self.summary

    def _expand(self, X: frozenset[int], gamma_x: frozenset[int] | None, T: set[int]) -> None:
        self.nodes += 1
        adj, s, rank = self.adj, self.s, self.rank
        # A tail vertex with empty Γ(X ∪ {v}) is never adjacent to Γ(X); skip those up front.
        if gamma_x is not None:
            reach: set[int] = set()
            for u in gamma_x:
                reach |= adj[u]
            if len(reach) < len(T):
                T = T & reach
        cand: dict[int, frozenset[int]] = {}
        for v in T:
            nb = adj[v] if gamma_x is None else gamma_x & adj[v]
            if len(nb) >= s:
                cand[v] = nb
        if len(X) + len(cand) < s:
            return
        order = sorted(cand, key=lambda v: (len(cand[v]), rank[v]))
        remaining = set(order)
        key_rank, key = self.key_rank, self.key
        for v in order:
            remaining.discard(v)
            if len(X) + 1 + len(remaining) < s:
                continue
            N = cand[v]
            Y = self.common(N)
            if key_rank is not None:
                if any(rank[y] < key_rank for y in Y):
                    continue
                if self.strict_key and key not in Y and key not in remaining:
                    continue
            if self.check_growth:
                assert X <= Y and v in Y, "closure lost vertices"
            fresh = Y - X
            if all(u == v or u in remaining for u in fresh):
                if len(Y) >= s:
                    self._maybe_emit(Y, N)
                self._expand(Y, N, remaining - Y)

    def _maybe_emit(self, Y: frozenset[int], N: frozenset[int]) -> None:
        rank = self.rank
        low_y = min(rank[y] for y in Y)
        low_n = min(rank[u] for u in N)
        if low_n < low_y:
            return
        if self.key_rank is not None and low_y != self.key_rank:
            return
        b = Biclique(tuple(Y), tuple(N))
        self.summary.add(b)
        self.sink(b)


def _null_sink(_: Biclique) -> None:
    pass


def mbe_dfs(g: Graph, s: int = 1, sink: Sink | None = None,
            order: VertexOrder | None = None) -> EnumSummary:
    """Enumerate every maximal biclique of ``g`` with both sides of size >= s."""
    order = order or VertexOrder.lexicographic()
    search = _Search(g, s, order.ranks(g.vertices), sink or _null_sink)
    return search.run()


def cd0_seq(cluster: Cluster, key: int, s: int = 1, sink: Sink | None = None,
            strict: bool = True) -> EnumSummary:
    """Enumerate the maximal bicliques of ``cluster`` whose smallest id is ``key``."""
    g = cluster.subgraph
    if key not in g:
        return EnumSummary()
    search = _Search(g, s, {v: v for v in g.vertices}, sink or _null_sink, key=key, strict_key=strict)
    return search.run()


def cdl_seq(cluster: Cluster, key: int, order: VertexOrder, s: int = 1,
            sink: Sink | None = None, strict: bool = True) -> EnumSummary:
    """Like :func:`cd0_seq`, with "smallest" taken under ``order``.

    Every vertex of the cluster must have an order property; a gap means the
    property dissemination upstream is broken and raises ``GraphError``.
    """
    g = cluster.subgraph
    if order.property is not None:
        missing = [v for v in g.vertices if v not in order.property]
        if missing:
            raise GraphError(f"cluster {cluster.center}: missing order property for {sorted(missing)[:10]}")
    if key not in g:
        return EnumSummary()
    search = _Search(g, s, order.ranks(g.vertices), sink or _null_sink, key=key, strict_key=strict)
    return search.run()


def _closure_pair(g: Graph, side: frozenset[int]):
    gamma = _common(g, side)
    if not gamma:
        return None
    return (_common(g, gamma), gamma)


def _common(g: Graph, vertices: Iterable[int]) -> frozenset[int]:
    acc = None
    for u in vertices:
        acc = g.nbr_set(u) if acc is None else acc & g.nbr_set(u)
        if not acc:
            return frozenset()
    return acc if acc is not None else frozenset()


def _extend(g: Graph, x: frozenset[int], y: frozenset[int]):
    for side in (x, y):
        pair = _closure_pair(g, side)
        if pair is not None:
            yield Biclique(tuple(pair[0]), tuple(pair[1]))


def _consensus(b1: Biclique, b2: Biclique):
    x1, y1 = frozenset(b1.left), frozenset(b1.right)
    x2, y2 = frozenset(b2.left), frozenset(b2.right)
    for a, b in ((x1 | x2, y1 & y2), (x1 | y2, y1 & x2),
                 (y1 | x2, x1 & y2), (y1 | y2, x1 & x2)):
        if a and b and a.isdisjoint(b):
            yield a, b


def mbe_consensus(g: Graph, s: int = 1, sink: Sink | None = None) -> EnumSummary:
    """Consensus enumeration: extended stars crossed repeatedly until stable.

    Holds the full candidate set in memory; meant for clusters and small
    graphs.
    """
    if s < 1:
        raise ValueError(f"size threshold must be >= 1, got {s}")
    seeds: set[Biclique] = set()
    for v in g.vertices:
        if g.degree(v):
            seeds.update(_extend(g, frozenset((v,)), g.nbr_set(v)))
    seed_list = sorted(seeds)
    found = set(seeds)
    prev = seed_list
    while prev:
        fresh: set[Biclique] = set()
        for b1 in prev:
            for b2 in seed_list:
                for x, y in _consensus(b1, b2):
                    for m in _extend(g, x, y):
                        if m not in found:
                            fresh.add(m)
        found |= fresh
        prev = sorted(fresh)

    summary = EnumSummary()
    for b in sorted(found):
        if b.min_side() >= s:
            summary.add(b)
            if sink is not None:
                sink(b)
    return summary


def brute_force_oracle(g: Graph, s: int = 1) -> set[Biclique]:
    """Every mutually closed pair ``L = Γ(R)``, ``R = Γ(L)`` by subset enumeration."""
    n = g.n
    if n > ORACLE_MAX_N:
        raise ValueError(f"brute force oracle refuses graphs with n > {ORACLE_MAX_N} (n={n})")
    verts = g.vertices
    index = {v: i for i, v in enumerate(verts)}
    masks = [0] * n
    for i, v in enumerate(verts):
        for u in g.adjacency(v):
            masks[i] |= 1 << index[u]
    full = (1 << n) - 1
    # gamma[S] = common neighborhood of vertex subset S, built one bit at a time
    gamma = [full] * (1 << n)
    for sub in range(1, 1 << n):
        low = sub & -sub
        gamma[sub] = gamma[sub ^ low] & masks[low.bit_length() - 1]

    def members(mask: int) -> tuple[int, ...]:
        return tuple(verts[i] for i in range(n) if mask >> i & 1)

    out: set[Biclique] = set()
    for right in range(1, 1 << n):
        left = gamma[right]
        if left and gamma[left] == right:
            b = Biclique(members(left), members(right))
            if b.min_side() >= s:
                out.add(b)
    return out
