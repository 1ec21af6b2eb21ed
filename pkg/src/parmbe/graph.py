"""Undirected simple graphs, neighborhood algebra and the biclique value type."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO


class GraphError(ValueError):
    pass


class ParseError(GraphError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


class Graph:
    """Immutable undirected graph without self-loops or parallel edges.

    Adjacency is kept twice: as sorted tuples (the canonical representation,
    used for iteration and serialization) and as frozensets for the set
    algebra done in the enumeration inner loops.
    """

    __slots__ = ("_adj", "_sets", "_vertices", "_m", "labels")

    def __init__(self, adjacency: Mapping[int, Iterable[int]], labels: Mapping[int, str] | None = None):
        sets: dict[int, set[int]] = {}
        for v, nbrs in adjacency.items():
            sets.setdefault(v, set())
            for u in nbrs:
                if u == v:
                    continue
                sets[v].add(u)
                sets.setdefault(u, set()).add(v)
        self._vertices = tuple(sorted(sets))
        self._adj = {v: tuple(sorted(sets[v])) for v in self._vertices}
        self._sets = {v: frozenset(sets[v]) for v in self._vertices}
        self._m = sum(len(a) for a in self._adj.values()) // 2
        self.labels = dict(labels) if labels else None

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], vertices: Iterable[int] = ()) -> "Graph":
        adj: dict[int, list[int]] = {v: [] for v in vertices}
        for u, v in edges:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, [])
        return cls(adj)

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return self._m

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def adjacency(self, v: int) -> tuple[int, ...]:
        try:
            return self._adj[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def nbr_set(self, v: int) -> frozenset[int]:
        try:
            return self._sets[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def degree(self, v: int) -> int:
        return len(self.adjacency(v))

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj.values()), default=0)

    def edges(self) -> Iterable[tuple[int, int]]:
        """Each edge once, as ``(u, v)`` with ``u < v``, in sorted order."""
        for u in self._vertices:
            for v in self._adj[u]:
                if u < v:
                    yield u, v

    def label(self, v: int) -> str:
        if self.labels is not None:
            return self.labels[v]
        return str(v)


def load_edge_list(stream: TextIO | str) -> Graph:
    """Parse a SNAP-style edge list.

    Lines starting with ``#`` (and blank lines) are skipped; every other line
    must carry at least two whitespace-separated tokens. If all tokens are
    non-negative integers they are used as vertex ids directly. Otherwise all
    tokens are treated as labels and mapped to dense ids in sorted label order,
    so id order agrees with lexicographic label order; the mapping is kept in
    ``Graph.labels``.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    pairs: list[tuple[str, str]] = []
    for lineno, line in enumerate(stream, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) < 2:
            raise ParseError(lineno, line.rstrip("\n"), "expected two vertex tokens")
        pairs.append((parts[0], parts[1]))
    if not pairs:
        raise GraphError("empty graph")

    labels = None
    if all(a.isdigit() and b.isdigit() for a, b in pairs):
        edges = [(int(a), int(b)) for a, b in pairs]
    else:
        names = sorted({t for p in pairs for t in p})
        ids = {name: i for i, name in enumerate(names)}
        labels = {i: name for name, i in ids.items()}
        edges = [(ids[a], ids[b]) for a, b in pairs]
    g = Graph.from_edges(edges)
    g.labels = labels
    return g


def write_edge_list(g: Graph, out: TextIO) -> None:
    for u, v in g.edges():
        out.write(f"{g.label(u)} {g.label(v)}\n")


def write_labels(g: Graph, out: TextIO) -> None:
    """Two-column ``id label`` dictionary; a no-op for integer-id graphs."""
    if g.labels is None:
        return
    for i in sorted(g.labels):
        out.write(f"{i}\t{g.labels[i]}\n")


def neighborhood(g: Graph, v: int) -> tuple[int, ...]:
    return g.adjacency(v)


def two_neighborhood(g: Graph, v: int) -> frozenset[int]:
    """All vertices within two hops of ``v``.

    ``v`` itself is included whenever it has a neighbor (it is reachable back
    through that neighbor); an isolated vertex has an empty 2-neighborhood.
    """
    out: set[int] = set()
    for u in g.adjacency(v):
        out.add(u)
        out.update(g.nbr_set(u))
    return frozenset(out)


def common_neighborhood(g: Graph, vertices: Iterable[int]) -> frozenset[int]:
    """Intersection of the neighborhoods of ``vertices``; empty input is an error."""
    it = iter(vertices)
    try:
        first = next(it)
    except StopIteration:
        raise GraphError("common neighborhood of an empty set is undefined") from None
    acc = g.nbr_set(first)
    for u in it:
        if not acc:
            break
        acc = acc & g.nbr_set(u)
    return acc


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Graph:
    keep = frozenset(vertices)
    for v in keep:
        if v not in g:
            raise GraphError(f"unknown vertex {v!r}")
    sub = Graph({v: [u for u in g.adjacency(v) if u in keep] for v in keep})
    if g.labels is not None:
        sub.labels = {v: g.labels[v] for v in keep}
    return sub


@dataclass(frozen=True, order=True)
class Biclique:
    """A pair of disjoint non-empty vertex sets, stored canonically.

    The side holding the smallest vertex id becomes ``left``, so
    ``Biclique(a, b) == Biclique(b, a)``.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        left = tuple(sorted(set(self.left)))
        right = tuple(sorted(set(self.right)))
        if not left or not right:
            raise GraphError("biclique sides must be non-empty")
        if not set(left).isdisjoint(right):
            raise GraphError("biclique sides must be disjoint")
        if right[0] < left[0]:
            left, right = right, left
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def edge_weight(self) -> int:
        return len(self.left) * len(self.right)

    def vertices(self) -> frozenset[int]:
        return frozenset(self.left) | frozenset(self.right)

    def min_side(self) -> int:
        return min(len(self.left), len(self.right))

    def format(self, g: Graph | None = None) -> str:
        fmt = (lambda v: g.label(v)) if g is not None else str
        return " ".join(map(fmt, self.left)) + " | " + " ".join(map(fmt, self.right))

    @classmethod
    def parse(cls, line: str) -> "Biclique":
        left, _, right = line.partition("|")
        return cls(tuple(map(int, left.split())), tuple(map(int, right.split())))


def is_maximal_biclique(g: Graph, b: Biclique) -> bool:
    """True when ``b`` is a mutually closed pair in ``g``."""
    return (common_neighborhood(g, b.left) == frozenset(b.right)
            and common_neighborhood(g, b.right) == frozenset(b.left))


@dataclass
class Cluster:
    """The subgraph handed to one reducer, keyed by its center vertex."""

    center: int
    subgraph: Graph
    properties: dict[int, int] | None = field(default=None)


def build_cluster(g: Graph, v: int, properties: Mapping[int, int] | None = None) -> Cluster:
    """Cluster of ``v``: the subgraph induced on its 2-neighborhood."""
    sub = induced_subgraph(g, two_neighborhood(g, v))
    props = None
    if properties is not None:
        props = {u: properties[u] for u in sub.vertices}
    return Cluster(v, sub, props)
