"""Clustered MapReduce pipelines for maximal biclique enumeration.

Round layout:

* every variant starts with the adjacency-list round (edge ``(x, y)`` is
  emitted under both endpoints and the reducer collects each vertex's
  neighborhood);
* CDFS, CD0 and CCONS then ship each adjacency record to its own vertex and
  to every neighbor, so the reducer for ``v`` holds ``v``'s cluster and
  enumerates there;
* CD1 and CD2 insert a round in between that sends each vertex's order
  property (degree, or 2-neighborhood size) to all of its 2-neighbors.

A cluster rebuilt by a reducer holds every edge with an endpoint in the closed
neighborhood of the key. Edges between two vertices at distance exactly two
are never shipped; no biclique containing the key uses one.
"""
from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterable, Iterator

from .engine import PARTITIONERS, Engine, JobStats, Record, RoundSpec
from .graph import Biclique, Cluster, Graph, GraphError
from .seq import (EnumSummary, OrderKind, VertexOrder, cd0_seq, cdl_seq,
                  mbe_consensus, mbe_dfs)

_KEY = struct.Struct(">q")

TAG_ADJ = b"A"
TAG_TRIPLE = b"P"
TAG_PROP = b"Q"
TAG_BICLIQUE = b"B"


class Algorithm(str, enum.Enum):
    CDFS = "cdfs"
    CD0 = "cd0"
    CD1 = "cd1"
    CD2 = "cd2"
    CCONS = "ccons"


def vkey(v: int) -> bytes:
    return _KEY.pack(v)


def unkey(k: bytes) -> int:
    return _KEY.unpack(k)[0]


def pack_ints(tag: bytes, ints) -> bytes:
    ints = list(ints)
    return tag + struct.pack(f"<{len(ints)}q", *ints)


def unpack_ints(value: bytes) -> list[int]:
    body = value[1:]
    return list(struct.unpack(f"<{len(body) // 8}q", body))


def encode_biclique(owner: int, b: Biclique) -> bytes:
    return pack_ints(TAG_BICLIQUE, (owner, len(b.left), *b.left, *b.right))


def decode_biclique(value: bytes) -> tuple[int, Biclique]:
    ints = unpack_ints(value)
    owner, nl = ints[0], ints[1]
    return owner, Biclique(tuple(ints[2:2 + nl]), tuple(ints[2 + nl:]))


def edge_records(g: Graph) -> list[Record]:
    return [Record(b"", struct.pack("<qq", u, v)) for u, v in g.edges()]


# -- round 1: adjacency lists ------------------------------------------------

def adjacency_map(rec: Record) -> Iterator[Record]:
    x, y = struct.unpack("<qq", rec.value)
    yield Record(vkey(x), vkey(y))
    yield Record(vkey(y), vkey(x))


def adjacency_reduce(key: bytes, values: list[bytes]) -> Iterator[Record]:
    v = unkey(key)
    nbrs = sorted({unkey(x) for x in values})
    yield Record(b"", pack_ints(TAG_ADJ, (v, *nbrs)))


# -- round 2 map (and round 3 map for CD1/CD2) -------------------------------

def two_hop_map(rec: Record) -> Iterator[Record]:
    tag = rec.value[:1]
    if tag == TAG_ADJ:
        ints = unpack_ints(rec.value)
        yield Record(vkey(ints[0]), rec.value)
        for y in ints[1:]:
            yield Record(vkey(y), rec.value)
    elif tag == TAG_TRIPLE:
        dest, src, prop = unpack_ints(rec.value)
        yield Record(vkey(dest), pack_ints(TAG_PROP, (src, prop)))
    else:
        raise ValueError(f"unexpected record tag {tag!r}")


def _gather(key: bytes, values: list[bytes]):
    """Split reducer input into adjacency lists and received properties."""
    adj: dict[int, list[int]] = {}
    props: dict[int, int] = {}
    for val in values:
        ints = unpack_ints(val)
        if val[:1] == TAG_ADJ:
            adj[ints[0]] = ints[1:]
        elif val[:1] == TAG_PROP:
            props[ints[0]] = ints[1]
    return unkey(key), adj, props


def _emit(owner: int, out: list[Record]) -> Callable[[Biclique], None]:
    def sink(b: Biclique) -> None:
        out.append(Record(b"", encode_biclique(owner, b)))
    return sink


def _owned_by(key: int, out: list[Record]) -> Callable[[Biclique], None]:
    emit = _emit(key, out)

    def sink(b: Biclique) -> None:
        if b.left[0] == key:
            emit(b)
    return sink


def cluster_reduce(key: bytes, values: list[bytes], algo: str, s: int, strict: bool = True) -> list[Record]:
    v, adj, _ = _gather(key, values)
    if not adj.get(v):
        return []
    cluster = Cluster(v, Graph(adj))
    out: list[Record] = []
    if algo == Algorithm.CDFS.value:
        mbe_dfs(cluster.subgraph, s, _owned_by(v, out))
    elif algo == Algorithm.CCONS.value:
        mbe_consensus(cluster.subgraph, s, _owned_by(v, out))
    elif algo == Algorithm.CD0.value:
        cd0_seq(cluster, v, s, _emit(v, out), strict=strict)
    else:
        raise ValueError(f"unknown clustering algorithm {algo!r}")
    return out


def property_reduce(key: bytes, values: list[bytes], kind: str) -> list[Record]:
    """Re-emit the key's own adjacency and send its property to all 2-neighbors."""
    v, adj, _ = _gather(key, values)
    own = adj.get(v)
    if not own:
        return []
    two_hop = set()
    for nbrs in adj.values():
        two_hop.update(nbrs)
    two_hop.update(own)
    prop = len(own) if kind == OrderKind.DEGREE.value else len(two_hop)
    out = [Record(b"", pack_ints(TAG_ADJ, (v, *own)))]
    for dest in sorted(two_hop):
        out.append(Record(b"", pack_ints(TAG_TRIPLE, (dest, v, prop))))
    return out


def ordered_cluster_reduce(key: bytes, values: list[bytes], kind: str, s: int,
                           strict: bool = True) -> list[Record]:
    v, adj, props = _gather(key, values)
    if not adj.get(v):
        return []
    g = Graph(adj)
    missing = [u for u in g.vertices if u not in props]
    if missing:
        raise GraphError(f"reducer {v}: no property received for {sorted(missing)[:10]}")
    order = VertexOrder(OrderKind(kind), props)
    out: list[Record] = []
    cdl_seq(Cluster(v, g, props), v, order, s, _emit(v, out), strict=strict)
    return out


def build_rounds(algo: Algorithm | str, s: int, reducers: int,
                 partitioner: str = "hash", strict: bool = True) -> list[RoundSpec]:
    algo = Algorithm(algo)
    part = PARTITIONERS[partitioner]
    if s < 1:
        raise ValueError(f"size threshold must be >= 1, got {s}")
    if reducers < 1:
        raise ValueError(f"reducer count must be >= 1, got {reducers}")
    first = RoundSpec(adjacency_map, adjacency_reduce, reducers, "adjacency", part)
    if algo in (Algorithm.CD1, Algorithm.CD2):
        kind = (OrderKind.DEGREE if algo is Algorithm.CD1 else OrderKind.TWO_NEIGHBORHOOD).value
        return [
            first,
            RoundSpec(two_hop_map, partial(property_reduce, kind=kind), reducers, "property", part),
            RoundSpec(two_hop_map, partial(ordered_cluster_reduce, kind=kind, s=s, strict=strict),
                      reducers, "enumerate", part),
        ]
    return [
        first,
        RoundSpec(two_hop_map, partial(cluster_reduce, algo=algo.value, s=s, strict=strict),
                  reducers, "enumerate", part),
    ]


@dataclass
class ParallelResult:
    algorithm: Algorithm
    s: int
    reducers: int
    summary: EnumSummary
    stats: JobStats
    records: list = field(repr=False, default_factory=list)

    def emissions(self) -> Iterator[tuple[int, Biclique]]:
        """Every emitted ``(reducer key, biclique)``, with no deduplication."""
        for rec in self.records:
            yield decode_biclique(rec.value)

    def bicliques(self) -> Iterator[Biclique]:
        for _, b in self.emissions():
            yield b

    def shards(self) -> list[list[Biclique]]:
        """Emitted bicliques grouped by the reducer (partition index) that wrote them."""
        out, pos = [], 0
        for n in self.stats.rounds[-1].reducer_output_records:
            out.append([decode_biclique(r.value)[1] for r in self.records[pos:pos + n]])
            pos += n
        return out


def run_algorithm(g: Graph, algo: Algorithm | str, s: int = 1, reducers: int = 1,
                  sink: Callable[[Biclique], None] | None = None,
                  engine: Engine | None = None, keep_records: bool = True,
                  partitioner: str = "hash", strict: bool = True) -> ParallelResult:
    """Run one pipeline end to end and stream the emitted bicliques to ``sink``.

    ``strict=False`` uses the weaker reducer pruning (only closures
    reaching below the key are cut); output is identical either way.
    """
    algo = Algorithm(algo)
    specs = build_rounds(algo, s, reducers, partitioner, strict)
    own_engine = engine is None
    eng = engine or Engine(workers=1)
    try:
        records, stats = eng.run_pipeline(edge_records(g), specs)
    finally:
        if own_engine:
            eng.close()
    summary = EnumSummary()
    for rec in records:
        _, b = decode_biclique(rec.value)
        summary.add(b)
        if sink is not None:
            sink(b)
    return ParallelResult(algo, s, reducers, summary, stats, records if keep_records else [])


def cdfs(g: Graph, s: int = 1, r: int = 1, **kw) -> ParallelResult:
    return run_algorithm(g, Algorithm.CDFS, s, r, **kw)


def cd0(g: Graph, s: int = 1, r: int = 1, **kw) -> ParallelResult:
    return run_algorithm(g, Algorithm.CD0, s, r, **kw)


def cd1(g: Graph, s: int = 1, r: int = 1, **kw) -> ParallelResult:
    return run_algorithm(g, Algorithm.CD1, s, r, **kw)


def cd2(g: Graph, s: int = 1, r: int = 1, **kw) -> ParallelResult:
    return run_algorithm(g, Algorithm.CD2, s, r, **kw)


def ccons(g: Graph, s: int = 1, r: int = 1, **kw) -> ParallelResult:
    return run_algorithm(g, Algorithm.CCONS, s, r, **kw)


def order_for(algo: Algorithm | str, g: Graph) -> VertexOrder:
    """The total order under which ``algo`` assigns ownership."""
    algo = Algorithm(algo)
    if algo is Algorithm.CD1:
        return VertexOrder.by_degree(g)
    if algo is Algorithm.CD2:
        return VertexOrder.by_two_neighborhood(g)
    return VertexOrder.lexicographic()
