"""A local multi-round map/shuffle/reduce engine.

Records are byte strings end to end: every map output and reduce output is
serialized, which keeps the byte counts in :class:`RoundStats` honest and lets
reducers run in separate processes. Keys go to reducer ``crc32(key) % r``.

With ``workers=1`` everything runs in the calling process, one reducer batch
after another; per-reducer times are then uncontended.
"""
from __future__ import annotations

import gc
import json
import multiprocessing
import os
import statistics
import struct
import tempfile
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

_HEADER = struct.Struct(">II")


class Record(NamedTuple):
    key: bytes
    value: bytes


MapFn = Callable[[Record], Iterable[Record]]
ReduceFn = Callable[[bytes, list], Iterable[Record]]


class RoundError(RuntimeError):
    def __init__(self, message: str, round_index: int | None = None, key: bytes | None = None):
        super().__init__(message)
        self.round_index = round_index
        self.key = key


def encode_records(records: Iterable[Record]) -> bytes:
    """Length-prefixed concatenation; decodes back without separators."""
    parts = []
    pack = _HEADER.pack
    for k, v in records:
        parts.append(pack(len(k), len(v)))
        parts.append(k)
        parts.append(v)
    return b"".join(parts)


def decode_records(buf: bytes) -> Iterator[Record]:
    mv = memoryview(buf)
    pos, end = 0, len(buf)
    unpack = _HEADER.unpack_from
    hsize = _HEADER.size
    while pos < end:
        if pos + hsize > end:
            raise ValueError("truncated record header")
        klen, vlen = unpack(mv, pos)
        pos += hsize
        if pos + klen + vlen > end:
            raise ValueError("truncated record body")
        yield Record(bytes(mv[pos:pos + klen]), bytes(mv[pos + klen:pos + klen + vlen]))
        pos += klen + vlen


def stable_partition(key: bytes, reducers: int) -> int:
    return zlib.crc32(key) % reducers


def modulo_partition(key: bytes, reducers: int) -> int:
    """Integer keys round-robin by value; anything else falls back to crc32."""
    if len(key) == 8:
        return int.from_bytes(key, "big", signed=True) % reducers
    return stable_partition(key, reducers)


PARTITIONERS = {"hash": stable_partition, "modulo": modulo_partition}


@dataclass
class RoundSpec:
    map_fn: MapFn
    reduce_fn: ReduceFn
    reducers: int = 1
    name: str = ""
    partitioner: Callable[[bytes, int], int] = stable_partition


@dataclass
class RoundStats:
    name: str
    reducers: int
    input_records: int = 0
    map_records: int = 0
    map_bytes: int = 0
    reduce_keys: int = 0
    reduce_output_records: int = 0
    reduce_output_bytes: int = 0
    reducer_ms: list = field(default_factory=list)
    reducer_keys: list = field(default_factory=list)
    reducer_output_records: list = field(default_factory=list)
    map_ms: float = 0.0
    wall_ms: float = 0.0

    @property
    def communication_bytes(self) -> int:
        return self.map_bytes + self.reduce_output_bytes


@dataclass
class JobStats:
    rounds: list = field(default_factory=list)
    wall_ms: float = 0.0

    @property
    def communication_bytes(self) -> int:
        return sum(r.communication_bytes for r in self.rounds)

    @property
    def communication_records(self) -> int:
        return sum(r.map_records + r.reduce_output_records for r in self.rounds)

    def to_dict(self) -> dict:
        return {
            "wall_ms": self.wall_ms,
            "communication_bytes": self.communication_bytes,
            "communication_records": self.communication_records,
            "rounds": [dict(asdict(r), communication_bytes=r.communication_bytes) for r in self.rounds],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "JobStats":
        rounds = []
        for r in data["rounds"]:
            r = {k: v for k, v in r.items() if k != "communication_bytes"}
            rounds.append(RoundStats(**r))
        return cls(rounds, data.get("wall_ms", 0.0))


def reducer_skew(stats: JobStats, round_index: int = -1) -> tuple[float, float, float]:
    """Population mean, variance and standard deviation of per-reducer times (ms)."""
    times = stats.rounds[round_index].reducer_ms
    if not times:
        raise ValueError("round has no reducer timings")
    mean = statistics.fmean(times)
    var = statistics.pvariance(times, mu=mean)
    return mean, var, var ** 0.5


def _map_task(map_fn, partitioner, reducers: int, chunk: bytes):
    buckets: list[list[Record]] = [[] for _ in range(reducers)]
    count = 0
    for rec in decode_records(chunk):
        try:
            outs = map_fn(rec)
            for out in outs:
                buckets[partitioner(out.key, reducers)].append(out)
                count += 1
        except RoundError:
            raise
        except Exception as exc:
            raise RoundError(f"map failed on key {rec.key!r}: {exc!r}", key=rec.key) from exc
    return [encode_records(b) for b in buckets], count


def _reduce_task(reduce_fn, blobs: Sequence[bytes]):
    # collector pauses would land on whichever reducer happens to trigger them
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        return _reduce_batch(reduce_fn, blobs)
    finally:
        if gc_was_enabled:
            gc.enable()


def _reduce_batch(reduce_fn, blobs: Sequence[bytes]):
    start = time.perf_counter()
    groups: dict[bytes, list[bytes]] = {}
    for blob in blobs:
        for k, v in decode_records(blob):
            groups.setdefault(k, []).append(v)
    out: list[Record] = []
    for k in sorted(groups):
        try:
            out.extend(reduce_fn(k, groups[k]))
        except RoundError:
            raise
        except Exception as exc:
            raise RoundError(f"reduce failed on key {k!r}: {exc!r}", key=k) from exc
    blob = encode_records(out)
    elapsed = (time.perf_counter() - start) * 1000.0
    return blob, len(out), len(groups), elapsed


def _reduce_interleaved(reduce_fn, per_reducer: Sequence[Sequence[bytes]]):
    """Single-process reduce that visits the reducers' keys round-robin.

    Each key's time is charged to its own reducer, so slow stretches of the
    machine are spread over all reducers instead of whichever ran then.
    """
    r = len(per_reducer)
    groups: list[dict[bytes, list[bytes]]] = []
    elapsed = [0.0] * r
    for i, blobs in enumerate(per_reducer):
        start = time.perf_counter()
        g: dict[bytes, list[bytes]] = {}
        for blob in blobs:
            for k, v in decode_records(blob):
                g.setdefault(k, []).append(v)
        groups.append(g)
        elapsed[i] += (time.perf_counter() - start) * 1000.0
    keys = [sorted(g) for g in groups]
    outs: list[list[Record]] = [[] for _ in range(r)]
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for j in range(max((len(k) for k in keys), default=0)):
            for i in range(r):
                if j >= len(keys[i]):
                    continue
                k = keys[i][j]
                start = time.perf_counter()
                try:
                    outs[i].extend(reduce_fn(k, groups[i][k]))
                except RoundError:
                    raise
                except Exception as exc:
                    raise RoundError(f"reduce failed on key {k!r}: {exc!r}", key=k) from exc
                elapsed[i] += (time.perf_counter() - start) * 1000.0
    finally:
        if gc_was_enabled:
            gc.enable()
    result = []
    for i in range(r):
        start = time.perf_counter()
        blob = encode_records(outs[i])
        elapsed[i] += (time.perf_counter() - start) * 1000.0
        result.append((blob, len(outs[i]), len(groups[i]), elapsed[i]))
    return result


def _split(records: Sequence[Record], parts: int) -> list[bytes]:
    size = max(1, -(-len(records) // parts))
    return [encode_records(records[i:i + size]) for i in range(0, len(records), size)] or [b""]


class Engine:
    """Runs rounds on a pool of ``workers`` processes (in-process when 1).

    ``spill_dir`` makes every round write its output to disk and read it
    back before the next round.
    """

    def __init__(self, workers: int | None = None, spill_dir: str | None = None):
        self.workers = workers if workers is not None else (os.cpu_count() or 1)
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.spill_dir = spill_dir
        self._pool: ProcessPoolExecutor | None = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def _executor(self, tasks: int) -> ProcessPoolExecutor | None:
        if self.workers == 1 or tasks == 1:
            return None
        if self._pool is None:
            ctx = multiprocessing.get_context("fork")
            self._pool = ProcessPoolExecutor(self.workers, mp_context=ctx)
        return self._pool

    def run_round(self, records: Sequence[Record], spec: RoundSpec,
                  round_index: int = 0) -> tuple[list[Record], RoundStats]:
        r = spec.reducers
        if r < 1:
            raise ValueError("reducer count must be >= 1")
        stats = RoundStats(spec.name or f"round-{round_index}", r, input_records=len(records))
        t0 = time.perf_counter()

        chunks = _split(records, min(r, self.workers) if self.workers > 1 else 1)
        pool = self._executor(len(chunks))
        try:
            if pool is None:
                mapped = [_map_task(spec.map_fn, spec.partitioner, r, c) for c in chunks]
            else:
                futs = [pool.submit(_map_task, spec.map_fn, spec.partitioner, r, c) for c in chunks]
                mapped = [f.result() for f in futs]
        except RoundError as exc:
            exc.round_index = round_index
            raise
        stats.map_records = sum(c for _, c in mapped)
        stats.map_bytes = sum(len(b) for buckets, _ in mapped for b in buckets)
        t1 = time.perf_counter()
        stats.map_ms = (t1 - t0) * 1000.0

        per_reducer = [[buckets[i] for buckets, _ in mapped] for i in range(r)]
        pool = self._executor(r)
        try:
            if pool is None:
                reduced = _reduce_interleaved(spec.reduce_fn, per_reducer)
            else:
                futs = [pool.submit(_reduce_task, spec.reduce_fn, blobs) for blobs in per_reducer]
                reduced = [f.result() for f in futs]
        except RoundError as exc:
            exc.round_index = round_index
            raise

        out_blob = b"".join(blob for blob, *_ in reduced)
        stats.reducer_ms = [ms for *_, ms in reduced]
        stats.reducer_keys = [k for _, _, k, _ in reduced]
        stats.reducer_output_records = [n for _, n, _, _ in reduced]
        stats.reduce_keys = sum(stats.reducer_keys)
        stats.reduce_output_records = sum(stats.reducer_output_records)
        stats.reduce_output_bytes = len(out_blob)

        if self.spill_dir is not None:
            os.makedirs(self.spill_dir, exist_ok=True)
            fd, path = tempfile.mkstemp(prefix=f"round-{round_index:02d}-", suffix=".bin", dir=self.spill_dir)
            with os.fdopen(fd, "wb") as fh:
                fh.write(out_blob)
            del out_blob
            with open(path, "rb") as fh:
                out_blob = fh.read()
            os.unlink(path)

        out = list(decode_records(out_blob))
        stats.wall_ms = (time.perf_counter() - t0) * 1000.0
        return out, stats

    def run_pipeline(self, records: Sequence[Record], specs: Sequence[RoundSpec]) -> tuple[list[Record], JobStats]:
        job = JobStats()
        t0 = time.perf_counter()
        current = list(records)
        for i, spec in enumerate(specs):
            current, rs = self.run_round(current, spec, round_index=i)
            job.rounds.append(rs)
        job.wall_ms = (time.perf_counter() - t0) * 1000.0
        return current, job


def run_round(records: Sequence[Record], spec: RoundSpec, workers: int = 1):
    with Engine(workers) as eng:
        return eng.run_round(records, spec)


def run_pipeline(records: Sequence[Record], specs: Sequence[RoundSpec], workers: int = 1,
                 spill_dir: str | None = None):
    with Engine(workers, spill_dir) as eng:
        return eng.run_pipeline(records, specs)
