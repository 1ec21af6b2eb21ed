"""Benchmark harness: timed pipeline runs, speedup series and report files."""
from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .engine import Engine, reducer_skew
from .graph import Graph
from .parallel import Algorithm, run_algorithm


@dataclass
class BenchReport:
    algorithm: str
    graph: str
    n: int
    m: int
    s: int
    reducers: int
    wall_ms: float
    count: int
    output_size: int
    communication_bytes: int
    communication_records: int
    reducer_mean_ms: float
    reducer_std_ms: float
    stats: dict = field(default_factory=dict, repr=False)

    def row(self) -> dict:
        d = asdict(self)
        d.pop("stats")
        return d


def bench_one(g: Graph, label: str, algo: Algorithm | str, s: int = 1, reducers: int = 1,
              workers: int = 1, partitioner: str = "hash") -> BenchReport:
    with Engine(workers) as eng:
        t0 = time.perf_counter()
        res = run_algorithm(g, algo, s, reducers, engine=eng, keep_records=False,
                            partitioner=partitioner)
        wall = (time.perf_counter() - t0) * 1000.0
    mean, _, std = reducer_skew(res.stats)
    return BenchReport(
        algorithm=Algorithm(algo).value, graph=label, n=g.n, m=g.m, s=s, reducers=reducers,
        wall_ms=wall, count=res.summary.count, output_size=res.summary.edge_sum,
        communication_bytes=res.stats.communication_bytes,
        communication_records=res.stats.communication_records,
        reducer_mean_ms=mean, reducer_std_ms=std, stats=res.stats.to_dict(),
    )


def bench(algorithms: Iterable[Algorithm | str], graphs: Mapping[str, Graph],
          s_values: Sequence[int] = (1,), reducer_counts: Sequence[int] = (1,),
          workers: int | None = None, repeat: int = 1,
          partitioner: str = "hash") -> list[BenchReport]:
    """Every algorithm x graph x s x r combination, run one at a time.

    ``workers`` defaults to the reducer count of each run; pass a value to
    pin the pool size. With ``repeat > 1`` the fastest run is kept.
    """
    reports = []
    for label, g in graphs.items():
        for algo in algorithms:
            for s in s_values:
                for r in reducer_counts:
                    runs = [bench_one(g, label, algo, s, r, workers or r, partitioner) for _ in range(repeat)]
                    reports.append(min(runs, key=lambda rep: rep.wall_ms))
    return reports


def speedup_series(reports: Iterable[BenchReport]) -> dict[tuple, dict[int, float]]:
    """``time(r=1) / time(r)`` per (algorithm, graph, s); groups without an r=1 run are skipped."""
    groups: dict[tuple, dict[int, float]] = {}
    for rep in reports:
        groups.setdefault((rep.algorithm, rep.graph, rep.s), {})[rep.reducers] = rep.wall_ms
    out = {}
    for k, times in groups.items():
        if 1 in times:
            out[k] = {r: times[1] / t for r, t in sorted(times.items())}
    return out


def linear_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least squares ``y = a*x + b``; returns ``(a, b, r_squared)``."""
    xa, ya = np.asarray(x, float), np.asarray(y, float)
    a, b = np.polyfit(xa, ya, 1)
    resid = ya - (a * xa + b)
    ss_tot = float(((ya - ya.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(a), float(b), r2


def write_csv(reports: Sequence[BenchReport], path: str) -> None:
    with open(path, "w", newline="") as fh:
        rows = [r.row() for r in reports]
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def write_json(reports: Sequence[BenchReport], path: str) -> None:
    with open(path, "w") as fh:
        json.dump([asdict(r) for r in reports], fh, indent=2)


def read_config(path: str) -> dict:
    """``key = value`` lines; ``graph`` may repeat. ``#`` starts a comment."""
    cfg: dict = {"graph": []}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = key.strip(), value.strip()
            if key == "graph":
                cfg["graph"].append(value)
            else:
                cfg[key] = value
    return cfg
