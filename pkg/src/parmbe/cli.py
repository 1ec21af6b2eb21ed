"""Command line interface.

Exit codes: 0 success, 1 verification mismatch, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench as benchmod
from .engine import Engine, JobStats, RoundError, reducer_skew
from .gen import GenSpec
from .graph import Graph, GraphError, load_edge_list, write_edge_list, write_labels
from .parallel import Algorithm, run_algorithm
from .seq import ORACLE_MAX_N, EnumSummary, brute_force_oracle, mbe_consensus, mbe_dfs

SEQUENTIAL = ("dfs", "consensus")
ALGORITHMS = SEQUENTIAL + tuple(a.value for a in Algorithm)


class UsageError(Exception):
    pass


def _load(path: str) -> Graph:
    try:
        with open(path) as fh:
            return load_edge_list(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except GraphError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _summary_line(summary: EnumSummary) -> str:
    return f"count={summary.count} output_size={summary.edge_sum}"


def cmd_enumerate(args) -> int:
    g = _load(args.input)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        if g.labels is not None:
            with open(os.path.join(args.out, "labels.tsv"), "w") as fh:
                write_labels(g, fh)

    if args.algo in SEQUENTIAL:
        found = []
        fn = mbe_dfs if args.algo == "dfs" else mbe_consensus
        summary = fn(g, args.s, found.append if args.out else None)
        if args.out:
            with open(os.path.join(args.out, "part-00000.txt"), "w") as fh:
                for b in found:
                    fh.write(b.format(g) + "\n")
        stats = None
    else:
        workers = args.workers or min(args.reducers, os.cpu_count() or 1)
        spill = os.path.join(args.out, "spill") if (args.spill and args.out) else None
        with Engine(workers, spill) as eng:
            res = run_algorithm(g, args.algo, args.s, args.reducers, engine=eng,
                                partitioner=args.partitioner, strict=not args.weak_pruning)
        summary, stats = res.summary, res.stats
        if args.out:
            last = len(stats.rounds) - 1
            shard_paths = []
            for i, shard in enumerate(res.shards()):
                path = os.path.join(args.out, f"part-r{last}-{i:05d}.txt")
                shard_paths.append(path)
                with open(path, "w") as fh:
                    for b in shard:
                        fh.write(b.format(g) + "\n")
            with open(os.path.join(args.out, "job.json"), "w") as fh:
                fh.write(stats.to_json(indent=2))
            if args.merge:
                with open(os.path.join(args.out, "bicliques.txt"), "w") as out:
                    for path in shard_paths:
                        with open(path) as fh:
                            out.writelines(fh)
                    out.write(f"# {_summary_line(summary)}\n")

    if args.out:
        with open(os.path.join(args.out, "summary.txt"), "w") as fh:
            fh.write(_summary_line(summary) + "\n")
    print(_summary_line(summary))
    if stats is not None:
        print(f"wall_ms={stats.wall_ms:.1f} communication_bytes={stats.communication_bytes}")
    return 0


def cmd_verify(args) -> int:
    g = _load(args.input)
    reference: set = set()
    mbe_dfs(g, args.s, reference.add)
    results = {"consensus": set()}
    mbe_consensus(g, args.s, results["consensus"].add)
    for algo in Algorithm:
        out: list = []
        run_algorithm(g, algo, args.s, args.reducers, sink=out.append)
        if len(out) != len(set(out)):
            print(f"FAIL {algo.value}: duplicate emissions")
            return 1
        results[algo.value] = set(out)
    if g.n <= ORACLE_MAX_N:
        results["oracle"] = brute_force_oracle(g, args.s)

    ok = True
    for name, found in results.items():
        if found == reference:
            print(f"PASS dfs == {name} ({len(found)} bicliques)")
            continue
        ok = False
        diff = sorted(found ^ reference)[0]
        side = "missing from" if diff in reference else "extra in"
        print(f"FAIL dfs == {name}: {diff.format(g)} {side} {name}")
    return 0 if ok else 1


def _genspec_from_args(args) -> GenSpec:
    if args.config:
        try:
            cfg = benchmod.read_config(args.config)
            cfg.pop("graph", None)
            text = cfg.pop("kind") + ":" + ",".join(f"{k}={v}" for k, v in cfg.items())
            return GenSpec.parse(text)
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc.strerror}") from exc
        except (KeyError, ValueError) as exc:
            raise UsageError(f"{args.config}: bad generator config ({exc})") from exc
    if not args.kind:
        raise UsageError("generate needs --kind or --config")
    return GenSpec(args.kind, n=args.n or 0, n1=args.n1 or 0, n2=args.n2 or 0, p=args.p, seed=args.seed)


def cmd_generate(args) -> int:
    spec = _genspec_from_args(args)
    base = None
    if spec.kind == "thin":
        if not args.input:
            raise UsageError("thin needs --input")
        base = _load(args.input)
    try:
        g = spec.build(base)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(f"# {spec.label} n={g.n} m={g.m}\n")
            write_edge_list(g, fh)
    else:
        write_edge_list(g, sys.stdout)
    print(f"{spec.label}: n={g.n} m={g.m}", file=sys.stderr)
    return 0


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def cmd_bench(args) -> int:
    try:
        cfg = benchmod.read_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc.strerror}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    graphs: dict[str, Graph] = {}
    for item in cfg["graph"]:
        if item.startswith("file:"):
            path = item[5:]
            graphs[os.path.basename(path)] = _load(path)
            continue
        try:
            spec = GenSpec.parse(item)
            graphs[spec.label] = spec.build()
        except ValueError as exc:
            raise UsageError(f"graph {item!r}: {exc}") from exc
    if not graphs:
        raise UsageError("bench config lists no graph")
    algos = [a.strip() for a in cfg.get("algorithms", "cd1").split(",")]
    for a in algos:
        if a not in {x.value for x in Algorithm}:
            raise UsageError(f"unknown algorithm {a!r}")
    if cfg.get("partitioner", "hash") not in ("hash", "modulo"):
        raise UsageError(f"unknown partitioner {cfg['partitioner']!r}")
    reports = benchmod.bench(
        algos, graphs, _ints(cfg.get("s", "1")), _ints(cfg.get("reducers", "1")),
        workers=int(cfg["workers"]) if "workers" in cfg else None,
        repeat=int(cfg.get("repeat", "1")),
        partitioner=cfg.get("partitioner", "hash"),
    )
    os.makedirs(args.out, exist_ok=True)
    benchmod.write_csv(reports, os.path.join(args.out, "bench.csv"))
    benchmod.write_json(reports, os.path.join(args.out, "bench.json"))
    series = benchmod.speedup_series(reports)
    with open(os.path.join(args.out, "speedup.json"), "w") as fh:
        json.dump([{"algorithm": a, "graph": gl, "s": s, "speedup": sp}
                   for (a, gl, s), sp in series.items()], fh, indent=2)
    for rep in reports:
        print(f"{rep.algorithm:6s} {rep.graph:24s} s={rep.s} r={rep.reducers:<3d} "
              f"{rep.wall_ms:10.1f} ms  count={rep.count} output_size={rep.output_size}")
    return 0


def cmd_stats(args) -> int:
    try:
        with open(args.job_report) as fh:
            job = JobStats.from_dict(json.load(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {args.job_report}: {exc.strerror}") from exc
    print(f"total wall {job.wall_ms:.1f} ms, communication {job.communication_bytes} bytes "
          f"/ {job.communication_records} records")
    for i, r in enumerate(job.rounds):
        mean, _, std = reducer_skew(job, i)
        print(f"round {i} {r.name:10s} map_records={r.map_records} map_bytes={r.map_bytes} "
              f"out_records={r.reduce_output_records} out_bytes={r.reduce_output_bytes} "
              f"reducer_ms mean={mean:.1f} std={std:.1f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parmbe", description="Maximal biclique enumeration")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="enumerate maximal bicliques")
    e.add_argument("--algo", choices=ALGORITHMS, default="cd1")
    e.add_argument("--input", required=True)
    e.add_argument("--s", type=int, default=1)
    e.add_argument("--reducers", type=int, default=os.cpu_count() or 1)
    e.add_argument("--workers", type=int, default=None, help="worker processes (default: min(reducers, cores))")
    e.add_argument("--out", default=None, help="output directory for shards, summary and job report")
    e.add_argument("--merge", action="store_true", help="also write the merged bicliques.txt")
    e.add_argument("--spill", action="store_true", help="spill round outputs to disk")
    e.add_argument("--partitioner", choices=("hash", "modulo"), default="hash")
    e.add_argument("--weak-pruning", action="store_true",
                   help="only cut branches whose closure reaches below the key")
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="cross-check every algorithm (and the oracle when small)")
    v.add_argument("--input", required=True)
    v.add_argument("--s", type=int, default=1)
    v.add_argument("--reducers", type=int, default=3)
    v.set_defaults(func=cmd_verify)

    gp = sub.add_parser("generate", help="generate a random graph")
    gp.add_argument("--kind", choices=("er", "bipartite", "planted", "skew", "thin"))
    gp.add_argument("--n", type=int)
    gp.add_argument("--n1", type=int)
    gp.add_argument("--n2", type=int)
    gp.add_argument("--p", type=float, default=None, help="edge (or, for thin, deletion) probability")
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--input", help="base graph for thin")
    gp.add_argument("--config", help="key=value file with the same fields")
    gp.add_argument("--out")
    gp.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="run a benchmark described by a key=value config")
    b.add_argument("config")
    b.add_argument("--out", default="bench-out")
    b.set_defaults(func=cmd_bench)

    st = sub.add_parser("stats", help="summarize a job report")
    st.add_argument("--job-report", required=True)
    st.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "s", 1) < 1:
        parser.error("--s must be >= 1")
    if getattr(args, "reducers", 1) < 1:
        parser.error("--reducers must be >= 1")
    if getattr(args, "merge", False) and not args.out:
        parser.error("--merge needs --out")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"parmbe: error: {exc}", file=sys.stderr)
        return 2
    except RoundError as exc:
        print(f"parmbe: round {exc.round_index} failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
