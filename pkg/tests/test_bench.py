import csv
import json

import pytest

from parmbe.bench import bench, bench_one, linear_fit, read_config, speedup_series, write_csv, write_json
from parmbe.gen import gen_er


def test_linear_fit_exact_line():
    a, b, r2 = linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
    assert a == pytest.approx(2) and b == pytest.approx(1) and r2 == pytest.approx(1)


def test_linear_fit_noisy():
    a, _, r2 = linear_fit([0, 1, 2, 3], [0, 1.1, 1.9, 3.2])
    assert 0.9 < a < 1.2 and 0.95 < r2 < 1.0
    assert linear_fit([1, 2, 3], [5, 5, 5])[2] == 1.0


def test_bench_one_report():
    g = gen_er(60, 0.1, seed=1)
    rep = bench_one(g, "er60", "cd1", 1, 3)
    assert (rep.algorithm, rep.n, rep.m, rep.reducers) == ("cd1", 60, g.m, 3)
    assert rep.count > 0 and rep.output_size >= rep.count
    assert rep.communication_records > 0 and rep.wall_ms > 0
    assert len(rep.stats["rounds"]) == 3


def test_bench_grid_speedup_and_files(tmp_path):
    graphs = {"a": gen_er(40, 0.15, seed=1), "b": gen_er(30, 0.2, seed=2)}
    reports = bench(["cd0", "cd2"], graphs, [1, 2], [1, 2], workers=1)
    assert len(reports) == 2 * 2 * 2 * 2
    series = speedup_series(reports)
    assert set(series) == {(a, gl, s) for a in ("cd0", "cd2") for gl in "ab" for s in (1, 2)}
    assert all(sp[1] == 1.0 for sp in series.values())
    write_csv(reports, tmp_path / "r.csv")
    write_json(reports, tmp_path / "r.json")
    rows = list(csv.DictReader(open(tmp_path / "r.csv")))
    assert len(rows) == 16 and "stats" not in rows[0]
    assert len(json.load(open(tmp_path / "r.json"))) == 16


def test_speedup_needs_single_reducer_baseline():
    reports = bench(["cd0"], {"g": gen_er(20, 0.3, seed=1)}, [1], [2], workers=1)
    assert speedup_series(reports) == {}


def test_read_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("# comment\nalgorithms = cd0,cd1\ngraph = er:n=10\ngraph = er:n=20  # trailing\n\ns=1,2\n")
    cfg = read_config(path)
    assert cfg == {"graph": ["er:n=10", "er:n=20"], "algorithms": "cd0,cd1", "s": "1,2"}
    path.write_text("nonsense\n")
    with pytest.raises(ValueError, match=":1:"):
        read_config(path)
