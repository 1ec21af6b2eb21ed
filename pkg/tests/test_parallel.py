from collections import Counter

import pytest

from parmbe.engine import Engine, RoundError, Record, run_pipeline
from parmbe.gen import gen_er, skew_fixture
from parmbe.graph import Biclique, GraphError
from parmbe.parallel import (TAG_ADJ, Algorithm, build_rounds, decode_biclique, edge_records,
                             encode_biclique, order_for, ordered_cluster_reduce, pack_ints,
                             run_algorithm, unpack_ints, vkey)
from parmbe.seq import brute_force_oracle

from conftest import A, B, C, graph_of, random_corpus

ALL = list(Algorithm)


@pytest.mark.parametrize("algo", ALL)
def test_path3(algo, path3):
    res = run_algorithm(path3, algo, 1, 2)
    assert list(res.bicliques()) == [Biclique((B,), (A, C))]
    assert (res.summary.count, res.summary.edge_sum) == (1, 2)


@pytest.mark.parametrize("algo", ALL)
def test_triangle_and_threshold(algo, triangle):
    assert set(run_algorithm(triangle, algo, 1, 3).bicliques()) == brute_force_oracle(triangle)
    assert list(run_algorithm(triangle, algo, 2, 3).bicliques()) == []


def test_round_counts(path3):
    assert [r.name for r in run_algorithm(path3, "cd0").stats.rounds] == ["adjacency", "enumerate"]
    assert len(run_algorithm(path3, "cd1").stats.rounds) == 3
    assert len(run_algorithm(path3, "cd2").stats.rounds) == 3


def test_rejects_bad_arguments(path3):
    with pytest.raises(ValueError):
        build_rounds("cd0", 0, 1)
    with pytest.raises(ValueError):
        build_rounds("cd0", 1, 0)
    with pytest.raises(ValueError):
        run_algorithm(path3, "cd9")


def test_codec_roundtrip():
    b = Biclique((1, 5), (2, 3, 9))
    assert decode_biclique(encode_biclique(5, b)) == (5, b)
    assert unpack_ints(pack_ints(TAG_ADJ, [-1, 0, 2**40])) == [-1, 0, 2**40]


@pytest.mark.parametrize("name,g", random_corpus(24, seed=3))
def test_pipelines_match_oracle_with_exact_ownership(name, g):
    for s in (1, 2):
        expected = brute_force_oracle(g, s)
        for algo in ALL:
            order = order_for(algo, g)
            for r in (1, 3):
                res = run_algorithm(g, algo, s, r)
                emitted = list(res.emissions())
                assert Counter(b for _, b in emitted) == Counter(expected)
                for owner, b in emitted:
                    assert order.smallest(b.vertices()) == owner
                    assert b.min_side() >= s


@pytest.mark.parametrize("name,g", random_corpus(12, seed=4))
def test_record_counts(name, g):
    n_active = sum(1 for v in g.vertices if g.degree(v))
    for algo in ALL:
        rounds = run_algorithm(g, algo, 1, 3).stats.rounds
        assert rounds[0].map_records == 2 * g.m
        assert rounds[0].reduce_output_records == n_active
        assert rounds[1].map_records == 2 * g.m + n_active


def test_property_round_sends_to_two_hop_neighbors():
    g = graph_of("a-b b-c c-d")
    rounds = run_algorithm(g, "cd2", 1, 2).stats.rounds
    # adjacency re-emission plus one triple per (vertex, 2-hop neighbor incl. itself)
    sizes = [3, 4, 4, 3]  # closed 2-hop neighborhoods of a, b, c, d
    assert rounds[1].reduce_output_records == 4 + sum(sizes)
    assert rounds[2].map_records == (4 + 2 * g.m) + sum(sizes)


def test_reducer_count_does_not_change_output():
    g = gen_er(60, 0.15, seed=11)
    base = None
    for r in (1, 2, 5, 8):
        for algo in ("cd0", "cd1", "cd2"):
            got = sorted(run_algorithm(g, algo, 1, r).bicliques())
            assert base is None or got == base
            base = got


def test_shards_partition_output():
    g = gen_er(40, 0.2, seed=2)
    res = run_algorithm(g, "cd1", 1, 4)
    shards = res.shards()
    assert len(shards) == 4
    assert sorted(b for sh in shards for b in sh) == sorted(res.bicliques())


def test_weak_pruning_same_output():
    g = gen_er(80, 0.1, seed=6)
    for algo in ("cd0", "cd1", "cd2"):
        a = sorted(run_algorithm(g, algo, 1, 4).bicliques())
        b = sorted(run_algorithm(g, algo, 1, 4, strict=False).bicliques())
        assert a == b


def test_worker_pool_pipeline():
    g = gen_er(50, 0.2, seed=8)
    with Engine(workers=2) as eng:
        res = run_algorithm(g, "cd2", 2, 4, engine=eng)
    assert set(res.bicliques()) == set(run_algorithm(g, "cd2", 2, 1).bicliques())


def test_missing_property_is_a_hard_error():
    values = [pack_ints(TAG_ADJ, (0, 1, 2)), pack_ints(TAG_ADJ, (1, 0)), pack_ints(TAG_ADJ, (2, 0))]
    with pytest.raises(GraphError, match="no property"):
        ordered_cluster_reduce(vkey(0), values, "degree", 1)


def test_missing_property_surfaces_as_round_error(path3):
    specs = build_rounds("cd1", 1, 2)
    # skip the property round: the enumerating reducers receive no properties
    adj, _ = run_pipeline(edge_records(path3), specs[:1])
    with pytest.raises(RoundError) as info:
        run_pipeline(adj, specs[2:])
    assert info.value.round_index == 0 and info.value.key is not None


def test_skew_fixture_planted_part():
    g = skew_fixture()
    assert g.n == 2000
    assert all(v in g.nbr_set(u) for u in range(8) for v in range(8, 16))
    assert Biclique(tuple(range(8)), tuple(range(8, 16))).edge_weight() == 64
