"""Maximal biclique enumeration: sequential DFS and consensus, and clustered
map/shuffle/reduce pipelines (CDFS, CD0, CD1, CD2, clustering consensus)."""

from .engine import Engine, JobStats, Record, RoundSpec, reducer_skew, run_pipeline, run_round
from .gen import gen_bipartite, gen_er, planted_biclique, skew_fixture, thin_edges
from .graph import (Biclique, Cluster, Graph, GraphError, build_cluster, common_neighborhood,
                    induced_subgraph, load_edge_list, neighborhood, two_neighborhood)
from .parallel import Algorithm, ccons, cd0, cd1, cd2, cdfs, run_algorithm
from .seq import (EnumSummary, VertexOrder, brute_force_oracle, cd0_seq, cdl_seq, mbe_consensus,
                  mbe_dfs)

__version__ = "0.1.0"
