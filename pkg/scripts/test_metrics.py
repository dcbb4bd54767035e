# scripts/test_metrics.py v1.1.0
import math
import os
import sys

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import networkx as nx
import numpy as np

from core.errors import ParameterError, UndefinedMetricError
from core.kernel_config import RESULT_COLUMNS
from core.metrics import (
    MetricsReport, average_path_length, clustering_coefficient, csv_cells,
    evaluate, log_growth_fit, unidirectional_fraction,
)
from core.topology import Topology, build_omni_graph, connected_layout, euclidean_diameter


def _complete(count: int) -> Topology:
    return Topology.from_adjacency([[v for v in range(count) if v != u] for u in range(count)])


def _cycle(count: int) -> Topology:
    return Topology.from_adjacency([[(u - 1) % count, (u + 1) % count] for u in range(count)])


def test_apl_complete_graph():
    assert average_path_length(_complete(5)) == (1.0, 1.0)
    assert clustering_coefficient(_complete(5)) == 1.0


def test_apl_directed_chain():
    apl, reach = average_path_length(Topology.from_adjacency([[1], [2], []]))
    assert abs(apl - 4.0 / 3.0) < 1e-12
    assert reach == 0.5


def test_apl_four_cycle():
    apl, reach = average_path_length(_cycle(4))
    assert abs(apl - 4.0 / 3.0) < 1e-12
    assert reach == 1.0


def test_apl_without_reachable_pairs_is_undefined():
    try:
        average_path_length(Topology.from_adjacency([[], [], []]))
    except UndefinedMetricError:
        return
    raise AssertionError("edgeless graph produced an apl")


def test_apl_matches_networkx():
    _, topology, _ = connected_layout(120, 5, 5, 1, seed=21)
    apl, reach = average_path_length(topology)
    assert reach == 1.0
    assert abs(apl - nx.average_shortest_path_length(topology.to_networkx())) < 1e-9


def test_clustering_fixtures():
    star = Topology.from_adjacency([[1, 2, 3], [0], [0], [0]])
    assert clustering_coefficient(star) == 0.0
    # triangle 0-1-2 plus pendant 3 on node 0; node 3 has a single neighbor
    pendant = Topology.from_adjacency([[1, 2, 3], [0, 2], [0, 1], [0]])
    assert abs(clustering_coefficient(pendant) - 7.0 / 9.0) < 1e-12
    assert clustering_coefficient(Topology.from_adjacency([[1], [0]])) == 0.0


def test_clustering_matches_networkx_on_symmetric_graphs():
    _, topology, _ = connected_layout(120, 5, 5, 1, seed=22)
    graph = topology.to_networkx().to_undirected()
    local = nx.clustering(graph)
    qualifying = [local[v] for v in graph if graph.degree(v) >= 2]
    assert abs(clustering_coefficient(topology) - sum(qualifying) / len(qualifying)) < 1e-12


def test_metrics_ignore_node_labels():
    _, topology, _ = connected_layout(120, 5, 5, 1, seed=23)
    relabel = np.random.default_rng(7).permutation(topology.node_count)
    permuted = [[] for _ in range(topology.node_count)]
    for u, neighbors in enumerate(topology.out_edges):
        permuted[relabel[u]] = [int(relabel[v]) for v in neighbors]
    shuffled = Topology.from_adjacency(permuted)
    assert shuffled != topology
    apl, reach = average_path_length(topology)
    shuffled_apl, shuffled_reach = average_path_length(shuffled)
    assert abs(apl - shuffled_apl) < 1e-12 and reach == shuffled_reach
    assert abs(clustering_coefficient(topology) - clustering_coefficient(shuffled)) < 1e-12


def test_unidirectional_fraction():
    assert unidirectional_fraction(_cycle(6)) == 0.0
    assert unidirectional_fraction(Topology.from_adjacency([[1], []])) == 1.0
    assert unidirectional_fraction(Topology.from_adjacency([[1], [2], []])) == 1.0
    _, topology, _ = connected_layout(80, 4, 4, 1, seed=23)
    assert unidirectional_fraction(topology) == 0.0


def test_log_growth_fit():
    samples = [(d, 2.0 * math.log(d) + 1.0) for d in (2.0, 5.0, 9.0, 14.0)]
    slope, intercept, r_squared = log_growth_fit(samples)
    assert abs(slope - 2.0) < 1e-12 and abs(intercept - 1.0) < 1e-12
    assert abs(r_squared - 1.0) < 1e-12
    assert log_growth_fit([(2.0, 3.0), (4.0, 3.0), (8.0, 3.0)])[0] == 0.0


def test_log_growth_fit_rejects_bad_samples():
    for samples in ([(2.0, 1.0), (3.0, 2.0)], [(2.0, 1.0), (2.0, 2.0), (3.0, 2.5)],
                    [(0.0, 1.0), (2.0, 2.0), (3.0, 2.5)]):
        try:
            log_growth_fit(samples)
        except ParameterError:
            continue
        raise AssertionError(f"accepted {samples}")


def test_evaluate_against_itself():
    layout, omni, _ = connected_layout(100, 5, 5, 1, seed=24)
    apl, _ = average_path_length(omni)
    cc = clustering_coefficient(omni)
    report = evaluate(omni, apl, cc, euclidean_diameter(layout), 0.0)
    assert report.apl_ratio == 1.0 and report.cc_ratio == 1.0
    assert report.unidirectional_fraction == 0.0
    assert report.reachable_pair_fraction == 1.0
    assert report.apl >= 1.0


def test_cc_ratio_undefined_on_clusterless_baseline():
    chain = Topology.from_adjacency([[1], [0, 2], [1]])
    report = evaluate(chain, 4.0 / 3.0, 0.0, 2.0, 0.0)
    assert math.isnan(report.cc_ratio)


def test_csv_cells_schema():
    report = MetricsReport(2.5, 0.8, 0.4, 0.9, 0.1, 1.0, 14.142136, 0.2)
    cells = csv_cells(report, 7, "randomized", "sector", 300, 10.0, 10.0)
    assert tuple(cells) == RESULT_COLUMNS
    assert cells["beta"] == ""
    assert cells["p"] == "0.200000" and cells["N"] == "300" and cells["seed"] == "7"
    assert csv_cells(report, 7, "distributed_beta", "ula", 300, 8.0, 8.0, beta=2.0)["beta"] == "2.000000"
    nan_report = MetricsReport(2.5, 0.8, 0.0, math.nan, 0.1, 1.0, 14.0, 0.2)
    assert csv_cells(nan_report, 1, "none", "sector", 10, 1.0, 1.0)["cc_ratio"] == "nan"


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"[OK]   {name}")
            except Exception as e:
                failed += 1
                print(f"[FAIL] {name}: {e!r}")
    sys.exit(1 if failed else 0)
