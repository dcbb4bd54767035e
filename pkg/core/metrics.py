# core/metrics.py v1.0.0
"""
Graph-level evaluation: average path length, clustering, asymmetric reachability
and the logarithmic-growth fit.

APL averages over reachable ordered pairs only; the reachable share is reported
beside it so lost connectivity shows up instead of inflating the mean.
"""

import math
from dataclasses import dataclass, asdict
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.sparse.csgraph import shortest_path
from scipy.stats import linregress

from core.errors import ParameterError, UndefinedMetricError
from core.kernel_config import RESULT_COLUMNS
from core.topology import Topology
from core.utils import fmt


@dataclass(frozen=True)
class MetricsReport:
    apl: float
    apl_ratio: float
    cc: float
    cc_ratio: float
    unidirectional_fraction: float
    reachable_pair_fraction: float
    diameter_euclidean: float
    realized_p: float

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def hop_distances(topology: Topology) -> np.ndarray:
    """All-pairs BFS hop counts; np.inf marks unreachable pairs."""
    return shortest_path(topology.to_csr(), method="D", directed=True, unweighted=True)


def average_path_length(topology: Topology, distances: np.ndarray = None) -> Tuple[float, float]:
    """(mean hops over reachable ordered pairs, reachable pairs / N(N−1))."""
    n = topology.node_count
    if n < 2:
        raise ParameterError("path length needs at least 2 nodes")
    if distances is None:
        distances = hop_distances(topology)
    off_diagonal = ~np.eye(n, dtype=bool)
    finite = np.isfinite(distances) & off_diagonal
    reachable = int(finite.sum())
    if reachable == 0:
        raise UndefinedMetricError("no ordered pair is reachable")
    return float(distances[finite].mean()), reachable / (n * (n - 1))


def clustering_coefficient(topology: Topology) -> float:
    """
    Mean over nodes with out-degree >= 2 of
    |{(i, j) distinct out-neighbors : i→j}| / (k(k−1)).

    On symmetric graphs this is the usual undirected coefficient.
    """
    matrix = topology.to_matrix()
    local = []
    for neighbors in topology.out_edges:
        k = len(neighbors)
        if k < 2:
            continue
        idx = np.asarray(neighbors)
        links = int(matrix[np.ix_(idx, idx)].sum())
        local.append(links / (k * (k - 1)))
    if not local:
        return 0.0
    return float(np.mean(local))


def unidirectional_fraction(topology: Topology, distances: np.ndarray = None) -> float:
    """Share of unordered pairs reachable in exactly one direction."""
    n = topology.node_count
    if n < 2:
        raise ParameterError("pair metrics need at least 2 nodes")
    if distances is None:
        distances = hop_distances(topology)
    reach = np.isfinite(distances)
    one_way = np.triu(reach ^ reach.T, k=1)
    return float(one_way.sum()) / (n * (n - 1) / 2)


def log_growth_fit(samples: Sequence[Tuple[float, float]]) -> Tuple[float, float, float]:
    """Least-squares apl = slope·ln D + intercept; returns (slope, intercept, r²)."""
    if len(samples) < 3:
        raise ParameterError(f"growth fit needs at least 3 samples, got {len(samples)}")
    diameters = [d for d, _ in samples]
    if len(set(diameters)) != len(diameters):
        raise ParameterError("growth fit needs distinct diameters")
    if any(d <= 0 for d in diameters):
        raise ParameterError("diameters must be positive")
    x = np.log(np.asarray(diameters, dtype=float))
    y = np.asarray([apl for _, apl in samples], dtype=float)
    if np.all(y == y[0]):
        return 0.0, float(y[0]), 1.0
    fit = linregress(x, y)
    return float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2)


def evaluate(topology: Topology, baseline_apl: float, baseline_cc: float,
             diameter: float, realized_p: float) -> MetricsReport:
    """Every metric of one rewired topology against the omnidirectional baseline."""
    distances = hop_distances(topology)
    apl, reach_frac = average_path_length(topology, distances)
    cc = clustering_coefficient(topology)
    return MetricsReport(
        apl=apl,
        apl_ratio=apl / baseline_apl,
        cc=cc,
        cc_ratio=cc / baseline_cc if baseline_cc > 0 else math.nan,
        unidirectional_fraction=unidirectional_fraction(topology, distances),
        reachable_pair_fraction=reach_frac,
        diameter_euclidean=diameter,
        realized_p=realized_p,
    )


def csv_cells(report: MetricsReport, seed: int, strategy: str, model: str, node_count: int,
              width: float, height: float, beta: float = None) -> Dict[str, str]:
    """One results row keyed by RESULT_COLUMNS, numbers in fixed 6-decimal form."""
    cells = {
        "seed": str(seed),
        "strategy": strategy,
        "model": model,
        "N": str(node_count),
        "width": fmt(width),
        "height": fmt(height),
        "p": fmt(report.realized_p),
        "beta": "" if beta is None else fmt(beta),
        "apl": fmt(report.apl),
        "apl_ratio": fmt(report.apl_ratio),
        "cc": fmt(report.cc),
        "cc_ratio": fmt(report.cc_ratio),
        "unidir_frac": fmt(report.unidirectional_fraction),
        "reach_frac": fmt(report.reachable_pair_fraction),
        "D": fmt(report.diameter_euclidean),
    }
    return {column: cells[column] for column in RESULT_COLUMNS}
