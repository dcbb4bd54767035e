# core/topology.py v1.1.0
"""
Node placement and the baseline omnidirectional connectivity graph.

Node ids are indices into the position list; every adjacency list is sorted
ascending so that all downstream tie-breaks see a total order.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.spatial.distance import pdist

from core.errors import ParameterError, ConnectivityError
from core.kernel_config import (
    DEFAULT_OMNI_RANGE, MAX_LAYOUT_ATTEMPTS, LAYOUT_RETRY_STRIDE,
    STREAM_PLACEMENT, COORD_DECIMALS,
)
from core.logger import log_layout_retry
from core.utils import make_rng, within_range

Point = Tuple[float, float]


@dataclass(frozen=True)
class NodeLayout:
    positions: Tuple[Point, ...]
    region_width: float
    region_height: float
    omni_range: float
    seed: int

    def __post_init__(self):
        if not self.positions:
            raise ParameterError("layout must contain at least one node")
        if self.region_width <= 0 or self.region_height <= 0:
            raise ParameterError(f"region dimensions must be positive, got {self.region_width}x{self.region_height}")
        if self.omni_range <= 0:
            raise ParameterError(f"omni_range must be positive, got {self.omni_range}")
        for node, (x, y) in enumerate(self.positions):
            if not (0.0 <= x <= self.region_width and 0.0 <= y <= self.region_height):
                raise ParameterError(f"node {node} at ({x}, {y}) lies outside the region")

    @property
    def node_count(self) -> int:
        return len(self.positions)

    def coords(self) -> np.ndarray:
        """Positions as an (N, 2) float array."""
        return np.asarray(self.positions, dtype=float).reshape(-1, 2)

    def density(self) -> float:
        """Nodes per unit area."""
        return self.node_count / (self.region_width * self.region_height)


@dataclass(frozen=True)
class Topology:
    node_count: int
    out_edges: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.out_edges) != self.node_count:
            raise ParameterError("out_edges must list every node")
        for u, neighbors in enumerate(self.out_edges):
            if u in neighbors:
                raise ParameterError(f"self-loop at node {u}")
            if neighbors and not (0 <= neighbors[0] and neighbors[-1] < self.node_count):
                raise ParameterError(f"node {u} lists a neighbour outside 0..{self.node_count - 1}")
            if any(a >= b for a, b in zip(neighbors, neighbors[1:])):
                raise ParameterError(f"adjacency of node {u} must be strictly ascending")

    @classmethod
    def from_adjacency(cls, adjacency: Sequence[Sequence[int]]) -> "Topology":
        return cls(
            node_count=len(adjacency),
            out_edges=tuple(tuple(sorted(set(int(v) for v in row))) for row in adjacency),
        )

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Topology":
        """Boolean adjacency matrix (row = transmitter) to Topology; the diagonal is ignored."""
        matrix = np.array(matrix, dtype=bool)
        np.fill_diagonal(matrix, False)
        return cls(
            node_count=matrix.shape[0],
            out_edges=tuple(tuple(int(v) for v in np.flatnonzero(row)) for row in matrix),
        )

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.out_edges[u]

    def edge_count(self) -> int:
        return sum(len(n) for n in self.out_edges)

    def is_symmetric(self) -> bool:
        return all(u in self.out_edges[v] for u in range(self.node_count) for v in self.out_edges[u])

    def to_matrix(self) -> np.ndarray:
        matrix = np.zeros((self.node_count, self.node_count), dtype=bool)
        for u, neighbors in enumerate(self.out_edges):
            matrix[u, list(neighbors)] = True
        return matrix

    def to_csr(self) -> csr_matrix:
        rows = [u for u, n in enumerate(self.out_edges) for _ in n]
        cols = [v for n in self.out_edges for v in n]
        data = np.ones(len(cols), dtype=np.int32)
        return csr_matrix((data, (rows, cols)), shape=(self.node_count, self.node_count))

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.node_count))
        graph.add_edges_from((u, v) for u, n in enumerate(self.out_edges) for v in n)
        return graph

    def mean_degree(self) -> float:
        return self.edge_count() / self.node_count


# ── Placement ─────────────────────────────────────────────────────────────────

def place_nodes(count: int, region_width: float, region_height: float,
                omni_range: float = DEFAULT_OMNI_RANGE, seed: int = 0) -> NodeLayout:
    """Uniform i.i.d. placement over the rectangle, deterministic in seed."""
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    if region_width <= 0 or region_height <= 0:
        raise ParameterError(f"region dimensions must be positive, got {region_width}x{region_height}")
    if omni_range <= 0:
        raise ParameterError(f"omni_range must be positive, got {omni_range}")

    rng = make_rng(seed, STREAM_PLACEMENT)
    xs = rng.uniform(0.0, region_width, size=count)
    ys = rng.uniform(0.0, region_height, size=count)
    positions = tuple((float(x), float(y)) for x, y in zip(xs, ys))
    return NodeLayout(positions, float(region_width), float(region_height), float(omni_range), int(seed))


def build_omni_graph(layout: NodeLayout) -> Topology:
    """u→v iff euclidean(u, v) <= omni_range; symmetric by construction."""
    if layout.node_count == 1:
        return Topology(1, ((),))
    coords = layout.coords()
    delta = coords[:, None, :] - coords[None, :, :]
    distances = np.hypot(delta[..., 0], delta[..., 1])
    return Topology.from_matrix(within_range(distances, layout.omni_range))


def euclidean_diameter(layout: NodeLayout) -> float:
    """Largest pairwise distance D."""
    if layout.node_count < 2:
        raise ParameterError("diameter needs at least 2 nodes")
    return float(pdist(layout.coords()).max())


def is_strongly_connected(topology: Topology) -> bool:
    return nx.is_strongly_connected(topology.to_networkx())


def connected_layout(count: int, region_width: float, region_height: float,
                     omni_range: float = DEFAULT_OMNI_RANGE, seed: int = 0,
                     max_attempts: int = MAX_LAYOUT_ATTEMPTS,
                     run_id: Optional[str] = None) -> Tuple[NodeLayout, Topology, int]:
    """
    Regenerates until the omnidirectional graph is strongly connected.

    Returns (layout, omni topology, retries). Attempt k uses
    seed + k·LAYOUT_RETRY_STRIDE so retries never collide with the seeds of
    neighbouring repetitions.
    """
    for attempt in range(max_attempts):
        used_seed = seed + attempt * LAYOUT_RETRY_STRIDE
        layout = place_nodes(count, region_width, region_height, omni_range, used_seed)
        topology = build_omni_graph(layout)
        if is_strongly_connected(topology):
            log_layout_retry(seed, used_seed, attempt, count, run_id=run_id)
            return layout, topology, attempt
    raise ConnectivityError(
        f"no strongly connected layout for N={count} on {region_width}x{region_height} "
        f"after {max_attempts} attempts"
    )


# ── Text format ───────────────────────────────────────────────────────────────

def write_layout(layout: NodeLayout, out: TextIO) -> None:
    """Header `N width height r seed`, then `id x y` per node."""
    d = COORD_DECIMALS
    out.write(f"{layout.node_count} {layout.region_width:.{d}f} {layout.region_height:.{d}f} "
              f"{layout.omni_range:.{d}f} {layout.seed}\n")
    for node, (x, y) in enumerate(layout.positions):
        out.write(f"{node} {x:.{d}f} {y:.{d}f}\n")


def read_layout(source: TextIO) -> NodeLayout:
    lines = [line.strip() for line in source if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise ParameterError("empty layout file")
    try:
        count_s, width_s, height_s, range_s, seed_s = lines[0].split()
        count = int(count_s)
        positions: List[Point] = [None] * count
        for line in lines[1:]:
            node_s, x_s, y_s = line.split()
            node = int(node_s)
            if not 0 <= node < count:
                raise ParameterError(f"node id {node} outside 0..{count - 1}")
            positions[node] = (float(x_s), float(y_s))
    except (ValueError, IndexError) as e:
        raise ParameterError(f"malformed layout file: {e}") from e
    if len(lines) - 1 != count or any(p is None for p in positions):
        raise ParameterError(f"layout file declares {count} nodes but lists {len(lines) - 1}")
    return NodeLayout(tuple(positions), float(width_s), float(height_s), float(range_s), int(seed_s))
