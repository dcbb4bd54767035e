# core/centrality.py v1.0.0
"""
Wireless Flow Betweenness (WFB) and its centralized reference.

WFB is computed purely from what a node transmits and overhears. Every
transmission piggybacks the sender's (w, g); a listener keeps the latest pair
per neighbor and re-estimates

    w(v) = g(v) / (o(v) + g(u)/w(u) − g(u)),   u = argmax_{u ∈ table} g(u)

g counts distinct flows the node transmitted for, o counts distinct flows it
transmitted or overheard. Two further estimators are kept for comparison:
"summed" adds the additional-flow term of every neighbor in the table, and
"naive" is the plain neighborhood share g(v) / Σ g.

The reference is Flow Betweenness Centrality with unit edge capacities,
attributed by node removal and computed with scipy's sparse max-flow.
"""

import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Set, TextIO, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow
from scipy.stats import rankdata

from core.errors import LogCorruptionError, ParameterError, UndefinedMetricError
from core.kernel_config import (
    WFB_ESTIMATORS, DEFAULT_ESTIMATOR, NEIGHBOR_RECORD_FIELDS, PIGGYBACK_FIELDS,
)
from core.logger import log_wfb_summary, log_pipeline_step
from core.topology import Topology
from core.traffic import TransmissionEvent, TransmissionLog
from core.utils import fmt

TRANSMIT = "transmit"
OVERHEAR = "overhear"


@dataclass
class CentralityState:
    node: int
    forwarded: Set[Tuple[int, int]] = field(default_factory=set)
    observed: Set[Tuple[int, int]] = field(default_factory=set)
    wfb: float = 0.0
    neighbor_table: Dict[int, Tuple[float, int]] = field(default_factory=dict)
    last_hop: Dict[int, int] = field(default_factory=dict)

    @property
    def forward_count(self) -> int:
        return len(self.forwarded)

    @property
    def overheard_count(self) -> int:
        return len(self.observed)

    @property
    def buffer_fields(self) -> int:
        """Stored neighbor fields: id, w and g per table entry."""
        return NEIGHBOR_RECORD_FIELDS * len(self.neighbor_table)

    def piggyback(self) -> Tuple[float, int]:
        return self.wfb, self.forward_count


@dataclass(frozen=True)
class RankVector:
    nodes: Tuple[int, ...]
    ranks: Tuple[float, ...]

    def as_dict(self) -> Dict[int, float]:
        return dict(zip(self.nodes, self.ranks))

    @property
    def has_ties(self) -> bool:
        return len(set(self.ranks)) < len(self.ranks)


@dataclass
class WfbResult:
    wfb: Dict[int, float]
    states: List[CentralityState]
    piggybacks: int
    max_buffer_fields: int


# ── Estimator building blocks ────────────────────────────────────────────────

def naive_betweenness(own_forward_count: int, neighbor_forward_counts: Iterable[int]) -> float:
    """g(v) / Σ_{u ∈ N(v) ∪ {v}} g(u); 0 when nothing was forwarded nearby."""
    total = own_forward_count + sum(neighbor_forward_counts)
    if total == 0:
        return 0.0
    return own_forward_count / total


def additional_flows(g_u: int, w_u: float) -> float:
    """Flows u knows of beyond its own: g(u)/w(u) − g(u)."""
    if g_u <= 0 or w_u <= 0.0:
        return 0.0
    return g_u / w_u - g_u


def _max_forwarder(table: Mapping[int, Tuple[float, int]]) -> Optional[int]:
    best = None
    for neighbor in sorted(table):
        if best is None or table[neighbor][1] > table[best][1]:
            best = neighbor
    return best


def _recompute(state: CentralityState, estimator: str) -> float:
    g, o = state.forward_count, state.overheard_count
    if o == 0:
        return 0.0
    table = state.neighbor_table

    if estimator == "naive":
        return naive_betweenness(g, (entry[1] for entry in table.values()))

    if estimator == "summed":
        extra = sum(additional_flows(g_u, w_u) for w_u, g_u in table.values())
        return g / (o + extra)

    best = _max_forwarder(table)
    if best is None:
        return g / o
    w_u, g_u = table[best]
    if g_u == 0 or w_u == 0.0:
        return g / o
    return g / (o + additional_flows(g_u, w_u))


def update_wfb(state: CentralityState, event: TransmissionEvent, role: str = TRANSMIT,
               piggyback: Optional[Tuple[float, int]] = None,
               estimator: str = DEFAULT_ESTIMATOR) -> CentralityState:
    """
    Applies one transmit or overhear event to a node's state (in place) and returns it.

    Overhear events must carry the transmitter's piggybacked (w, g).
    """
    if estimator not in WFB_ESTIMATORS:
        raise ParameterError(f"unknown WFB estimator {estimator!r}")
    last = state.last_hop.get(event.flow_id)
    if last is not None and event.hop_index < last:
        raise LogCorruptionError(
            f"node {state.node}: flow {event.flow_id} went from hop {last} back to {event.hop_index}"
        )
    state.last_hop[event.flow_id] = event.hop_index

    key = event.flow.key
    if role == TRANSMIT:
        state.forwarded.add(key)
        state.observed.add(key)
    elif role == OVERHEAR:
        if piggyback is None:
            raise ParameterError("overhear events need the transmitter's piggyback")
        w_u, g_u = piggyback
        state.neighbor_table[event.transmitter] = (float(w_u), int(g_u))
        state.observed.add(key)
    else:
        raise ParameterError(f"unknown event role {role!r}")

    state.wfb = _recompute(state, estimator)
    return state


def replay_wfb(topology: Topology, log: TransmissionLog,
               estimator: str = DEFAULT_ESTIMATOR) -> WfbResult:
    """Runs every node's WFB bookkeeping over the log in event order."""
    started = time.time()
    states = [CentralityState(node) for node in range(topology.node_count)]
    expected_hop: Dict[int, int] = {}
    piggybacks = 0

    for event in log.events:
        hop = expected_hop.get(event.flow_id, 0)
        if event.hop_index != hop:
            raise LogCorruptionError(
                f"flow {event.flow_id}: expected hop {hop}, got {event.hop_index}"
            )
        expected_hop[event.flow_id] = hop + 1
        if not (0 <= event.transmitter < topology.node_count):
            raise LogCorruptionError(f"transmitter {event.transmitter} is not a node of the topology")

        sender = update_wfb(states[event.transmitter], event, TRANSMIT, estimator=estimator)
        carried = sender.piggyback()
        piggybacks += PIGGYBACK_FIELDS
        for listener in event.overhearers:
            update_wfb(states[listener], event, OVERHEAR, piggyback=carried, estimator=estimator)

    wfb = {s.node: s.wfb for s in states}
    max_buffer = max((s.buffer_fields for s in states), default=0)
    log_wfb_summary(estimator, len(log.events), piggybacks, max_buffer,
                    sum(1 for w in wfb.values() if w > 0.0))
    log_pipeline_step("replay_wfb", time.time() - started, extra={"events": len(log.events)})
    return WfbResult(wfb, states, piggybacks, max_buffer)


def run_wfb(topology: Topology, log: TransmissionLog,
            estimator: str = DEFAULT_ESTIMATOR) -> Dict[int, float]:
    """Final per-node WFB after replaying the whole log."""
    return replay_wfb(topology, log, estimator).wfb


# ── Centralized reference ────────────────────────────────────────────────────

def _capacity_matrix(topology: Topology, removed: Optional[int] = None) -> csr_matrix:
    rows, cols = [], []
    for u, neighbors in enumerate(topology.out_edges):
        if u == removed:
            continue
        for v in neighbors:
            if v != removed:
                rows.append(u)
                cols.append(v)
    data = np.ones(len(rows), dtype=np.int32)
    n = topology.node_count
    return csr_matrix((data, (rows, cols)), shape=(n, n), dtype=np.int32)


def _flow_carriers(flow: csr_matrix, source: int, sink: int) -> List[int]:
    coo = flow.tocoo()
    positive = coo.data > 0
    return sorted({int(v) for v in coo.col[positive]} - {source, sink})


def flow_betweenness_oracle(topology: Topology) -> Dict[int, float]:
    """
    Exact flow betweenness with unit capacities.

    For each ordered pair (s, t) the share through v is
    maxflow(s, t) − maxflow(s, t without v), clamped at 0, and
    fbc(v) = Σ share / Σ maxflow over pairs with s, t ≠ v.
    Only nodes carrying flow in one maximum flow can lower it when removed,
    so removal flows are computed for those nodes alone. On symmetric graphs
    each unordered pair is solved once.
    """
    n = topology.node_count
    if n < 3:
        raise ParameterError(f"flow betweenness needs at least 3 nodes, got {n}")
    started = time.time()
    base = _capacity_matrix(topology)
    without = [_capacity_matrix(topology, removed=v) for v in range(n)]
    symmetric = topology.is_symmetric()

    through = np.zeros(n)
    total_excluding = np.zeros(n)
    for s in range(n):
        for t in range(n):
            if s == t or (symmetric and t < s):
                continue
            weight = 2.0 if symmetric else 1.0
            result = maximum_flow(base, s, t)
            value = float(result.flow_value)
            if value == 0.0:
                continue
            total_excluding += weight * value
            total_excluding[s] -= weight * value
            total_excluding[t] -= weight * value
            for v in _flow_carriers(result.flow, s, t):
                reduced = float(maximum_flow(without[v], s, t).flow_value)
                through[v] += weight * max(value - reduced, 0.0)

    fbc = {}
    for v in range(n):
        fbc[v] = float(through[v] / total_excluding[v]) if total_excluding[v] > 0 else 0.0
    log_pipeline_step("flow_betweenness_oracle", time.time() - started, extra={"N": n})
    return fbc


# ── Rank correlation ─────────────────────────────────────────────────────────

def fractional_ranks(values: Mapping[int, float]) -> RankVector:
    """Rank 1 = largest value; ties share the average of their positions."""
    if not values:
        raise ParameterError("cannot rank an empty map")
    nodes = tuple(sorted(values))
    scores = np.array([values[v] for v in nodes], dtype=float)
    ranks = rankdata(-scores, method="average")
    return RankVector(nodes, tuple(float(r) for r in ranks))


def spearman_rho(a: RankVector, b: RankVector) -> float:
    """
    Spearman's ρ between two rankings of the same nodes.

    Without ties: 1 − 6Σd²/(n(n²−1)). With ties: product-moment correlation of the ranks.
    """
    if a.nodes != b.nodes:
        raise ParameterError("rank vectors cover different node sets")
    n = len(a.nodes)
    if n < 2:
        raise ParameterError("correlation needs at least 2 nodes")
    x = np.asarray(a.ranks, dtype=float)
    y = np.asarray(b.ranks, dtype=float)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise UndefinedMetricError("rank vector has zero variance")

    if not a.has_ties and not b.has_ties:
        d_squared = float(np.sum((x - y) ** 2))
        return 1.0 - 6.0 * d_squared / (n * (n * n - 1))
    rho = float(np.corrcoef(x, y)[0, 1])
    return max(-1.0, min(1.0, rho))


def write_centrality_table(wfb: Mapping[int, float], fbc: Mapping[int, float], out: TextIO) -> None:
    """`node_id wfb fbc rank_wfb rank_fbc`, fixed 6-decimal format."""
    rank_w = fractional_ranks(wfb).as_dict()
    rank_f = fractional_ranks(fbc).as_dict()
    out.write("node_id wfb fbc rank_wfb rank_fbc\n")
    for node in sorted(wfb):
        out.write(f"{node} {fmt(wfb[node])} {fmt(fbc[node])} {fmt(rank_w[node])} {fmt(rank_f[node])}\n")
