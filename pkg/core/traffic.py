# core/traffic.py v1.1.0
"""
Traffic generation, min-hop routing and the transmission/overhearing log.

Packets are routed atomically: one packet per flow, no queuing, loss or MAC
contention. Every non-destination node on a route emits one event, overheard
by its whole out-neighborhood.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

from core.errors import ParameterError
from core.kernel_config import STREAM_FLOWS
from core.topology import NodeLayout, Topology
from core.utils import bearing, make_rng, round_count


@dataclass(frozen=True)
class FlowSpec:
    source: int
    destination: int

    def __post_init__(self):
        if self.source == self.destination:
            raise ParameterError(f"flow source and destination coincide ({self.source})")

    @property
    def key(self) -> Tuple[int, int]:
        return self.source, self.destination


@dataclass(frozen=True)
class TransmissionEvent:
    flow_id: int
    flow: FlowSpec
    transmitter: int
    hop_index: int
    overhearers: Tuple[int, ...]
    next_hop: Optional[int]
    previous_hop: Optional[int] = None


@dataclass(frozen=True)
class TransmissionLog:
    events: Tuple[TransmissionEvent, ...]
    flows: Tuple[FlowSpec, ...]


@dataclass(frozen=True)
class HopDirection:
    angle: float
    hop_count: int


# ── Flow generation ──────────────────────────────────────────────────────────

def generate_flows(node_count: int, fraction: float, seed: int) -> List[FlowSpec]:
    """round(f·N) distinct sources, each with a uniform destination among the other N−1 nodes."""
    if node_count < 2:
        raise ParameterError(f"traffic needs at least 2 nodes, got {node_count}")
    if not (0.0 <= fraction <= 1.0):
        raise ParameterError(f"traffic fraction must lie in [0, 1], got {fraction}")

    rng = make_rng(seed, STREAM_FLOWS)
    count = round_count(fraction, node_count)
    sources = rng.choice(node_count, size=count, replace=False)
    flows = []
    for src in sources:
        dst = int(rng.integers(0, node_count - 1))
        if dst >= src:
            dst += 1
        flows.append(FlowSpec(int(src), dst))
    return flows


# ── Routing ──────────────────────────────────────────────────────────────────

def shortest_path_route(topology: Topology, flow: FlowSpec) -> Optional[List[int]]:
    """
    Min-hop directed path, or None when the destination is unreachable.

    Level-synchronous BFS: the frontier is scanned in ascending id order, so
    each node's parent is the smallest-id node at the previous depth.
    """
    source, destination = flow.source, flow.destination
    parent: Dict[int, int] = {source: source}
    frontier = [source]
    while frontier and destination not in parent:
        next_frontier = []
        for u in sorted(frontier):
            for v in topology.out_edges[u]:
                if v not in parent:
                    parent[v] = u
                    next_frontier.append(v)
        frontier = next_frontier

    if destination not in parent:
        return None
    path = [destination]
    while path[-1] != source:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def simulate_flows(topology: Topology, flows: Sequence[FlowSpec]) -> TransmissionLog:
    """Routes flows in list order and records one event per transmitting hop."""
    events: List[TransmissionEvent] = []
    for flow_id, flow in enumerate(flows):
        path = shortest_path_route(topology, flow)
        if path is None:
            continue
        for hop in range(len(path) - 1):
            transmitter = path[hop]
            events.append(TransmissionEvent(
                flow_id=flow_id,
                flow=flow,
                transmitter=transmitter,
                hop_index=hop,
                overhearers=topology.out_edges[transmitter],
                next_hop=path[hop + 1],
                previous_hop=path[hop - 1] if hop > 0 else None,
            ))
    return TransmissionLog(tuple(events), tuple(flows))


def record_hop_directions(log: TransmissionLog, layout: NodeLayout) -> Dict[int, HopDirection]:
    """
    Per node: bearing toward the previous hop of the highest-hop packet it forwarded.

    Only forwarding events (hop_index >= 1) count; on equal hop counts the
    earliest event is kept.
    """
    record: Dict[int, HopDirection] = {}
    for event in log.events:
        if event.hop_index < 1 or event.previous_hop is None:
            continue
        current = record.get(event.transmitter)
        if current is not None and event.hop_index <= current.hop_count:
            continue
        angle = bearing(layout.positions[event.transmitter], layout.positions[event.previous_hop])
        record[event.transmitter] = HopDirection(angle, event.hop_index)
    return record


def write_log(log: TransmissionLog, out: TextIO) -> None:
    """Debug table `flow_id hop_index transmitter next_hop`."""
    out.write("flow_id hop_index transmitter next_hop\n")
    for e in log.events:
        nxt = "-" if e.next_hop is None else str(e.next_hop)
        out.write(f"{e.flow_id} {e.hop_index} {e.transmitter} {nxt}\n")
