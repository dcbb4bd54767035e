# core/rewire.py v1.0.0
"""
Beamforming-node selection, beam pointing and the rewired (DTOR) topology.

Rewiring replaces, it never adds: a beamforming node's out-edges are exactly
the nodes its beam covers. Reception stays omnidirectional, so a node's
in-edges depend only on the transmitters around it.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from core.antenna import (
    BeamwidthChoice, SectorBeam, UlaBeam, elements_for_beamwidth,
    sector_coverage_mask, ula_coverage_mask,
)
from core.errors import ParameterError
from core.kernel_config import MODELS, STRATEGIES, STREAM_SELECTION, STREAM_DIRECTIONS
from core.topology import NodeLayout, Topology, build_omni_graph
from core.traffic import HopDirection
from core.utils import TWO_PI, fmt, make_rng, round_count, within_range

Beam = Union[SectorBeam, UlaBeam]


@dataclass(frozen=True)
class BeamPlan:
    assignments: Tuple[Optional[Beam], ...]
    strategy: str
    model: str = "sector"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.strategy!r}")
        if self.model not in MODELS:
            raise ParameterError(f"unknown antenna model {self.model!r}")
        shared = set()
        for beam in self.assignments:
            if beam is None:
                continue
            if isinstance(beam, SectorBeam) and self.model == "sector":
                shared.add(("sector", beam.width, beam.length))
            elif isinstance(beam, UlaBeam) and self.model == "ula":
                shared.add(("ula", beam.elements))
            else:
                raise ParameterError(f"{type(beam).__name__} does not match plan model {self.model!r}")
        if len(shared) > 1:
            raise ParameterError("directional beams in one plan must share width/element parameters")

    @property
    def node_count(self) -> int:
        return len(self.assignments)

    def selected(self) -> Tuple[int, ...]:
        return tuple(node for node, beam in enumerate(self.assignments) if beam is not None)

    @property
    def realized_p(self) -> float:
        return len(self.selected()) / self.node_count


# ── Selection strategies ─────────────────────────────────────────────────────

def select_random(node_count: int, p: float, seed: int) -> Tuple[int, ...]:
    """Exactly round(p·N) distinct nodes, uniform without replacement."""
    if not (0.0 <= p <= 1.0):
        raise ParameterError(f"beamforming fraction must lie in [0, 1], got {p}")
    rng = make_rng(seed, STREAM_SELECTION)
    chosen = rng.choice(node_count, size=round_count(p, node_count), replace=False)
    return tuple(sorted(int(v) for v in chosen))


def select_top_wfb(wfb: Mapping[int, float], fraction: float) -> Tuple[int, ...]:
    """The round(fraction·N) largest WFB values; ties at the cut favour smaller ids."""
    if not wfb:
        raise ParameterError("no WFB values to select from")
    if not (0.0 <= fraction <= 1.0):
        raise ParameterError(f"fraction must lie in [0, 1], got {fraction}")
    ordered = sorted(wfb, key=lambda node: (-wfb[node], node))
    return tuple(sorted(ordered[:round_count(fraction, len(wfb))]))


def select_distributed(wfb: Mapping[int, float], topology: Topology, beta: float) -> Tuple[int, ...]:
    """
    w(v) / mean_{u ∈ N(v)} w(u) > β, evaluated on one frozen snapshot.

    Nodes whose neighborhood average is zero (or who have no neighbors) do not beamform.
    """
    if beta <= 0.0:
        raise ParameterError(f"similarity factor must be positive, got {beta}")
    selected = []
    for node in range(topology.node_count):
        neighbors = topology.out_edges[node]
        if not neighbors:
            continue
        average = sum(wfb.get(u, 0.0) for u in neighbors) / len(neighbors)
        if average <= 0.0:
            continue
        if wfb.get(node, 0.0) / average > beta:
            selected.append(node)
    return tuple(selected)


def assign_directions(selected: Iterable[int], hop_records: Optional[Mapping[int, HopDirection]],
                      seed: int, randomized: bool = False) -> Dict[int, float]:
    """
    Boresight per selected node.

    Recorded max-hop bearings win; nodes that never forwarded, and every node
    of a randomized plan, draw a uniform direction from the seeded stream in
    ascending id order.
    """
    rng = make_rng(seed, STREAM_DIRECTIONS)
    records = hop_records or {}
    boresights = {}
    for node in sorted(selected):
        draw = float(rng.uniform(0.0, TWO_PI))
        if not randomized and node in records:
            boresights[node] = records[node].angle
        else:
            boresights[node] = draw
    return boresights


def build_plan(node_count: int, boresights: Mapping[int, float], choice: BeamwidthChoice,
               model: str, strategy: str, omni_range: float) -> BeamPlan:
    """Gives every selected node the shared beam of `choice`, pointed at its boresight."""
    if model == "sector":
        template = SectorBeam.for_width(0.0, choice.theta_star, omni_range)
    elif model == "ula":
        template = UlaBeam.calibrated(0.0, elements_for_beamwidth(choice, omni_range), omni_range)
    else:
        raise ParameterError(f"unknown antenna model {model!r}")
    assignments = [None] * node_count
    for node, angle in boresights.items():
        assignments[node] = template.pointed(angle)
    return BeamPlan(tuple(assignments), strategy, model)


def apply_beams(layout: NodeLayout, plan: BeamPlan) -> Topology:
    """Directed topology: u→v iff v lies under u's assigned beam (omni disk for omni nodes)."""
    if plan.node_count != layout.node_count:
        raise ParameterError("plan and layout disagree on the node count")
    if not plan.selected():
        return build_omni_graph(layout)

    coords = layout.coords()
    rows = []
    for node, beam in enumerate(plan.assignments):
        origin = coords[node]
        if beam is None:
            delta = coords - origin
            distance = np.hypot(delta[:, 0], delta[:, 1])
            mask = within_range(distance, layout.omni_range)
        elif isinstance(beam, SectorBeam):
            mask = sector_coverage_mask(origin, beam, coords)
        else:
            mask = ula_coverage_mask(origin, beam, coords, layout.omni_range)
        mask[node] = False
        rows.append(mask)
    return Topology.from_matrix(np.vstack(rows))


def write_plan(plan: BeamPlan, out: TextIO) -> None:
    """`node_id mode boresight param`; param is the width (sector) or element count (ULA)."""
    out.write("node_id mode boresight param\n")
    for node, beam in enumerate(plan.assignments):
        if beam is None:
            out.write(f"{node} omni - -\n")
        elif isinstance(beam, SectorBeam):
            out.write(f"{node} sector {fmt(beam.boresight)} {fmt(beam.width)}\n")
        else:
            out.write(f"{node} ula {fmt(beam.boresight)} {beam.elements}\n")
