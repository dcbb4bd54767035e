# scripts/test_rewire.py v1.0.0
import io
import math
import os
import sys

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from core.antenna import SectorBeam, UlaBeam, optimize_beamwidth, sector_covers
from core.errors import ParameterError
from core.rewire import (
    BeamPlan, apply_beams, assign_directions, build_plan, select_distributed,
    select_random, select_top_wfb, write_plan,
)
from core.topology import NodeLayout, Topology, build_omni_graph, place_nodes
from core.traffic import FlowSpec, HopDirection, record_hop_directions, simulate_flows

TWO_PI = 2.0 * math.pi


def _omni_plan(count: int, model: str = "sector") -> BeamPlan:
    return BeamPlan(tuple([None] * count), "none", model)


# ── Selection ────────────────────────────────────────────────────────────────

def test_select_random_extremes():
    assert select_random(50, 0.0, seed=1) == ()
    assert select_random(50, 1.0, seed=1) == tuple(range(50))


def test_select_random_exact_count():
    for seed in range(30):
        chosen = select_random(300, 0.1, seed)
        assert len(chosen) == 30
        assert len(set(chosen)) == 30
        assert list(chosen) == sorted(chosen)
    assert select_random(7, 0.5, seed=3) == select_random(7, 0.5, seed=3)
    assert len(select_random(7, 0.5, seed=3)) == 4


def test_select_top_wfb():
    assert select_top_wfb({0: 0.3, 1: 0.9}, 0.0) == ()
    values = {v: float(x) for v, x in enumerate(np.random.default_rng(4).random(300))}
    expected = sorted(sorted(values, key=values.get, reverse=True)[:30])
    assert list(select_top_wfb(values, 0.1)) == expected


def test_select_top_wfb_tie_goes_to_smaller_id():
    assert select_top_wfb({0: 0.5, 1: 0.9, 2: 0.5, 3: 0.1}, 0.5) == (0, 1)


def test_select_top_wfb_is_rank_based():
    values = {v: float(x) for v, x in enumerate(np.random.default_rng(5).random(100))}
    transformed = {v: math.exp(3.0 * w) - 7.0 for v, w in values.items()}
    assert select_top_wfb(values, 0.2) == select_top_wfb(transformed, 0.2)


def test_select_distributed_threshold():
    topology = Topology.from_adjacency([[1, 2], [0], [0]])
    assert select_distributed({0: 0.4, 1: 0.1, 2: 0.2}, topology, 2.0) == (0,)
    assert select_distributed({0: 0.2, 1: 0.1, 2: 0.2}, topology, 2.0) == ()


def test_select_distributed_zero_neighborhood_declines():
    topology = Topology.from_adjacency([[1, 2], [0], [0], []])
    assert select_distributed({0: 0.7, 1: 0.0, 2: 0.0, 3: 0.9}, topology, 1.0) == ()


def test_select_distributed_scale_invariant():
    layout = place_nodes(120, 5, 5, 1, seed=2)
    topology = build_omni_graph(layout)
    wfb = {v: float(x) for v, x in enumerate(np.random.default_rng(6).random(120) ** 3)}
    scaled = {v: 8.0 * w for v, w in wfb.items()}
    for beta in (1.0, 1.5, 2.0):
        assert select_distributed(wfb, topology, beta) == select_distributed(scaled, topology, beta)


def test_select_distributed_nested_in_beta():
    layout = place_nodes(150, 6, 6, 1, seed=3)
    topology = build_omni_graph(layout)
    wfb = {v: float(x) for v, x in enumerate(np.random.default_rng(7).random(150))}
    sizes = [set(select_distributed(wfb, topology, beta)) for beta in (1.0, 2.0, 4.0)]
    assert sizes[1] <= sizes[0] and sizes[2] <= sizes[1]


# ── Directions ───────────────────────────────────────────────────────────────

def test_assign_directions_uses_records():
    records = {4: HopDirection(math.pi / 3, 3)}
    boresights = assign_directions({4, 9}, records, seed=5)
    assert boresights[4] == math.pi / 3
    assert 0.0 <= boresights[9] < TWO_PI
    assert boresights == assign_directions({9, 4}, records, seed=5)


def test_assign_directions_draws_are_independent_of_records():
    with_record = assign_directions({1, 2, 3}, {2: HopDirection(1.0, 2)}, seed=8)
    without = assign_directions({1, 2, 3}, {}, seed=8)
    assert with_record[1] == without[1] and with_record[3] == without[3]
    randomized = assign_directions({1, 2, 3}, {2: HopDirection(1.0, 2)}, seed=8, randomized=True)
    assert randomized == without


def test_chain_pipeline_points_back_along_path():
    layout = NodeLayout(tuple((1.0 + 0.9 * i, 1.0) for i in range(4)), 10.0, 10.0, 1.0, 0)
    log = simulate_flows(build_omni_graph(layout), [FlowSpec(0, 3)])
    boresights = assign_directions({2}, record_hop_directions(log, layout), seed=1)
    assert abs(boresights[2] - math.pi) < 1e-12
    plan = build_plan(4, boresights, optimize_beamwidth(14), "sector", "centralized_topk", 1.0)
    rewired = apply_beams(layout, plan)
    # a 3r beam toward the predecessor reaches one node further down the chain
    assert rewired.out_edges[2] == (0, 1)
    assert rewired.has_edge(3, 2)


# ── Plans and rewiring ───────────────────────────────────────────────────────

def test_empty_selection_is_identity():
    layout = place_nodes(150, 6, 6, 1, seed=10)
    assert apply_beams(layout, _omni_plan(150)) == build_omni_graph(layout)


def test_single_element_ula_plan_is_omni():
    layout = place_nodes(150, 6, 6, 1, seed=12)
    beam = UlaBeam.calibrated(0.0, 1, 1.0)
    angles = np.random.default_rng(12).uniform(0.0, TWO_PI, 150)
    plan = BeamPlan(tuple(beam.pointed(float(a)) for a in angles), "randomized", "ula")
    assert apply_beams(layout, plan) == build_omni_graph(layout)


def test_beam_pointing_away_makes_link_one_way():
    layout = NodeLayout(((5.0, 5.0), (5.5, 5.0), (4.4, 5.0)), 10.0, 10.0, 1.0, 0)
    beam = SectorBeam.for_width(math.pi / 2, TWO_PI / 9, 1.0)
    plan = BeamPlan((beam, None, None), "randomized", "sector")
    rewired = apply_beams(layout, plan)
    assert rewired.out_edges[0] == ()
    assert rewired.has_edge(1, 0) and rewired.has_edge(2, 0)
    assert not rewired.is_symmetric()


def test_sector_rows_are_exactly_the_beam():
    layout = place_nodes(200, 6, 6, 1, seed=14)
    selected = (3, 17, 50, 101)
    plan = build_plan(200, {v: 0.5 * i for i, v in enumerate(selected)}, optimize_beamwidth(12),
                      "sector", "randomized", 1.0)
    rewired = apply_beams(layout, plan)
    for v in selected:
        beam = plan.assignments[v]
        covered = tuple(u for u in range(200) if u != v and sector_covers(layout.positions[v], beam, layout.positions[u]))
        assert rewired.out_edges[v] == covered


def test_own_beam_never_changes_in_edges():
    layout = place_nodes(200, 6, 6, 1, seed=15)
    choice = optimize_beamwidth(12)
    boresights = {v: float(a) for v, a in zip(range(0, 200, 5), np.random.default_rng(15).uniform(0, TWO_PI, 40))}
    with_beam = apply_beams(layout, build_plan(200, boresights, choice, "sector", "randomized", 1.0)).to_matrix()
    for v in (0, 5, 10):
        without_v = {u: a for u, a in boresights.items() if u != v}
        reduced = apply_beams(layout, build_plan(200, without_v, choice, "sector", "randomized", 1.0)).to_matrix()
        assert (with_beam[:, v] == reduced[:, v]).all()


def test_ula_plan_uses_ceiling_element_count():
    plan = build_plan(5, {1: 0.0}, optimize_beamwidth(14), "ula", "distributed_beta", 1.0)
    assert plan.assignments[1].elements == 3
    assert plan.selected() == (1,)
    assert plan.realized_p == 0.2


def test_plan_rejects_mixed_beams():
    narrow = SectorBeam.for_width(0.0, TWO_PI / 9, 1.0)
    wide = SectorBeam.for_width(0.0, TWO_PI / 4, 1.0)
    for assignments, model in (((narrow, wide), "sector"), ((narrow, None), "ula"),
                               ((UlaBeam.calibrated(0.0, 2, 1.0), None), "sector")):
        try:
            BeamPlan(assignments, "randomized", model)
        except ParameterError:
            continue
        raise AssertionError(f"plan {assignments} accepted for {model}")


def test_write_plan():
    beam = SectorBeam.for_width(math.pi, TWO_PI / 4, 1.0)
    buffer = io.StringIO()
    write_plan(BeamPlan((None, beam), "randomized", "sector"), buffer)
    assert buffer.getvalue() == (
        "node_id mode boresight param\n"
        "0 omni - -\n"
        "1 sector 3.141593 1.570796\n"
    )


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
