# kernel.py v1.1.0
"""
ExperimentKernel: composes placement, traffic, centrality, rewiring and
metrics into one run, and runs whole experiment families from an
ExperimentConfig.

Rows are always emitted in (repetition, sweep value) order; with
SWB_WORKERS > 1 repetitions run in a process pool but the output bytes do
not change.
"""

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from core.antenna import BeamwidthChoice, optimize_beamwidth
from core.centrality import (
    WfbResult, flow_betweenness_oracle, fractional_ranks, replay_wfb, spearman_rho,
)
from core.config import WORKERS
from core.errors import ParameterError, SimulationError
from core.experiment_config import ExperimentConfig
from core.kernel_config import (
    CORRELATION_COLUMNS, DEFAULT_ESTIMATOR, DEFAULT_MAX_MULTIPLE, RESULT_COLUMNS,
    SUMMARY_COLUMNS, SUMMARY_METRICS,
)
from core.logger import logger, log_event, log_pipeline_step, log_repetition_error, log_run_row
from core.metrics import MetricsReport, average_path_length, clustering_coefficient, csv_cells, evaluate, log_growth_fit
from core.rewire import (
    BeamPlan, apply_beams, assign_directions, build_plan,
    select_distributed, select_random, select_top_wfb,
)
from core.topology import (
    NodeLayout, Topology, build_omni_graph, connected_layout, euclidean_diameter, place_nodes,
)
from core.traffic import TransmissionLog, generate_flows, record_hop_directions, simulate_flows
from core.utils import fmt, round_count, write_rows


@dataclass
class RunOutcome:
    """Everything one single run produced."""
    report: MetricsReport
    plan: BeamPlan
    choice: Optional[BeamwidthChoice] = None
    wfb: Optional[WfbResult] = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    header: Tuple[str, ...]
    rows: List[Dict[str, str]] = field(default_factory=list)
    sweep_values: List[float] = field(default_factory=list)
    failures: int = 0


def neighborhood_size_for(omni: Topology, override: Optional[int] = None) -> int:
    """n for the beamwidth optimizer: the override, else the rounded mean omni degree."""
    if override is not None:
        return int(override)
    return round_count(omni.mean_degree(), 1)


def simulate_run(layout: NodeLayout, omni: Topology, model: str, strategy: str, seed: int,
                 p: float = 0.0, beta: float = 2.0, f: float = 1.0,
                 max_multiple: int = DEFAULT_MAX_MULTIPLE, neighborhood_size: Optional[int] = None,
                 estimator: str = DEFAULT_ESTIMATOR, run_id: Optional[str] = None) -> RunOutcome:
    """One rewiring of one layout, measured against its omnidirectional graph."""
    started = time.time()
    n = layout.node_count
    if omni.node_count != n:
        raise ParameterError("omni topology and layout disagree on the node count")

    baseline_apl, _ = average_path_length(omni)
    baseline_cc = clustering_coefficient(omni)

    choice, wfb_result, boresights = None, None, {}
    if strategy != "none":
        choice = optimize_beamwidth(neighborhood_size_for(omni, neighborhood_size),
                                    max_multiple, layout.omni_range)

    if strategy == "randomized":
        selected = select_random(n, p, seed)
        boresights = assign_directions(selected, None, seed, randomized=True)
    elif strategy in ("centralized_topk", "distributed_beta"):
        log = simulate_flows(omni, generate_flows(n, f, seed))
        wfb_result = replay_wfb(omni, log, estimator)
        if strategy == "centralized_topk":
            selected = select_top_wfb(wfb_result.wfb, p)
        else:
            selected = select_distributed(wfb_result.wfb, omni, beta)
        boresights = assign_directions(selected, record_hop_directions(log, layout), seed)
    elif strategy != "none":
        raise ParameterError(f"unknown strategy {strategy!r}")

    if choice is None:
        plan = BeamPlan(tuple([None] * n), strategy, model)
    else:
        plan = build_plan(n, boresights, choice, model, strategy, layout.omni_range)
    rewired = apply_beams(layout, plan)
    report = evaluate(rewired, baseline_apl, baseline_cc, euclidean_diameter(layout), plan.realized_p)

    log_pipeline_step("simulate_run", time.time() - started,
                      extra={"N": n, "strategy": strategy, "selected": len(plan.selected())},
                      run_id=run_id)
    return RunOutcome(report, plan, choice, wfb_result)


@dataclass
class CorrelationOutcome:
    """Traffic log, WFB replay and flow-betweenness reference of one layout."""
    log: TransmissionLog
    wfb: WfbResult
    fbc: Dict[int, float]

    def rho(self) -> float:
        return spearman_rho(fractional_ranks(self.wfb.wfb), fractional_ranks(self.fbc))


def correlation_run(layout: NodeLayout, omni: Topology, f: float, seed: int,
                    estimator: str = DEFAULT_ESTIMATOR, run_id: Optional[str] = None) -> CorrelationOutcome:
    started = time.time()
    log = simulate_flows(omni, generate_flows(layout.node_count, f, seed))
    outcome = CorrelationOutcome(log, replay_wfb(omni, log, estimator), flow_betweenness_oracle(omni))
    log_pipeline_step("correlation_run", time.time() - started,
                      extra={"N": layout.node_count, "f": f, "events": len(log.events)}, run_id=run_id)
    return outcome


def sweep_parameters(config: ExperimentConfig, sweep_value: float) -> Dict[str, float]:
    """p, beta and f of one sweep point; the swept variable replaces its config value."""
    params = {"p": config.p, "beta": config.beta, "f": config.f}
    if config.sweep in params:
        params[config.sweep] = float(sweep_value)
    return params


def run_repetition(config: ExperimentConfig, repetition: int, sweep_value: float) -> Optional[Dict[str, str]]:
    """
    One CSV row, or None when a module error aborted the repetition.

    Top-level so a process pool can pickle it.
    """
    seed = config.base_seed + repetition
    run_id = f"{config.experiment}-{seed}-{fmt(sweep_value)}"
    try:
        count, width, height = config.geometry_for(sweep_value)
        if config.requires_connected:
            layout, omni, _ = connected_layout(count, width, height, config.omni_range, seed, run_id=run_id)
        else:
            layout = place_nodes(count, width, height, config.omni_range, seed)
            omni = build_omni_graph(layout)
        params = sweep_parameters(config, sweep_value)

        if config.is_correlation:
            rho = correlation_run(layout, omni, params["f"], seed, config.estimator, run_id).rho()
            log_event("CORRELATION", {"f": params["f"], "seed": seed, "rho": round(rho, 6)}, level="debug", run_id=run_id)
            outcome = simulate_run(layout, omni, config.model, "none", seed, run_id=run_id)
        else:
            rho = None
            outcome = simulate_run(
                layout, omni, config.model, config.strategy, seed,
                p=params["p"], beta=params["beta"], f=params["f"],
                max_multiple=config.max_multiple, neighborhood_size=config.neighborhood_size,
                estimator=config.estimator, run_id=run_id,
            )
    except SimulationError as e:
        log_repetition_error(config.experiment, seed, fmt(sweep_value), type(e).__name__, str(e), run_id=run_id)
        return None

    beta = params["beta"] if config.strategy == "distributed_beta" else None
    row = csv_cells(outcome.report, seed, config.strategy, config.model, layout.node_count,
                    layout.region_width, layout.region_height, beta)
    if rho is not None:
        row["f"] = fmt(params["f"])
        row["rho"] = fmt(rho)
    log_run_row(config.experiment, seed, fmt(sweep_value), config.strategy,
                outcome.report.realized_p, outcome.report.apl_ratio,
                outcome.report.unidirectional_fraction, run_id=run_id)
    return row


# ── Summaries ────────────────────────────────────────────────────────────────

def _describe(values: Sequence[float]) -> Tuple[float, float, int]:
    """(mean, sample stddev, count) over the non-nan values; stddev is nan below two values."""
    clean = np.asarray([v for v in values if not math.isnan(v)], dtype=float)
    if clean.size == 0:
        return math.nan, math.nan, 0
    stddev = float(np.std(clean, ddof=1)) if clean.size > 1 else math.nan
    return float(np.mean(clean)), stddev, int(clean.size)


def summarize(config: ExperimentConfig, tagged_rows: Sequence[Tuple[float, Dict[str, str]]]) -> List[Tuple[str, ...]]:
    """
    Summary rows (sweep_value, metric, mean, stddev, count), one block per sweep value.

    Statistics are taken over the 6-decimal CSV cells so they can be
    recomputed from the results file. Region sweeps append the
    apl-vs-ln(D) fit as `fit` rows.
    """
    metrics = SUMMARY_METRICS + (("rho",) if config.is_correlation else ())
    rows, growth_samples = [], []
    for value in config.values:
        group = [row for tagged, row in tagged_rows if tagged == value]
        means = {}
        for metric in metrics:
            mean, stddev, count = _describe([float(row[metric]) for row in group])
            means[metric] = mean
            rows.append((fmt(value), metric, fmt(mean), fmt(stddev), str(count)))
        if group and not math.isnan(means["D"]) and not math.isnan(means["apl"]):
            growth_samples.append((means["D"], means["apl"]))

    if config.sweep == "region":
        try:
            slope, intercept, r_squared = log_growth_fit(growth_samples)
        except ParameterError as e:
            logger.warning(f"[kernel] growth fit skipped for experiment {config.experiment}: {e}")
        else:
            for metric, value in (("slope", slope), ("intercept", intercept), ("r_squared", r_squared)):
                rows.append(("fit", metric, fmt(value), fmt(math.nan), str(len(growth_samples))))
    return rows


def summary_path(output: str) -> str:
    stem, ext = os.path.splitext(output)
    return f"{stem}_summary{ext or '.csv'}"


class ExperimentKernel:
    """Runs experiment configs and writes their results and summary CSVs."""

    def __init__(self, workers: int = WORKERS):
        if workers < 1:
            raise ParameterError(f"workers must be >= 1, got {workers}")
        self.workers = workers

    def _tasks(self, config: ExperimentConfig) -> List[Tuple[int, float]]:
        return [(r, value) for r in range(config.repetitions) for value in config.values]

    def run_experiment(self, config: ExperimentConfig) -> ExperimentResult:
        started = time.time()
        tasks = self._tasks(config)
        logger.info(f"[kernel] Experiment {config.experiment}: {len(tasks)} runs, workers={self.workers}")

        if self.workers == 1:
            rows = [run_repetition(config, r, value) for r, value in tasks]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                rows = list(pool.map(run_repetition, [config] * len(tasks),
                                     [r for r, _ in tasks], [v for _, v in tasks]))

        header = RESULT_COLUMNS + (CORRELATION_COLUMNS if config.is_correlation else ())
        result = ExperimentResult(config, header)
        for (_, value), row in zip(tasks, rows):
            if row is None:
                result.failures += 1
            else:
                result.rows.append(row)
                result.sweep_values.append(value)

        log_pipeline_step("run_experiment", time.time() - started,
                          status="OK" if result.failures == 0 else "PARTIAL",
                          extra={"experiment": config.experiment, "rows": len(result.rows),
                                 "failures": result.failures})
        return result

    def write_results(self, result: ExperimentResult, out: TextIO) -> None:
        write_rows(out, result.header, ([row[c] for c in result.header] for row in result.rows), sep=",")

    def write_summary(self, result: ExperimentResult, out: TextIO) -> None:
        write_rows(out, SUMMARY_COLUMNS, summarize(result.config, list(zip(result.sweep_values, result.rows))), sep=",")

    def run_to_files(self, config: ExperimentConfig, output: Optional[str] = None) -> ExperimentResult:
        """Runs one config and writes `<output>` plus `<output stem>_summary.csv`."""
        output = output or config.output
        result = self.run_experiment(config)
        directory = os.path.dirname(output)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(output, "w", encoding="utf-8", newline="") as f:
            self.write_results(result, f)
        with open(summary_path(output), "w", encoding="utf-8", newline="") as f:
            self.write_summary(result, f)
        logger.info(f"[kernel] Experiment {config.experiment}: {len(result.rows)} rows -> {output}")
        return result
