# main.py v1.1.0
"""
Command-line gateway.

  generate    write a layout file
  simulate    one run, MetricsReport as a CSV line on stdout
  experiment  run a config file, a registered id, or every registered config
  oracle      WFB vs FBC table for one layout

Exit status: 0 on success, 2 on usage or simulation errors.
"""

import argparse
import sys
from contextlib import contextmanager
from typing import Iterator, List, Optional, TextIO, Tuple

from core.centrality import write_centrality_table
from core.config import WORKERS
from core.errors import ParameterError, SimulationError, UndefinedMetricError
from core.experiment_config import load_config
from core.kernel_config import (
    DEFAULT_BASE_SEED, DEFAULT_ESTIMATOR, DEFAULT_FBC_MAX_NODES, DEFAULT_MAX_MULTIPLE, DEFAULT_NODE_COUNT,
    DEFAULT_OMNI_RANGE, DEFAULT_REGION_SIDE, DEFAULT_TRAFFIC_F, MODELS, ORACLE_REGION_SIDE,
    STRATEGIES, WFB_ESTIMATORS,
)
from core.logger import logger, log_event
from core.registry import ExperimentRegistry
from core.rewire import write_plan
from core.topology import (
    NodeLayout, Topology, build_omni_graph, connected_layout, is_strongly_connected,
    place_nodes, read_layout, write_layout,
)
from core.traffic import write_log
from core.utils import fmt, write_rows
from kernel import ExperimentKernel, correlation_run, simulate_run


@contextmanager
def _output(path: Optional[str]) -> Iterator[TextIO]:
    if not path:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f


def _add_layout_flags(parser: argparse.ArgumentParser, count: int = DEFAULT_NODE_COUNT,
                      side: float = DEFAULT_REGION_SIDE) -> None:
    parser.add_argument("--n", type=int, default=count, help="node count")
    parser.add_argument("--width", type=float, default=side)
    parser.add_argument("--height", type=float, default=side)
    parser.add_argument("--range", dest="omni_range", type=float, default=DEFAULT_OMNI_RANGE,
                        help="omnidirectional range r")
    parser.add_argument("--seed", type=int, default=DEFAULT_BASE_SEED)
    parser.add_argument("--layout", help="read the layout from this file instead of generating one")


def _resolve_layout(args: argparse.Namespace) -> Tuple[NodeLayout, Topology]:
    if args.layout:
        with open(args.layout, "r", encoding="utf-8") as f:
            layout = read_layout(f)
        omni = build_omni_graph(layout)
        if not is_strongly_connected(omni):
            logger.warning(f"[cli] layout {args.layout} is not strongly connected")
        return layout, omni
    layout, omni, _ = connected_layout(args.n, args.width, args.height, args.omni_range, args.seed)
    return layout, omni


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swbeam",
        description="Small-world ad hoc networks through directional beamforming.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a layout file")
    gen.add_argument("--n", type=int, default=DEFAULT_NODE_COUNT)
    gen.add_argument("--width", type=float, default=DEFAULT_REGION_SIDE)
    gen.add_argument("--height", type=float, default=DEFAULT_REGION_SIDE)
    gen.add_argument("--range", dest="omni_range", type=float, default=DEFAULT_OMNI_RANGE)
    gen.add_argument("--seed", type=int, default=DEFAULT_BASE_SEED)
    gen.add_argument("--allow-disconnected", action="store_true",
                     help="keep the first placement even if the omni graph is not strongly connected")
    gen.add_argument("--out", help="output path (default: stdout)")

    sim = sub.add_parser("simulate", help="single run, full metrics report on stdout")
    _add_layout_flags(sim)
    sim.add_argument("--model", choices=MODELS, default="sector")
    sim.add_argument("--strategy", choices=STRATEGIES, default="randomized")
    sim.add_argument("--p", type=float, default=0.1, help="beamforming fraction (randomized, centralized_topk)")
    sim.add_argument("--beta", type=float, default=2.0, help="similarity factor (distributed_beta)")
    sim.add_argument("--f", type=float, default=DEFAULT_TRAFFIC_F, help="traffic fraction")
    sim.add_argument("--max-multiple", type=int, default=DEFAULT_MAX_MULTIPLE)
    sim.add_argument("--neighborhood-size", type=int, default=None)
    sim.add_argument("--estimator", choices=WFB_ESTIMATORS, default=DEFAULT_ESTIMATOR)
    sim.add_argument("--out", help="output path (default: stdout)")
    sim.add_argument("--plan-out", help="also write the beam plan to this path")

    exp = sub.add_parser("experiment", help="run an experiment config")
    source = exp.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="path to a key = value config file")
    source.add_argument("--id", help="registered experiment id, e.g. A")
    source.add_argument("--all", action="store_true", help="every registered experiment")
    exp.add_argument("--out", help="results CSV path (overrides the config's output)")
    exp.add_argument("--workers", type=int, default=WORKERS)

    orc = sub.add_parser("oracle", help="WFB vs FBC table for a layout")
    _add_layout_flags(orc, DEFAULT_FBC_MAX_NODES, ORACLE_REGION_SIDE)
    orc.add_argument("--f", type=float, default=DEFAULT_TRAFFIC_F, help="traffic fraction")
    orc.add_argument("--estimator", choices=WFB_ESTIMATORS, default=DEFAULT_ESTIMATOR)
    orc.add_argument("--fbc-max-nodes", type=int, default=DEFAULT_FBC_MAX_NODES,
                     help="largest layout the max-flow reference accepts")
    orc.add_argument("--out", help="output path (default: stdout)")
    orc.add_argument("--log-out", help="also write the transmission log to this path")
    return parser


# ── Subcommands ──────────────────────────────────────────────────────────────

def cmd_generate(args: argparse.Namespace) -> int:
    if args.allow_disconnected:
        layout = place_nodes(args.n, args.width, args.height, args.omni_range, args.seed)
    else:
        layout, _, _ = connected_layout(args.n, args.width, args.height, args.omni_range, args.seed)
    with _output(args.out) as out:
        write_layout(layout, out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    layout, omni = _resolve_layout(args)
    outcome = simulate_run(
        layout, omni, args.model, args.strategy, args.seed,
        p=args.p, beta=args.beta, f=args.f, max_multiple=args.max_multiple,
        neighborhood_size=args.neighborhood_size, estimator=args.estimator,
    )
    report = outcome.report.as_dict()
    with _output(args.out) as out:
        write_rows(out, report.keys(), [[fmt(v) for v in report.values()]], sep=",")
    if args.plan_out:
        with _output(args.plan_out) as out:
            write_plan(outcome.plan, out)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    kernel = ExperimentKernel(workers=args.workers)
    if args.config:
        configs = [load_config(args.config)]
    else:
        registry = ExperimentRegistry().load_all(only_id=None if args.all else args.id)
        ids = registry.get_all_ids() if args.all else [args.id]
        configs = [registry.get(exp_id) for exp_id in ids]
        if not configs:
            raise SimulationError(f"no experiment configs found in {registry.root_path}")

    if args.out and len(configs) > 1:
        raise SimulationError("--out can only be combined with a single experiment")
    for config in configs:
        result = kernel.run_to_files(config, args.out)
        if result.failures:
            logger.warning(f"[cli] experiment {config.experiment}: {result.failures} repetitions failed")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    if not args.layout and args.n > args.fbc_max_nodes:
        raise ParameterError(f"oracle runs are capped at {args.fbc_max_nodes} nodes, got --n {args.n}")
    layout, omni = _resolve_layout(args)
    if layout.node_count > args.fbc_max_nodes:
        raise ParameterError(f"oracle runs are capped at {args.fbc_max_nodes} nodes, layout has {layout.node_count}")
    outcome = correlation_run(layout, omni, args.f, args.seed, args.estimator)
    with _output(args.out) as out:
        write_centrality_table(outcome.wfb.wfb, outcome.fbc, out)
    if args.log_out:
        with _output(args.log_out) as out:
            write_log(outcome.log, out)
    try:
        rho = round(outcome.rho(), 6)
    except UndefinedMetricError as e:
        logger.warning(f"[cli] rho undefined for this layout: {e}")
        rho = None
    log_event("ORACLE", {"N": layout.node_count, "f": args.f, "rho": rho})
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
    "oracle": cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return COMMANDS[args.command](args)
    except SimulationError as e:
        print(f"swbeam {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        log_event("CLI_ERROR", {"command": args.command, "error_type": type(e).__name__,
                                "error_msg": str(e)[:200]}, level="error")
        return 2
    except TimeoutError:
        raise
    except OSError as e:
        print(f"swbeam {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
