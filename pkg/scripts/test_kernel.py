# scripts/test_kernel.py v1.1.0
import io
import math
import os
import sys
import tempfile
from dataclasses import replace

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.config import EXPERIMENTS_DIR
from core.errors import ConfigError
from core.experiment_config import config_from_mapping, load_config
from core.kernel_config import RESULT_COLUMNS, SUMMARY_METRICS
from core.registry import ExperimentRegistry
from core.topology import connected_layout
from kernel import ExperimentKernel, simulate_run, summarize, summary_path
from main import main

SMALL = {"node_count": "40", "width": "4", "height": "4", "repetitions": "2"}


def _small(**overrides) -> dict:
    values = dict(SMALL)
    values.update({k: str(v) for k, v in overrides.items()})
    return values


def _csv(kernel: ExperimentKernel, result) -> str:
    buffer = io.StringIO()
    kernel.write_results(result, buffer)
    return buffer.getvalue()


# ── Configuration ────────────────────────────────────────────────────────────

def test_config_defaults_per_family():
    config = config_from_mapping({"experiment": "a"})
    assert config.experiment == "A"
    assert config.values == (0.0, 0.05, 0.1, 0.2, 0.3, 0.5)
    assert config.output == os.path.join("results", "expA.csv")
    assert config_from_mapping({"experiment": "F"}).strategy == "distributed_beta"
    assert config_from_mapping({"experiment": "D"}).is_correlation


def test_config_file_parsing():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "expB.cfg")
        with open(path, "w", encoding="utf-8") as f:
            f.write("# unidirectional sweep\nexperiment = B\nnode_count = 50\nvalues = 0.1, 0.2\n"
                    "width = 5\nheight = 5\nrepetitions = 3\n")
        config = load_config(path)
    assert config.node_count == 50 and config.repetitions == 3
    assert config.values == (0.1, 0.2)
    assert config.width == 5.0


def test_config_rejects_bad_input():
    for mapping in (
        {"experiment": "A", "colour": "red"},
        {"experiment": "Q"},
        {"experiment": "A", "model": "parabolic"},
        {"experiment": "A", "values": "1.5"},
        {"experiment": "A", "repetitions": "0"},
        {"experiment": "A", "node_count": "many"},
        {"experiment": "D", "node_count": "300"},
        {"experiment": "C", "connectivity": "sometimes"},
        {},
    ):
        try:
            config_from_mapping(mapping)
        except ConfigError:
            continue
        raise AssertionError(f"accepted {mapping}")


def test_region_sweep_keeps_density():
    config = config_from_mapping({"experiment": "C", "density": "3", "values": "8, 10"})
    assert config.geometry_for(8.0) == (192, 8.0, 8.0)
    assert config.geometry_for(10.0) == (300, 10.0, 10.0)
    fixed = config_from_mapping({"experiment": "C"})
    assert fixed.geometry_for(12.0) == (300, 12.0, 12.0)


def test_registry_scans_config_directory():
    with tempfile.TemporaryDirectory() as tmp:
        with open(os.path.join(tmp, "expA.cfg"), "w", encoding="utf-8") as f:
            f.write("experiment = A\n")
        with open(os.path.join(tmp, "notes.cfg"), "w", encoding="utf-8") as f:
            f.write("experiment = A\n")
        with open(os.path.join(tmp, "expZ.cfg"), "w", encoding="utf-8") as f:
            f.write("experiment = Z\n")
        registry = ExperimentRegistry(tmp).load_all()
        assert registry.get_all_ids() == ["A"]
        assert registry.get("a").experiment == "A"
        try:
            registry.get("B")
        except ConfigError:
            return
    raise AssertionError("unknown id resolved")


def test_shipped_configs_are_valid():
    registry = ExperimentRegistry(EXPERIMENTS_DIR).load_all()
    assert registry.get_all_ids() == ["A", "B", "C", "D", "E", "F", "G"]
    assert registry.get("G").model == "ula"
    assert registry.get("C").sweep == "region"
    assert not registry.get("C").requires_connected
    assert registry.get("A").requires_connected


# ── Runs ─────────────────────────────────────────────────────────────────────

def test_no_rewiring_changes_nothing():
    kernel = ExperimentKernel(workers=1)
    result = kernel.run_experiment(config_from_mapping(_small(experiment="A", values="0")))
    assert result.failures == 0 and len(result.rows) == 2
    for row in result.rows:
        assert row["apl_ratio"] == "1.000000"
        assert row["unidir_frac"] == "0.000000"
        assert row["p"] == "0.000000"


def test_realized_p_matches_selection():
    layout, omni, _ = connected_layout(40, 4, 4, 1, seed=3)
    outcome = simulate_run(layout, omni, "sector", "randomized", 3, p=0.3)
    assert len(outcome.plan.selected()) == 12
    assert outcome.report.realized_p == 12 / 40


def test_runs_are_byte_identical():
    config = config_from_mapping(_small(experiment="B", values="0.3"))
    first = ExperimentKernel(workers=1)
    second = ExperimentKernel(workers=1)
    text = _csv(first, first.run_experiment(config))
    assert text == _csv(second, second.run_experiment(config))
    assert text.splitlines()[0] == ",".join(RESULT_COLUMNS)


def test_parallel_rows_keep_order():
    config = config_from_mapping(_small(experiment="A", values="0.1, 0.3"))
    serial = ExperimentKernel(workers=1)
    parallel = ExperimentKernel(workers=2)
    assert _csv(serial, serial.run_experiment(config)) == _csv(parallel, parallel.run_experiment(config))


def test_correlation_rows_carry_rho():
    config = config_from_mapping({"experiment": "D", "node_count": "20", "width": "2.6",
                                  "height": "2.6", "values": "0.5, 1.0", "repetitions": "2"})
    kernel = ExperimentKernel()
    result = kernel.run_experiment(config)
    assert result.header == RESULT_COLUMNS + ("f", "rho")
    assert len(result.rows) + result.failures == 4
    assert result.rows
    for row in result.rows:
        assert -1.0 <= float(row["rho"]) <= 1.0
        assert row["f"] in ("0.500000", "1.000000")


def test_distributed_fraction_shrinks_with_beta():
    config = config_from_mapping(_small(experiment="F", values="1, 2, 4"))
    result = ExperimentKernel().run_experiment(config)
    means = []
    for beta in config.values:
        ps = [float(row["p"]) for value, row in zip(result.sweep_values, result.rows) if value == beta]
        assert ps
        means.append(sum(ps) / len(ps))
    assert means[0] >= means[1] >= means[2]
    assert all(row["beta"] in ("1.000000", "2.000000", "4.000000") for row in result.rows)


def test_centralized_selection_run():
    config = config_from_mapping(_small(experiment="E", values="0.1"))
    result = ExperimentKernel().run_experiment(config)
    assert result.failures == 0
    assert all(row["p"] == "0.100000" for row in result.rows)


# ── Summaries ────────────────────────────────────────────────────────────────

def _synthetic_row(p: float, diameter: float, apl: float) -> dict:
    row = {metric: "0.500000" for metric in SUMMARY_METRICS}
    row.update({"p": f"{p:.6f}", "D": f"{diameter:.6f}", "apl": f"{apl:.6f}"})
    return row


def test_growth_sweep_yields_every_region():
    config = replace(ExperimentRegistry(EXPERIMENTS_DIR).load_all().get("C"), repetitions=1)
    result = ExperimentKernel(workers=1).run_experiment(config)
    assert result.failures == 0
    assert result.sweep_values == list(config.values)
    assert config.values == (8.0, 10.0, 12.0, 14.0)
    fit = [row for row in summarize(config, list(zip(result.sweep_values, result.rows))) if row[0] == "fit"]
    assert [row[1] for row in fit] == ["slope", "intercept", "r_squared"]
    assert all(row[4] == "4" for row in fit)
    widest = result.rows[-1]
    assert widest["width"] == "14.000000"
    assert 0.0 < float(widest["reach_frac"]) <= 1.0


def test_summary_statistics():
    config = config_from_mapping({"experiment": "C", "node_count": "30", "values": "8, 10, 12"})
    tagged = []
    for side in config.values:
        diameter = side * math.sqrt(2.0)
        apl = 2.0 * math.log(diameter) + 1.0
        tagged.append((side, _synthetic_row(0.1, diameter, apl - 0.1)))
        tagged.append((side, _synthetic_row(0.3, diameter, apl + 0.1)))
    rows = summarize(config, tagged)

    p_row = next(r for r in rows if r[0] == "8.000000" and r[1] == "p")
    assert p_row[2] == "0.200000"
    assert p_row[3] == f"{math.sqrt(0.02):.6f}"
    assert p_row[4] == "2"
    fit = {r[1]: float(r[2]) for r in rows if r[0] == "fit"}
    assert set(fit) == {"slope", "intercept", "r_squared"}
    assert abs(fit["slope"] - 2.0) < 1e-4
    assert fit["r_squared"] > 0.999


def test_summary_single_row_has_no_stddev():
    config = config_from_mapping({"experiment": "A", "values": "0.2"})
    rows = summarize(config, [(0.2, _synthetic_row(0.2, 14.0, 5.0))])
    apl_row = next(r for r in rows if r[1] == "apl")
    assert apl_row[2:] == ("5.000000", "nan", "1")
    assert not any(r[0] == "fit" for r in rows)


def test_summary_path():
    assert summary_path(os.path.join("results", "expA.csv")) == os.path.join("results", "expA_summary.csv")


# ── Command line ─────────────────────────────────────────────────────────────

def test_cli_generate_and_simulate():
    with tempfile.TemporaryDirectory() as tmp:
        layout_path = os.path.join(tmp, "layout.txt")
        assert main(["generate", "--n", "30", "--width", "3.5", "--height", "3.5", "--seed", "7",
                     "--out", layout_path]) == 0
        with open(layout_path, encoding="utf-8") as f:
            lines = f.read().splitlines()
        assert lines[0].startswith("30 3.500000 3.500000 1.000000 ")
        assert len(lines) == 31

        outputs = []
        for name in ("a.csv", "b.csv"):
            path = os.path.join(tmp, name)
            assert main(["simulate", "--layout", layout_path, "--strategy", "randomized",
                         "--p", "0.2", "--seed", "7", "--out", path]) == 0
            with open(path, "rb") as f:
                outputs.append(f.read())
        assert outputs[0] == outputs[1]
        assert outputs[0].decode().splitlines()[0].startswith("apl,apl_ratio,cc,cc_ratio")


def test_cli_experiment_writes_schema():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = os.path.join(tmp, "expA.cfg")
        with open(cfg, "w", encoding="utf-8") as f:
            f.write("experiment = A\nnode_count = 30\nwidth = 3.5\nheight = 3.5\n"
                    "values = 0, 0.2\nrepetitions = 1\n")
        out = os.path.join(tmp, "out", "expA.csv")
        assert main(["experiment", "--config", cfg, "--out", out]) == 0
        with open(out, encoding="utf-8") as f:
            assert f.readline().strip() == ",".join(RESULT_COLUMNS)
        with open(summary_path(out), encoding="utf-8") as f:
            assert f.readline().strip() == "sweep_value,metric,mean,stddev,count"


def test_cli_oracle_table():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "oracle.txt")
        assert main(["oracle", "--n", "20", "--width", "2.6", "--height", "2.6",
                     "--seed", "3", "--f", "1.0", "--out", out]) == 0
        with open(out, encoding="utf-8") as f:
            lines = f.read().splitlines()
    assert lines[0] == "node_id wfb fbc rank_wfb rank_fbc"
    assert len(lines) == 21


def test_cli_plan_and_log_outputs():
    with tempfile.TemporaryDirectory() as tmp:
        plan_path = os.path.join(tmp, "plan.txt")
        log_path = os.path.join(tmp, "log.txt")
        assert main(["simulate", "--n", "30", "--width", "3.5", "--height", "3.5", "--seed", "5",
                     "--strategy", "randomized", "--p", "0.2", "--out", os.path.join(tmp, "r.csv"),
                     "--plan-out", plan_path]) == 0
        assert main(["oracle", "--n", "20", "--width", "2.6", "--height", "2.6", "--seed", "3",
                     "--out", os.path.join(tmp, "o.txt"), "--log-out", log_path]) == 0
        with open(plan_path, encoding="utf-8") as f:
            plan_lines = f.read().splitlines()
        with open(log_path, encoding="utf-8") as f:
            log_lines = f.read().splitlines()
    assert plan_lines[0] == "node_id mode boresight param"
    assert len(plan_lines) == 31
    assert sum(1 for line in plan_lines[1:] if line.split()[1] == "sector") == 6
    assert log_lines[0] == "flow_id hop_index transmitter next_hop"
    assert len(log_lines) > 1


def test_cli_errors_exit_nonzero():
    assert main(["teleport"]) == 2
    assert main(["generate", "--n", "0"]) == 2
    assert main(["experiment", "--config", "/nonexistent/expA.cfg"]) == 2


def test_cli_oracle_caps_node_count():
    assert main(["oracle", "--n", "150", "--width", "7", "--height", "7", "--seed", "2"]) == 2
    assert main(["oracle", "--n", "20", "--width", "2.6", "--height", "2.6", "--seed", "3",
                 "--fbc-max-nodes", "10"]) == 2


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
