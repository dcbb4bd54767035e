# core/kernel_config.py v1.1.0

# ── Geometry ──────────────────────────────────────────────────────────────────
DEFAULT_OMNI_RANGE   = 1.0
DEFAULT_REGION_SIDE  = 10.0
DEFAULT_NODE_COUNT   = 300
RANGE_TOLERANCE      = 1e-9      # relative slack on every "distance <= reach" test
MAX_LAYOUT_ATTEMPTS  = 200
LAYOUT_RETRY_STRIDE  = 100_000   # seed offset between regeneration attempts
COORD_DECIMALS       = 6

# ── Antenna ───────────────────────────────────────────────────────────────────
DEFAULT_MAX_MULTIPLE  = 6
DEFAULT_PATHLOSS_EXP  = 2.0
DEFAULT_TX_POWER      = 1.0
RX_GAIN               = 1.0      # reception is always omnidirectional
ULA_SINGULAR_GUARD    = 1e-9
CALIBRATION_TOLERANCE = 1e-12
ANGLE_TOLERANCE       = 1e-12
CEIL_TOLERANCE        = 1e-9
GAIN_FLOOR            = 1e-12    # below this a direction counts as a pattern null

# ── RNG streams (mixed with the run seed) ────────────────────────────────────
STREAM_PLACEMENT  = 0
STREAM_FLOWS      = 1
STREAM_SELECTION  = 2
STREAM_DIRECTIONS = 3

# ── Centrality ────────────────────────────────────────────────────────────────
WFB_ESTIMATORS        = ("max_forwarder", "summed", "naive")
DEFAULT_ESTIMATOR     = "max_forwarder"
NEIGHBOR_RECORD_FIELDS = 3       # neighbor id, w, g
PIGGYBACK_FIELDS       = 1       # w rides on every transmission
DEFAULT_FBC_MAX_NODES  = 100
ORACLE_REGION_SIDE     = 5.773503   # 100 nodes at density 3

# ── Harness ───────────────────────────────────────────────────────────────────
DEFAULT_REPETITIONS = 10
DEFAULT_BASE_SEED   = 1
DEFAULT_TRAFFIC_F   = 1.0
FLOAT_FORMAT        = "{:.6f}"

MODELS     = ("sector", "ula")
STRATEGIES = ("none", "randomized", "centralized_topk", "distributed_beta")
SWEEP_KEYS = ("p", "f", "beta", "region")
CONNECTIVITY_MODES = ("strong", "any")   # "any" keeps the first placement

RESULT_COLUMNS = (
    "seed", "strategy", "model", "N", "width", "height", "p", "beta",
    "apl", "apl_ratio", "cc", "cc_ratio", "unidir_frac", "reach_frac", "D",
)
CORRELATION_COLUMNS = ("f", "rho")
SUMMARY_COLUMNS = ("sweep_value", "metric", "mean", "stddev", "count")
SUMMARY_METRICS = ("p", "apl", "apl_ratio", "cc", "cc_ratio", "unidir_frac", "reach_frac", "D")

# ── Experiment families ──────────────────────────────────────────────────────
# Per-family defaults; a config file overrides any of these keys.
EXPERIMENT_DEFAULTS = {
    "A": {"strategy": "randomized", "model": "sector", "sweep": "p",
          "values": [0.0, 0.05, 0.1, 0.2, 0.3, 0.5]},
    "B": {"strategy": "randomized", "model": "sector", "sweep": "p",
          "values": [0.0, 0.1, 0.2, 0.3, 0.4]},
    "C": {"strategy": "randomized", "model": "sector", "sweep": "region",
          "values": [8.0, 10.0, 12.0, 14.0], "p": 1.0, "repetitions": 5,
          "connectivity": "any"},
    "D": {"strategy": "none", "model": "sector", "sweep": "f", "node_count": DEFAULT_FBC_MAX_NODES,
          "width": ORACLE_REGION_SIDE, "height": ORACLE_REGION_SIDE, "values": [0.1, 0.3, 0.5, 0.7, 1.0]},
    "E": {"strategy": "centralized_topk", "model": "sector", "sweep": "p",
          "values": [0.1], "f": 1.0},
    "F": {"strategy": "distributed_beta", "model": "sector", "sweep": "beta",
          "values": [1.0, 2.0, 4.0], "f": 1.0},
    "G": {"strategy": "distributed_beta", "model": "ula", "sweep": "beta",
          "values": [2.0], "f": 1.0, "width": 8.0, "height": 8.0},
}
