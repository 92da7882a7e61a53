"""Event-driven simulation of an all-optical bit-flip decoder for regular
LDPC codes, with a quantum input-output-network model of the circuit
fragments serving as an independent oracle."""

from .channel import apply_pattern, corrupt_fixed_count, corrupt_iid
from .code import (
    ExpansionReport,
    TannerGraph,
    code_rate,
    expansion_audit,
    load_graph,
    sample_regular_code,
    save_graph,
    syndrome,
)
from .ctmc import (
    CircuitState,
    Event,
    RateTable,
    SimParams,
    TrajectoryRecord,
    compute_rates,
    errors_remaining,
    gillespie_step,
    run_trajectory,
)
from .errors import (
    BudgetError,
    CompositionError,
    ConstructionError,
    FeedbackLoopError,
    ParameterError,
)
from .flipdec import DecodeResult, decode_ctmc_ideal, decode_sequential
from .harness import (
    EnsembleConfig,
    EnsembleStats,
    gamma_bound,
    log_grid,
    resample_timeline,
    run_ensemble,
    slh_ctmc_max_deviation,
    sweep,
    total_input_power,
)

__version__ = "0.1.0"
