"""Experiment driver: trajectory ensembles, parameter sweeps, summary
statistics, and persistent CSV artifacts.

A run is fully determined by an :class:`EnsembleConfig` (JSON-serializable).
Result rows are appended to a CSV whose columns are the flattened config
followed by the statistics; reruns with the same master seed reproduce the
rows byte for byte.  Decode-time statistics are medians with a 90%
interval because the time distribution spreads over orders of magnitude;
failed trajectories count in p_decode's denominator but are excluded from
time statistics and from the mean-errors curve.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import corrupt_fixed_count, corrupt_iid
from .code import TannerGraph, load_graph, sample_regular_code
from .ctmc import CircuitState, SimParams, TrajectoryRecord, compute_rates, run_trajectory
from .errors import ParameterError
from . import slh

__all__ = [
    "EnsembleConfig",
    "EnsembleStats",
    "run_ensemble",
    "sweep",
    "gamma_bound",
    "resample_timeline",
    "log_grid",
    "total_input_power",
    "slh_ctmc_max_deviation",
    "append_stats_row",
    "write_mean_timeline",
    "CSV_COLUMNS",
]


def gamma_bound(l: int, k: int) -> float:
    """Upper bound on the feedback attenuation for reliable single-error
    correction: (1 / (l (k-1)))**(1 / (l-1))."""
    if l < 2 or k < 2:
        raise ParameterError(f"need l >= 2 and k >= 2, got l={l}, k={k}")
    return (1.0 / (l * (k - 1))) ** (1.0 / (l - 1))


def log_grid(t_min: float, t_max: float, points: int) -> np.ndarray:
    if not (0 < t_min < t_max) or points < 2:
        raise ParameterError("grid bounds must be positive and increasing, points >= 2")
    return np.geomspace(t_min, t_max, points)


def resample_timeline(record: TrajectoryRecord, grid) -> np.ndarray:
    """Step interpolation (last value before each grid time) of the sparse
    errors-remaining timeline."""
    grid = np.asarray(grid)
    if record.timeline_times.size == 0:
        raise ParameterError("record has no errors timeline")
    if np.any(np.diff(grid) < 0):
        raise ParameterError("grid must be sorted")
    idx = np.searchsorted(record.timeline_times, grid, side="right") - 1
    return record.timeline_errors[np.clip(idx, 0, None)]


@dataclass(frozen=True)
class EnsembleConfig:
    """Everything needed to reproduce one ensemble.

    The code is given either as (n, l, k, code_seed) for random sampling
    or as a graph file; errors as a fixed count or an iid probability.
    error_mode "per_trajectory" redraws the corrupted positions for every
    trajectory (seeded by (error_seed, index)); "fixed" uses one pattern.
    """

    n: int | None = None
    l: int | None = None
    k: int | None = None
    code_seed: int | None = None
    graph_file: str | None = None
    error_count: int | None = None
    error_prob: float | None = None
    error_seed: int = 0
    error_mode: str = "per_trajectory"
    params: SimParams = field(default_factory=lambda: SimParams(1e5, 1.0, 0.01))
    trajectories: int = 100
    grid_t_min: float = 1e-2
    grid_t_max: float = 1e6
    grid_points: int = 120
    check_init: str = "syndrome"
    workers: int = 1
    csv_path: str | None = None
    timeline_csv: str | None = None

    def __post_init__(self):
        if self.trajectories < 1:
            raise ParameterError("trajectory count must be >= 1")
        if (self.error_count is None) == (self.error_prob is None):
            raise ParameterError("give exactly one of error_count / error_prob")
        if self.graph_file is None and None in (self.n, self.l, self.k):
            raise ParameterError("give n, l, k (with code_seed) or a graph_file")
        if not (0 < self.grid_t_min < self.grid_t_max):
            raise ParameterError("grid bounds must be positive and increasing")
        if self.error_mode not in ("per_trajectory", "fixed"):
            raise ParameterError(f"unknown error_mode {self.error_mode!r}")

    @staticmethod
    def from_dict(d: dict) -> "EnsembleConfig":
        code = d.get("code", {})
        errors = d.get("errors", {})
        output = d.get("output", {})
        grid = d.get("time_grid", {})
        params = SimParams(**d["params"])
        return EnsembleConfig(
            n=code.get("n"),
            l=code.get("l"),
            k=code.get("k"),
            code_seed=code.get("seed"),
            graph_file=code.get("graph_file"),
            error_count=errors.get("count"),
            error_prob=errors.get("prob"),
            error_seed=errors.get("seed", 0),
            error_mode=errors.get("mode", "per_trajectory"),
            params=params,
            trajectories=d.get("trajectories", 100),
            grid_t_min=grid.get("t_min", 1e-2),
            grid_t_max=grid.get("t_max", 1e6),
            grid_points=grid.get("points", 120),
            check_init=d.get("check_init", "syndrome"),
            workers=d.get("workers", 1),
            csv_path=output.get("csv"),
            timeline_csv=output.get("timeline_csv"),
        )

    @staticmethod
    def from_json(path) -> "EnsembleConfig":
        with open(path) as fh:
            return EnsembleConfig.from_dict(json.load(fh))

    def resolve_graph(self) -> TannerGraph:
        if self.graph_file is not None:
            return load_graph(self.graph_file)
        return sample_regular_code(self.n, self.l, self.k, self.code_seed)


@dataclass
class EnsembleStats:
    """Summary of one ensemble; time statistics are conditioned on success
    and None when nothing decoded."""

    p_decode: float
    t_decode_median: float | None
    t_decode_p05: float | None
    t_decode_p95: float | None
    decode_rate: float | None
    decode_energy_rate: float | None
    n_success: int
    n_total: int
    grid: np.ndarray
    mean_errors_curve: np.ndarray | None
    total_power: float


def total_input_power(graph: TannerGraph, params: SimParams) -> float:
    """Accounting convention for the energy-rate denominator: one probe
    drive per Tanner-graph edge plus one feedback drive per variable."""
    return graph.n * graph.l * params.probe_power + graph.n * params.feedback_power


def _one_trajectory(graph, cfg: EnsembleConfig, grid, idx: int):
    reference = np.zeros(graph.n, dtype=np.uint8)
    err_seed = [cfg.error_seed, idx] if cfg.error_mode == "per_trajectory" else cfg.error_seed
    if cfg.error_count is not None:
        initial, _ = corrupt_fixed_count(reference, cfg.error_count, err_seed)
    else:
        initial, _ = corrupt_iid(reference, cfg.error_prob, err_seed)
    params_i = replace(cfg.params, seed=[_seed_entropy(cfg.params.seed), idx])
    rec = run_trajectory(
        graph, initial, reference, params_i, check_init=cfg.check_init, keep_events=False
    )
    success = rec.outcome == "success"
    curve = resample_timeline(rec, grid) if success else None
    return success, rec.t_decode, curve


def _seed_entropy(seed) -> int:
    return 0 if seed is None else int(seed)


def run_ensemble(cfg: EnsembleConfig, graph: TannerGraph | None = None) -> EnsembleStats:
    """Run cfg.trajectories independent trajectories and aggregate.

    Per-trajectory seeds derive from (master seed, trajectory index), so
    results do not depend on worker count or completion order.
    """
    if graph is None:
        graph = cfg.resolve_graph()
    grid = log_grid(cfg.grid_t_min, cfg.grid_t_max, cfg.grid_points)
    results = [None] * cfg.trajectories
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for idx, out in zip(
                range(cfg.trajectories),
                pool.map(
                    _one_trajectory,
                    itertools.repeat(graph),
                    itertools.repeat(cfg),
                    itertools.repeat(grid),
                    range(cfg.trajectories),
                    chunksize=8,
                ),
            ):
                results[idx] = out
    else:
        for idx in range(cfg.trajectories):
            results[idx] = _one_trajectory(graph, cfg, grid, idx)

    t_ok = np.array([t for ok, t, _ in results if ok])
    curves = [c for ok, _, c in results if ok]
    n_success = int(t_ok.size)
    power = total_input_power(graph, cfg.params)
    if n_success:
        p05, med, p95 = np.percentile(t_ok, [5.0, 50.0, 95.0])
        mean_t = float(np.mean(t_ok))
        rate = math.inf if mean_t == 0.0 else 1.0 / mean_t
        stats = EnsembleStats(
            p_decode=n_success / cfg.trajectories,
            t_decode_median=float(med),
            t_decode_p05=float(p05),
            t_decode_p95=float(p95),
            decode_rate=rate,
            decode_energy_rate=rate / power,
            n_success=n_success,
            n_total=cfg.trajectories,
            grid=grid,
            mean_errors_curve=np.mean(np.stack(curves), axis=0),
            total_power=power,
        )
    else:
        stats = EnsembleStats(
            p_decode=0.0,
            t_decode_median=None,
            t_decode_p05=None,
            t_decode_p95=None,
            decode_rate=None,
            decode_energy_rate=None,
            n_success=0,
            n_total=cfg.trajectories,
            grid=grid,
            mean_errors_curve=None,
            total_power=power,
        )
    if cfg.csv_path:
        append_stats_row(cfg.csv_path, cfg, stats)
    if cfg.timeline_csv and stats.mean_errors_curve is not None:
        write_mean_timeline(cfg.timeline_csv, grid, stats.mean_errors_curve)
    return stats


CSV_COLUMNS = [
    "n",
    "l",
    "k",
    "code_seed",
    "graph_file",
    "error_count",
    "error_prob",
    "error_seed",
    "error_mode",
    "probe_power",
    "feedback_power",
    "gamma",
    "eta",
    "t_max",
    "event_cap",
    "sim_seed",
    "trajectories",
    "grid_t_min",
    "grid_t_max",
    "grid_points",
    "check_init",
    "p_decode",
    "t_decode_median",
    "t_decode_p05",
    "t_decode_p95",
    "decode_rate",
    "decode_energy_rate",
    "n_success",
    "n_total",
]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _config_cells(cfg: EnsembleConfig) -> list[str]:
    p = cfg.params
    return [
        _fmt(x)
        for x in (
            cfg.n,
            cfg.l,
            cfg.k,
            cfg.code_seed,
            cfg.graph_file,
            cfg.error_count,
            cfg.error_prob,
            cfg.error_seed,
            cfg.error_mode,
            p.probe_power,
            p.feedback_power,
            p.gamma,
            p.eta,
            p.t_max,
            p.event_cap,
            p.seed,
            cfg.trajectories,
            cfg.grid_t_min,
            cfg.grid_t_max,
            cfg.grid_points,
            cfg.check_init,
        )
    ]


def append_stats_row(path, cfg: EnsembleConfig, stats: EnsembleStats) -> None:
    cells = _config_cells(cfg) + [
        _fmt(x)
        for x in (
            stats.p_decode,
            stats.t_decode_median,
            stats.t_decode_p05,
            stats.t_decode_p95,
            stats.decode_rate,
            stats.decode_energy_rate,
            stats.n_success,
            stats.n_total,
        )
    ]
    new = not os.path.exists(path)
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(CSV_COLUMNS)
        w.writerow(cells)


def write_mean_timeline(path, grid, curve) -> None:
    """CSV export of the mean errors-remaining curve: columns t, errors."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "errors"])
        for t, e in zip(grid, curve):
            w.writerow([repr(float(t)), repr(float(e))])


_SWEEPABLE = {"error_count", "error_prob", "gamma", "probe_power", "feedback_power", "eta"}


def _apply_point(cfg: EnsembleConfig, point: dict) -> EnsembleConfig:
    param_keys = {k: v for k, v in point.items() if k in ("gamma", "probe_power", "feedback_power", "eta")}
    cfg_keys = {k: v for k, v in point.items() if k in ("error_count", "error_prob")}
    out = cfg
    if param_keys:
        out = replace(out, params=replace(cfg.params, **param_keys))
    if cfg_keys:
        out = replace(out, **cfg_keys)
    return out


def sweep(base: EnsembleConfig, grid: dict, csv_path, graph: TannerGraph | None = None):
    """Run one ensemble per grid point (cartesian product over the given
    lists), appending a CSV row per point.  Points whose config columns
    already appear in the CSV are skipped, so an interrupted sweep can be
    resumed."""
    bad = set(grid) - _SWEEPABLE
    if bad:
        raise ParameterError(f"cannot sweep over {sorted(bad)}")
    if not grid or any(len(v) == 0 for v in grid.values()):
        raise ParameterError("sweep grid must be nonempty")
    done: set[tuple] = set()
    if os.path.exists(csv_path):
        with open(csv_path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != CSV_COLUMNS:
                raise ParameterError(f"existing CSV {csv_path!r} has a different schema")
            n_cfg = len(CSV_COLUMNS) - 8
            done = {tuple(row[:n_cfg]) for row in reader}
    if graph is None:
        graph = base.resolve_graph()
    keys = list(grid)
    out = []
    for values in itertools.product(*(grid[k] for k in keys)):
        cfg = _apply_point(base, dict(zip(keys, values)))
        cfg = replace(cfg, csv_path=None, timeline_csv=None)
        if tuple(_config_cells(cfg)) in done:
            continue
        stats = run_ensemble(cfg, graph=graph)
        append_stats_row(csv_path, cfg, stats)
        out.append(stats)
    return out


def slh_ctmc_max_deviation(
    k_vars_max: int = 4,
    l_checks_max: int = 3,
    gamma: float = 0.01,
    alpha: float = 1.0,
    beta: float = 1.0,
) -> float:
    """Cross-check the event simulator's rate law against the physics-level
    circuit fragments, over every latch basis configuration.

    For parity fragments the check latch's toggling rate and direction
    must match the probe-driven check rate; for feedback fragments the
    variable latch's toggling rate must equal
    feedback_power * gamma**(recorded satisfied).  Returns the largest
    absolute rate deviation; raises on any structural mismatch (wrong
    toggle target or an unexpected toggled latch).
    """
    worst = 0.0
    for kv in range(1, k_vars_max + 1):
        frag = slh.build_parity_fragment(kv, alpha)
        graph = TannerGraph(kv, 1, kv, np.arange(kv, dtype=np.int64).reshape(1, kv))
        params = SimParams(probe_power=abs(alpha) ** 2, feedback_power=0.0, gamma=gamma)
        labels = frag.labels
        for var_bits in itertools.product((0, 1), repeat=kv):
            for c in (0, 1):
                bits = {"c": c, **{f"v{i}": var_bits[i] for i in range(kv)}}
                full = tuple(bits[x] for x in labels)
                state = CircuitState(
                    np.array(var_bits, dtype=np.uint8), np.array([c], dtype=np.uint8)
                )
                table = compute_rates(graph, state, params)
                slh_rate = 0.0
                for _, rate, target in slh.basis_jump_targets(frag, bits):
                    if target == full:
                        continue
                    flips = [x for x, a, b in zip(labels, full, target) if a != b]
                    if flips != ["c"]:
                        raise RuntimeError(f"parity fragment toggled {flips}")
                    if target[labels.index("c")] != table.check_target[0]:
                        raise RuntimeError("parity fragment drives the wrong check value")
                    slh_rate += rate
                worst = max(worst, abs(slh_rate - float(table.check_rate[0])))
    for lc in range(1, l_checks_max + 1):
        frag = slh.build_feedback_fragment(lc, beta, gamma)
        graph = TannerGraph(1, lc, 1, np.zeros((lc, 1), dtype=np.int64))
        params = SimParams(probe_power=0.0, feedback_power=abs(beta) ** 2, gamma=gamma)
        labels = frag.labels
        for check_bits in itertools.product((0, 1), repeat=lc):
            for v in (0, 1):
                bits = {"v": v, **{f"c{j}": check_bits[j] for j in range(lc)}}
                full = tuple(bits[x] for x in labels)
                state = CircuitState(
                    np.array([v], dtype=np.uint8), np.array(check_bits, dtype=np.uint8)
                )
                table = compute_rates(graph, state, params)
                slh_rate = 0.0
                for _, rate, target in slh.basis_jump_targets(frag, bits):
                    if target == full:
                        continue
                    flips = [x for x, a, b in zip(labels, full, target) if a != b]
                    if flips != ["v"]:
                        raise RuntimeError(f"feedback fragment toggled {flips}")
                    slh_rate += rate
                worst = max(worst, abs(slh_rate - float(table.var_rate[0])))
    return worst
