"""Continuous-time Markov jump process over the latch states of the
optical decoder circuit.

Model, per latch kind:

* check latch c: while its recorded bit disagrees with the true parity of
  its k variables, the probe beam drives it toward the parity at rate
  ``probe_power``; component noise toggles any check at rate ``eta``.
  Both channels toggle the latch, so they are merged with summed rate.
* variable latch v: the feedback beam toggles it at rate
  ``feedback_power * gamma**s + eta`` where s counts incident checks whose
  *latch* reads satisfied (0).  The latched value, not the true parity,
  sets the rate: that is the measurement latency of the circuit.

Rates equal photon fluxes (proportionality constants are 1).  A
trajectory is simulated event by event (Gillespie), so event times carry
no discretization error.  Internally time is measured in units of
1/feedback_power (falling back to probe power, then eta, when zero),
which makes trajectories exactly invariant, event for event, under a
common rescaling of both powers at eta = 0; recorded times are converted
back to the caller's units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .code import TannerGraph, syndrome
from .errors import ParameterError

__all__ = [
    "SimParams",
    "CircuitState",
    "RateTable",
    "Event",
    "TrajectoryRecord",
    "compute_rates",
    "gillespie_step",
    "run_trajectory",
    "errors_remaining",
    "write_event_log",
    "write_timeline_csv",
]


@dataclass(frozen=True)
class SimParams:
    """Circuit drive and stopping parameters.

    probe_power and feedback_power are photon fluxes |alpha|^2 (1/time);
    gamma is the per-satisfied-check feedback attenuation; eta the
    spontaneous flip rate of every latch.
    """

    probe_power: float
    feedback_power: float
    gamma: float
    eta: float = 0.0
    t_max: float = math.inf
    event_cap: int = 50_000_000
    seed: object = None

    def __post_init__(self):
        if self.probe_power < 0 or self.feedback_power < 0:
            raise ParameterError("powers must be nonnegative")
        if not 0.0 < self.gamma < 1.0:
            raise ParameterError(f"need 0 < gamma < 1, got {self.gamma}")
        if self.eta < 0:
            raise ParameterError("eta must be nonnegative")
        if not self.t_max > 0:
            raise ParameterError("t_max must be positive")
        if self.event_cap < 1:
            raise ParameterError("event_cap must be positive")


@dataclass
class CircuitState:
    """Latch states of the circuit at time t (check bit 1 = recorded unsatisfied)."""

    var_latch: np.ndarray
    check_latch: np.ndarray
    t: float = 0.0


class Event(NamedTuple):
    t: float
    kind: str  # "check" or "var"
    index: int
    new_bit: int


class RateTable:
    """Per-latch jump rates plus the bookkeeping needed to update them
    incrementally after an event.

    check_rate / var_rate are views into one contiguous buffer so the
    total and the cumulative selection array are built in a single pass.
    Every jump toggles its latch, so check_target is always the
    complement of the current check latch.
    """

    __slots__ = (
        "check_rate",
        "check_target",
        "var_rate",
        "_buf",
        "_cum",
        "_parity",
        "_sat",
        "_hot",
        "_cold",
        "_var_table",
    )

    def __init__(self, buf, m, parity, sat, check_target, hot, cold, var_table):
        self._buf = buf
        self._cum = np.empty_like(buf)
        self.check_rate = buf[:m]
        self.var_rate = buf[m:]
        self.check_target = check_target
        self._parity = parity
        self._sat = sat
        self._hot = hot
        self._cold = cold
        self._var_table = var_table

    @property
    def total(self) -> float:
        return float(self._buf.sum())


def compute_rates(graph: TannerGraph, state: CircuitState, params: SimParams) -> RateTable:
    """Full recomputation of every latch's jump rate for the given state."""
    if state.var_latch.shape != (graph.n,) or state.check_latch.shape != (graph.m,):
        raise ParameterError("state arrays inconsistent with graph")
    hot = params.probe_power + params.eta
    cold = params.eta
    var_table = np.array(
        [params.feedback_power * params.gamma**s + params.eta for s in range(graph.l + 1)]
    )
    parity = syndrome(graph, state.var_latch)
    sat = (state.check_latch[graph.var_to_checks] == 0).sum(axis=1)
    buf = np.empty(graph.m + graph.n)
    buf[: graph.m] = np.where(state.check_latch != parity, hot, cold)
    buf[graph.m :] = var_table[sat]
    check_target = (1 - state.check_latch).astype(np.uint8)
    return RateTable(buf, graph.m, parity, sat, check_target, hot, cold, var_table)


def _select_event(rates: RateTable, rng) -> tuple[int | None, float]:
    """Draw (event index, waiting time); index None signals an absorbing state."""
    np.cumsum(rates._buf, out=rates._cum)
    total = rates._cum[-1]
    if not total > 0.0:
        return None, math.inf
    dt = rng.standard_exponential() / total
    r = rng.random() * total
    idx = int(np.searchsorted(rates._cum, r, side="right"))
    if idx >= rates._buf.size:  # r == total edge case
        idx = rates._buf.size - 1
    return idx, dt


def _apply_event(graph: TannerGraph, state: CircuitState, rates: RateTable, idx: int):
    """Toggle the selected latch and refresh only the rates it touches."""
    m = graph.m
    if idx < m:
        c = idx
        new = 1 - int(state.check_latch[c])
        state.check_latch[c] = new
        rates.check_rate[c] = rates._hot if new != rates._parity[c] else rates._cold
        rates.check_target[c] = 1 - new
        vs = graph.check_to_vars[c]
        rates._sat[vs] += 1 if new == 0 else -1
        rates.var_rate[vs] = rates._var_table[rates._sat[vs]]
        return "check", c, new
    v = idx - m
    new = 1 - int(state.var_latch[v])
    state.var_latch[v] = new
    cs = graph.var_to_checks[v]
    rates._parity[cs] ^= 1
    rates.check_rate[cs] = np.where(
        state.check_latch[cs] != rates._parity[cs], rates._hot, rates._cold
    )
    return "var", v, new


def gillespie_step(graph: TannerGraph, state: CircuitState, rates: RateTable, rng):
    """Advance the jump process by one event.

    Draws an Exponential(total) waiting time, selects a latch with
    probability proportional to its rate, toggles it, and updates state
    and rates in place.  Only the rates local to the event change: the l
    incident checks after a variable flip; the check itself and its k
    variables after a check flip.  Raises if every rate is zero.
    """
    idx, dt = _select_event(rates, rng)
    if idx is None:
        raise ParameterError("absorbing state: all rates are zero")
    state.t += dt
    kind, index, new_bit = _apply_event(graph, state, rates, idx)
    return Event(state.t, kind, index, new_bit), state


def errors_remaining(state: CircuitState, reference) -> int:
    """Hamming distance between the variable latches and the reference word."""
    reference = np.asarray(reference)
    if reference.shape != state.var_latch.shape:
        raise ParameterError("reference length mismatch")
    return int(np.count_nonzero(state.var_latch != reference))


@dataclass
class TrajectoryRecord:
    """One simulated trajectory: event log, errors-remaining timeline,
    outcome ("success" | "timeout" | "event_cap") and first-passage time
    to zero errors (None unless success)."""

    events: list[Event] | None
    timeline_times: np.ndarray
    timeline_errors: np.ndarray
    outcome: str
    t_decode: float | None
    n_events: int
    t_final: float

    @property
    def errors_timeline(self) -> list[tuple[float, int]]:
        return list(zip(self.timeline_times.tolist(), self.timeline_errors.tolist()))


def _time_scale(params: SimParams) -> float:
    for u in (params.feedback_power, params.probe_power, params.eta):
        if u > 0:
            return u
    return 1.0


def run_trajectory(
    graph: TannerGraph,
    initial,
    reference,
    params: SimParams,
    *,
    check_init="syndrome",
    keep_events: bool = True,
) -> TrajectoryRecord:
    """Simulate the circuit from ``initial`` until the variable latches
    first match ``reference`` (success), or t exceeds params.t_max, or
    the event cap is hit.  Deterministic for a fixed params.seed.

    check_init selects the check-latch initialization: "syndrome" (latches
    start consistent with the initial word), "zero", or an explicit
    length-m 0/1 array.
    """
    initial = np.asarray(initial, dtype=np.uint8)
    reference = np.asarray(reference, dtype=np.uint8)
    if initial.shape != (graph.n,) or reference.shape != (graph.n,):
        raise ParameterError("initial and reference must have length n")

    if isinstance(check_init, str):
        if check_init == "syndrome":
            check0 = syndrome(graph, initial)
        elif check_init == "zero":
            check0 = np.zeros(graph.m, dtype=np.uint8)
        else:
            raise ParameterError(f"unknown check_init {check_init!r}")
    else:
        check0 = np.asarray(check_init, dtype=np.uint8)
        if check0.shape != (graph.m,):
            raise ParameterError("check_init array must have length m")
        check0 = check0.copy()

    u = _time_scale(params)
    internal = replace(
        params,
        probe_power=params.probe_power / u,
        feedback_power=params.feedback_power / u,
        eta=params.eta / u,
        t_max=params.t_max * u,
    )
    rng = np.random.default_rng(params.seed)
    state = CircuitState(initial.copy(), check0, 0.0)
    rates = compute_rates(graph, state, internal)

    dist = int(np.count_nonzero(initial != reference))
    tl_t = [0.0]
    tl_e = [dist]
    ev_t: list[float] = []
    ev_kind: list[str] = []
    ev_idx: list[int] = []
    ev_bit: list[int] = []
    n_events = 0
    t_dec = None

    if dist == 0:
        outcome = "success"
        t_dec = 0.0
    else:
        while True:
            idx, dt = _select_event(rates, rng)
            if idx is None or state.t + dt > internal.t_max:
                state.t = internal.t_max
                outcome = "timeout"
                break
            state.t += dt
            kind, index, new_bit = _apply_event(graph, state, rates, idx)
            n_events += 1
            if keep_events:
                ev_t.append(state.t)
                ev_kind.append(kind)
                ev_idx.append(index)
                ev_bit.append(new_bit)
            if kind == "var":
                dist += 1 if new_bit != reference[index] else -1
                tl_t.append(state.t)
                tl_e.append(dist)
                if dist == 0:
                    outcome = "success"
                    t_dec = state.t
                    break
            if n_events >= internal.event_cap:
                outcome = "event_cap"
                break

    times = np.array(tl_t) / u
    events = None
    if keep_events:
        events = [
            Event(t / u, kk, ii, bb) for t, kk, ii, bb in zip(ev_t, ev_kind, ev_idx, ev_bit)
        ]
    return TrajectoryRecord(
        events=events,
        timeline_times=times,
        timeline_errors=np.array(tl_e, dtype=np.int64),
        outcome=outcome,
        t_decode=None if t_dec is None else t_dec / u,
        n_events=n_events,
        t_final=state.t / u,
    )


def write_event_log(record: TrajectoryRecord, path) -> None:
    """Text dump, one line per event: ``t kind index new_bit``."""
    if record.events is None:
        raise ParameterError("trajectory was run with keep_events=False")
    with open(path, "w") as fh:
        for ev in record.events:
            fh.write(f"{ev.t!r} {ev.kind} {ev.index} {ev.new_bit}\n")


def write_timeline_csv(record: TrajectoryRecord, path) -> None:
    """CSV export of the errors-remaining timeline: columns t, errors."""
    with open(path, "w") as fh:
        fh.write("t,errors\n")
        for t, e in zip(record.timeline_times, record.timeline_errors):
            fh.write(f"{t!r},{int(e)}\n")
