"""Classical reference decoders for regular LDPC codes.

``decode_sequential`` is the textbook sequential flip decoder: while some
variable sits in strictly more unsatisfied than satisfied checks, flip
it.  ``decode_ctmc_ideal`` is the same rule as a continuous-time jump
process: every currently-eligible variable flips at a fixed rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .code import TannerGraph, syndrome
from .ctmc import Event, TrajectoryRecord
from .errors import ParameterError

__all__ = ["DecodeResult", "decode_sequential", "decode_ctmc_ideal"]


@dataclass
class DecodeResult:
    """Outcome of a sequential decode.

    status is "decoded", "stuck" (no eligible variable, syndrome nonzero)
    or "budget" (flip budget exhausted).
    """

    final: np.ndarray
    success: bool
    flips: int
    status: str
    flip_log: list[int] = field(default_factory=list)


def _unsat_per_var(graph: TannerGraph, syn: np.ndarray) -> np.ndarray:
    return syn[graph.var_to_checks].sum(axis=1).astype(np.int64)


def decode_sequential(graph: TannerGraph, bits, max_flips: int = 1_000_000) -> DecodeResult:
    """Flip one variable at a time among those with a strict majority of
    unsatisfied checks, most-violated first (lowest index on ties), until
    none remains or the budget runs out.

    Every flip strictly decreases the number of unsatisfied checks (the
    classical termination argument); this is asserted.  Preferring the
    most-violated variable matters in practice: picking eligible
    variables in plain index order flips correct bits that merely border
    many errors and strands the decoder in local minima.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    work = bits.copy()
    syn = syndrome(graph, work)
    unsat = int(syn.sum())
    flip_log: list[int] = []
    while unsat > 0:
        upv = _unsat_per_var(graph, syn)
        by_violation = np.where(2 * upv > graph.l, upv, -1)
        v = int(np.argmax(by_violation))
        if by_violation[v] < 0:
            status = "stuck"
            break
        if len(flip_log) >= max_flips:
            status = "budget"
            break
        work[v] ^= 1
        syn[graph.var_to_checks[v]] ^= 1
        new_unsat = int(syn.sum())
        assert new_unsat < unsat, "flip did not decrease unsatisfied checks"
        unsat = new_unsat
        flip_log.append(v)
    else:
        status = "decoded"
    return DecodeResult(
        final=work,
        success=(status == "decoded"),
        flips=len(flip_log),
        status=status,
        flip_log=flip_log,
    )


def decode_ctmc_ideal(
    graph: TannerGraph,
    bits,
    r_flip: float,
    seed,
    t_max: float,
    reference=None,
) -> TrajectoryRecord:
    """Continuous-time version of the flip rule: each variable in a strict
    majority of unsatisfied checks flips at rate r_flip, all others at 0.

    Terminates at zero unsatisfied checks (success, t_decode recorded) or
    at t_max.  When ``reference`` is given the errors-remaining timeline
    is tracked against it; otherwise the timeline is left empty.
    """
    if not r_flip > 0:
        raise ParameterError("r_flip must be positive")
    bits = np.asarray(bits, dtype=np.uint8)
    work = bits.copy()
    rng = np.random.default_rng(seed)
    syn = syndrome(graph, work)
    unsat = int(syn.sum())
    track = reference is not None
    if track:
        reference = np.asarray(reference, dtype=np.uint8)
        dist = int(np.count_nonzero(work != reference))
        tl_t, tl_e = [0.0], [dist]
    else:
        tl_t, tl_e = [], []
    events: list[Event] = []
    t = 0.0
    outcome, t_dec = "timeout", None
    if unsat == 0:
        outcome, t_dec = "success", 0.0
    else:
        while True:
            candidates = np.flatnonzero(2 * _unsat_per_var(graph, syn) > graph.l)
            if candidates.size == 0:
                t = t_max
                break
            dt = rng.standard_exponential() / (r_flip * candidates.size)
            if t + dt > t_max:
                t = t_max
                break
            t += dt
            v = int(candidates[rng.integers(candidates.size)])
            work[v] ^= 1
            syn[graph.var_to_checks[v]] ^= 1
            unsat = int(syn.sum())
            events.append(Event(t, "var", v, int(work[v])))
            if track:
                dist += 1 if work[v] != reference[v] else -1
                tl_t.append(t)
                tl_e.append(dist)
            if unsat == 0:
                outcome, t_dec = "success", t
                break
    return TrajectoryRecord(
        events=events,
        timeline_times=np.array(tl_t),
        timeline_errors=np.array(tl_e, dtype=np.int64),
        outcome=outcome,
        t_decode=t_dec,
        n_events=len(events),
        t_final=t,
    )
