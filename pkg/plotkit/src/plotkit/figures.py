"""Figure rendering for decoder-benchmark CSV exports.

Five figure kinds, all driven by the documented CSV schemas of the
simulation harness (results CSV: one row per ensemble with flattened
config columns and statistics; timeline CSV: columns ``t, errors``):

* error-decay           mean errors remaining vs time, log time axis
* pdecode-vs-errors     success probability vs initial error count,
                        one curve per attenuation value
* decode-time-vs-errors median decode time with 90% band, log y
* power-heatmap         success probability over the probe x feedback
                        power grid, with a fixed-ratio section line
* rate-energy-vs-power  decode rate and energy efficiency along a
                        fixed-ratio power section, log-log

This package never recomputes statistics; the CSV is the single source
of truth.  Rendering is read-only and idempotent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "render", "extract_series", "SchemaError", "EmptyInputError", "KINDS"]

KINDS = (
    "error-decay",
    "pdecode-vs-errors",
    "decode-time-vs-errors",
    "power-heatmap",
    "rate-energy-vs-power",
)


class SchemaError(ValueError):
    """An input CSV is missing a required column."""


class EmptyInputError(ValueError):
    """An input CSV has no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    """One render job: figure kind, input CSV path(s), output image path.

    ``power_ratio`` selects the probe/feedback section used by the
    heatmap overlay line and the rate-energy figure.  Axis scales default
    per kind and can be overridden.
    """

    kind: str
    inputs: tuple[str, ...]
    out: str
    power_ratio: float = 1.0
    x_scale: str | None = None
    y_scale: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input CSV required")


def _read_table(path) -> dict[str, list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInputError(f"{path}: empty file")
        rows = [r for r in reader if r]
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    return {name: [row[i] for row in rows] for i, name in enumerate(header)}


def _columns(table: dict, path, *names) -> list[np.ndarray]:
    out = []
    for name in names:
        if name not in table:
            raise SchemaError(f"{path}: missing required column {name!r}")
        out.append(np.array([float(v) if v else np.nan for v in table[name]]))
    return out


def _group_by_gamma(gamma: np.ndarray):
    for value in sorted(set(gamma.tolist())):
        yield value, gamma == value


def extract_series(spec: FigureSpec) -> dict:
    """Load and arrange the data series a figure will draw.

    Separated from drawing so tests (and reruns) can verify that identical
    inputs produce identical plotted data.
    """
    path = spec.inputs[0]
    table = _read_table(path)
    if spec.kind == "error-decay":
        series = {"main": _columns(table, path, "t", "errors")}
        for extra in spec.inputs[1:]:
            series[extra] = _columns(_read_table(extra), extra, "t", "errors")
        return series
    if spec.kind == "pdecode-vs-errors":
        count, p, gamma = _columns(table, path, "error_count", "p_decode", "gamma")
        out = {}
        for value, mask in _group_by_gamma(gamma):
            order = np.argsort(count[mask])
            out[value] = (count[mask][order], p[mask][order])
        return out
    if spec.kind == "decode-time-vs-errors":
        count, med, p05, p95, gamma = _columns(
            table, path, "error_count", "t_decode_median", "t_decode_p05", "t_decode_p95", "gamma"
        )
        out = {}
        for value, mask in _group_by_gamma(gamma):
            keep = mask & ~np.isnan(med)  # rows with zero successes carry no times
            order = np.argsort(count[keep])
            out[value] = tuple(a[keep][order] for a in (count, med, p05, p95))
        return out
    if spec.kind == "power-heatmap":
        probe, fb, p = _columns(table, path, "probe_power", "feedback_power", "p_decode")
        probes = np.array(sorted(set(probe.tolist())))
        fbs = np.array(sorted(set(fb.tolist())))
        grid = np.full((probes.size, fbs.size), np.nan)
        for pr, f, val in zip(probe, fb, p):
            grid[np.searchsorted(probes, pr), np.searchsorted(fbs, f)] = val
        return {"probes": probes, "feedbacks": fbs, "p_decode": grid}
    # rate-energy-vs-power: keep only rows on the requested power section
    probe, fb, rate, energy = _columns(
        table, path, "probe_power", "feedback_power", "decode_rate", "decode_energy_rate"
    )
    on_section = np.isclose(probe, spec.power_ratio * fb) & ~np.isnan(rate)
    if not on_section.any():
        raise EmptyInputError(
            f"{path}: no rows with probe = {spec.power_ratio} x feedback and successes"
        )
    order = np.argsort(fb[on_section])
    return {
        "power": fb[on_section][order],
        "rate": rate[on_section][order],
        "energy": energy[on_section][order],
    }


def render(spec: FigureSpec) -> str:
    """Draw the figure and write it to spec.out; returns the output path.

    Raises before any file is written when an input is empty or lacks a
    required column.
    """
    series = extract_series(spec)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    try:
        if spec.kind == "error-decay":
            t, errors = series["main"]
            ax.plot(t, errors, color="black", lw=1.8, label="ensemble mean")
            for name, (t2, e2) in series.items():
                if name != "main":
                    ax.plot(t2, e2, lw=0.9, alpha=0.7, label=name)
            ax.set_xscale(spec.x_scale or "log")
            ax.set_xlabel("time")
            ax.set_ylabel("errors remaining")
            if len(series) > 1:
                ax.legend(fontsize=8)
        elif spec.kind == "pdecode-vs-errors":
            for value, (count, p) in series.items():
                ax.plot(count, p, marker="o", label=f"attenuation {value:g}")
            ax.set_xlabel("initial errors")
            ax.set_ylabel("decode probability")
            ax.set_ylim(-0.02, 1.02)
            ax.legend(fontsize=8)
        elif spec.kind == "decode-time-vs-errors":
            for value, (count, med, p05, p95) in series.items():
                line = ax.plot(count, med, marker="o", label=f"attenuation {value:g}")[0]
                ax.fill_between(count, p05, p95, alpha=0.2, color=line.get_color())
            ax.set_yscale(spec.y_scale or "log")
            ax.set_xlabel("initial errors")
            ax.set_ylabel("decode time (median, 90% band)")
            ax.legend(fontsize=8)
        elif spec.kind == "power-heatmap":
            probes, fbs, grid = series["probes"], series["feedbacks"], series["p_decode"]
            mesh = ax.pcolormesh(
                fbs, probes, grid, cmap="gray", vmin=0.0, vmax=1.0, shading="nearest"
            )
            lo = max(fbs.min(), probes.min() / spec.power_ratio)
            hi = min(fbs.max(), probes.max() / spec.power_ratio)
            ax.plot([lo, hi], [spec.power_ratio * lo, spec.power_ratio * hi], "r--", lw=1.2)
            ax.set_xscale(spec.x_scale or "log")
            ax.set_yscale(spec.y_scale or "log")
            ax.set_xlabel("feedback power")
            ax.set_ylabel("probe power")
            fig.colorbar(mesh, ax=ax, label="decode probability")
        else:
            ax2 = ax.twinx()
            ax.plot(series["power"], series["rate"], "m-o", label="decode rate")
            ax2.plot(series["power"], series["energy"], "b-s", label="per-power rate")
            ax.set_xscale(spec.x_scale or "log")
            ax.set_yscale(spec.y_scale or "log")
            ax2.set_yscale(spec.y_scale or "log")
            ax.set_xlabel("input power (fixed probe/feedback ratio)")
            ax.set_ylabel("decode rate")
            ax2.set_ylabel("decode rate per input power")
        fig.tight_layout()
        fig.savefig(spec.out, dpi=130)
    finally:
        plt.close(fig)
    return spec.out
