"""Command-line entry points.

Subcommands: gen-code, corrupt, decode-flip, simulate, sweep, bound,
slh-verify.  Ensemble and sweep runs are driven by JSON config files so a
results CSV is reproducible from its config alone.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .channel import corrupt_fixed_count, corrupt_iid
from .code import load_graph, sample_regular_code, save_graph
from .flipdec import decode_sequential
from .harness import EnsembleConfig, gamma_bound, run_ensemble, slh_ctmc_max_deviation, sweep

SLH_TOL = 1e-10


def read_assignment(path) -> np.ndarray:
    """One line of 0/1 bits, whitespace-separated or contiguous."""
    with open(path) as fh:
        text = fh.read().strip()
    toks = text.split()
    if len(toks) == 1 and len(toks[0]) > 1:
        toks = list(toks[0])
    return np.array([int(t) for t in toks], dtype=np.uint8)


def write_assignment(bits, path) -> None:
    with open(path, "w") as fh:
        fh.write(" ".join(str(int(b)) for b in bits) + "\n")


def _emit_assignment(bits, out):
    if out:
        write_assignment(bits, out)
    else:
        print(" ".join(str(int(b)) for b in bits))


def _cmd_gen_code(args):
    graph = sample_regular_code(args.n, args.l, args.k, args.seed)
    save_graph(graph, args.out)
    print(f"wrote {graph!r} to {args.out}")


def _cmd_corrupt(args):
    graph = load_graph(args.graph)
    word = read_assignment(args.input) if args.input else np.zeros(graph.n, dtype=np.uint8)
    if args.count is not None:
        out, flipped = corrupt_fixed_count(word, args.count, args.seed)
    else:
        out, flipped = corrupt_iid(word, args.prob, args.seed)
    _emit_assignment(out, args.out)
    print(f"# flipped {flipped.size} bits: {' '.join(map(str, flipped.tolist()))}", file=sys.stderr)


def _cmd_decode_flip(args):
    graph = load_graph(args.graph)
    result = decode_sequential(graph, read_assignment(args.input), args.max_flips)
    print(f"status={result.status} flips={result.flips}")
    if args.out:
        write_assignment(result.final, args.out)
    return 0 if result.success else 1


def _cmd_simulate(args):
    cfg = EnsembleConfig.from_json(args.config)
    stats = run_ensemble(cfg)
    print(
        f"p_decode={stats.p_decode:.4f} ({stats.n_success}/{stats.n_total})"
        + (
            f" t_decode median={stats.t_decode_median:.6g}"
            f" [p05={stats.t_decode_p05:.6g}, p95={stats.t_decode_p95:.6g}]"
            if stats.n_success
            else ""
        )
    )
    if cfg.csv_path:
        print(f"appended row to {cfg.csv_path}")


def _cmd_sweep(args):
    with open(args.config) as fh:
        spec = json.load(fh)
    base = EnsembleConfig.from_dict(spec["base"])
    rows = sweep(base, spec["grid"], spec["csv"])
    print(f"completed {len(rows)} new grid points -> {spec['csv']}")


def _cmd_bound(args):
    print(f"{gamma_bound(args.l, args.k):.6g}")


def _cmd_slh_verify(args):
    dev = slh_ctmc_max_deviation(
        k_vars_max=args.kvars,
        l_checks_max=args.lchecks,
        gamma=args.gamma,
        alpha=args.alpha,
        beta=args.beta,
    )
    print(f"max rate deviation: {dev:.3e} (tolerance {SLH_TOL:.0e})")
    return 0 if dev <= SLH_TOL else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="photonic-ldpc")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-code", help="sample a regular code and write its graph file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--l", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen_code)

    c = sub.add_parser("corrupt", help="flip bits of a word (default: the zero word)")
    c.add_argument("--graph", required=True)
    mode = c.add_mutually_exclusive_group(required=True)
    mode.add_argument("--count", type=int)
    mode.add_argument("--prob", type=float)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--input")
    c.add_argument("--out")
    c.set_defaults(func=_cmd_corrupt)

    d = sub.add_parser("decode-flip", help="run the sequential flip decoder")
    d.add_argument("--graph", required=True)
    d.add_argument("--input", required=True)
    d.add_argument("--max-flips", type=int, default=1_000_000)
    d.add_argument("--out")
    d.set_defaults(func=_cmd_decode_flip)

    s = sub.add_parser("simulate", help="run one ensemble from a JSON config")
    s.add_argument("--config", required=True)
    s.set_defaults(func=_cmd_simulate)

    w = sub.add_parser("sweep", help="run a parameter grid from a JSON config")
    w.add_argument("--config", required=True)
    w.set_defaults(func=_cmd_sweep)

    b = sub.add_parser("bound", help="attenuation bound for an (l, k) code")
    b.add_argument("--l", type=int, required=True)
    b.add_argument("--k", type=int, required=True)
    b.set_defaults(func=_cmd_bound)

    v = sub.add_parser("slh-verify", help="circuit-fragment oracle vs simulator rates")
    v.add_argument("--kvars", type=int, default=4)
    v.add_argument("--lchecks", type=int, default=3)
    v.add_argument("--gamma", type=float, default=0.01)
    v.add_argument("--alpha", type=float, default=1.0)
    v.add_argument("--beta", type=float, default=1.0)
    v.set_defaults(func=_cmd_slh_verify)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
