"""plotkit command line: render one figure from result CSVs."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plotkit")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure from CSV input(s)")
    r.add_argument("--kind", required=True, choices=KINDS)
    r.add_argument("--in", dest="input", required=True, help="primary input CSV")
    r.add_argument("--in2", dest="input2", help="optional second input CSV")
    r.add_argument("--out", required=True, help="output image path (png/svg)")
    r.add_argument("--ratio", type=float, default=1.0,
                   help="probe/feedback ratio for the power-section figures")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = (args.input,) if args.input2 is None else (args.input, args.input2)
    out = render(FigureSpec(kind=args.kind, inputs=inputs, out=args.out, power_ratio=args.ratio))
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
