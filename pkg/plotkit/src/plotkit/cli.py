"""Console entry point: build a PlotSpec from a spec file or flags, render it.

Spec files are flat ``key = value`` text (``#`` comments and blank lines
allowed) with keys ``input``, ``kind``, ``out`` and optional ``overlay``
(true | false). Flags override spec file values.
"""

from __future__ import annotations

import argparse
import sys

from .plots import KINDS, PlotSpec, render

_BOOL = {"true": True, "false": False}


def parse_spec_file(text: str) -> dict:
    out: dict = {}
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = (part.strip() for part in line.partition("="))
        if not eq or not key or not value:
            raise ValueError(f"line {i}: expected key = value")
        if key in out:
            raise ValueError(f"line {i}: duplicate key {key!r}")
        if key == "overlay":
            if value.lower() not in _BOOL:
                raise ValueError(f"line {i}: overlay must be true or false")
            out[key] = _BOOL[value.lower()]
        elif key in ("input", "kind", "out"):
            out[key] = value
        else:
            raise ValueError(f"line {i}: unknown key {key!r}")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="render a shadowlab sweep CSV into a figure and print the slope report",
    )
    parser.add_argument("spec", nargs="?", help="spec file path (key = value lines)")
    parser.add_argument("--input", help="sweep CSV path")
    parser.add_argument("--kind", choices=KINDS)
    parser.add_argument("--out", help="output image path (.png or .svg)")
    parser.add_argument("--overlay", action="store_true", help="overlay predicted_variance where present")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        merged = {}
        if args.spec is not None:
            merged = parse_spec_file(open(args.spec).read())
        if args.input is not None:
            merged["input"] = args.input
        if args.kind is not None:
            merged["kind"] = args.kind
        if args.out is not None:
            merged["out"] = args.out
        if args.overlay:
            merged["overlay"] = True
        for key in ("input", "kind", "out"):
            if key not in merged:
                raise ValueError(f"missing required option {key!r} (flag or spec file)")
        spec = PlotSpec(merged["input"], merged["kind"], merged["out"], merged.get("overlay", False))
        report = render(spec)
    except (OSError, ValueError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 2
    print(report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
