"""Benchmark the compiled force kernel against the numpy fallback.

Times one force evaluation of the default coil pair (surface gap 0.5 mm,
opposed currents, mu_r = 874) per discretization level and backend, checks
that the two implementations agree, and reports the speedup.

Usage::

    python3 benchmarks/bench_kernel.py [--elements 1000 2000 4000 8000]
                                       [--repeats 3] [--gap-mm 0.5] [--json]
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from empivot.coilforce import (
    CoilSpec,
    available_backends,
    discretize,
    pair_force,
)
from empivot.coilforce.sweeps import _axis_offset


def build_pair(spec: CoilSpec, elements: int, gap: float):
    c1 = discretize(spec, elements)
    c2 = (
        discretize(spec, elements)
        .with_current(-spec.current)
        .translated((_axis_offset(spec, spec, gap), 0.0, 0.0))
    )
    return c1, c2


def time_backend(c1, c2, backend: str, repeats: int) -> tuple[float, float]:
    """Best-of-N wall time (s) and the axial force it produced (N)."""
    best = float("inf")
    force = 0.0
    for _ in range(repeats):
        t0 = time.perf_counter()
        f = pair_force(c2, c1, 874.0, backend=backend)
        best = min(best, time.perf_counter() - t0)
        force = float(f[0])
    return best, force


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--elements",
        type=int,
        nargs="+",
        default=[1000, 2000, 4000, 8000],
        help="discretization levels to benchmark",
    )
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--gap-mm", type=float, default=0.5)
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    args = parser.parse_args(argv)

    backends = available_backends()
    if "compiled" not in backends:
        print(
            "warning: compiled kernel unavailable; benchmarking python only",
            file=sys.stderr,
        )

    spec = CoilSpec()
    rows = []
    for elements in args.elements:
        c1, c2 = build_pair(spec, elements, args.gap_mm * 1e-3)
        row: dict = {"elements": elements, "terms": elements * elements}
        for backend in backends:
            seconds, force = time_backend(c1, c2, backend, args.repeats)
            row[backend] = {"seconds": seconds, "force_n": force}
        if "compiled" in row and "python" in row:
            fc = row["compiled"]["force_n"]
            fp = row["python"]["force_n"]
            row["rel_diff"] = abs(fc - fp) / abs(fc)
            row["speedup"] = row["python"]["seconds"] / row["compiled"]["seconds"]
        rows.append(row)

    if args.json:
        print(json.dumps({"gap_mm": args.gap_mm, "repeats": args.repeats, "rows": rows}, indent=2))
        return 0

    print(f"# force kernel benchmark: gap {args.gap_mm} mm, best of {args.repeats}")
    header = f"{'elements':>9} {'terms':>12}"
    for backend in backends:
        header += f" {backend + ' (s)':>14}"
    if len(backends) == 2:
        header += f" {'speedup':>9} {'rel diff':>10}"
    print(header)
    for row in rows:
        line = f"{row['elements']:>9} {row['terms']:>12}"
        for backend in backends:
            line += f" {row[backend]['seconds']:>14.4f}"
        if "speedup" in row:
            line += f" {row['speedup']:>8.1f}x {row['rel_diff']:>10.2e}"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
