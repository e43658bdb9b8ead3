#!/usr/bin/env python3
"""Benchmark the multiplier variants across widths and protocols.

For each operand width this exhaustively verifies every design x protocol
pair, then prints the relative comparison table (unit-delay cycle time, area
proxy, mean transitions per cycle, and the normalized power-cycle-time
product).  A CSV per width lands next to --out.

Usage:
    python3 scripts/run_benchmarks.py [--widths 2 3 4] [--out results/bench]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from qdilab.analysis import BenchDesign, bench_to_csv, bench_to_dicts, benchmark
from qdilab.encoding import Protocol
from qdilab.multiplier import MultiplierSpec, array_multiplier, product_oracle


def designs_for(n: int) -> list[BenchDesign]:
    return [
        BenchDesign(f"mult{n}x{n}_{fa}",
                    lambda p, fa=fa: array_multiplier(MultiplierSpec(n, p, fa)),
                    product_oracle(n))
        for fa in ("dims_fa", "weak_fa")
    ]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--widths", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--out", default=None,
                    help="stem for per-width CSV/JSON files, e.g. results/bench")
    args = ap.parse_args()

    for n in args.widths:
        rows = benchmark(designs_for(n), (Protocol.RTZ, Protocol.RTO))
        print(f"\n== {n}x{n} array multipliers ({1 << (2 * n)} vectors each) ==")
        print(f"{'design':<22} {'proto':<5} {'cycle':>5} {'area':>8} "
              f"{'tr/cycle':>9} {'pctp':>6}")
        for r in rows:
            print(f"{r.design:<22} {r.protocol:<5} {r.cycle_units:>5} "
                  f"{r.area_proxy:>8.1f} {r.transitions_per_cycle:>9.2f} "
                  f"{r.pctp_norm:>6.3f}")
        if args.out:
            stem = Path(f"{args.out}_n{n}")
            stem.parent.mkdir(parents=True, exist_ok=True)
            stem.with_suffix(".csv").write_text(bench_to_csv(rows))
            stem.with_suffix(".json").write_text(
                json.dumps({"n": n, "rows": bench_to_dicts(rows)},
                           indent=2, sort_keys=True) + "\n")
            print(f"wrote {stem}.csv / {stem}.json")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
