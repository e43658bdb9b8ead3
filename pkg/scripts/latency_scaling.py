#!/usr/bin/env python3
"""Measure how multiplier latency and size grow with operand width.

For each width and full-adder variant this samples input codewords through
complete handshake transactions under unit delays and reports the worst
forward/reverse latency, the cycle time, and the gate budget.  Exhaustive
below --exhaustive-up-to inputs, seeded sampling above.

Usage:
    python3 scripts/latency_scaling.py [--widths 2 3 4 5 6] [--samples 64]
"""

from __future__ import annotations

import argparse

from qdilab.analysis import measure_latencies
from qdilab.encoding import Protocol
from qdilab.multiplier import MultiplierSpec, array_multiplier
from qdilab.netlist import stats


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--widths", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    ap.add_argument("--protocol", choices=("rtz", "rto"), default="rtz")
    ap.add_argument("--samples", type=int, default=64,
                    help="sampled vectors per design once exhaustion is too wide")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    protocol = Protocol(args.protocol)

    print(f"{'design':<22} {'gates':>6} {'fwd':>4} {'rev':>4} {'cycle':>6}")
    for n in args.widths:
        for fa in ("dims_fa", "weak_fa"):
            netlist = array_multiplier(MultiplierSpec(n, protocol, fa))
            metrics = measure_latencies(netlist, protocol,
                                        sample_limit=args.samples, seed=args.seed)
            total = stats(netlist).total_gates
            print(f"{netlist.name:<22} {total:>6} {metrics.forward_latency:>4} "
                  f"{metrics.reverse_latency:>4} {metrics.cycle_time:>6}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
