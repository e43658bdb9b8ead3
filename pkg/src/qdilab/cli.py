"""Command-line front end.

Subcommands: build | verify | bench | classify | fuzz | export.  Options can
also come from a flat key=value config file (--config); explicit flags win.
Reports are deterministic: the same config and seed always produce the same
bytes, so every JSON report embeds the effective configuration and nothing
time- or host-dependent.

Exit codes: 0 success, 1 verification/property failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .analysis import (BenchDesign, Indication, bench_to_csv, bench_to_dicts,
                       benchmark, classify_indication, exhaustive_verify,
                       orphan_scan)
from .components import COMPONENT_ORACLES, COMPONENTS
from .encoding import Protocol
from .multiplier import MultiplierSpec, array_multiplier, product_oracle
from .netlist import Netlist, NetlistError, from_json, stats, to_dot, to_json
from .sim import (PerGateDelay, PerKindDelay, RandomUniformDelay, UnitDelay)

DELAY_CHOICES = ("unit", "perkind", "pergate", "random")


@dataclass(frozen=True)
class CliConfig:
    protocol: str = "rtz"
    n: int = 4
    fa: str = "weak_fa"
    delay: str = "unit"
    seed: int = 42
    trials: int = 1000
    transactions: int = 8
    delay_low: int = 1
    delay_high: int = 16
    delay_table: str | None = None
    weights: str | None = None
    component: str | None = None
    netlist: str | None = None
    out: str | None = None
    dot: str | None = None
    trace: str | None = None

    def echo(self) -> dict:
        return asdict(self)


_INT_KEYS = {"n", "seed", "trials", "transactions", "delay_low", "delay_high"}


def load_config_file(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment."""
    values: dict = {}
    known = {f.name for f in fields(CliConfig)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = int(value) if key in _INT_KEYS else value
    return values


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("--config", metavar="FILE", help="key=value config file")
    g.add_argument("--n", type=int, help="multiplier operand width (default 4)")
    g.add_argument("--protocol", choices=("rtz", "rto"))
    g.add_argument("--fa", choices=("dims_fa", "weak_fa"), help="full-adder variant")
    g.add_argument("--delay", choices=DELAY_CHOICES)
    g.add_argument("--seed", type=int)
    g.add_argument("--trials", type=int, help="fuzz trial count (default 1000)")
    g.add_argument("--transactions", type=int, help="transactions per fuzz trial")
    g.add_argument("--delay-low", type=int, dest="delay_low")
    g.add_argument("--delay-high", type=int, dest="delay_high")
    g.add_argument("--delay-table", dest="delay_table", metavar="FILE",
                   help="JSON delay table for perkind/pergate models")
    g.add_argument("--weights", metavar="FILE", help="JSON gate-kind area weights")
    g.add_argument("--component", choices=sorted(COMPONENTS),
                   help="classify/verify a library block instead of a multiplier")
    g.add_argument("--netlist", metavar="FILE", help="operate on a saved netlist")
    g.add_argument("--out", metavar="FILE", help="write the report/artifact here")
    g.add_argument("--dot", metavar="FILE", help="write a Graphviz rendering")
    g.add_argument("--trace", metavar="FILE", help="write a time,net,value CSV trace")

    parser = argparse.ArgumentParser(
        prog="qdilab",
        description="build, simulate, and verify dual-rail indicating circuits")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="generate a multiplier netlist")
    sub.add_parser("verify", parents=[common], help="exhaustive functional check")
    sub.add_parser("bench", parents=[common], help="relative cycle/area/PCTP table")
    sub.add_parser("classify", parents=[common], help="strong/weak/neither indication")
    sub.add_parser("fuzz", parents=[common], help="randomized orphan scan")
    sub.add_parser("export", parents=[common], help="re-emit a netlist as JSON/DOT")
    return parser


def merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> CliConfig:
    config = CliConfig()
    if args.config:
        try:
            config = replace(config, **load_config_file(args.config))
        except (OSError, ValueError, TypeError) as e:
            parser.error(str(e))
    overrides = {f.name: getattr(args, f.name) for f in fields(CliConfig)
                 if getattr(args, f.name, None) is not None}
    config = replace(config, **overrides)
    if config.n < 2:
        parser.error(f"--n must be >= 2, got {config.n}")
    if config.protocol not in ("rtz", "rto"):
        parser.error(f"unknown protocol {config.protocol!r}")
    if config.delay not in DELAY_CHOICES:
        parser.error(f"unknown delay model {config.delay!r}")
    if config.trials < 1:
        parser.error("--trials must be >= 1")
    return config


def delay_model(config: CliConfig):
    if config.delay == "unit":
        return UnitDelay()
    if config.delay == "random":
        return RandomUniformDelay(config.delay_low, config.delay_high, config.seed)
    if config.delay_table is None:
        raise ValueError(f"delay model {config.delay!r} needs --delay-table")
    table = json.loads(Path(config.delay_table).read_text())
    default = int(table.pop("*", 1))
    if config.delay == "perkind":
        return PerKindDelay({str(k): int(v) for k, v in table.items()}, default)
    return PerGateDelay({int(k): int(v) for k, v in table.items()}, default)


def load_weights(config: CliConfig) -> dict[str, float] | None:
    if not config.weights:
        return None
    return {str(k): float(v) for k, v in
            json.loads(Path(config.weights).read_text()).items()}


def target_netlist(config: CliConfig) -> Netlist:
    """The circuit a command operates on: a saved file, a library block, or a
    freshly generated multiplier."""
    if config.netlist:
        return from_json(Path(config.netlist).read_text())
    protocol = Protocol(config.protocol)
    if config.component:
        return COMPONENTS[config.component](protocol)
    return array_multiplier(MultiplierSpec(config.n, protocol, config.fa))


def _oracle_for(netlist: Netlist):
    n = netlist.metadata.get("n")
    if n is not None:
        return product_oracle(int(n))
    oracle = COMPONENT_ORACLES.get(netlist.metadata.get("component", ""))
    if oracle is None:
        raise ValueError(
            f"no reference oracle for netlist {netlist.name!r}; "
            "verify/fuzz need one to judge outputs")
    return oracle


def write_report(config: CliConfig, payload: dict) -> None:
    payload = {"config": config.echo(), **payload}
    if config.out:
        Path(config.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


class _Tracer:
    """Tees committed events into a time,net,value CSV."""

    def __init__(self, path: str):
        self._fh = open(path, "w")
        self._fh.write("time,net,value\n")

    def mark(self, label: str) -> None:
        self._fh.write(f"# {label}\n")

    def __call__(self, t: int, net: int, value: int) -> None:
        self._fh.write(f"{t},{net},{value}\n")

    def close(self) -> None:
        self._fh.close()


# ---------------------------------------------------------------------------
# commands

def cmd_build(config: CliConfig) -> int:
    netlist = target_netlist(config)
    st = stats(netlist, load_weights(config))
    meta = netlist.metadata
    print(f"built {netlist.name}: {st.total_gates} gates {st.counts}")
    if "and_blocks" in meta:
        print(f"  blocks: {meta['and_blocks']} AND, {meta['fa_blocks']} FA, "
              f"{meta['const_carries']} constant carries")
    if config.out:
        Path(config.out).write_text(to_json(netlist))
        print(f"  wrote {config.out}")
    if config.dot:
        Path(config.dot).write_text(to_dot(netlist))
        print(f"  wrote {config.dot}")
    return 0


def cmd_export(config: CliConfig) -> int:
    netlist = target_netlist(config)
    wrote = False
    if config.out:
        Path(config.out).write_text(to_json(netlist))
        print(f"wrote {config.out}")
        wrote = True
    if config.dot:
        Path(config.dot).write_text(to_dot(netlist))
        print(f"wrote {config.dot}")
        wrote = True
    if not wrote:
        sys.stdout.write(to_json(netlist))
    return 0


def cmd_verify(config: CliConfig) -> int:
    netlist = target_netlist(config)
    protocol = Protocol(config.protocol)
    oracle = _oracle_for(netlist)
    tracer = _Tracer(config.trace) if config.trace else None
    try:
        report = exhaustive_verify(
            netlist, protocol, oracle, delay_model(config),
            trace=tracer,
            on_vector=(lambda v: tracer.mark(f"vector {sorted(v.items())}"))
            if tracer else None)
    finally:
        if tracer:
            tracer.close()
    print(f"verify {report.design} [{report.protocol}]: "
          f"{report.passed}/{report.total} vectors passed")
    for f in report.failures[:10]:
        got = f.error if f.got is None else f.got
        print(f"  FAIL {f.vector}: expected {f.expected}, got {got}")
    payload = {
        "design": report.design, "protocol": report.protocol,
        "total": report.total, "passed": report.passed,
        "failures": [{"vector": f.vector, "expected": f.expected,
                      "got": f.got, "error": f.error} for f in report.failures],
    }
    if report.metrics:
        payload["max_forward_latency"] = max(m.forward_latency for m in report.metrics)
        payload["max_reverse_latency"] = max(m.reverse_latency for m in report.metrics)
        payload["max_cycle_time"] = (payload["max_forward_latency"]
                                     + payload["max_reverse_latency"])
    write_report(config, payload)
    return 0 if report.ok else 1


def _bench_designs(config: CliConfig) -> list[BenchDesign]:
    n = config.n
    designs = []
    for fa in ("dims_fa", "weak_fa"):
        designs.append(BenchDesign(
            name=f"mult{n}x{n}_{fa}",
            builder=lambda p, fa=fa: array_multiplier(MultiplierSpec(n, p, fa)),
            oracle=product_oracle(n)))
    return designs


def cmd_bench(config: CliConfig) -> int:
    rows = benchmark(_bench_designs(config), (Protocol.RTZ, Protocol.RTO),
                     delay_model(config), load_weights(config))
    header = f"{'design':<22} {'proto':<5} {'cycle':>5} {'area':>8} {'tr/cycle':>9} {'pctp':>6}"
    print(header)
    for r in rows:
        print(f"{r.design:<22} {r.protocol:<5} {r.cycle_units:>5} {r.area_proxy:>8.1f} "
              f"{r.transitions_per_cycle:>9.2f} {r.pctp_norm:>6.3f}")
    if config.out:
        out = Path(config.out)
        csv_path = out if out.suffix == ".csv" else out.with_suffix(".csv")
        json_path = csv_path.with_suffix(".json")
        csv_path.write_text(bench_to_csv(rows))
        json_path.write_text(json.dumps(
            {"config": config.echo(), "rows": bench_to_dicts(rows)},
            indent=2, sort_keys=True) + "\n")
        print(f"wrote {csv_path} and {json_path}")
    expected = 2 * len(_bench_designs(config))
    return 0 if len(rows) == expected else 1


def cmd_classify(config: CliConfig) -> int:
    netlist = target_netlist(config)
    protocol = Protocol(config.protocol)
    verdict = classify_indication(netlist, protocol, delay_model(config))
    print(f"classify {netlist.name} [{protocol.value}]: {verdict.verdict.value} "
          f"({verdict.mode} mode, {verdict.scenarios} scenarios)")
    witness = None
    if verdict.witness:
        w = verdict.witness
        witness = {"codeword": w.codeword, "order": list(w.order),
                   "phase": w.phase, "kind": w.kind, "detail": w.detail}
        print(f"  witness [{w.kind}] {w.phase} phase, codeword {w.codeword}, "
              f"order {'>'.join(w.order)}: {w.detail}")
    write_report(config, {
        "design": netlist.name, "protocol": protocol.value,
        "verdict": verdict.verdict.value, "mode": verdict.mode,
        "scenarios": verdict.scenarios, "witness": witness,
    })
    return 0 if verdict.verdict is not Indication.NEITHER else 1


def cmd_fuzz(config: CliConfig) -> int:
    netlist = target_netlist(config)
    protocol = Protocol(config.protocol)
    oracle = _oracle_for(netlist)
    report = orphan_scan(netlist, protocol, oracle,
                         trials=config.trials, seed=config.seed,
                         transactions=config.transactions,
                         delay_low=config.delay_low, delay_high=config.delay_high)
    print(f"fuzz {report.design} [{report.protocol}]: {report.trials} trials x "
          f"{report.transactions} transactions, delays [{report.delay_low},"
          f"{report.delay_high}], seed {report.seed}: "
          f"{'clean' if report.ok else f'{len(report.violations)} violations'}")
    for v in report.violations[:10]:
        print(f"  VIOLATION trial {v.trial} tx {v.transaction} [{v.kind}]: {v.detail}")
    write_report(config, {
        "design": report.design, "protocol": report.protocol,
        "trials": report.trials, "transactions": report.transactions,
        "seed": report.seed, "delay_low": report.delay_low,
        "delay_high": report.delay_high, "ok": report.ok,
        "violations": [{"trial": v.trial, "transaction": v.transaction,
                        "vector": v.vector, "kind": v.kind, "detail": v.detail}
                       for v in report.violations],
    })
    return 0 if report.ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    config = merge_config(args, parser)
    commands = {"build": cmd_build, "verify": cmd_verify, "bench": cmd_bench,
                "classify": cmd_classify, "fuzz": cmd_fuzz, "export": cmd_export}
    try:
        return commands[args.command](config)
    except (NetlistError, ValueError, OSError) as e:
        parser.error(str(e))
        return 2  # unreachable; parser.error exits


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
