"""Event-driven gate-level simulator.

Integer timestamps, minimum gate delay of one unit, zero wire delay (forks
are treated as isochronic).  Delays are resolved once per gate when a state
is initialized, so a seeded random assignment stays fixed for the whole run.
Scheduling is inertial: a gate output carries at most one pending event, and
an input change that disagrees with a pending event cancels it and records a
hazard (a disabled excitation), which is how indication violations become
observable.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .encoding import Protocol
from .netlist import GateKind, Netlist

_AND, _OR, _INV, _C2 = 0, 1, 2, 3
_KIND_CODE = {GateKind.AND2: _AND, GateKind.OR2: _OR, GateKind.INV: _INV, GateKind.C2: _C2}


class SimulationError(Exception):
    """Base error for simulation failures."""


class InitializationError(SimulationError):
    """Reset state is inconsistent or fails to relax to a quiescent fixpoint."""


class NonQuiescenceError(SimulationError):
    """Event processing exceeded the step limit without going quiet."""


class StimulusError(SimulationError):
    """An assignment targeted a net the environment does not drive."""


# --------------------------------------------------------------------------
# delay models

@dataclass(frozen=True)
class UnitDelay:
    def resolve(self, netlist: Netlist) -> list[int]:
        return [1] * len(netlist.gates)


@dataclass(frozen=True)
class PerKindDelay:
    table: Mapping[str, int]
    default: int = 1

    def resolve(self, netlist: Netlist) -> list[int]:
        delays = [int(self.table.get(g.kind.value, self.default)) for g in netlist.gates]
        _check_delays(delays)
        return delays


@dataclass(frozen=True)
class PerGateDelay:
    table: Mapping[int, int]
    default: int = 1

    def resolve(self, netlist: Netlist) -> list[int]:
        delays = [int(self.table.get(g.id, self.default)) for g in netlist.gates]
        _check_delays(delays)
        return delays


@dataclass(frozen=True)
class RandomUniformDelay:
    """Independent per-gate draws from [low, high], fixed by the seed."""

    low: int
    high: int
    seed: int = 0

    def resolve(self, netlist: Netlist) -> list[int]:
        if self.low < 1 or self.high < self.low:
            raise ValueError(f"bad delay range [{self.low}, {self.high}]")
        rng = random.Random(self.seed)
        return [rng.randint(self.low, self.high) for _ in netlist.gates]


def _check_delays(delays: Sequence[int]) -> None:
    for d in delays:
        if d < 1:
            raise ValueError(f"gate delays must be >= 1, got {d}")


DelayModel = UnitDelay | PerKindDelay | PerGateDelay | RandomUniformDelay


# --------------------------------------------------------------------------
# records

@dataclass(frozen=True)
class HazardRecord:
    time: int
    gate: int
    net: int
    cancelled: int  # value of the disabled pending event
    target: int  # excitation that replaced it

    @property
    def description(self) -> str:
        return (f"t={self.time}: pending {self.net}->{self.cancelled} on gate "
                f"{self.gate} disabled (new target {self.target})")


@dataclass
class SettleReport:
    elapsed: int
    transitions: int
    hazards: list[HazardRecord]
    steps: int


# --------------------------------------------------------------------------
# state

def _tables(netlist: Netlist):
    # cached on the netlist instance; the netlist is immutable after build
    cached = netlist.__dict__.get("_sim_tables")
    if cached is not None:
        return cached
    kind = [_KIND_CODE[g.kind] for g in netlist.gates]
    ins = [g.inputs for g in netlist.gates]
    out = [g.output for g in netlist.gates]
    consumers: list[list[int]] = [[] for _ in range(netlist.net_count)]
    for i, g in enumerate(netlist.gates):
        for net in g.inputs:
            consumers[net].append(i)
    env = [False] * netlist.net_count
    for p in netlist.ports:
        if p.direction == "input":
            env[p.rail1] = True
            env[p.rail0] = True
    tables = (kind, ins, out, [tuple(c) for c in consumers], env)
    netlist.__dict__["_sim_tables"] = tables
    return tables


class SimState:
    """Mutable simulation state over one immutable netlist."""

    __slots__ = ("netlist", "protocol", "values", "now", "transitions",
                 "net_transitions", "hazards", "watch", "trace",
                 "_kind", "_ins", "_out", "_consumers", "_env", "_delays",
                 "_heap", "_pending", "default_limit")

    def __init__(self, netlist: Netlist, protocol: Protocol, delays: list[int]):
        self.netlist = netlist
        self.protocol = protocol
        kind, ins, out, consumers, env = _tables(netlist)
        self._kind = kind
        self._ins = ins
        self._out = out
        self._consumers = consumers
        self._env = env
        self._delays = delays
        self.values = [0] * netlist.net_count
        self.now = 0
        self.transitions = 0
        self.net_transitions = [0] * netlist.net_count
        self.hazards: list[HazardRecord] = []
        self.watch: Callable[[int, int, int], None] | None = None
        self.trace: Callable[[int, int, int], None] | None = None
        self._heap: list[tuple[int, int, int]] = []
        self._pending: dict[int, tuple[int, int]] = {}
        self.default_limit = 10_000 + 200 * max(1, len(netlist.gates))

    # -- initialization -----------------------------------------------------

    def _relax(self) -> None:
        """Seed the reset state and relax combinational gates to a fixpoint."""
        values = self.values
        spacer = self.protocol.spacer_level
        for net in range(self.netlist.net_count):
            values[net] = spacer if self._env[net] else self.netlist.net_init[net]
        for g in self.netlist.gates:
            values[g.output] = g.init

        comb = [i for i, k in enumerate(self._kind) if k != _C2]
        limit = 4 * max(1, len(self.netlist.gates))
        for _ in range(limit):
            changed = False
            for i in comb:
                ins = self._ins[i]
                k = self._kind[i]
                if k == _AND:
                    v = values[ins[0]] & values[ins[1]]
                elif k == _OR:
                    v = values[ins[0]] | values[ins[1]]
                else:
                    v = values[ins[0]] ^ 1
                if values[self._out[i]] != v:
                    values[self._out[i]] = v
                    changed = True
            if not changed:
                break
        else:
            raise InitializationError(
                f"reset relaxation did not converge within {limit} sweeps")

        for i in comb:
            g = self.netlist.gates[i]
            if values[g.output] != g.init:
                raise InitializationError(
                    f"init inconsistency: gate {g.id} ({g.kind.value}) stores init "
                    f"{g.init} but relaxes to {values[g.output]}")
        for i, k in enumerate(self._kind):
            if k == _C2:
                a, b = self._ins[i]
                if values[a] == values[b] != values[self._out[i]]:
                    raise InitializationError(
                        f"init inconsistency: C2 gate {i} excited at reset")

    # -- event machinery ----------------------------------------------------

    def _excite(self, g: int) -> None:
        values = self.values
        ins = self._ins[g]
        k = self._kind[g]
        out = self._out[g]
        cur = values[out]
        if k == _AND:
            tgt = values[ins[0]] & values[ins[1]]
        elif k == _OR:
            tgt = values[ins[0]] | values[ins[1]]
        elif k == _C2:
            a = values[ins[0]]
            tgt = a if a == values[ins[1]] else cur
        else:
            tgt = values[ins[0]] ^ 1
        pending = self._pending.get(out)
        if pending is not None:
            if pending[1] == tgt:
                return
            self.hazards.append(HazardRecord(self.now, g, out, pending[1], tgt))
            del self._pending[out]
            if tgt == cur:
                return
        elif tgt == cur:
            return
        t = self.now + self._delays[g]
        self._pending[out] = (t, tgt)
        heapq.heappush(self._heap, (t, out, tgt))

    def _commit_env(self, net: int, value: int) -> None:
        self.values[net] = value
        self.transitions += 1
        self.net_transitions[net] += 1
        if self.watch is not None:
            self.watch(self.now, net, value)
        if self.trace is not None:
            self.trace(self.now, net, value)
        for g in self._consumers[net]:
            self._excite(g)

    def _settle(self, limit: int) -> int:
        heap = self._heap
        pending = self._pending
        values = self.values
        steps = 0
        while heap:
            t, net, val = heapq.heappop(heap)
            p = pending.get(net)
            if p is None or p[0] != t or p[1] != val:
                continue  # superseded entry
            steps += 1
            if steps > limit:
                raise NonQuiescenceError(f"no quiescence within {limit} events")
            del pending[net]
            self.now = t
            values[net] = val
            self.transitions += 1
            self.net_transitions[net] += 1
            if self.watch is not None:
                self.watch(t, net, val)
            if self.trace is not None:
                self.trace(t, net, val)
            for g in self._consumers[net]:
                self._excite(g)
        return steps

    # -- public surface -----------------------------------------------------

    def apply_and_settle(self, assignments: Mapping[int, int],
                         limit: int | None = None) -> SettleReport:
        """Drive environment nets at the current time, then run events until
        the circuit is quiet.  Ties at one timestamp resolve by ascending
        net id; assignments are applied in ascending net order as well."""
        t0 = self.now
        tr0 = self.transitions
        h0 = len(self.hazards)
        for net, value in sorted(assignments.items()):
            if not 0 <= net < len(self.values) or not self._env[net]:
                raise StimulusError(f"net {net} is not environment-driven")
            if value not in (0, 1):
                raise StimulusError(f"net {net} assigned non-bit {value!r}")
            if self.values[net] != value:
                self._commit_env(net, value)
        steps = self._settle(self.default_limit if limit is None else limit)
        return SettleReport(elapsed=self.now - t0, transitions=self.transitions - tr0,
                            hazards=list(self.hazards[h0:]), steps=steps)

    def is_quiescent(self) -> bool:
        """True when no event is pending and no gate is excited."""
        if self._pending:
            return False
        values = self.values
        for i, k in enumerate(self._kind):
            ins = self._ins[i]
            cur = values[self._out[i]]
            if k == _AND:
                tgt = values[ins[0]] & values[ins[1]]
            elif k == _OR:
                tgt = values[ins[0]] | values[ins[1]]
            elif k == _C2:
                a = values[ins[0]]
                tgt = a if a == values[ins[1]] else cur
            else:
                tgt = values[ins[0]] ^ 1
            if tgt != cur:
                return False
        return True


def initialize(netlist: Netlist, protocol: Protocol,
               delay_model: DelayModel = UnitDelay()) -> SimState:
    """Build a quiescent reset-state simulation: environment rails at the
    spacer level, C2 outputs at their stored inits, combinational gates
    relaxed to a fixpoint (zero elapsed time)."""
    state = SimState(netlist, protocol, delay_model.resolve(netlist))
    state._relax()
    return state


def transitions_count(state: SimState) -> int:
    return state.transitions
