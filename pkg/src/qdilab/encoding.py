"""Dual-rail codeword encoding under the two 4-phase handshake disciplines.

RTZ (return-to-zero) idles with both rails low and signals a bit by raising
one rail; RTO (return-to-one) idles with both rails high and signals by
lowering one rail.  The RTO valuations are exactly the bitwise complement of
the RTZ ones.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Sequence


class Protocol(str, Enum):
    RTZ = "rtz"
    RTO = "rto"

    @property
    def spacer_level(self) -> int:
        """Rail level of the all-spacer reset state."""
        return 0 if self is Protocol.RTZ else 1

    @property
    def active_level(self) -> int:
        return self.spacer_level ^ 1


class PairState(Enum):
    SPACER = "spacer"
    DATA0 = "data0"
    DATA1 = "data1"
    ILLEGAL = "illegal"

    @property
    def is_data(self) -> bool:
        return self in (PairState.DATA0, PairState.DATA1)

    @property
    def bit(self) -> int:
        if not self.is_data:
            raise ValueError(f"{self.value} carries no bit")
        return 1 if self is PairState.DATA1 else 0


class BusState(Enum):
    SPACER = "spacer"
    DATA = "data"
    INCOMPLETE = "incomplete"
    ILLEGAL = "illegal"


def encode(protocol: Protocol, bit: int) -> tuple[int, int]:
    """Rail values (rail1, rail0) for a logical bit."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    if protocol is Protocol.RTZ:
        return (bit, bit ^ 1)
    return (bit ^ 1, bit)


def spacer_rails(protocol: Protocol) -> tuple[int, int]:
    s = protocol.spacer_level
    return (s, s)


def decode(protocol: Protocol, rail1: int, rail0: int) -> PairState:
    s = protocol.spacer_level
    if (rail1, rail0) == (s, s):
        return PairState.SPACER
    if (rail1, rail0) == encode(protocol, 1):
        return PairState.DATA1
    if (rail1, rail0) == encode(protocol, 0):
        return PairState.DATA0
    return PairState.ILLEGAL


def decode_bus(protocol: Protocol, pairs: Iterable[tuple[int, int]]) -> BusState:
    """Aggregate state of a multi-pair port."""
    states = [decode(protocol, r1, r0) for r1, r0 in pairs]
    if any(s is PairState.ILLEGAL for s in states):
        return BusState.ILLEGAL
    if all(s is PairState.SPACER for s in states):
        return BusState.SPACER
    if all(s.is_data for s in states):
        return BusState.DATA
    return BusState.INCOMPLETE


def bus_value(protocol: Protocol, pairs: Sequence[tuple[int, int]]) -> int:
    """Little-endian integer carried by a fully-data bus."""
    if decode_bus(protocol, pairs) is not BusState.DATA:
        raise ValueError("bus is not holding complete data")
    value = 0
    for i, (r1, r0) in enumerate(pairs):
        value |= decode(protocol, r1, r0).bit << i
    return value
