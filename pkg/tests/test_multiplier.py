"""Array multiplier generation: structure, scaling, and arithmetic."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdilab.encoding import Protocol
from qdilab.handshake import HandshakeHarness
from qdilab.multiplier import (MultiplierSpec, array_multiplier, input_vector,
                               product_bits, product_oracle, reference_product)
from qdilab.netlist import from_json, stats, to_json, validate


FA_C2 = {"dims_fa": 12, "weak_fa": 14}
FA_MERGE = {"dims_fa": 12, "weak_fa": 9}


def test_spec_validation():
    with pytest.raises(ValueError):
        MultiplierSpec(1, Protocol.RTZ)
    with pytest.raises(ValueError):
        MultiplierSpec(4, Protocol.RTZ, "fancy_fa")
    assert MultiplierSpec(4, Protocol.RTO, "dims_fa").name == "mult4x4_dims_fa_rto"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("variant", ["dims_fa", "weak_fa"])
def test_block_and_gate_budgets(n, variant):
    netlist = array_multiplier(MultiplierSpec(n, Protocol.RTZ, variant))
    meta = netlist.metadata
    assert meta["n"] == n
    assert meta["and_blocks"] == n * n
    assert meta["fa_blocks"] == n * (n - 1)
    assert meta["const_carries"] == n
    counts = stats(netlist).counts
    assert counts["C2"] == 4 * n * n + FA_C2[variant] * n * (n - 1)
    assert counts["OR2"] == 2 * n * n + FA_MERGE[variant] * n * (n - 1)
    assert counts["AND2"] == 0 and counts["INV"] == 0
    assert validate(netlist).ok


@pytest.mark.parametrize("n", [2, 3])
def test_port_roster(n):
    netlist = array_multiplier(MultiplierSpec(n, Protocol.RTZ))
    assert [p.name for p in netlist.input_ports] \
        == [f"A{i}" for i in range(n)] + [f"B{i}" for i in range(n)]
    assert [p.name for p in netlist.output_ports] \
        == [f"P{i}" for i in range(2 * n)]
    consts = netlist.const_ports
    assert len(consts) == n
    assert all(p.const_value == 0 for p in consts)


@pytest.mark.parametrize("protocol", list(Protocol))
@pytest.mark.parametrize("variant", ["dims_fa", "weak_fa"])
def test_exhaustive_2x2(protocol, variant):
    netlist = array_multiplier(MultiplierSpec(2, protocol, variant))
    harness = HandshakeHarness(netlist, protocol)
    state = harness.initialize()
    for a, b in itertools.product(range(4), repeat=2):
        res = harness.run_transaction(state, input_vector(2, a, b))
        assert res.outputs == product_bits(2, a * b), (a, b)


def test_exhaustive_3x3_weak_rtz():
    netlist = array_multiplier(MultiplierSpec(3, Protocol.RTZ, "weak_fa"))
    harness = HandshakeHarness(netlist, Protocol.RTZ)
    state = harness.initialize()
    for a, b in itertools.product(range(8), repeat=2):
        res = harness.run_transaction(state, input_vector(3, a, b))
        assert res.outputs == product_bits(3, a * b), (a, b)


def test_reference_product_and_helpers():
    assert reference_product(4, 13, 11) == 143
    with pytest.raises(ValueError):
        reference_product(2, 4, 0)
    with pytest.raises(ValueError):
        reference_product(2, 0, -1)
    vec = input_vector(2, 2, 3)
    assert vec == {"A0": 0, "A1": 1, "B0": 1, "B1": 1}
    assert product_bits(2, 6) == {"P0": 0, "P1": 1, "P2": 1, "P3": 0}
    oracle = product_oracle(2)
    assert oracle(vec) == product_bits(2, 6)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.data())
def test_oracle_matches_integer_multiplication(n, data):
    a = data.draw(st.integers(0, 2 ** n - 1))
    b = data.draw(st.integers(0, 2 ** n - 1))
    oracle = product_oracle(n)
    out = oracle(input_vector(n, a, b))
    assert sum(out[f"P{i}"] << i for i in range(2 * n)) == a * b


def test_multiplier_json_round_trip():
    netlist = array_multiplier(MultiplierSpec(3, Protocol.RTO, "dims_fa"))
    restored = from_json(to_json(netlist))
    assert restored == netlist
    assert restored.metadata["n"] == 3
    assert restored.metadata["fa_variant"] == "dims_fa"
