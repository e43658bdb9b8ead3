"""Netlist construction, validation, serialization, and structural tools."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdilab.netlist import (FormatError, GateKind, NetlistBuilder,
                            NetlistError, ValidationError, dual_of,
                            eval_combinational, from_json, stats,
                            structurally_equal, to_dot, to_json, validate)


def small_builder():
    b = NetlistBuilder("unit")
    x = b.add_input_port("X")
    y = b.add_input_port("Y")
    return b, x, y


# ---------------------------------------------------------------------------
# gate evaluation and builder basics

def test_eval_combinational_tables():
    assert [eval_combinational(GateKind.AND2, (a, c)) for a in (0, 1) for c in (0, 1)] \
        == [0, 0, 0, 1]
    assert [eval_combinational(GateKind.OR2, (a, c)) for a in (0, 1) for c in (0, 1)] \
        == [0, 1, 1, 1]
    assert [eval_combinational(GateKind.INV, (a,)) for a in (0, 1)] == [1, 0]


def test_builder_assigns_ids_and_derives_inits():
    b, x, y = small_builder()
    n_and = b.add_gate(GateKind.AND2, (x.rail1, y.rail1))
    n_inv = b.add_gate(GateKind.INV, (n_and,))
    b.add_output_port("Z", n_inv, n_and)
    netlist = b.build()
    assert [g.id for g in netlist.gates] == [0, 1]
    # ports reset to 0, so AND resets to 0 and the INV above it to 1
    assert netlist.gates[0].init == 0
    assert netlist.gates[1].init == 1
    assert netlist.net_init == (0, 0, 0, 0, 0, 1)


def test_c2_requires_matching_or_explicit_init():
    b, x, y = small_builder()
    with pytest.raises(NetlistError):
        b.add_gate(GateKind.C2, (b.new_net(init=0), b.new_net(init=1)))
    out = b.add_gate(GateKind.C2, (b.new_net(init=1), b.new_net(init=1)))
    assert b._net_init[out] == 1
    forced = b.add_gate(GateKind.C2, (b.new_net(init=0), b.new_net(init=1)), init=1)
    assert b._net_init[forced] == 1


def test_add_gate_rejects_wrong_arity():
    b, x, y = small_builder()
    with pytest.raises(NetlistError):
        b.add_gate(GateKind.INV, (x.rail1, y.rail1))
    with pytest.raises(NetlistError):
        b.add_gate(GateKind.AND2, (x.rail1,))


# ---------------------------------------------------------------------------
# validation findings

def codes(netlist):
    return sorted(f.code for f in validate(netlist).findings)


def test_multi_driver_detected():
    b, x, y = small_builder()
    out = b.add_gate(GateKind.AND2, (x.rail1, y.rail1))
    b.wire_gate(GateKind.OR2, (x.rail0, y.rail0), out, init=0)
    b.add_output_port("Z", out, x.rail0)
    assert "multi-driver" in codes(b.build_unchecked())
    with pytest.raises(ValidationError):
        b.build()


def test_undriven_net_detected():
    b, x, y = small_builder()
    dangling = b.new_net()
    out = b.add_gate(GateKind.AND2, (x.rail1, dangling))
    b.add_output_port("Z", out, x.rail0)
    assert "undriven" in codes(b.build_unchecked())


def test_combinational_cycle_detected():
    b, x, y = small_builder()
    loop = b.new_net()
    a = b.add_gate(GateKind.OR2, (x.rail1, loop))
    b.wire_gate(GateKind.OR2, (a, y.rail1), loop, init=0)
    b.add_output_port("Z", a, loop)
    assert "comb-cycle" in codes(b.build_unchecked())


def test_c2_feedback_loop_is_legal():
    """State-holding feedback through a C2 must not count as a cycle."""
    b, x, y = small_builder()
    loop = b.new_net()
    mixed = b.add_gate(GateKind.OR2, (x.rail1, loop))
    b.wire_gate(GateKind.C2, (mixed, y.rail1), loop, init=0)
    b.add_output_port("Z", loop, mixed)
    assert codes(b.build_unchecked()) == []


def test_init_inconsistency_detected():
    b, x, y = small_builder()
    out = b.new_net(init=1)  # claims to reset high...
    b.wire_gate(GateKind.AND2, (x.rail1, y.rail1), out, init=1)  # ...inputs say 0
    b.add_output_port("Z", out, x.rail0)
    assert "init-inconsistent" in codes(b.build_unchecked())


# ---------------------------------------------------------------------------
# reduce_tree

def test_reduce_tree_power_of_two():
    b = NetlistBuilder("tree")
    leaves = [b.add_input_port(f"I{i}").rail1 for i in range(8)]
    before = len(b._gates)
    b.reduce_tree(GateKind.OR2, leaves)
    gates = b._gates[before:]
    assert len(gates) == 7
    # depth: longest chain from a leaf through gate outputs is exactly 3
    depth = {}
    for g in gates:
        depth[g.output] = 1 + max(depth.get(i, 0) for i in g.inputs)
    assert max(depth.values()) == 3


def test_reduce_tree_odd_leftover_joins_last():
    b = NetlistBuilder("tree3")
    i = [b.add_input_port(f"I{k}").rail1 for k in range(3)]
    root = b.reduce_tree(GateKind.C2, i)
    g_by_out = {g.output: g for g in b._gates}
    top = g_by_out[root]
    assert top.kind is GateKind.C2
    first = g_by_out[top.inputs[0]]
    assert tuple(first.inputs) == (i[0], i[1]) and top.inputs[1] == i[2]


def test_reduce_tree_single_and_empty():
    b = NetlistBuilder("t")
    n = b.add_input_port("I").rail1
    assert b.reduce_tree(GateKind.OR2, [n]) == n
    assert len(b._gates) == 0
    with pytest.raises(NetlistError):
        b.reduce_tree(GateKind.OR2, [])


@given(st.integers(1, 40))
def test_reduce_tree_gate_count_property(k):
    b = NetlistBuilder("t")
    leaves = [b.new_net() for _ in range(k)]
    b.reduce_tree(GateKind.OR2, leaves)
    assert len(b._gates) == k - 1


# ---------------------------------------------------------------------------
# serialization

def build_sample():
    b = NetlistBuilder("sample", {"purpose": "round-trip"})
    x = b.add_input_port("X", init=1)
    c = b.add_const_port("K", value=0, init=1)
    z1 = b.add_gate(GateKind.C2, (x.rail1, c.rail1))
    z0 = b.add_gate(GateKind.OR2, (x.rail0, c.rail0), init=1)
    inv = b.add_gate(GateKind.INV, (z0,))
    b.add_output_port("Z", z1, z0)
    b.add_output_port("NZ", inv, z1)
    return b.build()


def test_json_round_trip_preserves_everything():
    original = build_sample()
    restored = from_json(to_json(original))
    assert restored.name == original.name
    assert restored.metadata == original.metadata
    assert restored.net_count == original.net_count
    assert restored.net_init == original.net_init
    assert restored.gates == original.gates
    assert restored.ports == original.ports
    assert to_json(restored) == to_json(original)


def test_json_is_deterministic_and_sorted():
    a, b = to_json(build_sample()), to_json(build_sample())
    assert a == b
    doc = json.loads(a)
    assert set(doc) >= {"name", "net_count", "gates", "ports"}


def test_from_json_rejects_malformed():
    with pytest.raises(FormatError):
        from_json("{not json")
    with pytest.raises(FormatError):
        from_json(json.dumps([1, 2, 3]))
    doc = json.loads(to_json(build_sample()))
    doc["gates"][0]["kind"] = "XOR9"
    with pytest.raises(FormatError):
        from_json(json.dumps(doc))
    doc = json.loads(to_json(build_sample()))
    doc["gates"][0]["inputs"] = [99]
    with pytest.raises(FormatError):
        from_json(json.dumps(doc))


def test_from_json_validates_semantics():
    doc = json.loads(to_json(build_sample()))
    doc["gates"][1]["output"] = doc["gates"][0]["output"]  # double-drive
    with pytest.raises(ValidationError):
        from_json(json.dumps(doc))


@st.composite
def random_netlists(draw):
    b = NetlistBuilder("rand")
    pool = []
    for i in range(draw(st.integers(1, 3))):
        p = b.add_input_port(f"I{i}", init=draw(st.integers(0, 1)))
        pool += [p.rail1, p.rail0]
    for _ in range(draw(st.integers(1, 12))):
        kind = draw(st.sampled_from([GateKind.AND2, GateKind.OR2,
                                     GateKind.INV, GateKind.C2]))
        picks = [pool[draw(st.integers(0, len(pool) - 1))]
                 for _ in range(kind.arity)]
        if kind is GateKind.C2:
            init = b._net_init[picks[0]]
            out = b.add_gate(kind, picks, init=init)
        else:
            out = b.add_gate(kind, picks)
        pool.append(out)
    b.add_output_port("Z", pool[-1], pool[0])
    return b.build()


@given(random_netlists())
def test_json_round_trip_random(netlist):
    assert from_json(to_json(netlist)) == netlist


# ---------------------------------------------------------------------------
# stats / duality / dot

def test_stats_counts_and_weights():
    netlist = build_sample()
    st_default = stats(netlist)
    assert st_default.counts == {"AND2": 0, "OR2": 1, "INV": 1, "C2": 1}
    assert st_default.total_gates == 3
    assert st_default.area_proxy == 3.0
    weighted = stats(netlist, {"C2": 4.0, "OR2": 2.0, "INV": 0.5, "AND2": 1.0})
    assert weighted.area_proxy == 6.5


def test_dual_swaps_monotone_kinds_and_flips_inits():
    original = build_sample()
    dual = dual_of(original)
    kinds = [g.kind for g in dual.gates]
    assert kinds == [GateKind.C2, GateKind.AND2, GateKind.INV]
    assert dual.net_init == tuple(v ^ 1 for v in original.net_init)
    assert structurally_equal(dual_of(dual), original)


def test_structural_equality_ignores_labels():
    a = build_sample()
    b = build_sample()
    object.__setattr__(b, "name", "other")
    b.metadata["purpose"] = "changed"
    assert structurally_equal(a, b)
    c = dual_of(a)
    assert not structurally_equal(a, c)


def test_to_dot_shape_and_determinism():
    b = NetlistBuilder("dot")
    x = b.add_input_port("X")
    y = b.add_input_port("Y")
    z = b.add_gate(GateKind.AND2, (x.rail1, y.rail1))
    b.add_output_port("Z", z, x.rail0)
    netlist = b.build()
    dot = to_dot(netlist)
    assert dot == to_dot(netlist)
    assert dot.startswith("digraph")
    # 3 port nodes + 1 gate node, 2 gate input edges + 2 output port edges
    assert dot.count("shape=invhouse") == 2
    assert dot.count("shape=house") == 1
    assert dot.count("shape=box") == 1
    assert dot.count("->") == 4
