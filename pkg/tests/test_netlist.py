import random

import pytest

from pbmap import bench
from pbmap.netlist import (CONST0, NetlistError, SubjectGraph, _and_op, _neg,
                           _or_op, _xor_op, balanced_reduce, parse_netlist,
                           random_aig, write_aag, write_blif, write_netlist)


def chain4():
    """F = a & b & !c & d as a left-leaning chain."""
    g = SubjectGraph(name="chain")
    a, b, c, d = [(g.add_pi(x), False) for x in "abcd"]
    n1 = _and_op(g, a, b)
    n2 = _and_op(g, n1, _neg(c))
    n3 = _and_op(g, n2, d)
    g.add_po(n3, "F")
    return g


def test_structural_hashing_dedups():
    g = SubjectGraph()
    a = (g.add_pi("a"), False)
    b = (g.add_pi("b"), False)
    x = g.add_and(a, b)
    y = g.add_and(b, a)  # commuted operands hash to the same node
    assert x == y
    assert len(g.nodes) == 1


def test_add_and_constant_folding():
    g = SubjectGraph()
    a = (g.add_pi("a"), False)
    assert g.add_and(a, g.const_lit(True)) == a
    assert g.add_and(a, g.const_lit(False)) == (CONST0, False)
    assert g.add_and(a, a) == a
    assert g.add_and(a, (a[0], True)) == (CONST0, False)
    assert len(g.nodes) == 0


def test_levels_and_depth_chain_vs_balanced():
    g = chain4()
    assert g.depth == 3
    g2 = SubjectGraph()
    lits = [(g2.add_pi(x), False) for x in "abcd"]
    g2.add_po(balanced_reduce(g2, lits, _and_op), "F")
    assert g2.depth == 2


def test_balanced_reduce_structure():
    g = SubjectGraph()
    lits = [(g.add_pi(f"x{i}"), False) for i in range(7)]
    out = balanced_reduce(g, lits, _and_op)
    g.add_po(out, "f")
    assert g.depth == 3  # ceil(log2(7))
    assert len(g.nodes) == 6


def test_simulate_chain_truth():
    g = chain4()
    pis = g.pis
    for m in range(16):
        vals = {pis[i]: (m >> i) & 1 for i in range(4)}
        (out,) = g.simulate(vals)
        a, b, c, d = (vals[pis[i]] for i in range(4))
        assert out == (a & b & (1 - c) & d)


def test_blif_round_trip_signature():
    g = bench.ripple_adder(3)
    text = write_blif(g)
    g2 = parse_netlist(text, fmt="blif")
    assert g2.signature() == g.signature()
    # simulate agreement on random patterns
    rng = random.Random(3)
    for _ in range(20):
        vals = {p: rng.randint(0, 1) for p in g.pis}
        vals2 = {p: v for (p, v) in zip(g2.pis, (vals[q] for q in g.pis))}
        assert g.simulate(vals) == g2.simulate(vals2)


def test_aag_round_trip_signature():
    g = bench.comparator(3)
    text = write_aag(g)
    g2 = parse_netlist(text, fmt="aag")
    assert g2.signature() == g.signature()


def test_write_netlist_format_dispatch():
    g = chain4()
    assert write_netlist(g, "blif").startswith(".model")
    assert write_netlist(g, "aag").startswith("aag ")
    with pytest.raises(ValueError):
        write_netlist(g, "edif")


def test_blif_latch_rejected():
    text = """.model seq
.inputs a
.outputs q
.latch a q re clk 0
.end
"""
    with pytest.raises(NetlistError):
        parse_netlist(text, fmt="blif")


def test_blif_undefined_signal_rejected():
    text = """.model bad
.inputs a
.outputs f
.names a ghost f
11 1
.end
"""
    with pytest.raises(NetlistError):
        parse_netlist(text, fmt="blif")


def test_blif_sop_semantics():
    text = """.model sop
.inputs a b c
.outputs f
.names a b c f
1-1 1
01- 1
.end
"""
    g = parse_netlist(text, fmt="blif")
    for m in range(8):
        vals = {g.pis[i]: (m >> i) & 1 for i in range(3)}
        a, b, c = (vals[g.pis[i]] for i in range(3))
        expect = (a & c) | ((1 - a) & b)
        assert g.simulate(vals) == [expect]


def test_random_aig_deterministic_and_bounded():
    g1 = random_aig(80, 8, seed=5, n_pos=4)
    g2 = random_aig(80, 8, seed=5, n_pos=4)
    assert g1.signature() == g2.signature()
    assert len(g1.pis) == 8
    assert len(g1.pos) == 4
    g3 = random_aig(80, 8, seed=6, n_pos=4)
    assert g3.signature() != g1.signature()


def test_sweep_dangling_removes_dead_cone():
    g = SubjectGraph()
    a = (g.add_pi("a"), False)
    b = (g.add_pi("b"), False)
    live = _and_op(g, a, b)
    _or_op(g, _xor_op(g, a, b), b)  # dead cone
    g.add_po(live, "f")
    before = len(g.nodes)
    g.sweep_dangling()
    assert len(g.nodes) < before
    assert len(g.nodes) == 1
