import random

import pytest

from pbmap import bench
from pbmap.balance import (BalanceError, MappedNetwork, TreeProfile,
                           caterpillar, double_caterpillar,
                           input_pins_from_profile, max_depth_gap,
                           depth_gap_buffers, depth_gap_pad_lengths, measure_tree,
                           most_balanced, most_unbalanced,
                           most_unbalanced_tree, random_tree,
                           tree_buffer_count, tree_height, tree_leaf_depths,
                           tree_node_count, buffer_band_check)
from pbmap.flow import map_graph


# ----------------------------------------------------------------------
# mapped-network structure
# ----------------------------------------------------------------------


def independent_arrivals(net):
    """Recompute signal arrival heights from scratch."""
    h = {sig: 0 for sig in net.pi_sigs}
    for inst in net.topo_instances():
        arrs = [h[f] + net.dff.get((f, ("inst", inst.idx, pin)), 0)
                for pin, f in enumerate(inst.fanins)]
        bump = 1 if inst.cell.is_clocked else 0
        for sig in inst.outs:
            h[sig] = max(arrs) + bump
    return h


def check_balanced(net):
    h = independent_arrivals(net)
    for inst in net.instances:
        arrs = [h[f] + net.dff.get((f, ("inst", inst.idx, pin)), 0)
                for pin, f in enumerate(inst.fanins)]
        assert len(set(arrs)) == 1, f"unbalanced fanins at instance {inst.idx}"
    po_arr = {h[s] + net.dff.get((s, ("po", i)), 0)
              for i, s in enumerate(net.pos)}
    assert len(po_arr) <= 1, "PO path lengths differ"


def test_mapped_corpus_invariants(lib, table):
    for g in [bench.ksa4(), bench.alternating_chain(9), bench.comparator(4),
              bench.mux_tree(3), bench.ripple_adder(4)]:
        res = map_graph(g, lib, table)
        for net in (res.before, res.after):
            net.validate()
            check_balanced(net)
            # post-splitter fanout is at most 1 per signal
            for sig, sinks in net.consumers().items():
                assert len(sinks) <= 1


def test_splitter_count_matches_fanout_excess(lib, table):
    rng = random.Random(6)
    from pbmap.cuts import compute_cut_functions, enumerate_cuts
    from pbmap.mapper import extract_cover, map_dag, select_best

    for trial in range(10):
        g = bench.random_aig(rng.randint(25, 70), rng.randint(5, 8),
                             seed=700 + trial, n_pos=3) \
            if hasattr(bench, "random_aig") else None
        if g is None:
            from pbmap.netlist import random_aig
            g = random_aig(rng.randint(25, 70), rng.randint(5, 8),
                           seed=700 + trial, n_pos=3)
        cutsets = compute_cut_functions(g, enumerate_cuts(g, k=5))
        sols = select_best(map_dag(g, cutsets, table), g)
        net = extract_cover(sols, g, cutsets, table)
        excess = sum(len(sinks) - 1 for sinks in net.consumers().values()
                     if len(sinks) > 1)
        net.insert_splitters(lib)
        assert net.splitter_count == excess
        for sig, sinks in net.consumers().items():
            assert len(sinks) <= 1


def fanout4_net(lib):
    """One AND whose output feeds three gates and a PO, with one sink much
    deeper (least DFF slack, i.e. most critical)."""
    net = MappedNetwork(name="f4")
    and2 = next(c for c in lib.cells if c.name == "and2")
    a = net.add_pi("a")
    b = net.add_pi("b")
    src = net.add_gate(and2, [a, b])
    # deep sink: three extra logic levels before consuming src
    d1 = net.add_gate(and2, [a, b])
    d2 = net.add_gate(and2, [d1, b])
    d3 = net.add_gate(and2, [d2, b])
    deep = net.add_gate(and2, [src, d3])
    s1 = net.add_gate(and2, [src, a])
    s2 = net.add_gate(and2, [src, b])
    for i, s in enumerate((deep, s1, s2)):
        net.add_po(s, f"o{i}")
    net.add_po(src, "osrc")
    return net, src


def test_fanout4_gets_three_splitters_critical_first(lib):
    net, src = fanout4_net(lib)
    excess = sum(len(s) - 1 for s in net.consumers().values() if len(s) > 1)
    net.insert_splitters(lib)
    assert net.splitter_count == excess
    src_splitters = [i for i in net.instances
                     if i.cell.kind == "splitter" and i.fanins == [src]]
    assert len(src_splitters) == 1  # head of a 3-splitter chain for 4 sinks
    # follow the splitter chain from src: first tap feeds the deep consumer
    first = next(i for i in net.instances
                 if i.cell.kind == "splitter" and i.fanins == [src])
    tap = first.outs[0]
    consumer = net.consumers()[tap][0]
    assert consumer[0] == "inst"
    deep_inst = net.instances[consumer[1]]
    assert deep_inst.cell.kind != "splitter"
    net.insert_balancing()
    net.validate()
    check_balanced(net)


def test_fanout1_gets_no_splitters(lib, table):
    g = bench.and_chain(5)
    res = map_graph(g, lib, table)
    # chain cover has no multi-fanout signals beyond what mapping introduces
    for sig, sinks in res.after.consumers().items():
        assert len(sinks) <= 1


def test_balancing_example_heights_3_5(lib):
    net = MappedNetwork(name="skew")
    and2 = next(c for c in lib.cells if c.name == "and2")
    a = net.add_pi("a")
    b = net.add_pi("b")
    # left arm: height 3, right arm: height 5
    l = a
    for _ in range(3):
        l = net.add_gate(and2, [l, l])
    r = b
    for _ in range(5):
        r = net.add_gate(and2, [r, r])
    top = net.add_gate(and2, [l, r])
    net.add_po(top, "f")
    net.insert_balancing()
    key = next(k for k in net.dff if k[1] == ("inst", net.instances.index(
        next(i for i in net.instances if i.out == top)), 0))
    assert net.dff[key] == 2
    assert net.dff_total == 2


def test_fully_balanced_cover_needs_no_dffs(lib, table):
    g = bench.parity(8)
    res = map_graph(g, lib, table)
    assert res.dffs_before == 0
    assert res.dffs_after == 0


def test_dff_total_decomposition(lib, table):
    res = map_graph(bench.ksa4(), lib, table)
    net = res.before
    edge_sum = sum(net.dff.get(e, 0) for e in net.edge_list())
    assert edge_sum == net.dff_total  # every weighted edge is a real edge
    assert net.po_pad_dffs <= net.dff_total


def test_write_blif_contains_dff_instances(lib, table):
    res = map_graph(bench.ksa4(), lib, table)
    text = res.after.write_blif()
    assert text.count(".gate dff") == res.dffs_after
    assert text.count(".gate split") == res.after.splitter_count


def test_write_verilog_smoke(lib, table):
    res = map_graph(bench.and_chain(6), lib, table)
    v = res.after.write_verilog()
    assert "module" in v and "endmodule" in v


def test_validate_catches_imbalance(lib):
    net, _src = fanout4_net(lib)
    net.insert_splitters(lib)
    net.insert_balancing()
    net.validate()
    # corrupt one edge weight
    key = next(iter(net.dff)) if net.dff else None
    if key is None:
        pytest.skip("no weighted edges to corrupt")
    net.dff[key] += 1
    with pytest.raises(BalanceError):
        net.validate()


# ----------------------------------------------------------------------
# tree analytics
# ----------------------------------------------------------------------


def test_pin_identity_example():
    assert input_pins_from_profile(4, (1, 1, 1)) == 16 - 4 - 2 - 1


def test_pin_identity_errors():
    with pytest.raises(ValueError):
        input_pins_from_profile(0, ())
    with pytest.raises(ValueError):
        input_pins_from_profile(3, (1,))  # wrong length
    with pytest.raises(ValueError):
        input_pins_from_profile(3, (-1, 0))
    with pytest.raises(ValueError):
        input_pins_from_profile(3, (4, 0))  # prunes everything


def test_profile_identities_on_random_trees():
    for seed in range(300):
        t = random_tree(random.Random(seed).randint(1, 40), seed=seed)
        prof = measure_tree(t)
        # pin identity: profile reproduces the measured pin count
        assert prof.n == len(tree_leaf_depths(t))
        # one more pin than nodes
        assert prof.n == tree_node_count(t) + 1
        assert prof.N == tree_node_count(t)
        # buffer total equals per-pin padding
        assert prof.Y == tree_buffer_count(t)
        assert prof.H == tree_height(t)


def test_caterpillar_profiles():
    t = caterpillar(3)
    assert sorted(tree_leaf_depths(t)) == [1, 2, 3, 3]
    prof = measure_tree(t)
    assert prof.H == 3 and prof.N == 3 and prof.Y == 3


def test_most_unbalanced_closed_forms():
    for x in range(1, 11):
        prof = most_unbalanced(x)
        tree = most_unbalanced_tree(x)
        assert measure_tree(tree).y == prof.y if x > 1 else True
        if x <= 3:
            assert prof.N == x
            assert prof.Y == (x - 1) * x // 2
        else:
            assert prof.N == 2 * x - 1
            assert prof.Y == (x - 2) * (x - 1)
        assert prof.H == x


def test_double_caterpillar_structure():
    t = double_caterpillar(5)
    assert tree_height(t) == 5
    assert tree_node_count(t) == 9


def enumerate_profiles(x):
    """All feasible pruning profiles of a height-x tree: at each level prune
    some of the available slots, keeping at least one expandable node."""
    results = []

    def rec(lvl, fertile, y):
        if lvl > x:
            results.append((tuple(y), fertile))
            return
        slots = 2 * fertile
        for take in range(slots):
            rec(lvl + 1, slots - take, y + [take])

    if x == 1:
        return [((), 2)]
    rec(2, 2, [])
    return results


def test_most_balanced_examples():
    assert most_balanced(4, 9).y == (1, 1, 1)
    assert most_balanced(4, 12).y == (1, 0, 0)
    assert most_balanced(4, 15).y == (0, 0, 1)
    assert most_balanced(1, 2).y == ()
    with pytest.raises(ValueError):
        most_balanced(3, 9)  # more pins than a height-3 tree has
    with pytest.raises(ValueError):
        most_balanced(4, 4)  # too few pins for height 4


def test_most_balanced_minimal_over_profiles():
    for x in range(2, 6):
        by_pins = {}
        for y, fertile in enumerate_profiles(x):
            n = input_pins_from_profile(x, y)
            if fertile != n or n < x + 1:
                continue  # not a realizable full-height pruning
            by_pins.setdefault(n, []).append(sum(y))
        for n, ys in sorted(by_pins.items()):
            prof = most_balanced(x, n)
            assert prof.n == n
            assert prof.Y == min(ys)


def test_max_depth_gap_bound():
    assert max_depth_gap(2 * 4, 4) == 3
    assert max_depth_gap(5, 4) == 0


def test_depth_gap_buffer_values_and_construction():
    assert depth_gap_buffers(5, 1) == 12
    assert depth_gap_buffers(4, 1) == 8
    for x in range(3, 9):
        for p in range(1, x):
            comb, chains = depth_gap_pad_lengths(x, p)
            assert len(chains) == 2 * p
            assert depth_gap_buffers(x, p) == sum(comb) + sum(chains)
    with pytest.raises(ValueError):
        depth_gap_buffers(5, 5)


def test_buffer_band_examples():
    y_diff, holds = buffer_band_check(4, 1)
    assert y_diff == 4
    assert holds
    with pytest.raises(ValueError):
        buffer_band_check(3, 1)
    with pytest.raises(ValueError):
        buffer_band_check(5, 0)


def test_buffer_band_never_strictly_inside():
    for x in range(4, 60):
        for p in range(1, x):
            _, holds = buffer_band_check(x, p)
            assert holds, (x, p)
