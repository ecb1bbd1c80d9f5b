"""Path-balancing insertion on a mapped cover, plus the balanced-tree
analytics (input-pin/buffer profile algebra and its extremal trees).

A MappedNetwork holds primitive cell instances; balancing DFFs live as
integer weights on edges, not as instances, so retiming is a pure
edge-weight transformation.  Clocked gates and DFFs contribute one level
each; splitters are asynchronous and contribute none.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .library import Cell, CellLibrary
from .truthtable import tt_eval_packed


class BalanceError(Exception):
    pass


@dataclass
class Instance:
    idx: int
    cell: Cell
    fanins: list[int]
    outs: list[int]

    @property
    def out(self) -> int:
        return self.outs[0]


# edge keys: (sig, ("inst", idx, pin)) or (sig, ("po", po_index))


@dataclass
class MappedNetwork:
    name: str = "top"
    pi_names: list[str] = field(default_factory=list)
    pi_sigs: list[int] = field(default_factory=list)
    instances: list[Instance] = field(default_factory=list)
    pos: list[int] = field(default_factory=list)  # driving signal per PO
    po_names: list[str] = field(default_factory=list)
    const_pos: list[tuple[str, bool]] = field(default_factory=list)
    dff: dict = field(default_factory=dict)  # edge -> register count
    heights: dict = field(default_factory=dict)  # sig -> clocked height
    dff_cell: Cell | None = None
    splitter_cell: Cell | None = None
    balanced: bool = False

    def __post_init__(self):
        self._next_sig = 0
        self.driver: dict[int, tuple] = {}

    # -- construction --------------------------------------------------

    def _new_sig(self) -> int:
        s = self._next_sig
        self._next_sig += 1
        return s

    def add_pi(self, name: str) -> int:
        sig = self._new_sig()
        self.pi_names.append(name)
        self.pi_sigs.append(sig)
        self.driver[sig] = ("pi", len(self.pi_sigs) - 1)
        return sig

    def add_gate(self, cell: Cell, fanins: list[int]) -> int:
        idx = len(self.instances)
        n_outs = 2 if cell.kind == "splitter" else 1
        outs = [self._new_sig() for _ in range(n_outs)]
        inst = Instance(idx, cell, list(fanins), outs)
        self.instances.append(inst)
        for slot, sig in enumerate(outs):
            self.driver[sig] = ("inst", idx, slot)
        return outs[0]

    def add_po(self, sig: int, name: str):
        self.pos.append(sig)
        self.po_names.append(name)

    def add_const_po(self, name: str, value: bool):
        self.const_pos.append((name, value))

    def finalize_cover(self):
        pass

    # -- topology ------------------------------------------------------

    def consumers(self) -> dict[int, list[tuple]]:
        out: dict[int, list[tuple]] = {}
        for inst in self.instances:
            for pin, sig in enumerate(inst.fanins):
                out.setdefault(sig, []).append(("inst", inst.idx, pin))
        for i, sig in enumerate(self.pos):
            out.setdefault(sig, []).append(("po", i))
        return out

    def topo_instances(self) -> list[Instance]:
        indeg = {}
        deps: dict[int, list[int]] = {}
        for inst in self.instances:
            n = 0
            for sig in inst.fanins:
                drv = self.driver[sig]
                if drv[0] == "inst":
                    n += 1
                    deps.setdefault(drv[1], []).append(inst.idx)
            indeg[inst.idx] = n
        import heapq

        ready = [i for i, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            i = heapq.heappop(ready)
            order.append(self.instances[i])
            for j in deps.get(i, ()):
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(ready, j)
        if len(order) != len(self.instances):
            raise BalanceError("mapped network contains a cycle")
        return order

    def edge_list(self) -> list[tuple]:
        """All (sig, consumer) edges in a fixed deterministic order."""
        edges = []
        for inst in self.instances:
            for pin, sig in enumerate(inst.fanins):
                edges.append((sig, ("inst", inst.idx, pin)))
        for i, sig in enumerate(self.pos):
            edges.append((sig, ("po", i)))
        return edges

    # -- splitter insertion --------------------------------------------

    def _provisional_heights(self) -> dict[int, int]:
        h = {sig: 0 for sig in self.pi_sigs}
        for inst in self.topo_instances():
            arr = max(h[f] + self.dff.get((f, ("inst", inst.idx, pin)), 0)
                      for pin, f in enumerate(inst.fanins))
            bump = 1 if inst.cell.is_clocked else 0
            for sig in inst.outs:
                h[sig] = arr + bump
        return h

    def insert_splitters(self, lib: CellLibrary):
        """Give every multi-fanout signal a chain-shaped splitter tree with
        the most DFF-critical sink nearest the source; f-1 splitters per
        f-fanout signal."""
        self.splitter_cell = lib.splitter
        self.dff_cell = lib.dff
        if self.splitter_cell is None or self.dff_cell is None:
            raise BalanceError("library lacks splitter or DFF cell")
        h = self._provisional_heights()
        cons = self.consumers()
        po_height = max((h[s] for s in self.pos), default=0)
        # estimated DFFs each sink's edge would need, snapshotted before any
        # rewiring: fewer = more critical
        gate_target = {inst.idx: max(h[f] for f in inst.fanins)
                       for inst in self.instances}

        def criticality(sig, key):
            if key[0] == "po":
                return (po_height - h[sig], 1, key[1])
            return (gate_target[key[1]] - h[sig], 0, key[1])

        for sig in sorted(cons):
            sinks = cons[sig]
            if len(sinks) < 2:
                continue
            sinks = sorted(sinks, key=lambda c: criticality(sig, c))
            cur = sig
            for i, sink in enumerate(sinks):
                if i < len(sinks) - 1:
                    out0 = self.add_gate(self.splitter_cell, [cur])
                    sp = self.instances[-1]
                    self._rewire(sink, sp.outs[0])
                    cur = sp.outs[1]
                else:
                    self._rewire(sink, cur)

    def _rewire(self, consumer_key, new_sig):
        if consumer_key[0] == "inst":
            _, idx, pin = consumer_key
            self.instances[idx].fanins[pin] = new_sig
        else:
            self.pos[consumer_key[1]] = new_sig

    # -- DFF insertion -------------------------------------------------

    def insert_balancing(self):
        """Per-gate fanin equalization plus PO padding; records heights and
        the pre-retiming DFF total."""
        self.dff = {}
        h = {sig: 0 for sig in self.pi_sigs}
        for inst in self.topo_instances():
            arrs = [h[f] for f in inst.fanins]
            target = max(arrs)
            for pin, (f, a) in enumerate(zip(inst.fanins, arrs)):
                w = target - a
                if w:
                    self.dff[(f, ("inst", inst.idx, pin))] = w
            bump = 1 if inst.cell.is_clocked else 0
            for sig in inst.outs:
                h[sig] = target + bump
        depth = max((h[s] for s in self.pos), default=0)
        for i, sig in enumerate(self.pos):
            w = depth - h[sig]
            if w:
                self.dff[(sig, ("po", i))] = w
        self.heights = h
        self.balanced = True
        return self

    # -- metrics -------------------------------------------------------

    @property
    def dff_total(self) -> int:
        return sum(self.dff.values())

    @property
    def po_pad_dffs(self) -> int:
        return sum(w for (s, c), w in self.dff.items() if c[0] == "po")

    @property
    def splitter_count(self) -> int:
        return sum(1 for i in self.instances if i.cell.kind == "splitter")

    @property
    def gate_count(self) -> int:
        return sum(1 for i in self.instances if i.cell.kind != "splitter")

    @property
    def depth(self) -> int:
        if not self.heights:
            return 0
        pads = {self.pos[c[1]]: w for (s, c), w in self.dff.items() if c[0] == "po"}
        return max((self.heights[s] + pads.get(s, 0) for s in self.pos), default=0)

    @property
    def area(self) -> float:
        a = sum(i.cell.area for i in self.instances)
        if self.dff_cell:
            a += self.dff_total * self.dff_cell.area
        return a

    @property
    def jj_count(self) -> int:
        j = sum(i.cell.jj_count for i in self.instances)
        if self.dff_cell:
            j += self.dff_total * self.dff_cell.jj_count
        return j

    # -- validation ----------------------------------------------------

    def validate(self):
        h = {sig: 0 for sig in self.pi_sigs}
        for inst in self.topo_instances():
            arrs = [h[f] + self.dff.get((f, ("inst", inst.idx, pin)), 0)
                    for pin, f in enumerate(inst.fanins)]
            if len(set(arrs)) > 1:
                raise BalanceError(
                    f"unbalanced fanins at {inst.cell.name} #{inst.idx}: {arrs}")
            bump = 1 if inst.cell.is_clocked else 0
            for sig in inst.outs:
                h[sig] = arrs[0] + bump
        po_arr = {h[s] + self.dff.get((s, ("po", i)), 0)
                  for i, s in enumerate(self.pos)}
        if len(po_arr) > 1:
            raise BalanceError(f"PO paths not equalized: {sorted(po_arr)}")
        cons = self.consumers()
        for sig, sinks in cons.items():
            if len(sinks) > 1:
                raise BalanceError(f"signal {sig} has fanout {len(sinks)} "
                                   "after splitter insertion")
        return True

    # -- simulation ----------------------------------------------------

    def simulate(self, pi_values: list[int], mask: int) -> dict[str, int]:
        """Bit-parallel combinational evaluation; DFFs and splitters act as
        wires.  Returns {po_name: packed value}."""
        vals = dict(zip(self.pi_sigs, pi_values))
        for inst in self.topo_instances():
            ins = [vals[f] for f in inst.fanins]
            if inst.cell.kind in ("dff", "splitter"):
                v = ins[0]
            else:
                v = tt_eval_packed(inst.cell.func, inst.cell.n_inputs, ins, mask)
            for sig in inst.outs:
                vals[sig] = v
        out = {name: vals[sig] for name, sig in zip(self.po_names, self.pos)}
        for name, value in self.const_pos:
            out[name] = mask if value else 0
        return out

    # -- retiming interface --------------------------------------------

    def retiming_edges(self) -> list[tuple]:
        """(tail_vertex, head_vertex, weight) triples; PIs and POs attach to
        the fixed 'host' vertex so I/O latency is pinned."""
        edges = []
        for sig, consumer in self.edge_list():
            drv = self.driver[sig]
            tail = "host" if drv[0] == "pi" else ("inst", drv[1])
            head = "host" if consumer[0] == "po" else ("inst", consumer[1])
            edges.append((tail, head, self.dff.get((sig, consumer), 0)))
        return edges

    def with_edge_weights(self, new_weights: list[int]) -> "MappedNetwork":
        net = self.copy()
        net.dff = {}
        for (sig, consumer), w in zip(self.edge_list(), new_weights):
            if w:
                net.dff[(sig, consumer)] = w
        return net

    def splitter_driver_pairs(self) -> list[tuple]:
        pairs = []
        for inst in self.instances:
            if inst.cell.kind != "splitter":
                continue
            drv = self.driver[inst.fanins[0]]
            tail = "host" if drv[0] == "pi" else ("inst", drv[1])
            pairs.append((("inst", inst.idx), tail))
        return pairs

    def copy(self) -> "MappedNetwork":
        net = MappedNetwork(name=self.name)
        net.pi_names = list(self.pi_names)
        net.pi_sigs = list(self.pi_sigs)
        net.instances = [Instance(i.idx, i.cell, list(i.fanins), list(i.outs))
                         for i in self.instances]
        net.pos = list(self.pos)
        net.po_names = list(self.po_names)
        net.const_pos = list(self.const_pos)
        net.dff = dict(self.dff)
        net.heights = dict(self.heights)
        net.dff_cell = self.dff_cell
        net.splitter_cell = self.splitter_cell
        net.balanced = self.balanced
        net._next_sig = self._next_sig
        net.driver = dict(self.driver)
        return net

    # -- emission ------------------------------------------------------

    def _sig_name(self, sig: int) -> str:
        drv = self.driver[sig]
        if drv[0] == "pi":
            return self.pi_names[drv[1]]
        return f"n{sig}"

    def write_blif(self) -> str:
        lines = [f".model {self.name}",
                 f".inputs {' '.join(self.pi_names)}",
                 f".outputs {' '.join(self.po_names + [n for n, _ in self.const_pos])}"]
        dnum = [0]

        def edge_name(sig, consumer):
            base = self._sig_name(sig)
            n = self.dff.get((sig, consumer), 0)
            for _ in range(n):
                nxt = f"pbd{dnum[0]}"
                dnum[0] += 1
                dname = self.dff_cell.name if self.dff_cell else "dff"
                pin = self.dff_cell.pin_names[0] if (self.dff_cell and
                                                     self.dff_cell.pin_names) else "a"
                out = self.dff_cell.out_name if self.dff_cell else "q"
                lines.append(f".gate {dname} {pin}={base} {out}={nxt}")
                base = nxt
            return base

        for inst in self.instances:
            pins = inst.cell.pin_names or tuple(f"i{i}" for i in range(len(inst.fanins)))
            conns = [f"{p}={edge_name(f, ('inst', inst.idx, i))}"
                     for i, (p, f) in enumerate(zip(pins, inst.fanins))]
            if inst.cell.kind == "splitter":
                conns.append(f"{inst.cell.out_name}={self._sig_name(inst.outs[0])}")
                conns.append(f"{inst.cell.out_name}2={self._sig_name(inst.outs[1])}")
            else:
                conns.append(f"{inst.cell.out_name}={self._sig_name(inst.outs[0])}")
            lines.append(f".gate {inst.cell.name} {' '.join(conns)}")
        for i, (name, sig) in enumerate(zip(self.po_names, self.pos)):
            src = edge_name(sig, ("po", i))
            if src != name:
                lines.append(f".names {src} {name}")
                lines.append("1 1")
        for name, value in self.const_pos:
            lines.append(f".names {name}")
            if value:
                lines.append("1")
        lines.append(".end")
        return "\n".join(lines) + "\n"

    def write_verilog(self) -> str:
        ports = self.pi_names + self.po_names + [n for n, _ in self.const_pos]
        lines = [f"module {self.name} ({', '.join(ports + ['clk'])});",
                 f"  input {', '.join(self.pi_names + ['clk'])};"]
        outs = self.po_names + [n for n, _ in self.const_pos]
        if outs:
            lines.append(f"  output {', '.join(outs)};")
        dnum = [0]
        body = []

        def edge_name(sig, consumer):
            base = self._sig_name(sig)
            for _ in range(self.dff.get((sig, consumer), 0)):
                nxt = f"pbd{dnum[0]}"
                dnum[0] += 1
                dname = self.dff_cell.name if self.dff_cell else "dff"
                body.append(f"  {dname} u_{nxt} (.a({base}), .q({nxt}), .clk(clk));")
                base = nxt
            return base

        for inst in self.instances:
            pins = inst.cell.pin_names or tuple(f"i{i}" for i in range(len(inst.fanins)))
            conns = [f".{p}({edge_name(f, ('inst', inst.idx, i))})"
                     for i, (p, f) in enumerate(zip(pins, inst.fanins))]
            if inst.cell.kind == "splitter":
                conns.append(f".{inst.cell.out_name}({self._sig_name(inst.outs[0])})")
                conns.append(f".{inst.cell.out_name}2({self._sig_name(inst.outs[1])})")
            else:
                conns.append(f".{inst.cell.out_name}({self._sig_name(inst.outs[0])})")
            if inst.cell.is_clocked:
                conns.append(".clk(clk)")
            body.append(f"  {inst.cell.name} u{inst.idx} ({', '.join(conns)});")
        for i, (name, sig) in enumerate(zip(self.po_names, self.pos)):
            body.append(f"  assign {name} = {edge_name(sig, ('po', i))};")
        for name, value in self.const_pos:
            body.append(f"  assign {name} = 1'b{int(value)};")
        wires = sorted({f"n{s}" for s in self.driver if self.driver[s][0] != "pi"})
        wires += [f"pbd{i}" for i in range(dnum[0])]
        if wires:
            lines.append(f"  wire {', '.join(wires)};")
        lines.extend(body)
        lines.append("endmodule")
        return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# balanced-tree analytics
# ----------------------------------------------------------------------
#
# Trees of 2-input gates balanced to height H are described by a buffer
# profile y_2..y_H: padding a subtree away at level x removes 2^(H-x)
# input pins, so  n = 2^H - sum y_x * 2^(H-x).


@dataclass
class TreeProfile:
    H: int
    y: tuple[int, ...]  # y_2 .. y_H

    @property
    def n(self) -> int:
        return input_pins_from_profile(self.H, self.y)

    @property
    def N(self) -> int:
        return self.n - 1  # a tree of 2-input gates has one more pin than nodes

    @property
    def Y(self) -> int:
        return sum(self.y)


def input_pins_from_profile(H: int, y) -> int:
    if H < 1:
        raise ValueError("height must be >= 1")
    y = tuple(y)
    if len(y) != max(H - 1, 0):
        raise ValueError(f"profile for height {H} needs {H - 1} entries y_2..y_H")
    if any(v < 0 for v in y):
        raise ValueError("negative buffer count in profile")
    n = 2 ** H - sum(v * 2 ** (H - x) for x, v in enumerate(y, start=2))
    if n <= 0:
        raise ValueError("profile prunes more pins than the full tree has")
    return n


# -- tree construction and measurement (tuples: leaf = None, node = (l, r)) --


def tree_leaf_depths(tree, depth: int = 1) -> list[int]:
    if tree is None:
        return [depth - 1]
    l, r = tree
    return tree_leaf_depths(l, depth + 1) + tree_leaf_depths(r, depth + 1)


def tree_node_count(tree) -> int:
    if tree is None:
        return 0
    l, r = tree
    return 1 + tree_node_count(l) + tree_node_count(r)


def tree_height(tree) -> int:
    if tree is None:
        return 0
    l, r = tree
    return 1 + max(tree_height(l), tree_height(r))


def measure_tree(tree) -> TreeProfile:
    """Chain-buffer profile of a concrete tree: a pin at depth d < H needs
    one pad per level d+1..H, so y_x counts pins shallower than x."""
    depths = tree_leaf_depths(tree)
    h = max(depths)
    y = [sum(1 for d in depths if d < x) for x in range(2, h + 1)]
    return TreeProfile(h, tuple(y))


def tree_buffer_count(tree) -> int:
    depths = tree_leaf_depths(tree)
    h = max(depths)
    return sum(h - d for d in depths)


def caterpillar(x: int):
    """Height-x chain: each level adds one pin."""
    t = (None, None)
    for _ in range(x - 1):
        t = (t, None)
    return t


def double_caterpillar(x: int):
    """Two height-(x-1) chains under a common root."""
    return (caterpillar(x - 1), caterpillar(x - 1))


def random_tree(n_nodes: int, seed: int = 0):
    rng = random.Random(seed)

    # grow by repeatedly replacing a random leaf with a node
    def grow(t, path):
        if not path:
            return (None, None)
        side, rest = path[0], path[1:]
        l, r = t
        return (grow(l, rest), r) if side == 0 else (l, grow(r, rest))

    t = (None, None)
    for _ in range(n_nodes - 1):
        # random walk to a leaf
        path = []
        cur = t
        while cur is not None:
            side = rng.randint(0, 1)
            path.append(side)
            cur = cur[side]
        t = grow(t, path)
    return t


def most_unbalanced(x: int) -> TreeProfile:
    """Max-buffer tree of height x: a chain for x <= 3, two chains under a
    root for larger x."""
    if x < 1:
        raise ValueError("height must be >= 1")
    tree = caterpillar(x) if x <= 3 else double_caterpillar(x)
    return measure_tree(tree)


def most_unbalanced_tree(x: int):
    if x < 1:
        raise ValueError("height must be >= 1")
    return caterpillar(x) if x <= 3 else double_caterpillar(x)


def most_balanced(x: int, n: int) -> TreeProfile:
    """Min-buffer profile of height x with n pins: greedily prune the
    largest subtrees first (maximum y_2, then y_3, ...), keeping at least
    one fertile node per level."""
    if x < 1:
        raise ValueError("height must be >= 1")
    if not (x + 1 <= n <= 2 ** x):
        raise ValueError(f"no height-{x} tree has {n} input pins")
    deficit = 2 ** x - n
    y = []
    fertile = 2  # both level-1 nodes of any height>=2 tree can have children
    for lvl in range(2, x + 1):
        slots = 2 * fertile
        take = min(slots - 1, deficit // 2 ** (x - lvl))
        y.append(take)
        deficit -= take * 2 ** (x - lvl)
        fertile = slots - take
    if x == 1:
        if deficit:
            raise ValueError("inconsistent profile")
        return TreeProfile(1, ())
    if deficit:
        raise ValueError(f"no feasible profile for height {x}, pins {n}")
    prof = TreeProfile(x, tuple(y))
    assert prof.n == n and fertile == n
    return prof


def max_depth_gap(n: int, x: int) -> int:
    """Largest p with a pin at level x-p in a height-x tree of n pins."""
    return n - 1 - x


def depth_gap_buffers(x: int, p: int) -> int:
    """Buffer count of the extremal tree whose shallowest pin sits p levels
    above the deepest: a comb over the top x-p-1 levels plus 2p full-length
    pin chains."""
    if not 1 <= p <= x - 1:
        raise ValueError(f"p must be in 1..{x - 1}")
    return (x - p - 1) * (x - p - 2) // 2 + 2 * p * x + p - 2 * p * p


def depth_gap_pad_lengths(x: int, p: int) -> tuple[list[int], list[int]]:
    """The per-pin pad lengths behind the depth-gap buffer count: comb pins padded by
    0..x-p-2, plus 2p pins padded by x, x-1, ..., x-2p+1."""
    if not 1 <= p <= x - 1:
        raise ValueError(f"p must be in 1..{x - 1}")
    comb = list(range(0, x - p - 1))
    chains = [x - i for i in range(2 * p)]
    return comb, chains


def buffer_band_check(x: int, p: int):
    """No balanced tree can land its buffer-count difference strictly
    between 1 and p; the difference is (-x^2 + 4(p+1)x - 2p - 3p^2 - 3)/2,
    and a half-integral value cannot be a buffer count at all."""
    if x < 4:
        raise ValueError("requires height >= 4")
    if not 1 <= p <= x - 1:
        raise ValueError(f"p must be in 1..{x - 1}")
    num = -x * x + 4 * (p + 1) * x - 2 * p - 3 * p * p - 3
    y_diff = num // 2 if num % 2 == 0 else num / 2
    holds = not (num % 2 == 0 and 1 < num // 2 < p)
    return y_diff, holds
