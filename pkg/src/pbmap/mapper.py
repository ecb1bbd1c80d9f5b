"""The path-balancing mapper core: a DP over cuts that minimizes inserted
balancing DFFs, followed by depth and area selection passes and cover
extraction.

Every node carries a small Pareto frontier of (height, dffs) matches; a
match's DFF count is its leaves' cumulative counts plus the retimed DFF
count of the supergate given the chosen leaf arrival heights.  Multi-fanout
nodes are hard cover boundaries: their frontier collapses to the single
best point so all consumers share one implementation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .balance import MappedNetwork
from .cuts import Cut, CutSet
from .library import MatchTable, Supergate
from .netlist import CONST0, SubjectGraph
from .retime import retimed_match_dffs
from .truthtable import symmetry_perms

POS = "positive"
NEG = "negative"


class MappingError(Exception):
    pass


@dataclass
class Match:
    supergate: Supergate | None
    cut: Cut | None
    phase: str
    height: int
    dffs: int
    area: float
    jj: int
    leaf_heights: tuple[int, ...] = ()
    leaves: tuple[int, ...] = ()  # cut leaves in supergate input-slot order
    alternates: list["Match"] = field(default_factory=list)

    @property
    def is_wire(self) -> bool:
        return self.supergate is None


@dataclass
class NodeSolution:
    node: int
    phase: str
    frontier: list[Match] = field(default_factory=list)  # sorted by dffs
    best: Match | None = None

    @property
    def opt(self) -> int:
        return self.frontier[0].dffs

    def point_at(self, height: int) -> Match:
        for m in self.frontier:
            if m.height == height:
                return m
        raise MappingError(
            f"no frontier point of node {self.node} at height {height}")


def balance_cost(leaf_levels) -> int:
    """DFFs needed to align a set of arrival levels to their maximum."""
    levels = list(leaf_levels)
    if not levels:
        raise ValueError("empty level list")
    top = max(levels)
    return sum(top - lv for lv in levels)


def _alt_key(m: Match):
    return (m.area, m.jj, m.supergate.name if m.supergate else "")


def _insert_pareto(frontier: list[Match], cand: Match, cap: int):
    for i, m in enumerate(frontier):
        if m.height == cand.height and m.dffs == cand.dffs:
            if _alt_key(cand) < _alt_key(m):
                cand.alternates = m.alternates + [m]
                frontier[i] = cand
            else:
                if len(m.alternates) < 4:
                    m.alternates.append(cand)
            return
        if m.height <= cand.height and m.dffs <= cand.dffs:
            return  # dominated
    frontier[:] = [m for m in frontier
                   if not (cand.height <= m.height and cand.dffs <= m.dffs)]
    frontier.append(cand)
    frontier.sort(key=lambda m: (m.dffs, m.height))
    if len(frontier) > cap:
        del frontier[cap:]


@lru_cache(maxsize=None)
def _retimed(sg: Supergate, heights: tuple[int, ...]) -> int:
    return retimed_match_dffs(sg, heights)


def _combine(sg: Supergate, cut: Cut, leaf_fronts: list[list[Match]],
             out: list[Match], cap: int, phase: str, product_limit: int):
    """Candidates for one (cut, supergate) pair over leaf frontier choices.

    Each candidate also chooses a leaf-to-input wiring: any permutation that
    fixes the cut function is a legal binding, and skew-sensitive costs make
    the choice matter, so every distinct permuted height profile is emitted.
    """
    depths = sg.leaf_depths
    perms = symmetry_perms(cut.func, len(cut.leaves))
    size = 1
    for lf in leaf_fronts:
        size *= len(lf)
        if size > product_limit:
            break

    def emit(choice):
        base = tuple(m.height for m in choice)
        leaf_dffs = sum(m.dffs for m in choice)
        area = sg.area + sum(m.area for m in choice)
        jj = sg.jj_count + sum(m.jj for m in choice)
        seen = set()
        for perm in perms:
            heights = tuple(base[p] for p in perm)
            if heights in seen:
                continue
            seen.add(heights)
            dffs = leaf_dffs + _retimed(sg, heights)
            height = max(h + d for h, d in zip(heights, depths))
            cand = Match(
                supergate=sg, cut=cut, phase=phase, height=height, dffs=dffs,
                area=area, jj=jj, leaf_heights=heights,
                leaves=tuple(cut.leaves[p] for p in perm),
            )
            _insert_pareto(out, cand, cap)

    if size <= product_limit:
        for choice in itertools.product(*leaf_fronts):
            emit(choice)
        return
    # too many combinations: sweep candidate root arrival targets, greedily
    # picking the cheapest feasible frontier point per leaf
    targets = sorted({m.height + d for lf, d in zip(leaf_fronts, depths) for m in lf})
    for target in targets:
        choice = []
        ok = True
        for lf, d in zip(leaf_fronts, depths):
            feas = [m for m in lf if m.height + d <= target]
            if not feas:
                ok = False
                break
            choice.append(min(feas, key=lambda m: (m.dffs + (target - d - m.height),
                                                   -m.height)))
        if ok:
            emit(choice)


def _solve_node(g: SubjectGraph, nid: int, phase: str,
                cutsets: dict[int, CutSet], table: MatchTable,
                solutions, frontier_cap: int, product_limit: int) -> NodeSolution:
    frontier: list[Match] = []
    for cut in cutsets[nid].cuts:
        if cut.func is None:
            raise MappingError("cut functions not computed")
        sgs = table.lookup(cut.func, len(cut.leaves), phase)
        if not sgs:
            continue
        leaf_fronts = []
        missing = False
        for leaf in cut.leaves:
            sol = solutions.get((leaf, POS))
            if sol is None:
                missing = True
                break
            leaf_fronts.append(sol.frontier)
        if missing:
            continue
        for sg in sgs:
            _combine(sg, cut, leaf_fronts, frontier, frontier_cap, phase,
                     product_limit)
    if not frontier:
        raise MappingError(
            f"node {nid} ({phase}) has no matchable cut; "
            "library lacks AND/inverter coverage")
    sol = NodeSolution(nid, phase, frontier)
    sol.best = frontier[0]
    return sol


def map_dag(g: SubjectGraph, cutsets: dict[int, CutSet], table: MatchTable,
            frontier_cap: int = 8, product_limit: int = 64):
    """Topological DP sweep over any acyclic subject graph.

    Returns a dict keyed by (node_id, phase) of NodeSolution; negative-phase
    solutions are added lazily by resolve_phase() where POs demand them.
    """
    solutions: dict[tuple[int, str], NodeSolution] = {}
    for pi in g.pis:
        wire = Match(None, None, POS, 0, 0, 0.0, 0)
        solutions[(pi, POS)] = NodeSolution(pi, POS, [wire], wire)
    if g.has_const:
        wire = Match(None, None, POS, 0, 0, 0.0, 0)
        solutions[(CONST0, POS)] = NodeSolution(CONST0, POS, [wire], wire)
    fanout = g.fanout_counts()
    for nid in g.topo_order():
        sol = _solve_node(g, nid, POS, cutsets, table, solutions,
                          frontier_cap, product_limit)
        if fanout.get(nid, 0) > 1:
            # shared node: one implementation for all consumers
            best = min(sol.frontier, key=lambda m: (m.dffs, m.height, _alt_key(m)))
            sol.frontier = [best]
            sol.best = best
        solutions[(nid, POS)] = sol
    return solutions


def map_tree(g: SubjectGraph, cutsets: dict[int, CutSet], table: MatchTable,
             frontier_cap: int = 8, product_limit: int = 64):
    """map_dag restricted to trees (asserts single fanout throughout)."""
    fanout = g.fanout_counts()
    for nid in g.nodes:
        if fanout[nid] > 1:
            raise MappingError(f"map_tree called on a DAG (node {nid} has fanout "
                               f"{fanout[nid]})")
    return map_dag(g, cutsets, table, frontier_cap, product_limit)


def resolve_phase(g: SubjectGraph, nid: int, phase: str, solutions,
                  cutsets, table, frontier_cap: int = 8, product_limit: int = 64):
    """Fetch (and lazily compute) the solution of a node in a given phase."""
    key = (nid, phase)
    if key not in solutions:
        solutions[key] = _solve_node(g, nid, phase, cutsets, table, solutions,
                                     frontier_cap, product_limit)
    return solutions[key]


def opt_value(solutions, nid: int) -> int:
    return solutions[(nid, POS)].opt


# ----------------------------------------------------------------------
# selection passes
# ----------------------------------------------------------------------


def minimize_depth(solutions, g: SubjectGraph):
    """Among DFF-optimal frontier points, select the minimum height.

    Never trades DFFs for depth: points with more than the optimal DFF
    count are not eligible.
    """
    for sol in solutions.values():
        if not sol.frontier or sol.frontier[0].is_wire:
            continue
        opt = sol.opt
        sol.best = min((m for m in sol.frontier if m.dffs == opt),
                       key=lambda m: m.height)
    return solutions


def optimize_area(solutions, g: SubjectGraph):
    """Among matches tied on (dffs, height), select the minimum area."""
    for sol in solutions.values():
        best = sol.best
        if best is None or best.is_wire:
            continue
        pool = [best] + [a for a in best.alternates
                         if a.height == best.height and a.dffs == best.dffs]
        sol.best = min(pool, key=_alt_key)
    return solutions


def select_best(solutions, g: SubjectGraph, objective: str = "dffs+depth+area"):
    for sol in solutions.values():
        if sol.frontier:
            sol.best = sol.frontier[0]
    if objective in ("dffs+depth", "dffs+depth+area"):
        minimize_depth(solutions, g)
    if objective == "dffs+depth+area":
        optimize_area(solutions, g)
    return solutions


# ----------------------------------------------------------------------
# depth-greedy reference mapper (baseline for comparisons)
# ----------------------------------------------------------------------


def map_depth_greedy(g: SubjectGraph, cutsets, table,
                     frontier_cap: int = 8, product_limit: int = 64):
    """Classic min-height objective: per node keep the single match with the
    smallest arrival height (ties by area), ignoring DFF cost."""
    solutions: dict[tuple[int, str], NodeSolution] = {}
    for pi in g.pis:
        wire = Match(None, None, POS, 0, 0, 0.0, 0)
        solutions[(pi, POS)] = NodeSolution(pi, POS, [wire], wire)
    if g.has_const:
        wire = Match(None, None, POS, 0, 0, 0.0, 0)
        solutions[(CONST0, POS)] = NodeSolution(CONST0, POS, [wire], wire)
    for nid in g.topo_order():
        best = None
        for cut in cutsets[nid].cuts:
            sgs = table.lookup(cut.func, len(cut.leaves), POS)
            if not sgs:
                continue
            leaf_ms = [solutions[(leaf, POS)].best for leaf in cut.leaves]
            perms = symmetry_perms(cut.func, len(cut.leaves))
            for sg in sgs:
                base = tuple(m.height for m in leaf_ms)
                # wiring chosen by arrival height alone (DFF-oblivious),
                # ties broken by the height profile for determinism
                perm = min(perms, key=lambda p: (
                    max(base[p[j]] + d for j, d in enumerate(sg.leaf_depths)),
                    tuple(base[j] for j in p)))
                heights = tuple(base[p] for p in perm)
                height = max(h + d for h, d in zip(heights, sg.leaf_depths))
                dffs = sum(m.dffs for m in leaf_ms) + _retimed(sg, heights)
                cand = Match(sg, cut, POS, height, dffs,
                             sg.area + sum(m.area for m in leaf_ms),
                             sg.jj_count + sum(m.jj for m in leaf_ms), heights,
                             tuple(cut.leaves[p] for p in perm))
                key = (cand.height, cand.area, cand.jj,
                       sg.name)
                if best is None or key < (best.height, best.area, best.jj,
                                          best.supergate.name):
                    best = cand
        if best is None:
            raise MappingError(f"node {nid} has no matchable cut")
        solutions[(nid, POS)] = NodeSolution(nid, POS, [best], best)
    return solutions


# ----------------------------------------------------------------------
# cover extraction
# ----------------------------------------------------------------------


def extract_cover(solutions, g: SubjectGraph, cutsets=None, table=None,
                  frontier_cap: int = 8, product_limit: int = 64) -> MappedNetwork:
    """Reverse traversal from the POs instantiating the chosen supergates."""
    net = MappedNetwork(name=g.name)
    pi_sig = {}
    for pid in g.pis:
        pi_sig[pid] = net.add_pi(g.pi_names[pid])

    sig_of: dict[tuple[int, str, int | None], int] = {}

    def demand(nid: int, phase: str, height: int | None) -> int:
        if g.is_pi(nid) and phase == POS:
            return pi_sig[nid]
        sol = solutions.get((nid, phase))
        if sol is None:
            if cutsets is None or table is None:
                raise MappingError(
                    f"missing solution for node {nid} phase {phase}")
            sol = resolve_phase(g, nid, phase, solutions, cutsets, table,
                                frontier_cap, product_limit)
        match = sol.best if height is None else sol.point_at(height)
        key = (nid, phase, match.height)
        if key in sig_of:
            return sig_of[key]
        if match.is_wire:
            sig = pi_sig[nid]
        else:
            leaf_sigs = [demand(leaf, POS, h)
                         for leaf, h in zip(match.leaves, match.leaf_heights)]
            sig = _instantiate(net, match.supergate, leaf_sigs)
        sig_of[key] = sig
        return sig

    for name, (p, c) in zip(g.po_names, g.pos):
        if p == CONST0:
            net.add_const_po(name, bool(c))
            continue
        sig = demand(p, NEG if c else POS, None)
        net.add_po(sig, name)
    net.finalize_cover()
    return net


def _instantiate(net: MappedNetwork, sg: Supergate, leaf_sigs: list[int]) -> int:
    pos = 0

    # walk in input order: children of a supergate occupy consecutive slots
    def walk_sg(node: Supergate):
        nonlocal pos
        fanins = []
        for c in node.children:
            if isinstance(c, int):
                fanins.append(leaf_sigs[pos])
                pos += 1
            else:
                fanins.append(walk_sg(c))
        return net.add_gate(node.root_cell, fanins)

    return walk_sg(sg)
