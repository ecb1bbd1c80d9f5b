"""End-to-end pipeline: cuts -> matching -> DP -> cover -> splitters ->
balancing -> retiming.  Shared by the CLI and the test suite."""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import cuts as cutsmod
from . import library as libmod
from . import mapper as mapmod
from . import retime as retimemod
from .balance import MappedNetwork
from .library import CellLibrary, MatchTable
from .netlist import SubjectGraph


@dataclass
class FlowResult:
    graph: SubjectGraph
    before: MappedNetwork   # balanced, pre-retiming
    after: MappedNetwork    # balanced, post-retiming (same net if retime off)
    hit_rate: float
    runtime: float          # map + balance + retime wall clock, seconds
    solutions: dict
    cutsets: dict

    @property
    def dffs_before(self) -> int:
        return self.before.dff_total

    @property
    def dffs_after(self) -> int:
        return self.after.dff_total


def prepare_match_table(lib: CellLibrary, k: int = 5, max_depth: int = 3,
                        max_count: int = 4000,
                        time_budget: float | None = None) -> MatchTable:
    sgs = libmod.generate_supergates(lib, k=k, max_depth=max_depth,
                                     max_count=max_count,
                                     time_budget=time_budget)
    return MatchTable(sgs)


def map_graph(g: SubjectGraph, lib: CellLibrary, table: MatchTable | None = None,
              k: int = 5, max_depth: int = 3, cut_cap: int = 250,
              frontier_cap: int = 8, objective: str = "dffs+depth+area",
              retime: bool = True, depth_greedy: bool = False,
              allow_across_splitters: bool = True) -> FlowResult:
    if table is None:
        table = prepare_match_table(lib, k=k, max_depth=max_depth)
    t0 = time.perf_counter()
    cutsets = cutsmod.enumerate_cuts(g, k=k, cap=cut_cap)
    cutsmod.compute_cut_functions(g, cutsets)
    if depth_greedy:
        solutions = mapmod.map_depth_greedy(g, cutsets, table,
                                            frontier_cap=frontier_cap)
    else:
        solutions = mapmod.map_dag(g, cutsets, table, frontier_cap=frontier_cap)
        mapmod.select_best(solutions, g, objective)
    net = mapmod.extract_cover(solutions, g, cutsets, table,
                               frontier_cap=frontier_cap)
    net.insert_splitters(lib)
    net.insert_balancing()
    net.validate()
    if retime:
        after = retimemod.retime_min_registers(
            net, allow_across_splitters=allow_across_splitters)
        after.validate()
    else:
        after = net
    runtime = time.perf_counter() - t0
    rate = libmod.hit_rate(cutsets, table)
    return FlowResult(g, net, after, rate, runtime, solutions, cutsets)
