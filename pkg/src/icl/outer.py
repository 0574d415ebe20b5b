"""Acyclic-subset outer bound on the side-information digraph.

Any acyclic induced subgraph of size s forces s sequential recoveries
out of one channel use, so the symmetric rate is at most c/s bits, i.e.
1/s per channel bit for the largest such s.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .instance import IndexCodingInstance, SideInfoGraph, build_side_info_graph


class TooManyVertices(Exception):
    """The exact subset search is limited to small graphs."""


@dataclass(frozen=True)
class AcyclicBoundResult:
    mais_size: int
    witness: frozenset[int]
    symmetric_upper: Fraction        # per channel bit


def _acyclic_by_peeling(succ: list[int], sub: int) -> bool:
    """Repeatedly remove sink vertices of the induced subgraph."""
    live = sub
    while live:
        progress = False
        v_bits = live
        while v_bits:
            low = v_bits & -v_bits
            v_bits ^= low
            v = low.bit_length() - 1
            if succ[v] & live == 0:
                live ^= low
                progress = True
        if live and not progress:
            return False
    return True


def _find_cycle(succ: list[int], sub: int) -> int:
    """Bitmask of some cycle inside the induced subgraph, 0 if none."""
    color = {}
    for start in range(len(succ)):
        if not (sub >> start & 1) or color.get(start) == 2:
            continue
        stack = [(start, succ[start] & sub)]
        color[start] = 1
        path = [start]
        while stack:
            v, todo = stack[-1]
            if todo == 0:
                color[v] = 2
                stack.pop()
                path.pop()
                continue
            low = todo & -todo
            stack[-1] = (v, todo ^ low)
            w = low.bit_length() - 1
            if color.get(w) == 1:
                cyc = 0
                for u in reversed(path):
                    cyc |= 1 << u
                    if u == w:
                        break
                return cyc
            if color.get(w, 0) == 0:
                color[w] = 1
                path.append(w)
                stack.append((w, succ[w] & sub))
    return 0


def mais(graph: SideInfoGraph, max_vertices: int = 22) -> AcyclicBoundResult:
    """Largest acyclic induced vertex subset, exactly.

    Subsets are scanned largest-first, skipping supersets of already
    found cycles; the winning subset is re-verified with an independent
    cycle search before being returned, and is the lexicographically
    smallest witness of its size.  Raises TooManyVertices beyond
    max_vertices vertices.
    """
    verts = list(graph.vertices)
    n = len(verts)
    if n > max_vertices:
        raise TooManyVertices(f"{n} vertices exceed the limit {max_vertices}")
    if n == 0:
        raise ValueError("graph has no vertices")
    index = {v: i for i, v in enumerate(verts)}
    succ = [0] * n
    for (i, j) in graph.edges:
        succ[index[i]] |= 1 << index[j]

    cores: list[int] = []
    for size in range(n, 0, -1):
        for combo in combinations(range(n), size):
            sub = 0
            for i in combo:
                sub |= 1 << i
            if any(core & sub == core for core in cores):
                continue
            if _acyclic_by_peeling(succ, sub):
                if _find_cycle(succ, sub):
                    raise AssertionError("acyclicity checkers disagree")
                witness = frozenset(verts[i] for i in combo)
                return AcyclicBoundResult(size, witness, Fraction(1, size))
            if len(cores) < 128:
                cyc = _find_cycle(succ, sub)
                if cyc and cyc not in cores:
                    cores.append(cyc)
    raise AssertionError("a single vertex is always acyclic")


def acyclic_symmetric_bound(inst: IndexCodingInstance, max_vertices: int = 22) -> AcyclicBoundResult:
    """The outer bound for a multiple-unicast instance."""
    return mais(build_side_info_graph(inst), max_vertices)
