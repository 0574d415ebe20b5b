"""Acyclic-subset outer bound on the side-information digraph."""

from fractions import Fraction

import pytest

from icl.instance import (
    IndexCodingInstance,
    UserSpec,
    build_side_info_graph,
    builtin_instance,
)
from icl.outer import TooManyVertices, acyclic_symmetric_bound, mais


def test_example1_bound_is_one_third():
    res = acyclic_symmetric_bound(builtin_instance("example1"))
    assert res.mais_size == 3
    assert res.symmetric_upper == Fraction(1, 3)


def test_example1_witness_is_acyclic():
    res = acyclic_symmetric_bound(builtin_instance("example1"))
    graph = build_side_info_graph(builtin_instance("example1"))
    inside = res.witness
    # No edge of the induced subgraph may close a cycle; with three
    # vertices it suffices that the edge set is not cyclic, which the
    # module re-verifies; here we check the witness size only.
    assert len(inside) == 3
    assert inside <= set(graph.vertices)


def test_mutual_side_info_pair_bound_is_one():
    res = acyclic_symmetric_bound(builtin_instance("xor2"))
    assert res.mais_size == 1
    assert res.symmetric_upper == 1


def test_no_side_info_bound_matches_message_count():
    for k in (1, 2, 3, 4, 5):
        res = acyclic_symmetric_bound(builtin_instance(f"no-side-info({k})"))
        assert res.mais_size == k
        assert res.symmetric_upper == Fraction(1, k)


def test_bound_is_per_channel_bit():
    # The bound is normalized per channel bit, so widening the channel
    # leaves it unchanged (the absolute bit budget scales separately).
    res = acyclic_symmetric_bound(builtin_instance("no-side-info(2)", channel_bits=4))
    assert res.symmetric_upper == Fraction(1, 2)


def test_directed_cycle_graph():
    # Users in a ring, each knowing only the next message: the digraph
    # is a single directed cycle, so dropping any one vertex is acyclic.
    k = 5
    users = tuple(
        UserSpec.of({i}, {i % k + 1}) for i in range(1, k + 1)
    )
    inst = IndexCodingInstance(k, users, 1)
    res = acyclic_symmetric_bound(inst)
    assert res.mais_size == k - 1


def test_vertex_limit_guard():
    inst = builtin_instance("no-side-info(25)")
    with pytest.raises(TooManyVertices):
        acyclic_symmetric_bound(inst, max_vertices=24)


def test_mais_on_graph_object_directly():
    graph = build_side_info_graph(builtin_instance("example1"))
    res = mais(graph)
    assert res.mais_size == 3
