"""Brute-force oracles and their agreement with the analytic paths."""

from fractions import Fraction

import numpy as np
import pytest

from icl.gf2 import Gf2Matrix
from icl.instance import IndexCodingInstance, UserSpec, builtin_instance
from icl.lp import Constraint, LinearProgram, solve_lp
from icl.oracle import (
    BudgetExceeded,
    SearchBudget,
    TooLarge,
    best_scalar_linear_rate,
    enumerate_lp_vertices,
    exhaustive_conditional_entropy,
    lp_optimum_by_enumeration,
)
from icl.schemes import LinearScheme, check_scheme, conditional_entropy, zero_error_decode_check


def test_xor_pair_rate_one():
    inst = builtin_instance("xor2")
    rate, witness = best_scalar_linear_rate(inst, SearchBudget(max_channel_bits=1))
    assert rate == 1
    assert witness.composites[0][1].rows == (0b11,)


def test_two_messages_no_side_info_needs_two_bits():
    inst = builtin_instance("no-side-info(2)")
    rate, witness = best_scalar_linear_rate(inst, SearchBudget(max_channel_bits=2))
    assert rate == Fraction(1, 2)
    assert witness.channel_bits == 2


def test_single_user_identity():
    inst = IndexCodingInstance(1, (UserSpec.of({1}),), 1)
    rate, witness = best_scalar_linear_rate(inst, SearchBudget(max_channel_bits=1))
    assert rate == 1


def test_oracle_witness_passes_certification():
    inst = builtin_instance("xor2")
    rate, witness = best_scalar_linear_rate(inst, SearchBudget(max_channel_bits=2))
    target = IndexCodingInstance(inst.num_messages, inst.users, witness.channel_bits)
    assert all(zero_error_decode_check(target, witness, mode="enumerate"))
    assert check_scheme(target, witness).passed


def test_budget_guards():
    with pytest.raises(BudgetExceeded):
        best_scalar_linear_rate(builtin_instance("no-side-info(5)"))
    with pytest.raises(BudgetExceeded):
        best_scalar_linear_rate(builtin_instance("xor2"), SearchBudget(max_channel_bits=3))
    with pytest.raises(BudgetExceeded):
        best_scalar_linear_rate(
            builtin_instance("no-side-info(4)"),
            SearchBudget(max_channel_bits=2, max_candidates=100),
        )


def test_vertex_enumeration_box():
    lp = LinearProgram(("x",), {"x": 1}, (Constraint({"x": 1}, "<=", 1),))
    vals = sorted(p["x"] for p in enumerate_lp_vertices(lp))
    assert vals == [0, 1]


def test_vertex_enumeration_infeasible_empty():
    lp = LinearProgram(("x",), {"x": 1}, (Constraint({"x": 1}, "<=", -1),))
    assert enumerate_lp_vertices(lp) == []


def test_vertex_enumeration_respects_equalities():
    lp = LinearProgram(
        ("x", "y"),
        {"x": 1},
        (Constraint({"x": 1, "y": 1}, "=", 2), Constraint({"x": 1}, "<=", 1)),
    )
    points = enumerate_lp_vertices(lp)
    assert all(p["x"] + p["y"] == 2 for p in points)
    assert lp_optimum_by_enumeration(lp) == 1


def test_vertex_enumeration_size_guard():
    lp = LinearProgram(
        tuple(f"x{i}" for i in range(7)),
        {"x0": 1},
        (Constraint({"x0": 1}, "<=", 1),),
    )
    with pytest.raises(TooLarge):
        enumerate_lp_vertices(lp)


def test_xor2_composite_lp_agrees_with_vertices():
    from icl.composite import DecodingChoice, build_composite_lp

    inst = builtin_instance("xor2")
    choice = DecodingChoice((frozenset({1}), frozenset({2})))
    lp = build_composite_lp(inst, choice)
    assert len(lp.variables) <= 6
    sol = solve_lp(lp)
    assert sol.optimum == lp_optimum_by_enumeration(lp) == 1


def _random_scheme(rng) -> LinearScheme:
    n = int(rng.integers(2, 5))
    bits = [int(rng.integers(1, 4)) for _ in range(n)]
    while sum(bits) > 10:
        bits[int(rng.integers(0, n))] = 1
    total = sum(bits)
    offs = [0]
    for L in bits:
        offs.append(offs[-1] + L)
    composites = []
    for _ in range(int(rng.integers(1, 4))):
        size = int(rng.integers(1, n + 1))
        P = frozenset(int(i) for i in rng.choice(np.arange(1, n + 1), size=size, replace=False))
        support = 0
        for i in P:
            support |= ((1 << bits[i - 1]) - 1) << offs[i - 1]
        nrows = int(rng.integers(1, 4))
        rows = tuple(int(rng.integers(0, 1 << total)) & support for _ in range(nrows))
        composites.append((P, Gf2Matrix(rows, total)))
    channel = sum(len(m.rows) for _, m in composites)
    return LinearScheme(tuple(bits), channel, tuple(composites))


@pytest.mark.parametrize("seed", range(12))
def test_entropy_rank_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    scheme = _random_scheme(rng)
    n = len(scheme.msg_bits)
    known_size = int(rng.integers(0, n + 1))
    known = set(int(i) for i in rng.choice(np.arange(1, n + 1), size=known_size, replace=False))
    assert conditional_entropy(scheme, known) == exhaustive_conditional_entropy(scheme, known)


def test_entropy_enumeration_size_guard():
    big = LinearScheme((11, 11), 1, ((frozenset({1}), Gf2Matrix((1,), 22)),))
    with pytest.raises(TooLarge):
        exhaustive_conditional_entropy(big)
