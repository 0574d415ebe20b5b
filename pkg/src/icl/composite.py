"""Composite-coding inner bound, evaluated exactly.

One composite rate variable S_P >= 0 exists per nonempty subset P of the
messages.  For a fixed decoding choice (one decoding set K_j per user j
with D_j <= K_j and K_j disjoint from A_j), the achievable rates are cut
out by two families of linear constraints in bits:

* decompression, per user j:  sum of S_P over P not contained in A_j
  is at most the channel size c;
* decoding, per user j and nonempty J <= K_j:
  sum of rates R_i over i in J is at most
  v_J = sum of S_P over P <= A_j | K_j with P meeting J.

The symmetric rate maximizes a common R over every decoding choice (the
achievable region is the union over choices, and the maximum over a
union is the maximum of the per-choice maxima).  Because the union of
the per-choice polyhedra is generally not convex, time sharing between
choices can beat every single choice; time_shared_symmetric_rate
computes the symmetric rate of the convex hull of the union by exact
column generation.  All arithmetic is exact rational via the integer
simplex in lp.py; symmetric rates are reported normalized per channel
bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Mapping, Sequence

import numpy as np

from .instance import IndexCodingInstance, validate_instance
from .lp import OPTIMAL, Constraint, LinearProgram, _solve_leq_arrays, solve_lp

# Composite variables grow as 2^N; past this many messages neither the
# LP columns nor the choice enumeration are tractable.
_MAX_MESSAGES = 16

RationalLike = Fraction | int


class SearchSpaceOverflow(Exception):
    """The decoding-choice product or variable count exceeds the limit."""


@dataclass(frozen=True)
class DecodingChoice:
    """One decoding set per user, aligned with the instance's user order."""

    sets: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class CompositeResult:
    symmetric_rate: Fraction            # per channel bit
    best_choice: DecodingChoice
    allocation: dict[frozenset[int], Fraction]   # S_P in bits, zeros omitted
    channel_bits: int


@dataclass(frozen=True)
class WeightedResult:
    value: Fraction                     # optimal weighted sum, in bits
    best_choice: DecodingChoice
    rates: dict[int, Fraction]          # R_i in bits
    allocation: dict[frozenset[int], Fraction]


def _mask(messages) -> int:
    m = 0
    for i in messages:
        m |= 1 << (i - 1)
    return m


def _members(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _subsets_of(mask: int) -> Iterator[int]:
    """All submasks of mask, nonempty, in no particular order."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _require_valid(inst: IndexCodingInstance) -> None:
    problems = validate_instance(inst)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))
    if inst.num_messages > _MAX_MESSAGES:
        raise SearchSpaceOverflow(
            f"{inst.num_messages} messages: composite enumeration needs 2^N variables"
        )


def decoding_options(inst: IndexCodingInstance, user: int, per_user_cap: int | None = None) -> list[frozenset[int]]:
    """All decoding sets for one user (0-based index), lexicographically.

    A decoding set is D_j plus any subset of the messages outside
    A_j | D_j; per_user_cap bounds how many extra messages are added.
    """
    spec = inst.users[user]
    free = sorted(set(inst.message_ids()) - spec.demands - spec.knows)
    cap = len(free) if per_user_cap is None else min(per_user_cap, len(free))
    options = []
    for r in range(cap + 1):
        for extra in combinations(free, r):
            options.append(frozenset(spec.demands | set(extra)))
    options.sort(key=lambda s: tuple(sorted(s)))
    return options


def enumerate_decoding_choices(
    inst: IndexCodingInstance,
    per_user_cap: int | None = None,
    max_choices: int = 1 << 24,
) -> Iterator[DecodingChoice]:
    """Yield every decoding choice, user-major, options in lex order.

    Raises SearchSpaceOverflow before yielding anything if the product
    of per-user option counts exceeds max_choices.
    """
    _require_valid(inst)
    per_user = [decoding_options(inst, j, per_user_cap) for j in range(inst.num_users)]
    total = 1
    for opts in per_user:
        total *= len(opts)
    if total > max_choices:
        raise SearchSpaceOverflow(f"{total} decoding choices exceed the limit {max_choices}")

    def gen() -> Iterator[DecodingChoice]:
        from itertools import product

        for sets in product(*per_user):
            yield DecodingChoice(tuple(sets))

    return gen()


def _check_choice(inst: IndexCodingInstance, choice: DecodingChoice) -> None:
    if len(choice.sets) != inst.num_users:
        raise ValueError("choice must name one decoding set per user")
    full = set(inst.message_ids())
    for j, (spec, K) in enumerate(zip(inst.users, choice.sets), start=1):
        if not (spec.demands <= K and K <= full - spec.knows):
            raise ValueError(f"user {j}: decoding set must satisfy D <= K <= messages minus A")


def _var_name(subset: tuple[int, ...]) -> str:
    return "S[" + ",".join(str(i) for i in subset) + "]"


def build_composite_lp(
    inst: IndexCodingInstance,
    choice: DecodingChoice,
    weights: Mapping[int, RationalLike] | None = None,
) -> LinearProgram:
    """The exact rate LP for one decoding choice.

    Without weights the symmetric program is built: a single variable R
    maximized subject to the decompression and decoding constraints.
    With weights, per-message variables R_i are used and the objective
    is the weighted sum of the rates.
    """
    _require_valid(inst)
    _check_choice(inst, choice)
    n = inst.num_messages
    c = inst.channel_bits
    subsets = [_members(m) for m in range(1, 1 << n)]
    svars = [_var_name(s) for s in subsets]
    if weights is None:
        rate_vars = ("R",)
        rate_of = {i: "R" for i in inst.message_ids()}
        objective: dict[str, RationalLike] = {"R": 1}
    else:
        stray = set(weights) - set(inst.message_ids())
        if stray:
            raise ValueError(f"weights name unknown messages {sorted(stray)}")
        rate_vars = tuple(f"R_{i}" for i in inst.message_ids())
        rate_of = {i: f"R_{i}" for i in inst.message_ids()}
        objective = {f"R_{i}": Fraction(w) for i, w in weights.items()}

    cons: list[Constraint] = []
    for spec in inst.users:
        amask = _mask(spec.knows)
        coeffs = {
            svars[p - 1]: 1 for p in range(1, 1 << n) if p & ~amask
        }
        cons.append(Constraint(coeffs, "<=", c))
    for spec, K in zip(inst.users, choice.sets):
        akmask = _mask(spec.knows) | _mask(K)
        for jmask in _subsets_of(_mask(K)):
            coeffs: dict[str, RationalLike] = {}
            for p in _subsets_of(akmask):
                if p & jmask:
                    coeffs[svars[p - 1]] = -1
            for i in _members(jmask):
                name = rate_of[i]
                coeffs[name] = coeffs.get(name, 0) + 1
            cons.append(Constraint(coeffs, "<=", 0))
    return LinearProgram(rate_vars + tuple(svars), objective, tuple(cons))


@dataclass(frozen=True)
class _SweepData:
    """Per-instance precomputation for the symmetric sweep."""

    n: int
    c: int
    decomp: np.ndarray                  # rows over columns [R, S_1..S_{2^n-1}]
    options: list[list[frozenset[int]]]
    blocks: list[list[np.ndarray]]      # blocks[j][o]: decoding rows for option o
    used: list[list[int]]               # used[j][o]: bitmask of S columns hit


def _prepare_sweep(inst: IndexCodingInstance, per_user_cap: int | None) -> _SweepData:
    n = inst.num_messages
    ncols = 1 << n                       # column 0 is R, column p is S of mask p
    decomp_rows = []
    seen_amask = set()
    for spec in inst.users:
        amask = _mask(spec.knows)
        if amask in seen_amask:
            continue
        seen_amask.add(amask)
        row = np.zeros(ncols, dtype=np.int64)
        for p in range(1, ncols):
            if p & ~amask:
                row[p] = 1
        decomp_rows.append(row)
    options = [decoding_options(inst, j, per_user_cap) for j in range(inst.num_users)]
    blocks: list[list[np.ndarray]] = []
    used: list[list[int]] = []
    for j, spec in enumerate(inst.users):
        amask = _mask(spec.knows)
        jblocks: list[np.ndarray] = []
        jused: list[int] = []
        for K in options[j]:
            kmask = _mask(K)
            akmask = amask | kmask
            entries: list[tuple[int, int, int]] = []   # (|J|, hit bitmask, J mask)
            for jmask in _subsets_of(kmask):
                hit = 0
                for p in _subsets_of(akmask):
                    if p & jmask:
                        hit |= 1 << p
                entries.append((jmask.bit_count(), hit, jmask))
            # A row is implied by another with a no-smaller R coefficient
            # and a hit set that is a subset of its own; drop it.
            kept: list[tuple[int, int, int]] = []
            for size1, hit1, j1 in entries:
                implied = False
                for size2, hit2, j2 in entries:
                    if j1 == j2:
                        continue
                    if size1 <= size2 and hit2 & ~hit1 == 0:
                        if size1 < size2 or hit1 != hit2 or j2 < j1:
                            implied = True
                            break
                if not implied:
                    kept.append((size1, hit1, j1))
            block = np.zeros((len(kept), ncols), dtype=np.int64)
            blockused = 0
            for i, (size, hit, _) in enumerate(kept):
                block[i, 0] = size
                blockused |= hit
                h = hit >> 1
                p = 1
                while h:
                    if h & 1:
                        block[i, p] = -1
                    h >>= 1
                    p += 1
            jblocks.append(block)
            jused.append(blockused)
        blocks.append(jblocks)
        used.append(jused)
    return _SweepData(n, inst.channel_bits, np.array(decomp_rows, dtype=np.int64), options, blocks, used)


def _sweep_range(data: _SweepData, start: int, stop: int) -> tuple[Fraction, int, dict[int, Fraction]]:
    """Scan choice indices [start, stop); return (best R, its index, S values)."""
    counts = [len(o) for o in data.options]
    nu = len(counts)
    best = Fraction(-1)
    best_idx = -1
    best_alloc: dict[int, Fraction] = {}
    ndecomp = data.decomp.shape[0]
    for idx in range(start, stop):
        rem = idx
        opt = [0] * nu
        for j in range(nu - 1, -1, -1):
            opt[j] = rem % counts[j]
            rem //= counts[j]
        usedbits = 0
        for j in range(nu):
            usedbits |= data.used[j][opt[j]]
        cols = [0] + [p for p in range(1, 1 << data.n) if usedbits >> p & 1]
        parts = [data.decomp] + [data.blocks[j][opt[j]] for j in range(nu)]
        A = np.concatenate(parts, axis=0)[:, cols]
        m = A.shape[0]
        rhs = np.zeros(m, dtype=np.int64)
        rhs[:ndecomp] = data.c
        status, tab, width = _solve_leq_arrays(A, rhs, 0)
        if status != OPTIMAL:
            raise AssertionError("composite LP is feasible and bounded by construction")
        value = tab.value_of(0, width)
        if value > best:
            best = value
            best_idx = idx
            best_alloc = {}
            for r in range(tab.nrows):
                jcol = tab.basis[r]
                if 0 < jcol < len(cols):
                    v = Fraction(int(tab.t[r, width]), int(tab.t[r, jcol]))
                    if v:
                        best_alloc[cols[jcol]] = v
    return best, best_idx, best_alloc


def _choice_at(data: _SweepData, idx: int) -> DecodingChoice:
    counts = [len(o) for o in data.options]
    sets = []
    rem = idx
    for j in range(len(counts) - 1, -1, -1):
        sets.append(data.options[j][rem % counts[j]])
        rem //= counts[j]
    return DecodingChoice(tuple(reversed(sets)))


def max_symmetric_rate(
    inst: IndexCodingInstance,
    per_user_cap: int | None = None,
    max_choices: int = 1 << 24,
    threads: int = 1,
) -> CompositeResult:
    """Best symmetric composite rate over every decoding choice.

    Exact rational arithmetic throughout; the result carries the
    maximizing choice (first in enumeration order on ties) and its
    composite-rate allocation, and is re-checked against the constraint
    system before being returned.  The rate is normalized per channel
    bit.
    """
    _require_valid(inst)
    data = _prepare_sweep(inst, per_user_cap)
    total = 1
    for opts in data.options:
        total *= len(opts)
    if total > max_choices:
        raise SearchSpaceOverflow(f"{total} decoding choices exceed the limit {max_choices}")

    if threads > 1 and total > 1:
        from multiprocessing import get_context

        nchunks = min(threads, total)
        bounds = [total * i // nchunks for i in range(nchunks + 1)]
        args = [(data, bounds[i], bounds[i + 1]) for i in range(nchunks)]
        with get_context("fork").Pool(threads) as pool:
            results = pool.starmap(_sweep_range, args)
        best, best_idx, best_alloc = max(results, key=lambda r: (r[0], -r[1]))
    else:
        best, best_idx, best_alloc = _sweep_range(data, 0, total)

    choice = _choice_at(data, best_idx)
    allocation = {frozenset(_members(p)): v for p, v in best_alloc.items()}
    rate = best / data.c
    if not check_certificate(inst, choice, rate, allocation):
        raise AssertionError("optimal allocation failed the certificate re-check")
    return CompositeResult(rate, choice, allocation, data.c)


def check_rate_point(
    inst: IndexCodingInstance,
    choice: DecodingChoice,
    rates: Sequence[Fraction],
    allocation: Mapping[frozenset[int], Fraction],
) -> bool:
    """Exact feasibility check of a per-message rate vector for one choice.

    rates[i-1] is the rate of message i in bits; allocation values are
    in bits.  Verifies nonnegativity, every decompression constraint,
    and every decoding constraint of the choice.
    """
    _check_choice(inst, choice)
    if len(rates) != inst.num_messages:
        raise ValueError("one rate per message expected")
    if any(r < 0 for r in rates) or any(v < 0 for v in allocation.values()):
        return False
    for spec, K in zip(inst.users, choice.sets):
        load = sum((v for P, v in allocation.items() if not P <= spec.knows), Fraction(0))
        if load > inst.channel_bits:
            return False
        ak = spec.knows | K
        for r in range(1, len(K) + 1):
            for J in combinations(sorted(K), r):
                jset = set(J)
                v_J = sum(
                    (v for P, v in allocation.items() if P <= ak and P & jset),
                    Fraction(0),
                )
                if sum(rates[i - 1] for i in J) > v_J:
                    return False
    return True


def check_certificate(
    inst: IndexCodingInstance,
    choice: DecodingChoice,
    symmetric_rate: Fraction,
    allocation: Mapping[frozenset[int], Fraction],
) -> bool:
    """Exact feasibility check of (symmetric rate, allocation) for one choice.

    symmetric_rate is per channel bit; allocation values are in bits.
    """
    R = symmetric_rate * inst.channel_bits
    if R < 0:
        return False
    return check_rate_point(inst, choice, [R] * inst.num_messages, allocation)


@dataclass(frozen=True)
class _PriceData:
    """Per-instance precomputation for weighted-objective sweeps.

    Columns are [R_1..R_n | S_1..S_{2^n-1}]; the S column for mask p
    sits at index n + p (index n itself is unused).
    """

    n: int
    c: int
    decomp: np.ndarray
    options: list[list[frozenset[int]]]
    blocks: list[list[np.ndarray]]      # blocks[j][o]: decoding rows for option o
    used: list[list[int]]               # used[j][o]: bitmask of S masks hit


def _prepare_price(inst: IndexCodingInstance, per_user_cap: int | None) -> _PriceData:
    n = inst.num_messages
    width = n + (1 << n)
    decomp_rows = []
    seen_amask = set()
    for spec in inst.users:
        amask = _mask(spec.knows)
        if amask in seen_amask:
            continue
        seen_amask.add(amask)
        row = np.zeros(width, dtype=np.int64)
        for p in range(1, 1 << n):
            if p & ~amask:
                row[n + p] = 1
        decomp_rows.append(row)
    options = [decoding_options(inst, j, per_user_cap) for j in range(inst.num_users)]
    blocks: list[list[np.ndarray]] = []
    used: list[list[int]] = []
    for j, spec in enumerate(inst.users):
        amask = _mask(spec.knows)
        jblocks: list[np.ndarray] = []
        jused: list[int] = []
        for K in options[j]:
            kmask = _mask(K)
            akmask = amask | kmask
            jmasks = sorted(_subsets_of(kmask))
            block = np.zeros((len(jmasks), width), dtype=np.int64)
            blockused = 0
            for i, jmask in enumerate(jmasks):
                for b in _members(jmask):
                    block[i, b - 1] = 1
                for p in _subsets_of(akmask):
                    if p & jmask:
                        block[i, n + p] = -1
                        blockused |= 1 << p
            jblocks.append(block)
            jused.append(blockused)
        blocks.append(jblocks)
        used.append(jused)
    return _PriceData(n, inst.channel_bits, np.array(decomp_rows, dtype=np.int64), options, blocks, used)


def _price_range(
    data: _PriceData,
    wnum: np.ndarray,
    wden: int,
    start: int,
    stop: int,
    keep: int,
) -> list[tuple[Fraction, int, tuple[Fraction, ...], dict[int, Fraction]]]:
    """Scan choice indices [start, stop) maximizing the weighted rate sum.

    The weight of message i is wnum[i-1]/wden.  Returns up to `keep`
    entries (value in bits, choice index, rate vector in bits, S values
    by mask), best value first, duplicate rate vectors dropped.
    """
    n = data.n
    counts = [len(o) for o in data.options]
    nu = len(counts)
    ndecomp = data.decomp.shape[0]
    cands: list[tuple[Fraction, int, tuple[Fraction, ...], dict[int, Fraction]]] = []
    for idx in range(start, stop):
        rem = idx
        opt = [0] * nu
        for j in range(nu - 1, -1, -1):
            opt[j] = rem % counts[j]
            rem //= counts[j]
        usedbits = 0
        for j in range(nu):
            usedbits |= data.used[j][opt[j]]
        cols = list(range(n)) + [n + p for p in range(1, 1 << n) if usedbits >> p & 1]
        parts = [data.decomp] + [data.blocks[j][opt[j]] for j in range(nu)]
        A = np.concatenate(parts, axis=0)[:, cols]
        m = A.shape[0]
        rhs = np.zeros(m, dtype=np.int64)
        rhs[:ndecomp] = data.c
        obj = np.zeros(len(cols), dtype=np.int64)
        obj[:n] = wnum
        status, tab, width = _solve_leq_arrays(A, rhs, obj)
        if status != OPTIMAL:
            raise AssertionError("composite LP is feasible and bounded by construction")
        rates = [Fraction(0)] * n
        for r in range(tab.nrows):
            jcol = tab.basis[r]
            if jcol < n:
                rates[jcol] = Fraction(int(tab.t[r, width]), int(tab.t[r, jcol]))
        value = Fraction(sum(int(w) * rate for w, rate in zip(wnum, rates)), wden)
        if len(cands) == keep and value <= cands[-1][0]:
            continue
        point = tuple(rates)
        if any(point == c[2] for c in cands):
            continue
        alloc: dict[int, Fraction] = {}
        for r in range(tab.nrows):
            jcol = tab.basis[r]
            if n <= jcol < len(cols):
                v = Fraction(int(tab.t[r, width]), int(tab.t[r, jcol]))
                if v:
                    alloc[cols[jcol] - n] = v
        cands.append((value, idx, point, alloc))
        cands.sort(key=lambda e: (-e[0], e[1]))
        del cands[keep:]
    return cands


def _merge_candidates(
    lists: Sequence[list],
    keep: int,
) -> list[tuple[Fraction, int, tuple[Fraction, ...], dict[int, Fraction]]]:
    merged = sorted((c for lst in lists for c in lst), key=lambda e: (-e[0], e[1]))
    out: list = []
    seen: set[tuple[Fraction, ...]] = set()
    for cand in merged:
        if cand[2] in seen:
            continue
        seen.add(cand[2])
        out.append(cand)
        if len(out) == keep:
            break
    return out


@dataclass(frozen=True)
class HullPoint:
    """One achievable rate vector (in bits) with its certificate."""

    rates: tuple[Fraction, ...]
    choice: DecodingChoice
    allocation: dict[frozenset[int], Fraction]


@dataclass(frozen=True)
class HullResult:
    """Symmetric rate of the convex hull of the per-choice regions.

    symmetric_rate is certified by the mixture (time sharing weights
    over achievable points); upper_bound is certified by the separating
    message weights.  The two coincide exactly when converged is True.
    Rates are per channel bit; HullPoint rates are in bits.
    """

    symmetric_rate: Fraction
    upper_bound: Fraction
    converged: bool
    mixture: tuple[tuple[Fraction, HullPoint], ...]
    weights: tuple[Fraction, ...]
    channel_bits: int
    rounds: int


def _hull_master(points: Sequence[tuple[Fraction, ...]], n: int) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Best separating weights for the current point pool.

    Solves min tau s.t. tau >= w . v for every pool point v, w in the
    simplex; returns (tau, w).  tau bounds from above the symmetric
    value achievable by mixing the pool, and by LP duality equals it.
    """
    names = tuple(f"w{i}" for i in range(1, n + 1))
    cons = [Constraint({nm: 1 for nm in names}, "=", 1)]
    for v in points:
        coeffs: dict[str, RationalLike] = {"tau": -1}
        for i, vi in enumerate(v):
            if vi:
                coeffs[names[i]] = vi
        cons.append(Constraint(coeffs, "<=", 0))
    sol = solve_lp(LinearProgram(("tau",) + names, {"tau": -1}, tuple(cons)))
    if sol.status != OPTIMAL:
        raise AssertionError("weight-finding LP is feasible and bounded by construction")
    return sol.assignment["tau"], tuple(sol.assignment[nm] for nm in names)


def _hull_mixture(points: Sequence[tuple[Fraction, ...]], n: int) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Best symmetric value from mixing the pool; returns (value, mixture)."""
    names = tuple(f"m{s}" for s in range(len(points)))
    cons = [Constraint({nm: 1 for nm in names}, "=", 1)]
    for i in range(n):
        coeffs: dict[str, RationalLike] = {"r": 1}
        for s, v in enumerate(points):
            if v[i]:
                coeffs[names[s]] = -v[i]
        cons.append(Constraint(coeffs, "<=", 0))
    sol = solve_lp(LinearProgram(("r",) + names, {"r": 1}, tuple(cons)))
    if sol.status != OPTIMAL:
        raise AssertionError("mixture LP is feasible and bounded by construction")
    return sol.assignment["r"], tuple(sol.assignment[nm] for nm in names)


def time_shared_symmetric_rate(
    inst: IndexCodingInstance,
    per_user_cap: int | None = None,
    max_choices: int = 1 << 24,
    threads: int = 1,
    max_rounds: int = 64,
    points_per_round: int = 12,
    trace=None,
) -> HullResult:
    """Symmetric rate of the convex hull of all per-choice rate regions.

    Time sharing between decoding choices (and composite allocations) is
    admissible because any two achievable schemes can be interleaved
    over consecutive channel uses; the resulting region is the convex
    hull of the union of the per-choice polyhedra, which can strictly
    exceed every single choice's symmetric rate.

    Exact column generation: a pool of achievable rate points grows one
    pricing sweep at a time.  Each round solves a small exact LP for the
    best separating message weights of the current pool, then sweeps
    every decoding choice maximizing that weighted rate sum.  A sweep
    whose maximum does not exceed the pool value proves optimality; the
    returned mixture and weights are independently re-checkable, exact
    certificates of both bounds.

    trace, when given, is called after every pricing sweep with
    (round, pool value, sweep maximum), all in bits.
    """
    _require_valid(inst)
    data = _prepare_price(inst, per_user_cap)
    total = 1
    for opts in data.options:
        total *= len(opts)
    if total > max_choices:
        raise SearchSpaceOverflow(f"{total} decoding choices exceed the limit {max_choices}")

    n = data.n
    c = data.c
    pool: list[HullPoint] = []
    pool_keys: set[tuple[Fraction, ...]] = set()
    tau = Fraction(-1)
    weights = tuple(Fraction(1, n) for _ in range(n))
    upper = Fraction(c)
    converged = False
    rounds = 0

    def price_all(wnum: np.ndarray, wden: int) -> list:
        if threads > 1 and total > 1:
            from multiprocessing import get_context

            nchunks = min(threads, total)
            bounds = [total * i // nchunks for i in range(nchunks + 1)]
            args = [
                (data, wnum, wden, bounds[i], bounds[i + 1], points_per_round)
                for i in range(nchunks)
            ]
            with get_context("fork").Pool(threads) as workers:
                return _merge_candidates(workers.starmap(_price_range, args), points_per_round)
        return _price_range(data, wnum, wden, 0, total, points_per_round)

    for rounds in range(1, max_rounds + 1):
        if pool:
            tau, weights = _hull_master([p.rates for p in pool], n)
        wden = math.lcm(*(w.denominator for w in weights))
        wnum = np.array([int(w * wden) for w in weights], dtype=np.int64)
        cands = price_all(wnum, wden)
        best_value = cands[0][0]
        upper = min(upper, best_value)
        if trace is not None:
            trace(rounds, tau, best_value)
        if best_value <= tau:
            converged = True
            break
        added = False
        for value, idx, rates, alloc in cands:
            if value > tau and rates not in pool_keys:
                allocation = {frozenset(_members(p)): v for p, v in alloc.items()}
                pool.append(HullPoint(rates, _choice_at(data, idx), allocation))
                pool_keys.add(rates)
                added = True
        if not added:
            raise AssertionError("an improving point must be new to the pool")

    value, mixture_weights = _hull_mixture([p.rates for p in pool], n)
    mixture = tuple((mu, pt) for mu, pt in zip(mixture_weights, pool) if mu)

    # Exact re-check of the achievability certificate.
    if sum((mu for mu, _ in mixture), Fraction(0)) != 1:
        raise AssertionError("mixture weights must sum to one")
    for mu, pt in mixture:
        if mu < 0 or not check_rate_point(inst, pt.choice, pt.rates, pt.allocation):
            raise AssertionError("mixture point failed the certificate re-check")
    for i in range(n):
        if sum((mu * pt.rates[i] for mu, pt in mixture), Fraction(0)) < value:
            raise AssertionError("mixture does not cover the reported symmetric value")

    return HullResult(
        symmetric_rate=value / c,
        upper_bound=upper / c,
        converged=converged,
        mixture=mixture,
        weights=weights,
        channel_bits=c,
        rounds=rounds,
    )


def max_weighted_rate(
    inst: IndexCodingInstance,
    weights: Mapping[int, RationalLike],
    per_user_cap: int | None = None,
    max_choices: int = 1 << 24,
) -> WeightedResult:
    """Best weighted rate sum over every decoding choice.

    The per-choice regions are polyhedra whose union is generally not
    convex; a linear functional still attains its supremum over the
    union at one of the per-choice optima, so each choice is solved
    separately and the best kept.  Values are in bits.
    """
    _require_valid(inst)
    best: WeightedResult | None = None
    for choice in enumerate_decoding_choices(inst, per_user_cap, max_choices):
        lp = build_composite_lp(inst, choice, weights=weights)
        sol = solve_lp(lp, verify=False)
        if sol.status != OPTIMAL:
            raise AssertionError("composite LP is feasible and bounded by construction")
        if best is None or sol.optimum > best.value:
            rates = {i: sol.assignment[f"R_{i}"] for i in inst.message_ids()}
            alloc = {
                frozenset(_members(p)): sol.assignment[_var_name(_members(p))]
                for p in range(1, 1 << inst.num_messages)
                if sol.assignment[_var_name(_members(p))]
            }
            best = WeightedResult(sol.optimum, choice, rates, alloc)
    assert best is not None
    return best
