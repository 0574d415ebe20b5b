"""Bit-exact coded caching: placement, delivery, decoding, loads.

A server holds N files of B bits each; K users each cache up to M files
worth of bits, placed without knowing the demands.  Placement is
uncoded, so the cache state is described by subfiles F_{i,W}: the bits
of file i held exactly by the users in W.  After demands d_1..d_K are
revealed, the server broadcasts XOR payloads; each user recovers its
demanded file from the payloads plus its cache by solving a GF(2)
linear system over subfile symbols.  Everything is bit-exact: payloads
are computed by integer XOR, loads are exact fractions of B, and the
closed-form load formulas are evaluated in rational arithmetic.

Subfile bit values are packed integers, bit j of the value being the
file bit at the j-th position of the subfile's position array (both
little-endian).  The delivery phase for a fixed placement and demand
vector is itself an index coding problem; reduce_to_index_coding
materializes it, and synthesize_delivery_scheme turns the reduced
payload set into a certified GF(2) linear index code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Iterable, Iterator, Mapping

import numpy as np

from .composite import DecodingChoice
from .gf2 import Gf2Matrix
from .instance import IndexCodingInstance, UserSpec
from .schemes import LinearScheme, check_scheme, zero_error_decode_check


class Indivisible(Exception):
    """The file size does not split into the required equal subfiles."""


class DomainError(Exception):
    """An argument is outside the formula's or operation's domain."""


class EmptyDemand(Exception):
    """Every user fully caches its own demand; no delivery problem remains."""


class DecodeFailure(Exception):
    """A user's linear system does not determine its demanded file."""

    def __init__(self, user: int, detail: str = ""):
        self.user = user
        suffix = f": {detail}" if detail else ""
        super().__init__(f"user {user} cannot decode its demanded file{suffix}")


SubfileKey = tuple[int, frozenset[int]]   # (file id, cached-by user set)


def _pack_bits(bits: np.ndarray) -> int:
    """Little-endian: bit j of the result is bits[j]."""
    if bits.size == 0:
        return 0
    raw = np.packbits(bits.astype(np.uint8, copy=False), bitorder="little")
    return int.from_bytes(raw.tobytes(), "little")


def _unpack_bits(value: int, length: int) -> np.ndarray:
    if length == 0:
        return np.zeros(0, dtype=np.uint8)
    raw = value.to_bytes((length + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little", count=length)


@dataclass(frozen=True)
class FileLibrary:
    """N files of exactly file_bits bits each, as packed integers."""

    files: tuple[int, ...]
    file_bits: int

    def __post_init__(self) -> None:
        if self.file_bits < 1 or not self.files:
            raise ValueError("need at least one file of at least one bit")
        if any(not 0 <= f < 1 << self.file_bits for f in self.files):
            raise ValueError("file value exceeds the declared bit length")

    @property
    def num_files(self) -> int:
        return len(self.files)


def random_library(num_files: int, file_bits: int, seed: int) -> FileLibrary:
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(num_files, file_bits), dtype=np.uint8)
    return FileLibrary(tuple(_pack_bits(row) for row in bits), file_bits)


@dataclass(frozen=True, eq=False)
class SubfileMap:
    """Partition of every file's bit positions by exact cached-by set.

    positions[(i, W)] lists file i's bit positions held exactly by the
    users in W; values[(i, W)] packs those bits.  Subfiles with no bits
    do not appear.  placement_t is the centralized parameter (None for
    decentralized placement, which records its seed instead).
    """

    num_users: int
    num_files: int
    file_bits: int
    positions: dict[SubfileKey, np.ndarray]
    values: dict[SubfileKey, int]
    placement_t: int | None = None
    seed: int | None = None

    def length(self, key: SubfileKey) -> int:
        pos = self.positions.get(key)
        return 0 if pos is None else len(pos)


@dataclass(frozen=True, eq=False)
class CacheState:
    """Per-user cache contents plus the public subfile layout.

    contents[k-1] maps each subfile key with k in W to its bit value;
    layout is position metadata only (no uncached values), so decoding
    from a CacheState can never peek at bits the user does not hold.
    """

    num_users: int
    cache_files: Fraction
    placement: str
    layout: dict[SubfileKey, np.ndarray]
    contents: tuple[dict[SubfileKey, int], ...]


@dataclass(frozen=True)
class Payload:
    """One broadcast XOR: bits over the users in S, zero-padded to nbits."""

    users: frozenset[int]
    bits: int
    nbits: int


@dataclass(frozen=True)
class DeliveryTranscript:
    payloads: tuple[Payload, ...]
    file_bits: int
    total_bits: int
    load: Fraction
    mode: str


def _check_demand(d: tuple[int, ...] | list[int], num_users: int, num_files: int) -> None:
    if len(d) != num_users:
        raise ValueError(f"demand vector names {len(d)} users, expected {num_users}")
    if any(not 1 <= di <= num_files for di in d):
        raise ValueError("demanded file id out of range")


def leaders(d: Iterable[int]) -> frozenset[int]:
    """Lowest-indexed user per distinct demanded file."""
    first: dict[int, int] = {}
    for k, di in enumerate(tuple(d), start=1):
        first.setdefault(di, k)
    return frozenset(first.values())


def distinct_demanded(d: Iterable[int]) -> frozenset[int]:
    return frozenset(d)


def cman_place(num_users: int, t: int, library: FileLibrary) -> tuple[CacheState, SubfileMap]:
    """Centralized placement: split each file into binom(K,t) equal
    subfiles indexed by the t-subsets of users, each user caching every
    subfile whose index set contains it.  Cache occupancy is exactly
    t*N/K files per user.
    """
    K = num_users
    if K < 1:
        raise ValueError("need at least one user")
    if not 0 <= t <= K:
        raise DomainError(f"t must lie in [0..{K}], got {t}")
    n_sub = comb(K, t)
    B = library.file_bits
    if B % n_sub:
        raise Indivisible(f"binom({K},{t}) = {n_sub} does not divide B = {B}")
    chunk = B // n_sub
    groups = [frozenset(W) for W in combinations(range(1, K + 1), t)]
    positions: dict[SubfileKey, np.ndarray] = {}
    values: dict[SubfileKey, int] = {}
    for i, packed in enumerate(library.files, start=1):
        fb = _unpack_bits(packed, B)
        for gi, W in enumerate(groups):
            pos = np.arange(gi * chunk, (gi + 1) * chunk)
            key = (i, W)
            positions[key] = pos
            values[key] = _pack_bits(fb[pos])
    contents = tuple(
        {key: values[key] for key in positions if k in key[1]} for k in range(1, K + 1)
    )
    cache = CacheState(
        num_users=K,
        cache_files=Fraction(t * library.num_files, K),
        placement=f"centralized(t={t})",
        layout=positions,
        contents=contents,
    )
    subfiles = SubfileMap(K, library.num_files, B, positions, values, placement_t=t)
    return cache, subfiles


def dman_place(
    num_users: int,
    cache_files: Fraction | int,
    library: FileLibrary,
    seed: int,
) -> tuple[CacheState, SubfileMap]:
    """Decentralized placement: each user caches each file bit
    independently with probability exactly M/N, drawn from the seeded
    generator (users outer, files inner), then bits are grouped into
    subfiles by their exact cached-by set.  Reproducible given the seed.
    """
    K = num_users
    N = library.num_files
    B = library.file_bits
    M = Fraction(cache_files)
    if K < 1:
        raise ValueError("need at least one user")
    if not 0 < M < N:
        raise DomainError(f"cache size must satisfy 0 < M < N, got M={M}, N={N}")
    p = M / N
    rng = np.random.default_rng(seed)
    # cached[k-1][i-1] is a boolean row over file i's bit positions.
    cached = [
        [rng.integers(0, p.denominator, size=B) < p.numerator for _ in range(N)]
        for _ in range(K)
    ]
    positions: dict[SubfileKey, np.ndarray] = {}
    values: dict[SubfileKey, int] = {}
    for i, packed in enumerate(library.files, start=1):
        fb = _unpack_bits(packed, B)
        code = np.zeros(B, dtype=np.int64)
        for k in range(1, K + 1):
            code |= cached[k - 1][i - 1].astype(np.int64) << (k - 1)
        for w in np.unique(code):
            pos = np.nonzero(code == w)[0]
            W = frozenset(k for k in range(1, K + 1) if int(w) >> (k - 1) & 1)
            key = (i, W)
            positions[key] = pos
            values[key] = _pack_bits(fb[pos])
    contents = tuple(
        {key: values[key] for key in positions if k in key[1]} for k in range(1, K + 1)
    )
    cache = CacheState(
        num_users=K,
        cache_files=M,
        placement=f"decentralized(seed={seed})",
        layout=positions,
        contents=contents,
    )
    subfiles = SubfileMap(K, N, B, positions, values, placement_t=None, seed=seed)
    return cache, subfiles


def _group_payloads(
    subfiles: SubfileMap,
    d: tuple[int, ...],
    t: int,
    lead: frozenset[int] | None,
) -> list[Payload]:
    """XOR payloads for the size-(t+1) user subsets, lexicographically.

    lead=None keeps every subset; otherwise only subsets meeting the
    leader set.  Members missing from the subfile map contribute
    nothing; shorter members are zero-padded to the longest, which for
    integer XOR needs no explicit padding.  Payloads with no bits are
    dropped.
    """
    K = subfiles.num_users
    payloads: list[Payload] = []
    for S in combinations(range(1, K + 1), t + 1):
        if lead is not None and lead.isdisjoint(S):
            continue
        bits = 0
        nbits = 0
        for s in S:
            key = (d[s - 1], frozenset(S) - {s})
            val = subfiles.values.get(key)
            if val is None:
                continue
            bits ^= val
            nbits = max(nbits, len(subfiles.positions[key]))
        if nbits:
            payloads.append(Payload(frozenset(S), bits, nbits))
    return payloads


def deliver(subfiles: SubfileMap, d: Iterable[int], mode: str = "full") -> DeliveryTranscript:
    """Centralized delivery: one XOR payload per (t+1)-subset of users.

    full mode sends all of them; reduced mode keeps only subsets that
    meet the leader set (lowest-indexed user per distinct demanded
    file), which removes exactly the payloads reconstructible from the
    rest.
    """
    if subfiles.placement_t is None:
        raise DomainError("deliver requires centralized placement; see dman_deliver")
    if mode not in ("full", "reduced"):
        raise ValueError(f"mode must be 'full' or 'reduced', got {mode!r}")
    d = tuple(d)
    _check_demand(d, subfiles.num_users, subfiles.num_files)
    lead = leaders(d) if mode == "reduced" else None
    payloads = _group_payloads(subfiles, d, subfiles.placement_t, lead)
    total = sum(p.nbits for p in payloads)
    return DeliveryTranscript(
        tuple(payloads), subfiles.file_bits, total, Fraction(total, subfiles.file_bits), mode
    )


def dman_deliver(subfiles: SubfileMap, d: Iterable[int]) -> DeliveryTranscript:
    """Decentralized delivery: for each t, the subfiles cached by
    exactly t users form a group delivered in reduced mode, zero-padding
    subfiles within each XOR to the longest member.
    """
    if subfiles.placement_t is not None:
        raise DomainError("dman_deliver requires decentralized placement; see deliver")
    d = tuple(d)
    _check_demand(d, subfiles.num_users, subfiles.num_files)
    lead = leaders(d)
    payloads: list[Payload] = []
    for t in range(subfiles.num_users):
        payloads.extend(_group_payloads(subfiles, d, t, lead))
    total = sum(p.nbits for p in payloads)
    return DeliveryTranscript(
        tuple(payloads), subfiles.file_bits, total, Fraction(total, subfiles.file_bits), "decentralized"
    )


def decode_all_users(
    cache: CacheState,
    transcript: DeliveryTranscript,
    d: Iterable[int],
) -> list[int]:
    """Recover every user's demanded file, bit-exactly, or raise.

    Each user turns every payload into a GF(2) equation over its
    unknown (uncached) subfile symbols by XORing out the cached
    members, then eliminates.  Symbols of different lengths are handled
    by splitting the bit range at every distinct length and solving
    each slice, which is exactly the bit-level system at symbol-level
    cost.  Raises DecodeFailure naming the first user whose demanded
    file is not fully determined.
    """
    d = tuple(d)
    K = cache.num_users
    if len(d) != K:
        raise ValueError(f"demand vector names {len(d)} users, expected {K}")
    layout = cache.layout
    B = transcript.file_bits
    out: list[int] = []
    for k in range(1, K + 1):
        if not any(key[0] == d[k - 1] for key in layout):
            raise ValueError(f"user {k} demands unknown file {d[k - 1]}")
        cached = cache.contents[k - 1]
        # Payload -> equation: mask over unknown symbols, rhs, width.
        eqs: list[tuple[list[SubfileKey], int, int]] = []
        for pl in transcript.payloads:
            rhs = pl.bits
            unknown: list[SubfileKey] = []
            for s in sorted(pl.users):
                key = (d[s - 1], pl.users - {s})
                pos = layout.get(key)
                if pos is None or len(pos) == 0:
                    continue
                if key in cached:
                    rhs ^= cached[key]
                else:
                    unknown.append(key)
            eqs.append((unknown, rhs, pl.nbits))
        symbols = sorted(
            {key for unk, _, _ in eqs for key in unk},
            key=lambda key: (key[0], len(key[1]), tuple(sorted(key[1]))),
        )
        index = {key: i for i, key in enumerate(symbols)}
        lens = {key: len(layout[key]) for key in symbols}
        eq_rows = [
            (sum(1 << index[u] for u in unk), rhs, nb) for unk, rhs, nb in eqs
        ]
        solved = {key: 0 for key in symbols}
        remaining = dict(lens)
        # Slice the bit range at every distinct symbol/payload length;
        # inside a slice every active symbol spans the full width.
        cuts = sorted({ln for ln in lens.values()} | {nb for _, _, nb in eq_rows})
        lo = 0
        for hi in cuts:
            span = hi - lo
            span_mask = (1 << span) - 1
            active = 0
            for i, key in enumerate(symbols):
                if lens[key] > lo:
                    active |= 1 << i
            pivots: dict[int, tuple[int, int]] = {}
            for mask, rhs, nb in eq_rows:
                if nb <= lo:
                    continue
                m = mask & active
                r = (rhs >> lo) & span_mask
                while m:
                    low = (m & -m).bit_length() - 1
                    if low in pivots:
                        pm, pr = pivots[low]
                        m ^= pm
                        r ^= pr
                    else:
                        pivots[low] = (m, r)
                        break
                if m == 0 and r:
                    raise DecodeFailure(k, "inconsistent payload equations")
            for low in sorted(pivots, reverse=True):
                pm, pr = pivots[low]
                for l2 in pivots:
                    if l2 < low and pivots[l2][0] >> low & 1:
                        m2, r2 = pivots[l2]
                        pivots[l2] = (m2 ^ pm, r2 ^ pr)
            for low, (m, r) in pivots.items():
                if m == 1 << low:
                    key = symbols[low]
                    solved[key] |= r << lo
                    remaining[key] -= span
            lo = hi
        fb = np.zeros(B, dtype=np.uint8)
        for key, pos in layout.items():
            if key[0] != d[k - 1]:
                continue
            if k in key[1]:
                val = cached[key]
            elif key in index and remaining[key] == 0:
                val = solved[key]
            else:
                raise DecodeFailure(k, f"subfile {key[0]},{sorted(key[1])} undetermined")
            fb[pos] = _unpack_bits(val, len(pos))
        out.append(_pack_bits(fb))
    return out


def _require_positive_int(name: str, value) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise DomainError(f"{name} must be a positive integer, got {value!r}")
    return value


def r_cman(K: int, t: int) -> Fraction:
    """Full-delivery load binom(K,t+1)/binom(K,t)."""
    _require_positive_int("K", K)
    if not isinstance(t, int) or not 0 <= t <= K:
        raise DomainError(f"t must lie in [0..{K}], got {t!r}")
    return Fraction(comb(K, t + 1), comb(K, t))


def r_c_opt(K: int, N: int, t: int) -> Fraction:
    """Reduced-delivery worst-case load
    (binom(K,t+1) - binom(K-min(N,K),t+1)) / binom(K,t)."""
    _require_positive_int("K", K)
    _require_positive_int("N", N)
    if not isinstance(t, int) or not 0 <= t <= K:
        raise DomainError(f"t must lie in [0..{K}], got {t!r}")
    return Fraction(comb(K, t + 1) - comb(K - min(N, K), t + 1), comb(K, t))


def r_c_opt_envelope(K: int, N: int, M) -> Fraction:
    """Memory sharing: lower convex envelope of the points
    (t*N/K, r_c_opt(K,N,t)) for t in [0..K], interpolated at M."""
    _require_positive_int("K", K)
    _require_positive_int("N", N)
    M = Fraction(M)
    if not 0 <= M <= N:
        raise DomainError(f"cache size must satisfy 0 <= M <= N, got {M}")
    pts = [(Fraction(t * N, K), r_c_opt(K, N, t)) for t in range(K + 1)]
    hull: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= M <= x2:
            return y1 + (y2 - y1) * (M - x1) / (x2 - x1)
    return hull[-1][1]


def r_dman(K: int, N: int, M) -> Fraction:
    """Decentralized full-group load (1-f)/f * (1 - (1-f)^K), f = M/N."""
    _require_positive_int("K", K)
    _require_positive_int("N", N)
    M = Fraction(M)
    if not 0 < M <= N:
        raise DomainError(f"cache size must satisfy 0 < M <= N, got {M}")
    f = M / N
    if f == 1:
        return Fraction(0)
    return (1 - f) / f * (1 - (1 - f) ** K)


def r_d_opt(K: int, N: int, M) -> Fraction:
    """Decentralized reduced load (1-f)/f * (1 - (1-f)^min(K,N))."""
    _require_positive_int("K", K)
    _require_positive_int("N", N)
    M = Fraction(M)
    if not 0 < M <= N:
        raise DomainError(f"cache size must satisfy 0 < M <= N, got {M}")
    f = M / N
    if f == 1:
        return Fraction(0)
    return (1 - f) / f * (1 - (1 - f) ** min(K, N))


_FORMULAS = {
    "r_cman": (r_cman, ("int", "int")),
    "r_c_opt": (r_c_opt, ("int", "int", "int")),
    "r_c_opt_envelope": (r_c_opt_envelope, ("int", "int", "frac")),
    "r_dman": (r_dman, ("int", "int", "frac")),
    "r_d_opt": (r_d_opt, ("int", "int", "frac")),
}


def formula_loads(query: str) -> Fraction:
    """Evaluate a closed-form load query like "r_cman(4,2)" exactly.

    Supported: r_cman(K,t), r_c_opt(K,N,t), r_c_opt_envelope(K,N,M),
    r_dman(K,N,M), r_d_opt(K,N,M); M may be an integer, a fraction like
    1/2, or a decimal like 0.75.  Raises DomainError on malformed
    queries and out-of-range arguments.
    """
    m = re.fullmatch(r"\s*([a-z_0-9]+)\s*\(([^()]*)\)\s*", query)
    if m is None:
        raise DomainError(f"malformed query {query!r}")
    name, argstr = m.group(1), m.group(2)
    if name not in _FORMULAS:
        raise DomainError(f"unknown formula {name!r}")
    func, kinds = _FORMULAS[name]
    parts = [a.strip() for a in argstr.split(",")] if argstr.strip() else []
    if len(parts) != len(kinds):
        raise DomainError(f"{name} takes {len(kinds)} arguments, got {len(parts)}")
    args = []
    for text, kind in zip(parts, kinds):
        try:
            args.append(int(text) if kind == "int" else Fraction(text))
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"bad argument {text!r} in {query!r}")
    return func(*args)


@dataclass(frozen=True)
class MessageLabels:
    """Ties reduced-instance ids back to the caching problem.

    by_id maps message id -> (file, W); users[j-1] is the original user
    index behind instance user j; dropped_users lists users removed
    because they fully cache their own demand.
    """

    by_id: dict[int, SubfileKey]
    users: tuple[int, ...]
    dropped_users: tuple[int, ...]


def _subfile_order(key: SubfileKey) -> tuple:
    return (key[0], len(key[1]), tuple(sorted(key[1])))


def reduce_to_index_coding(
    subfiles: SubfileMap,
    d: Iterable[int],
    channel_bits: int = 1,
) -> tuple[IndexCodingInstance, MessageLabels]:
    """The delivery phase as an index coding problem.

    One message per nonempty subfile of a demanded file; user k demands
    the subfiles of file d_k it does not cache and knows every demanded
    file's subfiles it does cache.  Users whose demand set would be
    empty are dropped and reported in the label map; messages no
    remaining user references are dropped as well.  Raises EmptyDemand
    if no user needs anything.
    """
    d = tuple(d)
    _check_demand(d, subfiles.num_users, subfiles.num_files)
    nd = set(d)
    all_keys = sorted((key for key in subfiles.positions if key[0] in nd), key=_subfile_order)
    kept_users: list[int] = []
    dropped: list[int] = []
    raw_specs: list[tuple[set[SubfileKey], set[SubfileKey]]] = []
    for k in range(1, subfiles.num_users + 1):
        demand = {key for key in all_keys if key[0] == d[k - 1] and k not in key[1]}
        knows = {key for key in all_keys if k in key[1]}
        if not demand:
            dropped.append(k)
            continue
        kept_users.append(k)
        raw_specs.append((demand, knows))
    if not raw_specs:
        raise EmptyDemand("every user already caches its demanded file")
    referenced = set()
    for demand, knows in raw_specs:
        referenced |= demand | knows
    keys = [key for key in all_keys if key in referenced]
    ids = {key: mid for mid, key in enumerate(keys, start=1)}
    specs = tuple(
        UserSpec(frozenset(ids[key] for key in demand), frozenset(ids[key] for key in knows))
        for demand, knows in raw_specs
    )
    inst = IndexCodingInstance(len(keys), specs, channel_bits)
    labels = MessageLabels(
        by_id={mid: key for key, mid in ids.items()},
        users=tuple(kept_users),
        dropped_users=tuple(dropped),
    )
    return inst, labels


def synthesize_delivery_scheme(
    K: int,
    N: int,
    t: int,
    d: Iterable[int],
    k_bits: int = 1,
) -> tuple[IndexCodingInstance, LinearScheme, DecodingChoice]:
    """Reduced centralized delivery as a certified linear index code.

    Builds the reduction instance for centralized placement with
    parameter t and demand d (every message carries k_bits bits), one
    XOR composite per reduced-mode payload, channel size
    c = k_bits * (binom(K,t+1) - binom(K-|N(d)|,t+1)), and the decoding
    choice K_j = D_j.  Raises DomainError for t = K, where nothing
    needs delivering.
    """
    _require_positive_int("K", K)
    _require_positive_int("N", N)
    _require_positive_int("k_bits", k_bits)
    d = tuple(d)
    _check_demand(d, K, N)
    if not isinstance(t, int) or not 0 <= t <= K:
        raise DomainError(f"t must lie in [0..{K}], got {t!r}")
    if t == K:
        raise DomainError("t = K leaves nothing to deliver; there is no scheme to build")
    nd = sorted(set(d))
    keys = [(i, frozenset(W)) for i in nd for W in combinations(range(1, K + 1), t)]
    ids = {key: mid for mid, key in enumerate(keys, start=1)}
    c = k_bits * (comb(K, t + 1) - comb(K - len(nd), t + 1))
    specs = tuple(
        UserSpec(
            frozenset(ids[key] for key in keys if key[0] == d[k - 1] and k not in key[1]),
            frozenset(ids[key] for key in keys if k in key[1]),
        )
        for k in range(1, K + 1)
    )
    inst = IndexCodingInstance(len(keys), specs, c)
    total = len(keys) * k_bits
    lead = leaders(d)
    composites: list[tuple[frozenset[int], Gf2Matrix]] = []
    for S in combinations(range(1, K + 1), t + 1):
        if lead.isdisjoint(S):
            continue
        members = [(d[s - 1], frozenset(S) - {s}) for s in S]
        P = frozenset(ids[mk] for mk in members)
        rows = []
        for r in range(k_bits):
            row = 0
            for mk in members:
                row |= 1 << ((ids[mk] - 1) * k_bits + r)
            rows.append(row)
        composites.append((P, Gf2Matrix(tuple(rows), total)))
    scheme = LinearScheme((k_bits,) * len(keys), c, tuple(composites))
    choice = DecodingChoice(tuple(spec.demands for spec in specs))
    return inst, scheme, choice


@dataclass(frozen=True)
class DeliveryVerification:
    """Certification outcome for one synthesized delivery scheme.

    load is channel bits per file (bits / (k_bits * binom(K,t)));
    expected_load is the closed form, set when |N(d)| = min(N,K);
    sum_rate_inverse is 1 / (symmetric rate * subfiles per file), which
    must reproduce the load.  Failures are data, not exceptions.
    """

    passed: bool
    scheme_passed: bool | None
    zero_error_passed: bool | None
    load: Fraction
    expected_load: Fraction | None
    sum_rate_inverse: Fraction | None
    note: str = ""


def verify_delivery_scheme(K: int, N: int, t: int, d: Iterable[int], k_bits: int = 1) -> DeliveryVerification:
    """Synthesize and fully certify the reduced delivery for (K,N,t,d)."""
    d = tuple(d)
    worst = len(set(d)) == min(N, K)
    expected = r_c_opt(K, N, t) if worst else None
    if t == K:
        return DeliveryVerification(
            passed=expected is None or expected == 0,
            scheme_passed=None,
            zero_error_passed=None,
            load=Fraction(0),
            expected_load=expected,
            sum_rate_inverse=None,
            note="empty delivery: every user caches the whole library",
        )
    inst, scheme, choice = synthesize_delivery_scheme(K, N, t, d, k_bits)
    verdict = check_scheme(inst, scheme, choice)
    zero = all(zero_error_decode_check(inst, scheme, mode="algebraic"))
    load = Fraction(scheme.channel_bits, k_bits * comb(K, t))
    inverse = Fraction(1) / (verdict.symmetric_rate * comb(K, t)) if load else None
    passed = (
        verdict.passed
        and zero
        and (expected is None or load == expected)
        and inverse == load
    )
    return DeliveryVerification(
        passed=passed,
        scheme_passed=verdict.passed,
        zero_error_passed=zero,
        load=load,
        expected_load=expected,
        sum_rate_inverse=inverse,
    )


def canonical_worst_demand(K: int, N: int) -> tuple[int, ...]:
    """A demand vector with |N(d)| = min(N,K): cycle through the files."""
    m = min(N, K)
    return tuple(i % m + 1 for i in range(K))


def iter_demands(K: int, N: int) -> Iterator[tuple[int, ...]]:
    """All N^K demand vectors, lexicographically."""
    return product(range(1, N + 1), repeat=K)


def transcript_log(transcript: DeliveryTranscript) -> str:
    """One line per payload: S={users} bits=<hex>, hex width from nbits."""
    lines = []
    for p in transcript.payloads:
        users = ",".join(str(u) for u in sorted(p.users))
        width = (p.nbits + 3) // 4
        lines.append("S={%s} bits=%0*x" % (users, width, p.bits))
    return "\n".join(lines)


def load_csv_row(K: int, N: int, t, d: Iterable[int], mode: str, load: Fraction) -> str:
    """CSV row `K,N,t,d,mode,load_num,load_den` with d dash-joined."""
    dstr = "-".join(str(x) for x in d)
    return f"{K},{N},{t},{dstr},{mode},{load.numerator},{load.denominator}"
