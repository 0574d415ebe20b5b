"""Command-line front end: every computation with reproducible output.

Exit codes: 0 success, 1 computation-reported failure (a FAIL verdict,
decode failure, infeasible query), 2 usage error.  Every rational is
printed as num/den followed by a 6-place decimal annotation, so output
is both exact and human-readable.  Instances and schemes are read from
files in the plain-text formats of parse_instance/parse_scheme; where a
path does not exist, the name (minus a .ic/.sch suffix) is looked up as
a builtin.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path

from . import caching
from .caching import (
    DecodeFailure,
    DomainError,
    EmptyDemand,
    Indivisible,
    deliver,
    decode_all_users,
    dman_deliver,
    dman_place,
    cman_place,
    formula_loads,
    load_csv_row,
    r_d_opt,
    random_library,
    reduce_to_index_coding,
    synthesize_delivery_scheme,
    transcript_log,
    verify_delivery_scheme,
)
from .composite import (
    SearchSpaceOverflow,
    max_symmetric_rate,
    max_weighted_rate,
    time_shared_symmetric_rate,
)
from .instance import (
    IndexCodingInstance,
    UnknownName,
    builtin_instance,
    format_instance,
    parse_instance,
    validate_instance,
)
from .outer import acyclic_symmetric_bound
from .schemes import (
    EnumerationTooLarge,
    builtin_scheme,
    check_scheme,
    format_scheme,
    parse_scheme,
    zero_error_decode_check,
)


@dataclass(frozen=True)
class RunConfig:
    """One parsed invocation: a single subcommand plus its options."""

    subcommand: str
    output_format: str
    options: argparse.Namespace


class _Failure(Exception):
    """Computation-reported failure: message printed, exit status 1."""


def _frac(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator} ({float(q):.6f})"


def _load_instance(arg: str) -> IndexCodingInstance:
    path = Path(arg)
    if path.exists():
        try:
            inst = parse_instance(path.read_text())
        except ValueError as e:
            raise _Failure(f"cannot parse instance file {arg}: {e}")
        print(f"instance: {arg}")
        return inst
    name = arg[:-3] if arg.endswith(".ic") else arg
    try:
        inst = builtin_instance(name)
    except UnknownName:
        raise _Failure(f"no such file and no builtin instance named {name!r}: {arg}")
    print(f"instance: builtin {name}")
    return inst


def _load_scheme(arg: str):
    path = Path(arg)
    if path.exists():
        try:
            scheme = parse_scheme(path.read_text())
        except ValueError as e:
            raise _Failure(f"cannot parse scheme file {arg}: {e}")
        print(f"scheme: {arg}")
        return scheme
    name = arg[:-4] if arg.endswith(".sch") else arg
    try:
        scheme = builtin_scheme(name)
    except UnknownName:
        raise _Failure(f"no such file and no builtin scheme named {name!r}: {arg}")
    print(f"scheme: builtin {name}")
    return scheme


def _parse_demands(text: str, K: int) -> tuple[int, ...]:
    try:
        d = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise _Failure(f"demands must be comma-separated integers, got {text!r}")
    if len(d) != K:
        raise _Failure(f"expected {K} demands, got {len(d)}")
    return d


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise _Failure(f"not a rational number: {text!r}")


def _cmd_validate(cfg: RunConfig) -> int:
    inst = _load_instance(cfg.options.instance)
    problems = validate_instance(inst)
    if problems:
        for p in problems:
            print(f"problem: {p}")
        return 1
    print(
        f"ok: {inst.num_messages} messages, {len(inst.users)} users, "
        f"{inst.channel_bits} channel bits"
    )
    return 0


def _cmd_composite_rate(cfg: RunConfig) -> int:
    opts = cfg.options
    inst = _load_instance(opts.instance)
    if opts.weights is not None:
        weights = [_parse_fraction(t) for t in opts.weights.split(",")]
        if len(weights) != inst.num_messages:
            raise _Failure(f"expected {inst.num_messages} weights, got {len(weights)}")
        res = max_weighted_rate(
            inst, dict(enumerate(weights, start=1)), per_user_cap=opts.cap
        )
        print(f"weighted value {_frac(res.value)}  [bits]")
        for i in sorted(res.rates):
            print(f"R_{i} = {_frac(res.rates[i])}")
        sets = ", ".join("{" + ",".join(map(str, sorted(s))) + "}" for s in res.best_choice.sets)
        print(f"choice: {sets}")
        return 0
    if opts.pure:
        res = max_symmetric_rate(
            inst, per_user_cap=opts.cap, threads=opts.threads
        )
        print(f"rate {_frac(res.symmetric_rate)}  [per channel bit]")
        sets = ", ".join("{" + ",".join(map(str, sorted(s))) + "}" for s in res.best_choice.sets)
        print(f"choice: {sets}")
        return 0
    res = time_shared_symmetric_rate(inst, per_user_cap=opts.cap, threads=opts.threads)
    print(f"rate {_frac(res.symmetric_rate)}  [per channel bit, time-shared]")
    print(
        f"upper bound {_frac(res.upper_bound)}  converged {res.converged}  "
        f"rounds {res.rounds}  mixture size {len(res.mixture)}"
    )
    if not res.converged:
        print("bounds did not meet within the round limit")
        return 1
    return 0


def _cmd_linear_check(cfg: RunConfig) -> int:
    inst = _load_instance(cfg.options.instance)
    scheme = _load_scheme(cfg.options.scheme)
    verdict = check_scheme(inst, scheme)
    for j, used in enumerate(verdict.channel_use, start=1):
        macs = verdict.mac[j - 1]
        bad = [J for J, (_, ok) in macs.items() if not ok]
        status = "ok" if used <= scheme.channel_bits and not bad else "FAIL"
        print(f"user {j}: channel use {used}/{scheme.channel_bits}, {len(macs)} joint-decoding checks: {status}")
    print(f"symmetric rate {_frac(verdict.symmetric_rate)}  [per channel bit]")
    print("PASS" if verdict.passed else "FAIL")
    return 0 if verdict.passed else 1


def _cmd_zero_error(cfg: RunConfig) -> int:
    inst = _load_instance(cfg.options.instance)
    scheme = _load_scheme(cfg.options.scheme)
    per_user = zero_error_decode_check(inst, scheme, mode=cfg.options.mode)
    for j, ok in enumerate(per_user, start=1):
        print(f"user {j}: {'decodes' if ok else 'FAILS to decode'}")
    print("PASS" if all(per_user) else "FAIL")
    return 0 if all(per_user) else 1


def _cmd_mais(cfg: RunConfig) -> int:
    inst = _load_instance(cfg.options.instance)
    res = acyclic_symmetric_bound(inst)
    witness = ",".join(map(str, sorted(res.witness)))
    print(f"max acyclic induced subgraph size {res.mais_size}  witness {{{witness}}}")
    print(f"symmetric rate upper bound {_frac(res.symmetric_upper)}  [per channel bit]")
    return 0


def _cmd_sandwich(cfg: RunConfig) -> int:
    opts = cfg.options
    inst = _load_instance(opts.instance)
    rows: list[tuple[str, str]] = []
    hull = time_shared_symmetric_rate(inst, threads=opts.threads)
    rows.append(("composite inner bound (time-shared)", _frac(hull.symmetric_rate)))
    failed = False
    if opts.scheme:
        scheme = _load_scheme(opts.scheme)
        verdict = check_scheme(inst, scheme)
        zero = all(zero_error_decode_check(inst, scheme, mode="algebraic"))
        tag = "PASS" if verdict.passed and zero else "FAIL"
        rows.append((f"linear scheme ({tag})", _frac(verdict.symmetric_rate)))
        failed = failed or tag == "FAIL"
    outer = acyclic_symmetric_bound(inst)
    rows.append((f"acyclic outer bound (size {outer.mais_size})", _frac(outer.symmetric_upper)))
    if cfg.output_format == "csv":
        for name, value in rows:
            print(f"{name.replace(',', ';')},{value.split(' ')[0]}")
    else:
        width = max(len(name) for name, _ in rows)
        for name, value in rows:
            print(f"{name:<{width}}  {value}")
    return 1 if failed else 0


def _simulate_centralized(cfg: RunConfig) -> int:
    opts = cfg.options
    K, N, t, B = opts.K, opts.N, opts.t, opts.B
    if t is None:
        raise _Failure("centralized simulation requires --t")
    lib = random_library(N, B, seed=opts.seed)
    cache, sub = cman_place(K, t, lib)
    d = _parse_demands(opts.demands, K)
    tr = deliver(sub, d, mode=opts.mode)
    decoded = decode_all_users(cache, tr, d)
    wrong = [k for k in range(1, K + 1) if decoded[k - 1] != lib.files[d[k - 1] - 1]]
    if wrong:
        raise _Failure(f"users {wrong} decoded the wrong bits")
    if opts.transcript:
        print(transcript_log(tr))
    if cfg.output_format == "csv":
        print(load_csv_row(K, N, t, d, opts.mode, tr.load))
    else:
        print(f"payloads {len(tr.payloads)}  total bits {tr.total_bits}")
        print(f"load {_frac(tr.load)}  [channel bits per file]")
        print(f"all {K} users decoded bit-exactly")
    return 0


def _simulate_decentralized(cfg: RunConfig) -> int:
    opts = cfg.options
    K, N, B = opts.K, opts.N, opts.B
    if opts.M is None:
        raise _Failure("decentralized simulation requires --M")
    M = _parse_fraction(opts.M)
    lib = random_library(N, B, seed=opts.seed)
    d = _parse_demands(opts.demands, K)
    loads: list[Fraction] = []
    for trial in range(opts.trials):
        cache, sub = dman_place(K, M, lib, seed=opts.seed + trial)
        tr = dman_deliver(sub, d)
        decoded = decode_all_users(cache, tr, d)
        wrong = [k for k in range(1, K + 1) if decoded[k - 1] != lib.files[d[k - 1] - 1]]
        if wrong:
            raise _Failure(f"seed {opts.seed + trial}: users {wrong} decoded the wrong bits")
        loads.append(tr.load)
        if cfg.output_format == "csv":
            print(load_csv_row(K, N, f"seed{opts.seed + trial}", d, "decentralized", tr.load))
        else:
            print(f"seed {opts.seed + trial}: load {_frac(tr.load)}")
    mean = sum(loads, Fraction(0)) / len(loads)
    reference = r_d_opt(K, N, M)
    if cfg.output_format != "csv":
        print(f"mean load {_frac(mean)}  over {opts.trials} seed(s)")
        print(f"reference  {_frac(reference)}  [asymptotic formula]")
        print(f"all {K} users decoded bit-exactly in every trial")
    return 0


def _cmd_cache_sim(cfg: RunConfig) -> int:
    if cfg.options.decentralized:
        return _simulate_decentralized(cfg)
    return _simulate_centralized(cfg)


def _cmd_cache_formulas(cfg: RunConfig) -> int:
    value = formula_loads(cfg.options.query)
    print(f"{cfg.options.query.strip()} = {_frac(value)}")
    return 0


def _cmd_cache_reduce(cfg: RunConfig) -> int:
    opts = cfg.options
    K, N, t = opts.K, opts.N, opts.t
    if t is None:
        raise _Failure("reduction requires --t")
    d = _parse_demands(opts.demands, K)
    lib = random_library(N, comb(K, t), seed=opts.seed)
    _, sub = cman_place(K, t, lib)
    c = comb(K, t + 1) - comb(K - len(set(d)), t + 1)
    inst, labels = reduce_to_index_coding(sub, d, channel_bits=max(c, 1))
    text = format_instance(inst)
    if opts.out:
        Path(opts.out).write_text(text)
        print(f"wrote instance to {opts.out}")
    else:
        sys.stdout.write(text)
    for mid in sorted(labels.by_id):
        file, W = labels.by_id[mid]
        print(f"# message {mid} = subfile file={file} cached_by={{{','.join(map(str, sorted(W)))}}}")
    if labels.dropped_users:
        print(f"# dropped users (demand fully cached): {sorted(labels.dropped_users)}")
    print(f"# user map: {', '.join(f'{j}->{k}' for j, k in enumerate(labels.users, start=1))}")
    return 0


def _cmd_cache_synthesize(cfg: RunConfig) -> int:
    opts = cfg.options
    K, N, t = opts.K, opts.N, opts.t
    if t is None:
        raise _Failure("synthesis requires --t")
    d = _parse_demands(opts.demands, K)
    inst, scheme, choice = synthesize_delivery_scheme(K, N, t, d, k_bits=opts.k_bits)
    report = verify_delivery_scheme(K, N, t, d, k_bits=opts.k_bits)
    if opts.out_instance:
        Path(opts.out_instance).write_text(format_instance(inst))
        print(f"wrote instance to {opts.out_instance}")
    if opts.out_scheme:
        Path(opts.out_scheme).write_text(format_scheme(scheme))
        print(f"wrote scheme to {opts.out_scheme}")
    print(f"messages {inst.num_messages}  channel bits {inst.channel_bits}")
    print(f"load {_frac(report.load)}  [channel bits per file]")
    if report.expected_load is not None:
        print(f"closed form {_frac(report.expected_load)}")
    print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icl",
        description="Index coding bounds and bit-exact coded caching simulation.",
    )
    parser.add_argument(
        "--format",
        choices=("table", "csv"),
        default="table",
        help="output format for tabular results",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("validate", help="check an instance file for well-formedness")
    p.add_argument("--instance", required=True)

    p = sub.add_parser("composite-rate", help="composite-coding inner bound")
    p.add_argument("--instance", required=True)
    p.add_argument("--cap", type=int, default=None, help="cap on extra jointly-decoded messages per user")
    p.add_argument("--weights", default=None, help="comma-separated rationals: maximize the weighted rate sum")
    p.add_argument("--pure", action="store_true", help="single-configuration optimum (no time sharing)")
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("linear-check", help="certify a GF(2) linear scheme")
    p.add_argument("--instance", required=True)
    p.add_argument("--scheme", required=True)

    p = sub.add_parser("zero-error", help="per-user exact decodability of a scheme")
    p.add_argument("--instance", required=True)
    p.add_argument("--scheme", required=True)
    p.add_argument("--mode", choices=("algebraic", "enumerate"), default="algebraic")

    p = sub.add_parser("mais", help="acyclic outer bound")
    p.add_argument("--instance", required=True)

    p = sub.add_parser("sandwich", help="inner and outer bounds side by side")
    p.add_argument("--instance", required=True)
    p.add_argument("--scheme", default=None, help="optional scheme for the achievability row")
    p.add_argument("--threads", type=int, default=1)

    cache = sub.add_parser("cache", help="coded caching simulation and analysis")
    csub = cache.add_subparsers(dest="cache_command", required=True)

    p = csub.add_parser("sim", help="place, deliver, and decode bit-exactly")
    p.add_argument("--K", type=int, required=True, help="number of users")
    p.add_argument("--N", type=int, required=True, help="number of files")
    p.add_argument("--t", type=int, default=None, help="centralized placement parameter")
    p.add_argument("--demands", required=True, help="comma-separated file ids, one per user")
    p.add_argument("--B", type=int, required=True, help="file size in bits")
    p.add_argument("--mode", choices=("full", "reduced"), default="full")
    p.add_argument("--decentralized", action="store_true")
    p.add_argument("--M", default=None, help="cache size in files (rational), decentralized only")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--transcript", action="store_true", help="print the payload log")

    p = csub.add_parser("formulas", help="closed-form load queries")
    p.add_argument("--query", required=True, help='e.g. "r_cman(4,2)" or "r_d_opt(3,3,1/2)"')

    p = csub.add_parser("reduce", help="emit the delivery phase as an index coding instance")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--demands", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="instance file to write (default stdout)")

    p = csub.add_parser("synthesize", help="build and certify the reduced delivery as a linear index code")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--demands", required=True)
    p.add_argument("--k-bits", type=int, default=1, dest="k_bits")
    p.add_argument("--out-instance", default=None, dest="out_instance")
    p.add_argument("--out-scheme", default=None, dest="out_scheme")

    return parser


_DISPATCH = {
    "validate": _cmd_validate,
    "composite-rate": _cmd_composite_rate,
    "linear-check": _cmd_linear_check,
    "zero-error": _cmd_zero_error,
    "mais": _cmd_mais,
    "sandwich": _cmd_sandwich,
    ("cache", "sim"): _cmd_cache_sim,
    ("cache", "formulas"): _cmd_cache_formulas,
    ("cache", "reduce"): _cmd_cache_reduce,
    ("cache", "synthesize"): _cmd_cache_synthesize,
}


def run(config: RunConfig) -> int:
    """Dispatch one parsed invocation; returns the exit status."""
    key = config.subcommand
    if key == "cache":
        key = ("cache", config.options.cache_command)
    handler = _DISPATCH[key]
    try:
        return handler(config)
    except _Failure as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (
        DomainError,
        Indivisible,
        DecodeFailure,
        EmptyDemand,
        EnumerationTooLarge,
        SearchSpaceOverflow,
        ValueError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(args.subcommand, args.format, args)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
