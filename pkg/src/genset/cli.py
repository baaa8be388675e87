"""Command-line interface: ``genset <command> ...``.

Exit codes: 0 ok/true, 1 verified false, 2 usage, 3 parse error, 4 capacity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from math import comb

from . import __version__, kernels
from .errors import (
    CapacityError,
    EmptyDomainError,
    FamilyParseError,
    InvalidArgument,
    NoGoodCliqueError,
)
from .kneser import (
    CHROMATIC_CAPACITY,
    COUNT_CAPACITY,
    all_clique_counts,
    chromatic_number,
    disjointness_graph,
    read_graph,
    turan_graph,
    write_graph,
)
from .sampling import (
    analytic_tail_bound,
    empirical_union_tail,
    estimate_blowup_density,
    estimate_odd_cycle_density,
    exact_blowup_density,
    exact_odd_cycle_density,
    exact_union_tail,
)
from .search import (
    counterexample_family,
    counterexample_size,
    min_generator_size,
    two_element_graph,
    verify_kneser_blowup,
    BLOWUP_CHECK_CAPACITY,
)
from .setfam import (
    MAX_COVERAGE_GROUND,
    balanced_partition,
    canonical_generator,
    canonical_size,
    counting_lower_bound,
    enumerate_k_base_unions,
    enumerate_k_unions,
    format_family,
    format_mask,
    read_family,
    write_family,
)
from .stability import (
    BIPARTIZATION_CAPACITY,
    bipartization_distance_exact,
    extract_k_partition,
    min_degree_prune_trace,
)

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_PARSE, EXIT_CAPACITY = 0, 1, 2, 3, 4
U64 = 2**64
# exact homomorphism oracles in `sample --exact` stay cheap below these sizes
EXACT_FAMILY_LIMIT = 64


class UsageError(Exception):
    pass


def load_schema(command: str) -> dict:
    """The shipped JSON schema for a command's JSON output."""
    text = resources.files("genset").joinpath("schemas", f"{command}.schema.json").read_text()
    return json.loads(text)


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < U64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _fmt(x: Fraction) -> str:
    return str(Fraction(x))


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("GENSET_THREADS")
    if env is None or env == "":
        return 1
    try:
        value = int(env)
    except ValueError:
        raise UsageError(f"GENSET_THREADS must be a positive integer, got {env!r}")
    if value < 1:
        raise UsageError(f"GENSET_THREADS must be a positive integer, got {env!r}")
    return value


def _config(args) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in ("func",):
            continue
        if isinstance(value, Fraction):
            value = _fmt(value)
        out[key] = value
    return out


# -- output --------------------------------------------------------------------------


def _text_lines(obj, prefix="") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for key, value in obj.items():
            name = f"{prefix}{key}"
            if isinstance(value, (dict, list)) and value and not _flat_list(value):
                lines.extend(_text_lines(value, name + "."))
            else:
                lines.append(f"{name}: {_scalar(value)}")
    elif isinstance(obj, list):
        for i, value in enumerate(obj):
            lines.extend(_text_lines(value, f"{prefix}{i}.") if isinstance(value, (dict, list))
                         else [f"{prefix}{i}: {_scalar(value)}"])
    return lines


def _flat_list(value) -> bool:
    return isinstance(value, list) and all(not isinstance(v, (dict, list)) for v in value)


def _scalar(value) -> str:
    if isinstance(value, str) and "\n" in value:
        return value.replace("\n", " | ").rstrip(" |")
    if isinstance(value, list):
        return " ".join(str(v) for v in value)
    return json.dumps(value) if value is None or isinstance(value, bool) else str(value)


def emit(args, payload: dict, table: list[dict] | None = None, stream=None) -> None:
    stream = stream or sys.stdout
    fmt = args.format
    if fmt == "json":
        stream.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif fmt == "text":
        stream.write("\n".join(_text_lines(payload)) + "\n")
    elif fmt == "csv":
        if table is None:
            raise UsageError(f"csv output is only available for flat tables, not for '{args.command}'")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(table[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(table)
        stream.write(buf.getvalue())


# -- commands --------------------------------------------------------------------------


def cmd_gen(args) -> int:
    part = balanced_partition(args.n, args.k)
    fam = canonical_generator(part)
    summary = {
        "command": "gen",
        "config": _config(args),
        "n": args.n,
        "k": args.k,
        "size": len(fam),
        "canonical_size": canonical_size(args.n, args.k),
        "partition": [list(b) for b in part.block_lists()],
        "output": args.output,
    }
    if args.output:
        write_family(fam, args.output)
        emit(args, summary)
    else:
        sys.stdout.write(format_family(fam))
        emit(args, summary, stream=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    fam = read_family(args.family)
    if fam.ground_n > MAX_COVERAGE_GROUND:
        raise CapacityError(f"coverage tables support n <= {MAX_COVERAGE_GROUND}")
    gen = enumerate_k_unions(fam, args.k)
    base = enumerate_k_base_unions(fam, args.k)
    gen_missing = gen.first_uncovered()
    base_missing = base.first_uncovered()
    n = fam.ground_n
    payload = {
        "command": "verify",
        "config": _config(args),
        "n": n,
        "k": args.k,
        "size": len(fam),
        "is_k_generator": gen.complete,
        "is_k_base": base.complete,
        "covered": gen.count,
        "base_covered": base.count,
        "total": 1 << n,
        "uncovered_witness": None if gen_missing is None else format_mask(gen_missing),
        "base_uncovered_witness": None if base_missing is None else format_mask(base_missing),
        "canonical_size": canonical_size(n, args.k) if 1 <= args.k <= n else None,
        "counting_lower_bound": counting_lower_bound(n, args.k) if 1 <= args.k <= n else None,
    }
    emit(args, payload)
    return EXIT_OK if gen.complete else EXIT_FALSE


def _stability_json(g, k) -> dict:
    try:
        return extract_k_partition(g, k).to_json()
    except NoGoodCliqueError as exc:
        return {"error": "no-good-clique", "message": str(exc), "alpha": _fmt(exc.alpha)}
    except EmptyDomainError as exc:
        return {"error": "empty-domain", "message": str(exc)}


def cmd_analyze(args) -> int:
    fam = read_family(args.family)
    if len(fam) > COUNT_CAPACITY:
        raise CapacityError(f"analysis supports families of at most {COUNT_CAPACITY} members, got {len(fam)}")
    g = disjointness_graph(fam)
    if args.emit_graph:
        write_graph(g, args.emit_graph)
    counts = all_clique_counts(g)
    rows = []
    for r in range(args.k + 2):
        count = counts[r] if r < len(counts) else 0
        density = Fraction(count, comb(g.order, r)) if r <= g.order else Fraction(0)
        rows.append({"r": r, "count": count, "density": _fmt(density)})
    payload = {
        "command": "analyze",
        "config": _config(args),
        "n": fam.ground_n,
        "size": len(fam),
        "order": g.order,
        "edges": g.edge_count,
        "cliques": rows,
        "chromatic_number": chromatic_number(g) if g.order <= CHROMATIC_CAPACITY else None,
        "bipartization_distance": (
            bipartization_distance_exact(g) if g.order <= BIPARTIZATION_CAPACITY else None
        ),
        "stability": _stability_json(g, args.k) if args.k >= 1 else None,
        "backend": kernels.BACKEND,
    }
    emit(args, payload, table=rows)
    return EXIT_OK


def _sample_family(args):
    if args.family:
        return read_family(args.family)
    return canonical_generator(balanced_partition(args.n, args.k))


def cmd_sample(args) -> int:
    fam = _sample_family(args)
    threads = args.threads
    exact = None
    extra = {}
    if args.kind == "blowup":
        est = estimate_blowup_density(fam, args.parts, args.t, args.trials, args.seed, threads)
        if args.exact and 0 not in fam and len(fam) <= EXACT_FAMILY_LIMIT:
            exact = exact_blowup_density(fam, args.parts, args.t)
    elif args.kind == "oddcycle":
        est = estimate_odd_cycle_density(fam, args.l, args.t, args.trials, args.seed, threads)
        if args.exact and 0 not in fam and len(fam) <= EXACT_FAMILY_LIMIT:
            exact = exact_odd_cycle_density(fam, args.l, args.t)
    else:
        est = empirical_union_tail(fam, args.t, args.theta, args.trials, args.seed, threads)
        bound = analytic_tail_bound(fam.ground_n, len(fam), args.t, args.theta)
        extra["analytic_bound"] = _fmt(bound)
        extra["analytic_bound_float"] = float(bound)
        extra["within_bound"] = est.mean - 4 * est.std_error <= float(bound)
        if args.exact:
            exact = exact_union_tail(fam, args.t, args.theta)
    estimate = est.to_json(exact)
    payload = {
        "command": "sample",
        "kind": args.kind,
        "config": _config(args),
        "family_size": len(fam),
        "n": fam.ground_n,
        **estimate,
        **extra,
    }
    row = {"kind": args.kind, **{k: estimate[k] for k in ("mean", "std_error", "trials", "seed", "successes")}}
    emit(args, payload, table=[row])
    return EXIT_OK


def cmd_search(args) -> int:
    res = min_generator_size(
        args.n,
        args.k,
        "base" if args.base else "generator",
        enumerate_optima=args.enumerate,
        budget_seconds=args.budget_seconds,
        node_cap=args.node_cap,
        optima_cap=args.optima_cap,
    )
    body = res.to_json()
    body.pop("elapsed_seconds")
    payload = {
        "command": "search",
        "config": _config(args),
        **body,
        "canonical_size": canonical_size(args.n, args.k),
        "counting_lower_bound": counting_lower_bound(args.n, args.k),
        "matches_canonical": res.min_size == canonical_size(args.n, args.k),
    }
    if args.output_dir:
        os.makedirs(args.output_dir, exist_ok=True)
        for i, fam in enumerate(res.optima):
            write_family(fam, os.path.join(args.output_dir, f"optimum_{i:04d}.txt"))
    emit(args, payload)
    return EXIT_OK


def cmd_counterexample(args) -> int:
    fam = counterexample_family(args.n)
    pairs = two_element_graph(fam)
    payload = {
        "command": "counterexample",
        "config": _config(args),
        "n": args.n,
        "size": len(fam),
        "size_closed_form": counterexample_size(args.n),
        "overlapping_count": 15 * 2 ** (args.n // 3),
        "two_element_members": pairs.order,
        "two_element_chromatic": chromatic_number(pairs) if pairs.order <= CHROMATIC_CAPACITY else None,
        "blowup": verify_kneser_blowup(args.n).to_json() if args.n <= BLOWUP_CHECK_CAPACITY else None,
    }
    if args.output:
        write_family(fam, args.output)
    emit(args, payload)
    ok = payload["blowup"] is None or payload["blowup"]["passes"]
    return EXIT_OK if ok else EXIT_FALSE


def _stability_graph(args):
    chosen = [x is not None for x in (args.graph, args.family, args.turan)]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --graph, --family, --turan")
    if args.graph:
        return read_graph(args.graph)
    if args.family:
        fam = read_family(args.family)
        if len(fam) > COUNT_CAPACITY:
            raise CapacityError(f"stability supports at most {COUNT_CAPACITY} vertices")
        return disjointness_graph(fam)
    return turan_graph(args.k, args.turan)


def cmd_stability(args) -> int:
    g = _stability_graph(args)
    if g.order > COUNT_CAPACITY:
        raise CapacityError(f"stability supports at most {COUNT_CAPACITY} vertices, got {g.order}")
    payload = {"command": "stability", "config": _config(args), "order": g.order, "edges": g.edge_count}
    if args.prune_delta is not None:
        trace = min_degree_prune_trace(g, args.k, args.prune_delta)
        payload["prune"] = {
            "kept": list(trace.kept),
            "deletions": [list(d) for d in trace.deletions],
        }
        g = trace.graph
    report = _stability_json(g, args.k)
    payload["report"] = report
    if args.emit_graph:
        write_graph(g, args.emit_graph)
    emit(args, payload)
    if "error" in report:
        return EXIT_FALSE
    return EXIT_OK if report["bound_holds"] or not report["hypotheses_hold"] else EXIT_FALSE


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive, default=None,
                        help="worker threads (default: $GENSET_THREADS or 1)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")

    parser = argparse.ArgumentParser(prog="genset", description="k-generators, disjointness graphs and stability tools")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="write the canonical k-generator")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=[common], help="check k-generation of a family file")
    p.add_argument("family")
    p.add_argument("--k", type=_positive, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", parents=[common], help="clique densities and stability of H[f]")
    p.add_argument("family")
    p.add_argument("--k", type=_positive, default=2)
    p.add_argument("--emit-graph")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("search", parents=[common], help="exact minimum k-generator search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--base", action="store_true", help="search k-bases instead")
    p.add_argument("--enumerate", action="store_true", help="return every optimum")
    p.add_argument("--budget-seconds", type=float, default=60.0)
    p.add_argument("--node-cap", type=_positive, default=5_000_000)
    p.add_argument("--optima-cap", type=_positive, default=10_000)
    p.add_argument("--seed", type=_u64, default=0, help="accepted for uniformity; the search is deterministic")
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sample", help="seeded Monte-Carlo estimates")
    kinds = p.add_subparsers(dest="kind", required=True)
    sample_common = argparse.ArgumentParser(add_help=False, parents=[common])
    sample_common.add_argument("--family")
    sample_common.add_argument("--n", type=int, default=6)
    sample_common.add_argument("--k", type=int, default=2)
    sample_common.add_argument("--trials", type=_positive, default=10_000)
    sample_common.add_argument("--seed", type=_u64, default=0)
    sample_common.add_argument("--exact", action="store_true", help="also compute the exact value")
    q = kinds.add_parser("blowup", parents=[sample_common])
    q.add_argument("--parts", type=_positive, default=2)
    q.add_argument("--t", type=_positive, default=1)
    q = kinds.add_parser("oddcycle", parents=[sample_common])
    q.add_argument("--l", type=_positive, default=1)
    q.add_argument("--t", type=_positive, default=1)
    q = kinds.add_parser("tail", parents=[sample_common])
    q.add_argument("--t", type=_positive, default=1)
    q.add_argument("--theta", type=_fraction, default=Fraction(1, 2))
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("counterexample", parents=[common], help="the six-block family and its checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("stability", parents=[common], help="k-partition extraction on a graph")
    p.add_argument("--graph")
    p.add_argument("--family")
    p.add_argument("--turan", type=_positive, help="use T_k(N) on N vertices")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--prune-delta", type=_fraction)
    p.add_argument("--emit-graph")
    p.set_defaults(func=cmd_stability)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        args.threads = resolve_threads(args.threads)
        return args.func(args)
    except (UsageError, InvalidArgument) as exc:
        print(f"genset: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FamilyParseError as exc:
        print(f"genset: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"genset: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except EmptyDomainError as exc:
        print(f"genset: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"genset: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
