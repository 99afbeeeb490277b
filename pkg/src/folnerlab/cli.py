"""Command-line front end.

    folnerlab gen --group lamplighter --family standard --n 1
    folnerlab report --group Z^2 --family boxes --max 10
    folnerlab verify dbm --exhaustive d=1 side=8
    folnerlab verify lemma-ff --group lamplighter --family standard --n 6
    folnerlab extract-tempered --group lamplighter --family standard --max 12 --C=4
    folnerlab ergodic --group Z^2 --indices 10,20,40,80

Exit status: 0 when every checked inequality holds (vacuous counts as
holding), 1 when one fails, 2 on any error (a JSON error record goes to
stderr). Output goes to ``--out``, else to ``$FOLNERLAB_OUT_DIR/<name>``,
else to stdout.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .dsl import parse_group_dsl, render_group
from .ergodic import (
    BernoulliAction,
    coordinate_function,
    constant_function,
    convergence_sweep,
    mse_slope,
    pair_function,
)
from .folner import (
    ExhaustionError,
    Family,
    FolnerSequenceSpec,
    box_metrics,
    extract_tempered,
    generate,
    measure_sequence,
    sequence,
    sequence_report,
    tempered_constants,
)
from .groups import Kind, standard_embedding
from .inequalities import (
    PREDICATES,
    brute_force_oracle,
    check_discrete_bm,
    check_growth_implication,
    check_lemma_abelian_product,
    check_lemma_diff_size,
    check_lemma_same_size,
    check_lower_bound_claim,
)
from .setops import format_set, parse_set

OUT_DIR_ENV = "FOLNERLAB_OUT_DIR"

__all__ = ["main", "parse_group_dsl", "render_group", "run"]

_FAMILY_ALIASES = {
    "boxes": Family.BOXES,
    "tempelman": Family.ABELIAN_TEMPELMAN,
    "abelian-tempelman": Family.ABELIAN_TEMPELMAN,
    "lamplighter-standard": Family.LAMPLIGHTER_STANDARD,
    "wreath-standard": Family.WREATH_STANDARD,
}


class UsageError(ValueError):
    pass


def _family(name: str, group) -> Family:
    name = name.lower()
    if name == "standard":
        if group.kind is Kind.LAMPLIGHTER:
            return Family.LAMPLIGHTER_STANDARD
        if group.kind is Kind.WREATH_ZZ:
            return Family.WREATH_STANDARD
        raise UsageError(f"no standard family for {group}; use boxes")
    if name not in _FAMILY_ALIASES:
        raise UsageError(f"unknown family {name!r}")
    return _FAMILY_ALIASES[name]


def _spec(args, max_index: int) -> FolnerSequenceSpec:
    if getattr(args, "spec", None):
        return FolnerSequenceSpec.from_json(json.loads(Path(args.spec).read_text()))
    if not args.group or not args.family:
        raise UsageError("need --group and --family (or --spec)")
    group = parse_group_dsl(args.group)
    params = {"height_scale": args.height_scale} if args.height_scale != 1 else {}
    return FolnerSequenceSpec(group, _family(args.family, group), max_index, params)


def _embedding(group, args):
    d = args.embedding_d
    if d is None:
        rank = group.declared_rank
        d = 1 if rank == float("inf") else int(rank)
    return standard_embedding(group, d)


def _read_set(group, path):
    return parse_set(group, Path(path).read_text())


def _emit(text: str, args, name: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    elif os.environ.get(OUT_DIR_ENV):
        out = Path(os.environ[OUT_DIR_ENV])
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _reports_csv(records) -> str:
    cols = ["statement", "lhs", "rhs", "delta", "d", "holds", "vacuous", "verdict", "inputs_digest"]
    buf = io.StringIO()
    w = csv.DictWriter(buf, cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(records)
    return buf.getvalue()


# --------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    spec = _spec(args, args.n)
    F = generate(spec, args.n)
    _emit(format_set(F), args, f"gen-{spec.family.value}-{args.n}.txt")
    return 0


def cmd_report(args) -> int:
    spec = _spec(args, args.max)
    seq = sequence(spec)
    rep = sequence_report(seq, _embedding(spec.group, args))
    text = rep.to_json() + "\n" if args.format == "json" else rep.to_csv()
    _emit(text, args, f"report-{spec.family.value}.{args.format}")
    return 0


def _parse_exhaustive(tokens) -> tuple[int, int]:
    kv = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or key not in ("d", "side"):
            raise UsageError(f"bad --exhaustive token {tok!r}; expected d=<int> side=<int>")
        kv[key] = int(val)
    if set(kv) != {"d", "side"}:
        raise UsageError("--exhaustive needs d=<int> and side=<int>")
    return kv["d"], kv["side"]


def _sets_for(args, spec_needed: bool = True):
    group = parse_group_dsl(args.group) if args.group else None
    if args.A:
        if group is None:
            raise UsageError("--A needs --group")
        A = _read_set(group, args.A)
        B = _read_set(group, args.B) if args.B else None
        return group, A, B
    if not spec_needed:
        raise UsageError("need --A/--B set files")
    if args.n is None:
        raise UsageError("need --n (with --family) or --A")
    n2 = args.n2 if args.n2 is not None else args.n
    spec = _spec(args, max(args.n, n2))
    return spec.group, generate(spec, args.n), generate(spec, n2)


def cmd_verify(args) -> int:
    what = args.statement
    if what == "dbm" and args.exhaustive:
        d, side = _parse_exhaustive(args.exhaustive)
        verdict = brute_force_oracle(d, side, PREDICATES[args.predicate], workers=args.workers)
        rec = {"statement": "DBM-exhaustive", "predicate": args.predicate, "d": d, "side": side,
               "pairs": verdict.pairs, "violations": verdict.violations,
               "summary": verdict.summary(), "first_counterexample": verdict.first_counterexample}
        _emit(_dump(rec), args, f"verify-exhaustive-d{d}-side{side}.json")
        return 0 if verdict.all_hold else 1

    if what == "dbm":
        _, A, B = _sets_for(args, spec_needed=False)
        reports = [check_discrete_bm(A, B)]
    elif what == "lemma-ab":
        group, A, B = _sets_for(args, spec_needed=False)
        reports = list(check_lemma_abelian_product(A, B, _embedding(group, args)))
    elif what == "lemma-ff":
        group, A, _ = _sets_for(args)
        reports = [check_lemma_same_size(A, _embedding(group, args))]
    elif what == "lemma-f1f2":
        group, A, B = _sets_for(args)
        reports = [check_lemma_diff_size(A, B, _embedding(group, args))]
    elif what in ("lower-bound", "growth"):
        spec = _spec(args, args.max)
        emb = _embedding(spec.group, args)
        g = spec.group
        if spec.family is Family.BOXES and g.kind is Kind.FREE_ABELIAN and emb.d == g.d:
            # exact closed forms; enumeration is hopeless for large Z^d boxes
            metrics = box_metrics(g.d, range(1, args.max + 1))
        else:
            metrics = measure_sequence(sequence(spec), emb)
        if what == "lower-bound":
            reports = [check_lower_bound_claim(metrics)]
        else:
            C = args.C if args.C is not None else max(
                Fraction(p, s) for p, s in zip(metrics.tempered_products, metrics.sizes))
            reports = check_growth_implication(metrics, C)
    else:
        raise UsageError(f"unknown statement {what!r}")
    records = [r.to_json() for r in reports]
    text = _dump(records) if args.format == "json" else _reports_csv(records)
    _emit(text, args, f"verify-{what}.{args.format}")
    return 0 if all(r.holds for r in reports) else 1


def cmd_extract(args) -> int:
    spec = _spec(args, args.max)
    try:
        idx = extract_tempered(spec, args.C, args.count)
        complete = True
    except ExhaustionError as exc:
        idx, complete = exc.partial, args.count is None
    t = tempered_constants([generate(spec, n) for n in idx])
    rec = {"group": render_group(spec.group), "family": spec.family.value, "C": args.C,
           "indices": idx, "tempered_constants": [float(x) for x in t], "complete": complete}
    _emit(_dump(rec), args, "extract-tempered.json")
    return 0 if complete else 1


_PHIS = {"coord": coordinate_function, "pair": pair_function, "const": constant_function}


def cmd_ergodic(args) -> int:
    group = parse_group_dsl(args.group)
    action = BernoulliAction(group, args.p, args.seed)
    phi = _PHIS[args.phi](group.d)
    indices = [int(x) for x in args.indices.split(",")]
    spec = FolnerSequenceSpec(group, Family.BOXES, max(indices))
    results = convergence_sweep(action, phi, spec, indices, args.paths)
    if args.format == "json":
        text = _dump({"slope": mse_slope(results),
                      "rows": [{"n": n, "size": r.size, "mse": r.mse, "target": r.target}
                               for n, r in zip(indices, results)]})
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "size", "mse", "target"])
        for n, r in zip(indices, results):
            w.writerow([n, r.size, repr(r.mse), repr(r.target)])
        text = buf.getvalue()
    _emit(text, args, f"ergodic.{args.format}")
    return 0


# --------------------------------------------------------------------------


def _common(p, *, family=True):
    p.add_argument("--group", help="group descriptor, e.g. Z^2, Z/6xZ^2, lamplighter, wreath-zz")
    if family:
        p.add_argument("--family", help="boxes | standard | tempelman")
        p.add_argument("--spec", help="JSON sequence spec {group, family, params, max_index}")
        p.add_argument("--height-scale", type=int, default=1, help="wreath family height h(n)=k*n")
    p.add_argument("--embedding-d", type=int, default=None, help="dimension of the standard Z^d embedding")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="folnerlab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit F_n in the set literal format")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("report", help="sizes, Tempel'man/tempered constants, growth, defects")
    _common(p)
    p.add_argument("--max", type=int, required=True)
    p.set_defaults(func=cmd_report, format="csv")

    p = sub.add_parser("verify", help="check one inequality family")
    p.add_argument("statement", choices=("dbm", "lemma-ab", "lemma-ff", "lemma-f1f2", "lower-bound", "growth"))
    _common(p)
    p.add_argument("--exhaustive", nargs=2, metavar="KEY=VAL", help="oracle sweep: d=<int> side=<int>")
    p.add_argument("--predicate", choices=sorted(PREDICATES), default="dbm")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--A", help="set literal file")
    p.add_argument("--B", help="set literal file")
    p.add_argument("--n", type=int, help="family index for the first set")
    p.add_argument("--n2", type=int, help="family index for the second set")
    p.add_argument("--max", type=int, default=10)
    p.add_argument("--C", type=float, default=None, help="tempered constant (default: measured)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extract-tempered", help="greedy tempered subsequence")
    _common(p)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--count", type=int, default=None, help="indices wanted (default: scan to --max)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("ergodic", help="Monte-Carlo mean ergodic witness on Z^d boxes")
    _common(p, family=False)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--phi", choices=sorted(_PHIS), default="coord")
    p.add_argument("--indices", default="10,20,40,80")
    p.add_argument("--paths", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ergodic, format="csv", group="Z^2")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surfaced as a structured record
        rec = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        offset = getattr(exc, "offset", None)
        if offset is not None:
            rec["offset"] = offset
        sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")
        return 2


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
