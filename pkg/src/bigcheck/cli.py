"""Command-line entry point.

Exit codes: 0 success, 2 malformed input, 3 budget or cap exceeded,
4 oracle disagreement, 5 a lemma-predicted property failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from bigcheck import harness, regular
from bigcheck.bigness import check_m_big, verdicts_agree
from bigcheck.errors import BudgetExceeded, CapExceeded, TooLargeForOracle
from bigcheck.gmodule import DEFAULT_SEED, ENUM_CAP

EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_ORACLE, EXIT_LEMMA = 0, 2, 3, 4, 5
BUDGET_ERRORS = (BudgetExceeded, CapExceeded, TooLargeForOracle)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(code: int, msg: str) -> int:
    print(f"bigcheck: {msg}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    from bigcheck.group import group_from_json
    try:
        data = json.loads(Path(args.group).read_text())
        G = group_from_json(data, args.cap)
    except BUDGET_ERRORS as e:
        return _fail(EXIT_BUDGET, str(e))
    except (OSError, ValueError, KeyError, TypeError, IndexError) as e:
        return _fail(EXIT_PARSE, f"cannot read group from {args.group}: {e}")
    except Exception as e:  # malformed generators surface as library errors
        if type(e).__module__.startswith("bigcheck"):
            return _fail(EXIT_PARSE, f"invalid group in {args.group}: {type(e).__name__}: {e}")
        raise
    try:
        report = check_m_big(G, args.M, cap=args.probe_cap, seed=args.seed)
    except BUDGET_ERRORS as e:
        return _fail(EXIT_BUDGET, str(e))
    out = report.to_json(timing=args.timing)
    code = EXIT_OK
    if args.oracle:
        from bigcheck.oracle import naive_oracle_check
        try:
            o = naive_oracle_check(G, args.M)
        except BUDGET_ERRORS as e:
            return _fail(EXIT_BUDGET, f"oracle: {e}")
        agree = verdicts_agree(report, o)
        out["oracle"] = {"verdict": o.verdict, "conditions": o.conditions(), "agree": agree}
        if not agree:
            code = EXIT_ORACLE
    _emit(out, args.out)
    return code


def cmd_trichotomy(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
        if not isinstance(config, dict):
            raise ValueError("config must be a JSON object")
        harness.expand_config(config)
    except (OSError, ValueError, TypeError, AttributeError) as e:
        return _fail(EXIT_PARSE, f"bad config {args.config}: {e}")
    records, summary = harness.run_trichotomy(config, jobs=args.jobs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    harness.write_records(records, out)
    summary_path = Path(args.summary) if args.summary else out.with_suffix(".summary.json")
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(json.dumps({k: summary[k] for k in ("records", "big", "not_big", "errors", "classes")},
                     sort_keys=True))
    return EXIT_OK


def cmd_lemmas(args) -> int:
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    suite = args.suite
    try:
        if suite == "convolution":
            res = regular.convolution_property(args.random, args.dmax or 24, args.seed)
            ok = not res["mismatches"]
        elif suite == "forced_zero":
            res = regular.forced_zero_sweep(args.dmax or 8)
            ok = res["counterexamples"] == 0
        elif suite == "niveau":
            if args.l is not None:
                N, Delta, d = args.N or 2, args.delta if args.delta is not None else 1, args.d or 2
                value = regular.niveau_injectivity_check(N, Delta, args.l, d)
                threshold = (3 * Delta + 2) * math.factorial(N)
                applicable = args.l > threshold
                res = {"N": N, "Delta": Delta, "l": args.l, "d": d, "injective": value,
                       "threshold": threshold, "applicable": applicable}
                ok = value or not applicable
            else:
                rows = regular.niveau_grid(args.N or 3, args.delta if args.delta is not None else 2,
                                           args.d or 3)
                res = {"rows": rows}
                ok = not any(r["failures"] for r in rows)
                if outdir:
                    regular.write_csv(rows, outdir / "niveau.csv")
        elif suite == "orbit":
            ds = [args.d] if args.d else [3, 4, 6]
            res = regular.orbit_bound_sweep(ds, Xi=args.xi or 2, N=args.N or 1, jobs=args.jobs)
            ok = not res["violations"]
            if outdir:
                regular.write_csv(res["rows"], outdir / "orbit.csv")
            res = {k: v for k, v in res.items() if k != "rows"}
        elif suite == "regular_t":
            degrees = tuple(args.degrees or [1, 1])
            torus = regular.TorusSpec(args.l or 11, degrees)
            N, support = args.N or 2, args.xi or 2
            profiles = _torus_profiles(degrees, N, support)
            r = regular.search_regular_t(torus, profiles, args.M)
            res = {"l": torus.l, "degrees": list(degrees), "N": N, "max_support": support,
                   "t": list(r.t) if r.t else None, "elements": r.elements,
                   "collisions": r.collisions, "torus_order": r.torus_order,
                   "profiles": r.profile_count, "collision_fraction": r.collision_fraction}
            # fewer collisions than torus elements forces a regular t to exist
            ok = not (r.collisions < r.torus_order and r.t is None)
        else:
            return _fail(EXIT_PARSE, f"unknown suite {suite}")
    except BUDGET_ERRORS as e:
        return _fail(EXIT_BUDGET, str(e))
    res = {"suite": suite, "pass": ok, **res}
    if outdir:
        regular.write_json(res, outdir / f"{suite}.json")
    _emit(res, None)
    return EXIT_OK if ok else EXIT_LEMMA


def _torus_profiles(degrees, N, support):
    flat = sum(degrees)
    out = []
    for mu in regular.bounded_profiles(flat, N, support):
        parts, at = [], 0
        for d in degrees:
            parts.append(tuple(mu[at:at + d]))
            at += d
        out.append(tuple(parts))
    return out


def cmd_oracle_corpus(args) -> int:
    from bigcheck.families import oracle_corpus
    from bigcheck.oracle import naive_oracle_check
    t0 = time.perf_counter()
    corpus = oracle_corpus(args.seed, args.size)
    rows, mismatches = [], 0
    for i, lg in enumerate(corpus):
        for M in args.M:
            r = check_m_big(lg.group, M)
            o = naive_oracle_check(lg.group, M)
            agree = verdicts_agree(r, o)
            mismatches += not agree
            rows.append({"index": i, "label": lg.label, "order": lg.group.order, "n": lg.group.n,
                         "M": M, "verdict": r.verdict, "oracle_verdict": o.verdict,
                         "conditions": r.conditions(), "agree": agree})
    res = {"groups": len(corpus), "checks": len(rows), "mismatches": mismatches, "rows": rows}
    _emit(res, args.out)
    print(f"bigcheck: {len(rows)} checks in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return EXIT_ORACLE if mismatches else EXIT_OK


def cmd_build(args) -> int:
    from bigcheck.families import from_spec
    from bigcheck.group import dump_group
    try:
        params = json.loads(args.params) if args.params else {}
        entry = {"family": args.family, "field": args.field, "params": params, "seed": args.seed}
        lg = from_spec(entry, args.cap)
    except BUDGET_ERRORS as e:
        return _fail(EXIT_BUDGET, str(e))
    except (ValueError, KeyError, TypeError) as e:
        return _fail(EXIT_PARSE, str(e))
    G = lg.group
    G.label = lg.label
    if args.out:
        dump_group(G, args.out)
    else:
        _emit({**G.to_json(), "label": lg.label}, None)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _positive(x: str) -> int:
    v = int(x)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bigcheck", description="M-bigness of finite matrix groups")
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    p.add_argument("-v", "--verbose", action="count", default=0)
    # the same flags after the subcommand; SUPPRESS keeps the top-level value otherwise
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=_positive, default=argparse.SUPPRESS)
    common.add_argument("--seed", type=lambda s: int(s, 0), default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="decide M-bigness of one group")
    c.add_argument("group")
    c.add_argument("--M", type=_positive, default=1)
    c.add_argument("--oracle", action="store_true")
    c.add_argument("--cap", type=_positive, default=None, help="closure cap")
    c.add_argument("--probe-cap", type=_positive, default=ENUM_CAP,
                   help="cap on enumerated irreducible submodules")
    c.add_argument("--timing", action="store_true")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("trichotomy", parents=[common], help="classify non-big groups of a corpus")
    t.add_argument("config")
    t.add_argument("--out", default="trichotomy.jsonl")
    t.add_argument("--summary")
    t.set_defaults(func=cmd_trichotomy)

    lm = sub.add_parser("lemmas", parents=[common], help="combinatorial lemma sweeps")
    lm.add_argument("--suite", required=True,
                    choices=["convolution", "forced_zero", "orbit", "regular_t", "niveau"])
    lm.add_argument("--dmax", type=_positive)
    lm.add_argument("--random", type=_positive, default=1000)
    lm.add_argument("--N", type=_positive)
    lm.add_argument("--delta", type=int)
    lm.add_argument("--l", type=_positive)
    lm.add_argument("--d", type=_positive)
    lm.add_argument("--xi", type=_positive)
    lm.add_argument("--degrees", type=_positive, nargs="+")
    lm.add_argument("--M", type=_positive, default=1)
    lm.add_argument("--out", help="directory for CSV/JSON tables")
    lm.set_defaults(func=cmd_lemmas)

    o = sub.add_parser("oracle-corpus", parents=[common], help="cross-check against the brute-force oracle")
    o.add_argument("--size", type=_positive, default=56)
    o.add_argument("--M", type=_positive, nargs="+", default=[1, 2])
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle_corpus)

    b = sub.add_parser("build", parents=[common], help="write a family member as group JSON")
    b.add_argument("family")
    b.add_argument("--field", type=_positive, required=True)
    b.add_argument("--params", help="JSON object of constructor parameters")
    b.add_argument("--cap", type=_positive)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
