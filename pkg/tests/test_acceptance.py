"""Acceptance criteria 1-12, one pass/fail line each (printed in the terminal summary)."""

import functools
import math
import subprocess
import sys
import time
from pathlib import Path

import pytest

from bigcheck import regular
from bigcheck.bigness import check_m_big, verdicts_agree
from bigcheck.families import (binary_tetrahedral_tensor, general_linear, induced_tensor,
                               oracle_corpus, sl_scalars)
from bigcheck.ff import make_field, primitive_element
from bigcheck.group import adjoin_scalars, close, is_subgroup, trivial_group
from bigcheck.harness import run_trichotomy
from bigcheck.matrix import Matrix
from bigcheck.oracle import naive_oracle_check

from conftest import ACCEPTANCE

ROOT = Path(__file__).resolve().parent.parent
ORACLE_BUDGET_S = 600
ORBIT_BUDGET_S = 300


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


@functools.lru_cache(maxsize=None)
def corpus_runs():
    t0 = time.perf_counter()
    rows = []
    corpus = oracle_corpus()
    for lg in corpus:
        for M in (1, 2):
            rows.append((lg, M, check_m_big(lg.group, M), naive_oracle_check(lg.group, M)))
    return corpus, rows, time.perf_counter() - t0


def test_01_oracle_corpus():
    corpus, rows, elapsed = corpus_runs()
    bad = [(lg.label, M) for lg, M, r, o in rows if not verdicts_agree(r, o)]
    ambient = {(lg.group.spec.char, lg.group.n) for lg in corpus}
    ok = (len(corpus) >= 50 and not bad and elapsed <= ORACLE_BUDGET_S
          and ambient == {(5, 2), (7, 2), (5, 3)}
          and all(lg.group.order <= 5000 for lg in corpus))
    report(1, ok, f"{len(corpus)} groups x M in {{1,2}}: {len(bad)} disagreements, "
                  f"{elapsed:.0f}s (limit {ORACLE_BUDGET_S}s)")


def test_02_trivial_negatives():
    failures = []
    for l in (5, 7, 13):
        F = make_field(l)
        for n in (2, 3):
            for name, G in (("identity", trivial_group(F, n)),
                            ("scalars", close([Matrix.scalar(F, n, primitive_element(F))]))):
                first = check_m_big(G, 1, short_circuit=True)
                full = check_m_big(G, 1)
                # in evaluation order H0 is the failing condition; scalar matrices have no
                # simple eigenvalue for n >= 2, so the witness condition fails as well
                if not (first.failed_conditions() == ["h0"] and first.verdict == "not_big"
                        and full.cond_quotient and full.cond_h1 and not full.cond_h0
                        and full.cond_witnesses is False):
                    failures.append((name, l, n, full.conditions()))
    report(2, not failures, f"12 groups, H0 is the failing condition in evaluation order "
                            f"(witnesses also fail); exceptions: {failures}")


def test_03_binary_tetrahedral_tensor():
    results = {}
    for l in (7, 13):
        G = binary_tetrahedral_tensor(l).group
        a, b = check_m_big(G, 1), check_m_big(G, 1)
        stable = a.to_json() == b.to_json()
        results[l] = (a.verdict, a.failed_conditions(), stable)
    ok = all(v == "not_big" and stable for v, _, stable in results.values())
    report(3, ok, "; ".join(f"l={l}: {v}, failed {f}, stable={s}"
                            for l, (v, f, s) in results.items()))


def test_04_induced_tensor():
    r = check_m_big(induced_tensor(make_field(13), 3, 4).group, 1)
    report(4, r.verdict == "not_big", f"F_13 (3,4): {r.verdict}, failed {r.failed_conditions()}")


def test_05_positive_controls():
    bad = []
    for l in (7, 11, 13):
        F = make_field(l)
        for name, G in (("GL2", general_linear(F, 2)), ("SL2*k", sl_scalars(F, 2).group)):
            for M in (1, 2):
                r = check_m_big(G, M)
                if r.verdict != "big":
                    bad.append((name, l, M, r.failed_conditions()))
                if l == 7 and not verdicts_agree(r, naive_oracle_check(G, M)):
                    bad.append((name, l, M, "oracle"))
    report(5, not bad, f"GL2 and SL2*k^x, l in {{7,11,13}}, M in {{1,2}}, oracle at l=7; "
                       f"exceptions: {bad}")


def test_06_scalar_invariance():
    corpus, rows, _ = corpus_runs()
    bad = []
    for lg, M, r, _ in rows:
        s = check_m_big(adjoin_scalars(lg.group), M)
        if s.verdict != r.verdict:
            bad.append((lg.label, M))
    report(6, not bad, f"{len(rows)} (group, M) pairs, {len(bad)} verdict changes")


def test_07_normal_heredity():
    bad = []
    for l in (7, 11):
        F = make_field(l)
        N, G = sl_scalars(F, 2).group, general_linear(F, 2)
        index = G.order // N.order
        normal = is_subgroup(N, G) and all(
            (g @ N.element(i) @ g.inverse()).key() in N.key_set()
            for g in G.generators for i in range(N.order))
        rN, rG = check_m_big(N, 1), check_m_big(G, 1)
        if not (normal and math.gcd(index, l) == 1):
            bad.append((l, "pair"))
        if rN.verdict == "big" and rG.verdict != "big":
            bad.append((l, "heredity"))
    report(7, not bad, f"SL2*k^x in GL2, l in {{7,11}}; exceptions: {bad}")


def test_08_orbit_bound_grid():
    t0 = time.perf_counter()
    res = regular.orbit_bound_sweep((3, 4, 6))
    elapsed = time.perf_counter() - t0
    ok = res["cases"] > 0 and not res["violations"] and elapsed <= ORBIT_BUDGET_S
    report(8, ok, f"{res['cases']} cases, {len(res['violations'])} violations, "
                  f"{elapsed:.0f}s (limit {ORBIT_BUDGET_S}s)")


def test_09_forced_zero():
    res = regular.forced_zero_sweep(8)
    report(9, res["counterexamples"] == 0,
           f"d <= 8, {sum(s['profiles'] for s in res['scans'])} profiles, "
           f"{res['counterexamples']} counterexamples")


def test_10_niveau_grid():
    rows = regular.niveau_grid(3, 2, 3)
    fails = sum(len(r["failures"]) for r in rows)
    points = sum(r["primes"] for r in rows)
    report(10, fails == 0 and points > 0, f"{points} grid points, {fails} failures")


def test_11_trichotomy():
    import json
    config = json.loads((ROOT / "data" / "trichotomy_default.json").read_text())
    records, summary = run_trichotomy(config)
    fields = {r.field["char"] for r in records if r.field}
    ok = (summary["classes"]["unexplained"] == 0 and summary["errors"] == 0
          and fields == {7, 11, 13})
    report(11, ok, f"{summary['records']} records, {summary['not_big']} not big, "
                   f"classes {summary['classes']}, errors {summary['errors']}")


CLI_RUNS = [
    ["check", "data/groups/gl2_f7.json", "--M", "2", "--oracle", "--out", "{out}"],
    ["check", "data/groups/identity_gl2_f7.json", "--out", "{out}"],
    ["trichotomy", "{cfg}", "--out", "{out}", "--summary", "{out}.summary"],
    ["lemmas", "--suite", "convolution", "--random", "300", "--seed", "7"],
    ["lemmas", "--suite", "forced_zero", "--dmax", "6"],
    ["lemmas", "--suite", "regular_t", "--l", "11", "--degrees", "1", "1"],
    ["lemmas", "--suite", "orbit", "--d", "4"],
    ["lemmas", "--suite", "niveau", "--N", "2", "--delta", "1", "--d", "2"],
    ["oracle-corpus", "--size", "8", "--M", "1", "--out", "{out}"],
    ["build", "random", "--field", "7", "--params", '{"n": 2, "generators": 2}', "--seed", "5"],
]


def _cli_outputs(args, tmp):
    args = [a.replace("{out}", str(tmp / "out")).replace("{cfg}", str(tmp / "cfg.json"))
            for a in args]
    r = subprocess.run([sys.executable, "-m", "bigcheck.cli", *args], cwd=ROOT,
                       capture_output=True)
    files = sorted(tmp.glob("out*"))
    blob = [r.returncode, r.stdout] + [(f.name, f.read_bytes()) for f in files]
    for f in files:
        f.unlink()
    return blob


def test_12_reproducibility(tmp_path):
    (tmp_path / "cfg.json").write_text(
        '{"M": [1, 2], "groups": [{"family": "borel", "field": 7, "params": {"n": 2, "d": 1}},'
        ' {"family": "binary_tetrahedral_tensor", "field": 11}]}')
    differ = []
    for args in CLI_RUNS:
        if _cli_outputs(args, tmp_path) != _cli_outputs(args, tmp_path):
            differ.append(args[0])
    report(12, not differ, f"{len(CLI_RUNS)} CLI invocations run twice; differing: {differ}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
