import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bigcheck.bigness import check_m_big, find_witness, verdicts_agree
from bigcheck.families import general_linear, reducible_group, sl_scalars
from bigcheck.ff import make_field, ops
from bigcheck.gmodule import conjugation_module, enumerate_irreducible_submodules
from bigcheck.group import adjoin_scalars, close, trivial_group
from bigcheck.matrix import Matrix, eigen_data, eigenspace_maps
from bigcheck.oracle import naive_oracle_check

from conftest import mat


def _torus_scalars(F):
    return adjoin_scalars(close([Matrix.diag(F, [3, 1]), Matrix.diag(F, [1, 3])]))


def verify_witnesses(G, report):
    """Re-check each witness through the eigenspace maps rather than the adjugate."""
    spec = G.spec
    o = ops(spec)
    subs = enumerate_irreducible_submodules(conjugation_module(G))
    assert len(subs.all_irreducibles) == len(report.witness_table)
    for s, row in zip(subs.all_irreducibles, report.witness_table):
        if row["h_index"] is None:
            continue
        h = G.element(row["h_index"])
        alpha = spec.from_code(row["alpha"]) if spec.degree == 1 else spec.element(row["alpha"])
        er = eigen_data(h, report.M)
        i = [k for k, (r, _) in enumerate(er.roots) if r.code == alpha.code]
        assert len(i) == 1 and er.is_simple(i[0]) and er.separated(i[0])
        pi, inj = eigenspace_maps(h, alpha)
        n = G.n
        assert any(o.matmul(o.matmul(pi, w.reshape(n, n)), inj).any() for w in s.basis)


def test_identity_not_big(F7):
    r = check_m_big(trivial_group(F7, 2), 1)
    assert r.verdict == "not_big" and r.cond_h0 is False and r.h0_dim == 3


def test_gl2_f7_big(F7):
    G = general_linear(F7, 2)
    r = check_m_big(G, 1)
    assert r.verdict == "big"
    verify_witnesses(G, r)
    assert verdicts_agree(r, naive_oracle_check(G, 1))


def test_unipotent_not_big(F7):
    r = check_m_big(close([mat(F7, [[1, 1], [0, 1]])]), 1)
    assert r.verdict == "not_big" and r.cond_quotient is False


def test_all_conditions_reported(F7):
    r = check_m_big(close([mat(F7, [[1, 1], [0, 1]])]), 1)
    assert None not in r.conditions().values()
    s = check_m_big(close([mat(F7, [[1, 1], [0, 1]])]), 1, short_circuit=True)
    assert s.cond_quotient is False and s.cond_h0 is None


def test_find_witness_torus_e12(F7):
    G = _torus_scalars(F7)
    assert G.order == 36
    E12 = np.array([[0, 1, 0, 0]])
    assert find_witness(G, E12, 1) is None


def test_find_witness_sl2(F7):
    G = general_linear(F7, 2)
    sl = np.array([[1, 0, 0, 6], [0, 1, 0, 0], [0, 0, 1, 0]])
    h, alpha = find_witness(G, sl, 1)
    pi, inj = eigenspace_maps(h, alpha)
    o = ops(F7)
    assert any(o.matmul(o.matmul(pi, w.reshape(2, 2)), inj).any() for w in sl)


def test_find_witness_scalar_line(F7):
    G = _torus_scalars(F7)
    assert find_witness(G, np.array([[1, 0, 0, 1]]), 1) is not None


def test_report_json_stable(F7):
    G = general_linear(F7, 2)
    a = json.dumps(check_m_big(G, 2).to_json())
    b = json.dumps(check_m_big(G, 2).to_json())
    assert a == b
    keys = list(json.loads(a))
    assert keys[:8] == ["order", "field", "n", "M", "conditions", "witnesses", "verdict",
                        "exhaustive"]


def test_verdict_iff_conditions(F5):
    for G in [trivial_group(F5, 2), general_linear(F5, 2), reducible_group(F5, 2, 1).group,
              sl_scalars(F5, 2).group]:
        r = check_m_big(G, 1)
        assert (r.verdict == "big") == all(r.conditions().values())
        verify_witnesses(G, r)


GROUPS = [
    ("gl2_f7", lambda: general_linear(make_field(7), 2)),
    ("sl2k_f7", lambda: sl_scalars(make_field(7), 2).group),
    ("borel_f7", lambda: reducible_group(make_field(7), 2, 1).group),
    ("torus_f7", lambda: _torus_scalars(make_field(7))),
    ("gl2_f5", lambda: general_linear(make_field(5), 2)),
]


@settings(max_examples=20)
@given(st.sampled_from(range(len(GROUPS))), st.integers(2, 6))
def test_monotone_in_M(k, M):
    G = GROUPS[k][1]()
    rM, r1 = check_m_big(G, M), check_m_big(G, 1)
    if rM.verdict == "big":
        assert r1.verdict == "big"
    # every M-separated witness is also 1-separated
    for row in rM.witness_table:
        if row["h_index"] is not None:
            er = eigen_data(G.element(row["h_index"]), 1)
            i = [t for t, (r, _) in enumerate(er.roots) if r.code == row["alpha"]]
            assert er.separated(i[0])
