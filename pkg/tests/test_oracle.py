import pytest

from bigcheck.bigness import check_m_big, verdicts_agree
from bigcheck.errors import TooLargeForOracle
from bigcheck.families import general_linear, imprimitive_wreath, reducible_group, sl_scalars
from bigcheck.ff import make_field
from bigcheck.gmodule import conjugation_module, enumerate_irreducible_submodules
from bigcheck.group import trivial_group
from bigcheck.oracle import naive_oracle_check, oracle_submodule_count


@pytest.mark.parametrize("M", [1, 2])
@pytest.mark.parametrize("name,make", [
    ("identity", lambda F: trivial_group(F, 2)),
    ("gl2", lambda F: general_linear(F, 2)),
    ("borel", lambda F: reducible_group(F, 2, 1).group),
    ("monomial", lambda F: imprimitive_wreath(F, 1, 2).group),
    ("sl2_scalars", lambda F: sl_scalars(F, 2).group),
])
def test_agrees_on_f5(name, make, M):
    G = make(make_field(5))
    assert verdicts_agree(check_m_big(G, M), naive_oracle_check(G, M))


def test_submodule_counts_agree():
    for G in [trivial_group(make_field(5), 2), general_linear(make_field(5), 2),
              imprimitive_wreath(make_field(7), 1, 2).group]:
        subs = enumerate_irreducible_submodules(conjugation_module(G))
        assert len(subs.all_irreducibles) == oracle_submodule_count(G)


def test_extension_field_rejected():
    with pytest.raises(TooLargeForOracle):
        naive_oracle_check(trivial_group(make_field(3, 2), 2), 1)
