import itertools

import numpy as np
from hypothesis import given, settings, strategies as st

from bigcheck import linalg
from bigcheck.families import general_linear, special_linear
from bigcheck.ff import make_field, ops
from bigcheck.gmodule import (conjugation_module, enumerate_irreducible_submodules,
                              is_absolutely_irreducible, natural_module, sl_module,
                              socle_constituents, spin)
from bigcheck.group import close, trivial_group
from bigcheck.matrix import Matrix

from conftest import mat


def _torus(F):
    return close([Matrix.diag(F, [2, 1]), Matrix.diag(F, [1, 2])])


def _nonsplit_cartan(F5):
    # x^2 - x + 2 is irreducible over F_5 with a root of order 24
    return close([mat(F5, [[0, 3], [1, 1]])])


def _vec(F, M):
    return np.array([M]).reshape(1, -1) % F.order


def test_conjugation_module_shape(F5):
    G = general_linear(F5, 2)
    mod = conjugation_module(G)
    assert mod.dim == 4
    assert sl_module(G).dim == 3
    o = ops(F5)
    eye = linalg.identity(F5, 4)
    for i in range(0, G.order, 37):
        for j in range(0, G.order, 41):
            gh = G.index_of(G.element(i) @ G.element(j))
            assert np.array_equal(mod.action(gh), o.matmul(mod.action(i), mod.action(j)))
    assert np.array_equal(mod.action(G.index_of(Matrix.identity(F5, 2))), eye)


def test_trivial_fixes_everything(F5):
    mod = conjugation_module(trivial_group(F5, 2))
    for A in mod.active_gens:
        assert np.array_equal(A, linalg.identity(F5, 4))


def test_spin_examples(F5):
    triv = natural_module(trivial_group(F5, 2))
    assert len(spin(triv, [1, 2])) == 1
    mod = conjugation_module(general_linear(F5, 2))
    assert len(spin(mod, [1, 0, 0, 1])) == 1
    S = spin(mod, [0, 1, 0, 0])
    assert len(S) == 3
    # trace-zero space in row-major coordinates
    assert linalg.rank(F5, np.vstack([S, [[1, 0, 0, 4], [0, 1, 0, 0], [0, 0, 1, 0]]])) == 3


def test_constituents_gl2(F5):
    soc = socle_constituents(conjugation_module(general_linear(F5, 2)))
    assert sorted(c.dim for c in soc.constituents) == [1, 3]
    subs = enumerate_irreducible_submodules(conjugation_module(general_linear(F5, 2)))
    assert subs.exhaustive and len(subs.all_irreducibles) == 2


def test_trivial_group_lines(F5):
    subs = enumerate_irreducible_submodules(natural_module(trivial_group(F5, 2)))
    (c,) = subs.constituents
    assert c.multiplicity == 2
    assert len(subs.all_irreducibles) == 6 == subs.expected_count()


def test_torus_constituents(F5):
    subs = enumerate_irreducible_submodules(natural_module(_torus(F5)))
    lines = sorted(s.basis.tolist() for s in subs.all_irreducibles)
    assert lines == [[[0, 1]], [[1, 0]]]


def test_absolute_irreducibility(F5):
    assert is_absolutely_irreducible(natural_module(general_linear(F5, 2)))
    C = _nonsplit_cartan(F5)
    assert C.order == 24
    assert not is_absolutely_irreducible(natural_module(C))
    assert not is_absolutely_irreducible(natural_module(_torus(F5)))
    for l, n in [(3, 2), (5, 3), (7, 2), (3, 3)]:
        assert is_absolutely_irreducible(natural_module(special_linear(make_field(l), n)))


def _brute_stable_lines(mod):
    F = mod.spec
    out = 0
    for v in itertools.product(range(F.order), repeat=mod.dim):
        v = np.array(v)
        if not v.any() or v[np.flatnonzero(v)[0]] != 1:
            continue
        if all(linalg.rank(F, np.vstack([v, ops(F).matmul(A, v)])) == 1 for A in mod.active_gens):
            out += 1
    return out


def test_stable_line_count_matches_enumeration(F5):
    # 1-dim irreducibles found by enumeration equal stable lines found by brute force
    for G in [trivial_group(F5, 2), _torus(F5), general_linear(F5, 2)]:
        mod = conjugation_module(G)
        subs = enumerate_irreducible_submodules(mod)
        assert sum(s.dim == 1 for s in subs.all_irreducibles) == _brute_stable_lines(mod)
        assert len(subs.all_irreducibles) == subs.expected_count()
        for s in subs.all_irreducibles:
            assert mod.is_stable(s.basis)


GROUPS = {
    "trivial": lambda F: trivial_group(F, 2),
    "torus": _torus,
    "gl": lambda F: general_linear(F, 2),
    "unipotent": lambda F: close([mat(F, [[1, 1], [0, 1]])]),
    "borel": lambda F: close([mat(F, [[1, 1], [0, 1]]), Matrix.diag(F, [2, 1])]),
}


@settings(max_examples=150)
@given(st.sampled_from(sorted(GROUPS)), st.sampled_from(["natural", "conj"]),
       st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_spin_minimal(name, kind, coords):
    F5 = make_field(5)
    G = GROUPS[name](F5)
    mod = natural_module(G) if kind == "natural" else conjugation_module(G)
    v = np.array(coords[:mod.dim])
    if not v.any():
        return
    S = spin(mod, v)
    assert linalg.rank(F5, np.vstack([S, v])) == len(S)
    assert mod.is_stable(S)
    # every nonzero vector of S spins inside S
    for c in itertools.product(range(5), repeat=len(S)):
        if not any(c):
            continue
        w = ops(F5).matmul(np.array([c]), S)[0]
        T = spin(mod, w)
        assert linalg.rank(F5, np.vstack([S, T])) == len(S)
