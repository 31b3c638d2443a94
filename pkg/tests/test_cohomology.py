import itertools

import numpy as np
import pytest

from bigcheck import linalg
from bigcheck.cohomology import cocycle_values, h0, h1, h1_full
from bigcheck.families import general_linear, imprimitive_wreath, special_linear
from bigcheck.ff import make_field, ops
from bigcheck.gmodule import sl_module
from bigcheck.group import close, trivial_group
from bigcheck.matrix import Matrix
from bigcheck.oracle import _Oracle

from conftest import mat


def _torus(F):
    return close([Matrix.diag(F, [2, 1]), Matrix.diag(F, [1, 2])])


def test_h0_examples(F5):
    r = h0(sl_module(trivial_group(F5, 2)))
    assert r.dimension == 3
    assert h0(sl_module(special_linear(F5, 2))).dimension == 0
    assert h0(sl_module(_torus(F5))).dimension == 1


def test_h0_basis_fixed(F5):
    mod = sl_module(_torus(F5))
    o = ops(F5)
    for v in h0(mod).basis:
        for A in mod.active_gens:
            assert np.array_equal(o.matmul(A, v), v)


def _cyclic_h1_brute(mod):
    """dim H^1 of a cyclic group <g> of order m: ker(norm) / im(g - 1), counted by enumeration."""
    F, g = mod.spec, mod.active_gens[0]
    o = ops(F)
    m = mod.group.order
    eye = linalg.identity(F, mod.dim)
    N = eye * 0
    P = eye
    for _ in range(m):
        N = o.vadd(N, P)
        P = o.matmul(g, P)
    ker = im = 0
    gm1 = o.vsub(g, eye)
    images = set()
    for v in itertools.product(range(F.order), repeat=mod.dim):
        v = np.array(v)
        ker += not o.matmul(N, v).any()
        images.add(tuple(o.matmul(gm1, v)))
    count = ker // len(images)
    return round(np.log(count) / np.log(F.order))


def test_h1_unipotent_cyclic(F5):
    mod = sl_module(close([mat(F5, [[1, 1], [0, 1]])]))
    r = h1(mod)
    assert not r.fast_path_used
    assert r.dimension == _cyclic_h1_brute(mod) == 1
    assert h1(mod, "full").dimension == 1


def test_h1_sl2_f5(F5):
    # the classical nonvanishing at l = 5, confirmed by the independent oracle
    G = special_linear(F5, 2)
    r = h1(sl_module(G))
    assert r.dimension == _Oracle(G, 1).h1_dim() == 1
    assert h1(sl_module(G), "full").dimension == 1


def test_h1_coprime_fast_path(F5):
    r = h1(sl_module(_torus(F5)))
    assert r.fast_path_used and r.dimension == 0


def _corpus_coprime():
    out = []
    for l in (5, 7):
        F = make_field(l)
        out += [trivial_group(F, 2), _torus(F), imprimitive_wreath(F, 1, 2).group,
                close([mat(F, [[0, l - 1], [1, 0]])])]
    F3 = make_field(3)
    out.append(_torus(F3))
    return [G for G in out if G.order <= 200 and G.order % G.spec.char]


@pytest.mark.parametrize("G", _corpus_coprime(), ids=lambda G: f"{G.spec}-{G.n}-{G.order}")
def test_fast_path_agrees_with_full(G):
    mod = sl_module(G)
    fast = h1(mod)
    full = h1_full(mod)
    assert fast.fast_path_used and not full.fast_path_used
    assert fast.dimension == full.dimension == 0


@pytest.mark.parametrize("make", [
    lambda: close([mat(make_field(5), [[1, 1], [0, 1]])]),
    lambda: special_linear(make_field(5), 2),
    lambda: close([mat(make_field(7), [[1, 1], [0, 1]]), Matrix.diag(make_field(7), [3, 1])]),
    lambda: general_linear(make_field(3), 2),
])
def test_h1_routes_and_rank_nullity(make):
    G = make()
    mod = sl_module(G)
    a, b = h1(mod), h1(mod, "full")
    assert a.dimension == b.dimension == _Oracle(G, 1).h1_dim()
    assert b.b1_dim == mod.dim - h0(mod).dimension
    # representatives are cocycles on every pair and not coboundaries
    o = ops(G.spec)
    F = G.spec
    B1 = []
    for e in np.eye(mod.dim, dtype=np.int64):
        B1.append(np.concatenate([o.vsub(o.matmul(A, e), e) for A in mod.all_actions]))
    for F_rep in a.basis:
        vals = cocycle_values(mod, F_rep)
        for i in range(G.order):
            for j in range(0, G.order, max(1, G.order // 15)):
                k = G.index_of(G.element(i) @ G.element(j))
                lhs = vals[k]
                rhs = o.vadd(vals[i], o.matmul(mod.all_actions[i], vals[j]))
                assert np.array_equal(lhs, rhs)
        flat = np.concatenate(list(vals))
        assert linalg.rank(F, np.vstack(B1 + [flat])) > linalg.rank(F, np.vstack(B1))
