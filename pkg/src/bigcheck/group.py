"""Finite matrix groups by exhaustive closure of a generating set."""

from __future__ import annotations

import functools
import json
import math
import os
from pathlib import Path

import numpy as np

from bigcheck import linalg
from bigcheck.errors import CapExceeded, FieldMismatch, NotInvertible
from bigcheck.ff import FieldSpec, ops, primitive_element
from bigcheck.matrix import Matrix, batch_det

DEFAULT_CAP = 10**6


def default_cap() -> int:
    return int(os.environ.get("BIGCHECK_CAP", DEFAULT_CAP))


def gl_order(q: int, n: int) -> int:
    return math.prod(q**n - q**i for i in range(n))


def _keys(flat: np.ndarray):
    if flat.dtype == object:
        return [tuple(int(x) for x in row) for row in flat]
    flat = np.ascontiguousarray(flat, dtype=np.int64)
    return [row.tobytes() for row in flat]


class MatrixGroup:
    """A finite subgroup of GL_n(F_q), stored as its full element list.

    Elements are numbered in closure order: index 0 is the identity and
    ``elements[i] = elements[parent[i]] @ generators[parent_gen[i]]``.
    ``right_mul[i, s]`` is the index of ``elements[i] @ generators[s]``.
    """

    def __init__(self, spec, n, generators, elements, parent, parent_gen, right_mul,
                 closure_cap, label=None):
        self.spec = spec
        self.n = n
        self.generators = list(generators)
        self.elements = elements
        self.parent = parent
        self.parent_gen = parent_gen
        self.right_mul = right_mul
        self.closure_cap = closure_cap
        self.label = label
        self._index = {k: i for i, k in enumerate(_keys(elements.reshape(len(elements), -1)))}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.order

    def __repr__(self):
        name = f" {self.label}" if self.label else ""
        return f"<MatrixGroup{name} order={self.order} in GL_{self.n}({self.spec})>"

    def element(self, i: int) -> Matrix:
        return Matrix(self.spec, self.elements[i])

    def __iter__(self):
        for i in range(self.order):
            yield self.element(i)

    def index_of(self, m) -> int | None:
        data = m.data if isinstance(m, Matrix) else np.asarray(m)
        return self._index.get(_keys(data.reshape(1, -1))[0])

    def __contains__(self, m) -> bool:
        return self.index_of(m) is not None

    def generator_data(self) -> np.ndarray:
        if not self.generators:
            return linalg.zeros(self.spec, 0, self.n, self.n)
        return np.stack([g.data for g in self.generators])

    @functools.cached_property
    def inverses(self) -> np.ndarray:
        return linalg.batch_inverse(self.spec, self.elements)

    @functools.cached_property
    def inverse_index(self) -> np.ndarray:
        inv = self.inverses
        return np.array([self._index[k] for k in _keys(inv.reshape(len(inv), -1))])

    def key_set(self) -> frozenset:
        return frozenset(self._index)

    def scalar_count(self) -> int:
        """|G ∩ k^x I|."""
        n = self.n
        E = self.elements
        off = E.copy()
        off[:, np.arange(n), np.arange(n)] = 0
        d = E[:, np.arange(n), np.arange(n)]
        return int(np.sum(~off.any(axis=(1, 2)) & (d == d[:, :1]).all(axis=1)))

    def summary(self) -> dict:
        return {"order": self.order, "field": self.spec.to_json(), "n": self.n}

    def to_json(self) -> dict:
        return {"field": self.spec.to_json(), "n": self.n,
                "generators": [g.to_json() for g in self.generators]}


def _validate(generators, spec, n):
    gens = list(generators)
    if gens:
        spec = spec or gens[0].spec
        n = n or gens[0].n
    if spec is None or n is None:
        raise ValueError("an empty generating set needs spec and n")
    for g in gens:
        if g.spec != spec:
            raise FieldMismatch(f"generator over {g.spec}, expected {spec}")
        if g.n != n:
            raise ValueError("generators must have equal dimension")
    if gens:
        dets = batch_det(spec, np.stack([g.data for g in gens]))
        bad = np.flatnonzero(dets == 0)
        if len(bad):
            raise NotInvertible(f"generator {int(bad[0])} is singular")
    return gens, spec, n


def close(generators, cap: int | None = None, spec: FieldSpec | None = None,
          n: int | None = None, label: str | None = None) -> MatrixGroup:
    """Breadth-first closure of ``generators`` under right multiplication."""
    cap = default_cap() if cap is None else cap
    gens, spec, n = _validate(generators, spec, n)
    o = ops(spec)
    r = len(gens)
    G = (np.stack([g.data for g in gens]) if gens
         else linalg.zeros(spec, 0, n, n)).astype(o.dtype)
    eye = linalg.identity(spec, n)
    index = {_keys(eye.reshape(1, -1))[0]: 0}
    blocks = [eye[None]]
    parent, pgen = [-1], [-1]
    right_rows = []
    base = 0
    level = eye[None]
    while len(level) and r:
        k = len(level)
        prods = o.matmul(level[:, None], G[None])  # (k, r, n, n)
        flat = prods.reshape(k * r, n * n)
        rm = np.empty((k, r), dtype=np.int64)
        fresh = []
        for t, key in enumerate(_keys(flat)):
            j = index.get(key)
            if j is None:
                j = len(index)
                index[key] = j
                fresh.append(t)
                parent.append(base + t // r)
                pgen.append(t % r)
            rm[t // r, t % r] = j
        right_rows.append(rm)
        base += k
        if len(index) > cap:
            raise CapExceeded(f"closure exceeded cap {cap}")
        level = flat[fresh].reshape(len(fresh), n, n)
        if len(fresh):
            blocks.append(level)
    elements = np.concatenate(blocks).astype(o.dtype)
    right_mul = (np.concatenate(right_rows) if right_rows
                 else np.zeros((1, 0), dtype=np.int64))
    return MatrixGroup(spec, n, gens, elements, np.array(parent), np.array(pgen),
                       right_mul, cap, label)


def trivial_group(spec: FieldSpec, n: int) -> MatrixGroup:
    return close([Matrix.identity(spec, n)], label="trivial")


# ---------------------------------------------------------------------------
# structure


def _commutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b @ a.inverse() @ b.inverse()


def normal_closure(G: MatrixGroup, seeds, cap: int | None = None) -> MatrixGroup:
    """Smallest subgroup containing ``seeds`` and normalised by G's generators."""
    gens = [s for s in seeds]
    N = close(gens, cap=cap, spec=G.spec, n=G.n)
    conj = [(g, g.inverse()) for g in G.generators]
    changed = True
    while changed:
        changed = False
        for g, gi in conj:
            for c in list(N.generators):
                x = g @ c @ gi
                if x not in N:
                    gens.append(x)
                    N = close(gens, cap=cap, spec=G.spec, n=G.n)
                    changed = True
    # normality: closed under conjugation by every generator of G
    for g, gi in conj:
        assert all((g @ c @ gi) in N for c in N.generators)
    return N


def derived_subgroup(G: MatrixGroup, cap: int | None = None) -> MatrixGroup:
    comms = [_commutator(a, b) for i, a in enumerate(G.generators)
             for b in G.generators[i + 1:]]
    return normal_closure(G, comms, cap)


def abelianization_order(G: MatrixGroup, cap: int | None = None) -> int:
    """|G / [G, G]|."""
    return G.order // derived_subgroup(G, cap).order


def has_l_power_quotient(G: MatrixGroup) -> bool:
    """Whether G has a nontrivial quotient of l-power order (l = char k)."""
    l = G.spec.char
    if G.order % l:
        return False
    return abelianization_order(G) % l == 0


def adjoin_scalars(G: MatrixGroup, cap: int | None = None) -> MatrixGroup:
    """Closure of G together with k^x I."""
    w = primitive_element(G.spec)
    s = Matrix.scalar(G.spec, G.n, w)
    if s in G and G.scalar_count() == G.spec.order - 1:
        return G
    label = f"{G.label}·scalars" if G.label else None
    return close(G.generators + [s], cap=cap, spec=G.spec, n=G.n, label=label)


def is_subgroup(H: MatrixGroup, G: MatrixGroup) -> bool:
    return all(h in G for h in H.generators)


def conjugation_module(G: MatrixGroup):
    """gl_n with h.X = h X h^-1."""
    from bigcheck.gmodule import conjugation_module as cm
    return cm(G)


def natural_module(G: MatrixGroup):
    from bigcheck.gmodule import natural_module as nm
    return nm(G)


# ---------------------------------------------------------------------------
# JSON


def group_from_json(data: dict, cap: int | None = None) -> MatrixGroup:
    spec = FieldSpec.from_json(data["field"])
    n = int(data["n"])
    gens = [Matrix.from_json(spec, g) for g in data["generators"]]
    return close(gens, cap=cap, spec=spec, n=n, label=data.get("label"))


def load_group(path, cap: int | None = None) -> MatrixGroup:
    return group_from_json(json.loads(Path(path).read_text()), cap)


def dump_group(G: MatrixGroup, path) -> None:
    data = G.to_json()
    if G.label:
        data["label"] = G.label
    Path(path).write_text(json.dumps(data, indent=1) + "\n")
