"""k[G]-modules: spinning, MeatAxe splitting, socles and irreducible submodules.

A module is given by the matrices of its generators acting on column
vectors; subspaces are stored as reduced echelon row bases.  Irreducibility
is certified with Norton's test, so a constituent reported here is always
irreducible, never merely "not split so far".
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field

import numpy as np

from bigcheck import linalg, poly
from bigcheck.errors import BudgetExceeded, ZeroVector
from bigcheck.ff import FieldSpec, ops
from bigcheck.matrix import batch_charpoly

DEFAULT_SEED = 0xB16
ENUM_CAP = 10**4
ACTION_BUDGET = 6 * 10**7  # entries of the full action table
MEATAXE_TRIES = 400


@dataclass(eq=False)
class GModule:
    """Representation of ``group`` on k^dim, given on the group's generators."""

    group: object
    spec: FieldSpec
    dim: int
    gens: list
    kind: str = "custom"

    def __post_init__(self):
        self.gens = [np.asarray(a) for a in self.gens]
        for a in self.gens:
            if a.shape != (self.dim, self.dim):
                raise ValueError(f"action matrix shape {a.shape}, expected dim {self.dim}")

    @property
    def active_gens(self):
        """Generator matrices, with the identity standing in for an empty list."""
        return self.gens or [linalg.identity(self.spec, self.dim)]

    @functools.cached_property
    def all_actions(self) -> np.ndarray:
        """Action matrix of every group element, indexed like ``group.elements``."""
        G = self.group
        if G.order * self.dim**2 > ACTION_BUDGET:
            raise BudgetExceeded(f"action table of {G.order} x {self.dim}^2 entries")
        o = ops(self.spec)
        out = np.empty((G.order, self.dim, self.dim), dtype=o.dtype)
        out[0] = linalg.identity(self.spec, self.dim)
        gens = np.stack(self.gens) if self.gens else out[:1]
        # parents always precede children; fill level by level
        depth = _depths(G.parent)
        for d in range(1, int(depth.max()) + 1 if len(depth) else 1):
            idx = np.flatnonzero(depth == d)
            out[idx] = o.matmul(out[G.parent[idx]], gens[G.parent_gen[idx]])
        return out

    def action(self, i: int) -> np.ndarray:
        return self.all_actions[i]

    def restrict(self, basis) -> GModule:
        """Module structure on a stable subspace (basis rows in echelon form)."""
        R, piv = linalg.rref(self.spec, basis)
        acts = [linalg.apply(self.spec, A, R)[:, piv].T for A in self.gens]
        return GModule(self.group, self.spec, len(piv), acts, "sub")

    def quotient(self, basis) -> GModule:
        """Module structure on V / span(basis)."""
        R, piv = linalg.rref(self.spec, basis)
        free = [c for c in range(self.dim) if c not in set(piv)]
        eye = linalg.identity(self.spec, self.dim)
        acts = []
        for A in self.gens:
            imgs = _reduce_rows(self.spec, R, piv, linalg.apply(self.spec, A, eye[free]))
            acts.append(imgs[:, free].T)
        return GModule(self.group, self.spec, len(free), acts, "quotient")

    def is_stable(self, basis) -> bool:
        return linalg.is_stable(self.spec, basis, self.active_gens)

    def check_homomorphism(self, pairs) -> bool:
        """action(gh) = action(g) action(h) on the given index pairs."""
        G = self.group
        o = ops(self.spec)
        for a, b in pairs:
            prod = o.matmul(G.elements[a], G.elements[b])
            c = G.index_of(prod)
            if not np.array_equal(self.action(c), o.matmul(self.action(a), self.action(b))):
                return False
        return True


def _depths(parent: np.ndarray) -> np.ndarray:
    depth = np.zeros(len(parent), dtype=np.int64)
    for i in range(1, len(parent)):
        depth[i] = depth[parent[i]] + 1
    return depth


def _reduce_rows(spec, R, piv, V):
    """Reduce each row of V modulo the rref basis R."""
    o = ops(spec)
    V = np.array(V, copy=True)
    for row, p in zip(R, piv):
        c = V[:, p].copy()
        nz = np.flatnonzero(c)
        if len(nz):
            V[nz] = o.vsub(V[nz], o.vmul(c[nz, None], row[None, :]))
    return V


# ---------------------------------------------------------------------------
# standard modules


def conjugation_action(spec: FieldSpec, g: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """Matrix of X -> g X g^-1 on row-major vec(X)."""
    return linalg.kron(spec, g, g_inv.T)


def natural_module(G) -> GModule:
    return GModule(G, G.spec, G.n, [g.data for g in G.generators], "natural")


def conjugation_module(G) -> GModule:
    acts = [conjugation_action(G.spec, g.data, g.inverse().data) for g in G.generators]
    return GModule(G, G.spec, G.n**2, acts, "gl")


def sl_basis(spec: FieldSpec, n: int) -> np.ndarray:
    """Rows vec(E_ij) for i != j, then vec(E_ii - E_nn) for i < n."""
    o = ops(spec)
    rows = []
    for i in range(n):
        for j in range(n):
            if i != j:
                v = linalg.zeros(spec, n * n)
                v[i * n + j] = 1
                rows.append(v)
    for i in range(n - 1):
        v = linalg.zeros(spec, n * n)
        v[i * n + i] = 1
        v[(n - 1) * n + n - 1] = o.neg(1)
        rows.append(v)
    return np.array(rows).reshape(len(rows), n * n)


def sl_coordinate_columns(n: int) -> list[int]:
    """Positions of vec(X) read off as sl_n coordinates (matches sl_basis order)."""
    return [i * n + j for i in range(n) for j in range(n) if i != j] + \
        [i * n + i for i in range(n - 1)]


def sl_module(G) -> GModule:
    """sl_n under conjugation, in the sl_basis coordinates."""
    spec, n = G.spec, G.n
    B = sl_basis(spec, n)
    cols = sl_coordinate_columns(n)
    acts = []
    for g in G.generators:
        A = conjugation_action(spec, g.data, g.inverse().data)
        acts.append(linalg.apply(spec, A, B)[:, cols].T)
    return GModule(G, spec, n * n - 1, acts, "sl")


# ---------------------------------------------------------------------------
# spinning


def spin(mod: GModule, v) -> np.ndarray:
    """Smallest stable subspace containing v (echelon basis rows)."""
    v = np.atleast_2d(np.asarray(v))
    if not v.any():
        raise ZeroVector("cannot spin the zero vector")
    return linalg.spin_rows(mod.spec, mod.active_gens, v)


# ---------------------------------------------------------------------------
# MeatAxe


class _AlgebraSampler:
    """Seeded random elements of the enveloping algebra (Holt-Rees words)."""

    def __init__(self, mod: GModule, seed: int):
        self.mod = mod
        self.spec = mod.spec
        self.rng = random.Random(seed)
        self.words = [np.asarray(a) for a in mod.active_gens]

    def sample(self) -> np.ndarray:
        o = ops(self.spec)
        q = self.spec.order
        a, b = self.rng.randrange(len(self.words)), self.rng.randrange(len(self.words))
        self.words.append(o.matmul(self.words[a], self.words[b]))
        if len(self.words) > 12:
            self.words.pop(len(self.mod.active_gens))
        acc = linalg.zeros(self.spec, self.mod.dim, self.mod.dim)
        for w in self.words:
            c = self.rng.randrange(q)
            if c:
                acc = o.vadd(acc, o.scale(c, w))
        return acc


def split(mod: GModule, seed: int = DEFAULT_SEED) -> np.ndarray | None:
    """A proper nonzero submodule, or None once irreducibility is certified."""
    spec, D = mod.spec, mod.dim
    if D <= 1:
        return None
    gens = mod.active_gens
    gens_t = [a.T.copy() for a in gens]
    sampler = _AlgebraSampler(mod, seed)
    for _ in range(MEATAXE_TRIES):
        a = sampler.sample()
        cp = list(batch_charpoly(spec, a[None])[0])
        for f, _e in sorted(poly.factor(spec, cp), key=lambda t: len(t[0])):
            fa = linalg.matpoly(spec, f, a)
            N = linalg.nullspace(spec, fa)
            S = linalg.spin_rows(spec, gens, N[:1])
            if len(S) < D:
                return S
            if len(N) != len(f) - 1:
                continue
            # Norton: the transposed module must also fail to split
            Nt = linalg.nullspace(spec, fa.T)
            St = linalg.spin_rows(spec, gens_t, Nt[:1])
            if len(St) < D:
                return linalg.rowspace(spec, linalg.nullspace(spec, St))
            return None
    raise BudgetExceeded(f"MeatAxe found no certificate in {MEATAXE_TRIES} tries")


def is_irreducible(mod: GModule, seed: int = DEFAULT_SEED) -> bool:
    return split(mod, seed) is None


def composition_factors(mod: GModule, seed: int = DEFAULT_SEED) -> list[GModule]:
    S = split(mod, seed)
    if S is None:
        return [mod]
    return composition_factors(mod.restrict(S), seed) + composition_factors(mod.quotient(S), seed)


def hom_space(spec: FieldSpec, src_gens, dst_gens, src_dim: int, dst_dim: int) -> list:
    """k-basis of {X (dst x src) : B_i X = X A_i for all i}."""
    o = ops(spec)
    blocks = []
    eye_s = linalg.identity(spec, src_dim)
    eye_d = linalg.identity(spec, dst_dim)
    for A, B in zip(src_gens, dst_gens):
        left = linalg.kron(spec, B, eye_s)
        right = linalg.kron(spec, eye_d, A.T)
        blocks.append(o.vsub(left, right))
    if not blocks:
        null = linalg.identity(spec, src_dim * dst_dim)
    else:
        null = linalg.nullspace(spec, np.vstack(blocks))
    return [x.reshape(dst_dim, src_dim) for x in null]


def endomorphisms(mod: GModule) -> list:
    return hom_space(mod.spec, mod.active_gens, mod.active_gens, mod.dim, mod.dim)


def is_absolutely_irreducible(mod: GModule, seed: int = DEFAULT_SEED) -> bool:
    return is_irreducible(mod, seed) and len(endomorphisms(mod)) == 1


# ---------------------------------------------------------------------------
# socle and irreducible submodules


@dataclass
class Constituent:
    """One isotypic component of the socle."""

    basis: np.ndarray          # one irreducible submodule of this type (echelon rows)
    dim: int
    multiplicity: int
    end_degree: int            # End(S) = F_{q^e}
    hom_basis: list = field(repr=False, default_factory=list)   # End(S)-basis of Hom(S, V)
    end_basis: list = field(repr=False, default_factory=list)   # k-basis of End(S)

    def submodule_count(self, q: int) -> int:
        Q = q**self.end_degree
        return (Q**self.multiplicity - 1) // (Q - 1)


@dataclass
class Submodule:
    basis: np.ndarray
    constituent: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def key(self) -> bytes:
        return np.ascontiguousarray(self.basis, dtype=np.int64).tobytes()


@dataclass
class SubmoduleList:
    module: GModule
    constituents: list
    all_irreducibles: list | None = None
    truncated: bool = False

    @property
    def exhaustive(self) -> bool:
        return self.all_irreducibles is not None and not self.truncated

    def expected_count(self) -> int:
        q = self.module.spec.order
        return sum(c.submodule_count(q) for c in self.constituents)


def _image(spec, X) -> np.ndarray:
    return linalg.rowspace(spec, np.asarray(X).T)


def _end_basis_of_hom(spec, homs, ends):
    """Greedy X_1..X_m with Hom = sum X_i End(S)."""
    o = ops(spec)
    shape = homs[0].shape
    ech = linalg.Echelon(spec, shape[0] * shape[1])
    chosen = []
    for X in homs:
        if ech.reduce(X.reshape(-1)).any():
            chosen.append(X)
            for E in ends:
                ech.add(o.matmul(X, E).reshape(-1))
    return chosen


def socle_constituents(mod: GModule, seed: int = DEFAULT_SEED) -> SubmoduleList:
    """Isotypic components of the socle of mod, one entry per isomorphism type."""
    spec = mod.spec
    factors = composition_factors(mod, seed)
    types: list[GModule] = []
    for S in factors:
        if not any(T.dim == S.dim and hom_space(spec, S.active_gens, T.active_gens, S.dim, T.dim)
                   for T in types):
            types.append(S)
    out = []
    for S in types:
        homs = hom_space(spec, S.active_gens, mod.active_gens, S.dim, mod.dim)
        if not homs:
            continue
        ends = endomorphisms(S)
        e = len(ends)
        assert len(homs) % e == 0
        basis = _image(spec, homs[0])
        assert len(basis) == S.dim and mod.is_stable(basis)
        out.append(Constituent(basis, S.dim, len(homs) // e, e,
                               _end_basis_of_hom(spec, homs, ends), ends))
    out.sort(key=lambda c: (c.dim, c.basis.tobytes()))
    return SubmoduleList(mod, out)


def _end_elements(spec, ends):
    """All elements of End(S) as matrices (q^e of them), zero first."""
    o = ops(spec)
    q = spec.order
    e = len(ends)
    for idx in range(q**e):
        acc = np.zeros_like(ends[0])
        digits = idx
        for E in ends:
            digits, c = divmod(digits, q)
            if c:
                acc = o.vadd(acc, o.scale(c, E))
        yield acc


def enumerate_irreducible_submodules(mod: GModule, cap: int = ENUM_CAP,
                                     seed: int = DEFAULT_SEED,
                                     socle: SubmoduleList | None = None) -> SubmoduleList:
    """Every irreducible submodule of mod, up to ``cap`` per isotypic component."""
    spec = mod.spec
    o = ops(spec)
    soc = socle if socle is not None else socle_constituents(mod, seed)
    found = []
    truncated = False
    for ci, c in enumerate(soc.constituents):
        m = c.multiplicity
        elems = list(_end_elements(spec, c.end_basis))
        count = 0
        for lead in range(m):
            # coefficient 1 at ``lead``, zero before, any End(S) element after
            tail = m - lead - 1
            for combo in range(len(elems) ** tail):
                if count >= cap:
                    truncated = True
                    break
                X = c.hom_basis[lead]
                digits = combo
                for j in range(lead + 1, m):
                    digits, t = divmod(digits, len(elems))
                    if t:
                        X = o.vadd(X, o.matmul(c.hom_basis[j], elems[t]))
                found.append(Submodule(_image(spec, X), ci))
                count += 1
            if truncated and count >= cap:
                break
    return SubmoduleList(mod, soc.constituents, found, truncated)
