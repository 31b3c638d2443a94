"""H^0 and H^1 of a finite matrix group with coefficients in a module.

H^1 is computed from cocycle values on the generators.  A choice of values
F = (f(s_1), ..., f(s_r)) extends along the closure tree to
f(g s) = f(g) + g f(s); it is a cocycle exactly when this holds on every edge
(g, s) of the right Cayley graph, which gives the linear system solved here.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from bigcheck import linalg
from bigcheck.errors import BudgetExceeded
from bigcheck.ff import ops
from bigcheck.gmodule import GModule

SYSTEM_BUDGET = int(os.environ.get("BIGCHECK_SYSTEM_BUDGET", 4 * 10**7))
FULL_BUDGET = 4000  # unknowns of the full-function system
CHUNK_ROWS = 20000


@dataclass
class CohomologyResult:
    degree: int
    dimension: int
    basis: list = field(repr=False, default_factory=list)
    fast_path_used: bool = False
    z1_dim: int | None = None
    b1_dim: int | None = None
    method: str = ""


def h0(mod: GModule) -> CohomologyResult:
    """Fixed points of the generators."""
    o = ops(mod.spec)
    eye = linalg.identity(mod.spec, mod.dim)
    system = np.vstack([o.vsub(A, eye) for A in mod.active_gens])
    basis = linalg.nullspace(mod.spec, system)
    return CohomologyResult(0, len(basis), list(basis), method="kernel")


def _accumulate_rank(spec, chunks, ncols):
    """Row-reduce a stream of row blocks; returns the reduced basis."""
    R = linalg.zeros(spec, 0, ncols)
    for block in chunks:
        if not block.any():
            continue
        R = linalg.rowspace(spec, np.vstack([R, block]))
        if len(R) == ncols:
            break
    return R


def cocycle_tables(mod: GModule):
    """L with f(g_i) = L[i] @ F for every element, built along the closure tree."""
    G = mod.group
    D, r = mod.dim, len(mod.gens)
    if G.order * D * r * D > SYSTEM_BUDGET:
        raise BudgetExceeded(f"cocycle system of {G.order} x {D} x {r * D} entries")
    o = ops(mod.spec)
    acts = mod.all_actions
    L = linalg.zeros(mod.spec, G.order, D, r * D)
    depth = np.zeros(G.order, dtype=np.int64)
    for i in range(1, G.order):
        depth[i] = depth[G.parent[i]] + 1
    for d in range(1, int(depth.max()) + 1 if G.order > 1 else 1):
        idx = np.flatnonzero(depth == d)
        p, s = G.parent[idx], G.parent_gen[idx]
        L[idx] = L[p]
        for t in range(r):
            sel = idx[s == t]
            if len(sel):
                blk = L[sel, :, t * D:(t + 1) * D]
                L[sel, :, t * D:(t + 1) * D] = o.vadd(blk, acts[G.parent[sel]])
    return L


def _edge_constraints(mod: GModule, L):
    G = mod.group
    D, r = mod.dim, len(mod.gens)
    o = ops(mod.spec)
    acts = mod.all_actions
    step = max(1, CHUNK_ROWS // max(D, 1))
    for t in range(r):
        tgt = G.right_mul[:, t]
        for a in range(0, G.order, step):
            sl = slice(a, a + step)
            diff = o.vsub(L[tgt[sl]], L[sl])
            diff[:, :, t * D:(t + 1) * D] = o.vsub(diff[:, :, t * D:(t + 1) * D], acts[sl])
            yield diff.reshape(-1, r * D)


def _coboundaries(mod: GModule):
    """rD x D matrix v -> ((A_s - I) v)_s, as rows of generator-value vectors."""
    o = ops(mod.spec)
    eye = linalg.identity(mod.spec, mod.dim)
    B = np.vstack([o.vsub(A, eye) for A in mod.gens])  # (rD, D)
    return B.T  # row j = coboundary of e_j


def h1(mod: GModule, method: str = "generators") -> CohomologyResult:
    """dim Z^1 - dim B^1; fast path when l does not divide |G|."""
    G = mod.group
    spec = mod.spec
    D, r = mod.dim, len(mod.gens)
    if math.gcd(G.order, spec.char) == 1:
        return CohomologyResult(1, 0, [], True, method="coprime")
    if method == "full":
        return h1_full(mod)
    if r == 0:
        return CohomologyResult(1, 0, [], False, 0, 0, "generators")
    L = cocycle_tables(mod)
    C = _accumulate_rank(spec, _edge_constraints(mod, L), r * D)
    Z = linalg.nullspace(spec, C, r * D) if len(C) else linalg.identity(spec, r * D)
    Bm = _coboundaries(mod)
    b1 = linalg.rank(spec, Bm)
    assert b1 == D - h0(mod).dimension
    reps = _complement(spec, Bm, Z)
    assert len(Z) - b1 == len(reps)
    for F in reps:
        assert is_cocycle_on_generators(mod, F, L)
    return CohomologyResult(1, len(reps), reps, False, len(Z), b1, "generators")


def _complement(spec, B, Z):
    """Rows of Z completing span(B) to span(B) + span(Z) (B is inside Z)."""
    ech = linalg.Echelon(spec, Z.shape[1])
    for row in B:
        ech.add(row)
    return [z for z in Z if ech.add(z) is not None]


def is_cocycle_on_generators(mod: GModule, F, L=None) -> bool:
    """Whether generator values F extend to a cocycle."""
    L = cocycle_tables(mod) if L is None else L
    o = ops(mod.spec)
    F = np.asarray(F)
    for block in _edge_constraints(mod, L):
        if o.matmul(block, F[:, None]).any():
            return False
    return True


def cocycle_values(mod: GModule, F) -> np.ndarray:
    """Full table f(g_i) for the cocycle with generator values F."""
    o = ops(mod.spec)
    L = cocycle_tables(mod)
    return o.matmul(L, np.asarray(F)[:, None])[:, :, 0]


def h1_full(mod: GModule) -> CohomologyResult:
    """Unknowns f(h) for every h; equations f(g s) = f(g) + g f(s) for all g, s."""
    G = mod.group
    spec = mod.spec
    D, r = mod.dim, len(mod.gens)
    N = G.order * D
    if N > FULL_BUDGET:
        raise BudgetExceeded(f"full cocycle system with {N} unknowns")
    o = ops(spec)
    acts = mod.all_actions
    gen_idx = [G.index_of(g) for g in G.generators]
    rows = []
    eye = linalg.identity(spec, D)
    for g in range(G.order):
        for t in range(r):
            # f(g s) - f(g) - g f(s) = 0
            row = linalg.zeros(spec, D, N)
            gs, s = int(G.right_mul[g, t]), gen_idx[t]
            row[:, gs * D:(gs + 1) * D] = o.vadd(row[:, gs * D:(gs + 1) * D], eye)
            row[:, g * D:(g + 1) * D] = o.vsub(row[:, g * D:(g + 1) * D], eye)
            row[:, s * D:(s + 1) * D] = o.vsub(row[:, s * D:(s + 1) * D], acts[g])
            rows.append(row)
    # f(e) = 0 is implied by f(e s) = f(e) + f(s)
    C = _accumulate_rank(spec, (np.vstack(rows[i:i + 64]) for i in range(0, len(rows), 64)), N)
    Z = linalg.nullspace(spec, C, N)
    cob = np.vstack([o.vsub(acts[i], eye) for i in range(G.order)]).T  # (D, N)
    b1 = linalg.rank(spec, cob)
    assert b1 == D - h0(mod).dimension
    reps = _complement(spec, cob, Z)
    return CohomologyResult(1, len(reps), reps, False, len(Z), b1, "full")
