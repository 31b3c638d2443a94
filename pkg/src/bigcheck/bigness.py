"""The M-bigness decision procedure.

A subgroup H of GL_n(k) is M-big when
  * H has no quotient of l-power order,
  * H^0(H, sl_n) = 0 and H^1(H, sl_n) = 0,
  * every irreducible k[H]-submodule W of gl_n has a witness (h, alpha):
    alpha in k a simple root of charpoly(h) with alpha^M != beta^M for the
    other roots beta, and u^T X v != 0 for some X in W, where v and u are the
    right and left alpha-eigenvectors of h.

For a simple root, adj(h - alpha I) is a nonzero multiple of v u^T, so the
witness functional X -> u^T X v is read off the adjugate without solving for
eigenvectors; this lets the search run over all elements at once.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from bigcheck import linalg
from bigcheck.cohomology import h0, h1
from bigcheck.ff import ops
from bigcheck.gmodule import (DEFAULT_SEED, ENUM_CAP, conjugation_module,
                              enumerate_irreducible_submodules, sl_module)
from bigcheck.group import MatrixGroup, has_l_power_quotient
from bigcheck.poly import embedding
from bigcheck.matrix import batch_charpoly, batch_det, eigen_core, eigenvectors

CHUNK = 4096


@dataclass
class BignessReport:
    order: int
    field: dict
    n: int
    M: int
    cond_quotient: bool | None
    cond_h0: bool | None
    cond_h1: bool | None
    cond_witnesses: bool | None
    witness_table: list
    exhaustive: bool
    h0_dim: int | None = None
    h1_dim: int | None = None
    h1_fast_path: bool | None = None
    extension_witnesses: list = field(default_factory=list)
    timing: dict = field(default_factory=dict, compare=False)

    @property
    def verdict(self) -> str:
        ok = all(c is True for c in (self.cond_quotient, self.cond_h0, self.cond_h1,
                                     self.cond_witnesses))
        return "big" if ok else "not_big"

    @property
    def is_big(self) -> bool:
        return self.verdict == "big"

    def conditions(self) -> dict:
        return {"quotient": self.cond_quotient, "h0": self.cond_h0,
                "h1": self.cond_h1, "witnesses": self.cond_witnesses}

    def failed_conditions(self) -> list[str]:
        return [k for k, v in self.conditions().items() if v is False]

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "order": self.order,
            "field": self.field,
            "n": self.n,
            "M": self.M,
            "conditions": self.conditions(),
            "witnesses": [
                {"submodule_dim": w["submodule_dim"], "h_index": w["h_index"], "alpha": w["alpha"]}
                for w in self.witness_table
            ],
            "verdict": self.verdict,
            "exhaustive": self.exhaustive,
            "details": {
                "h0_dim": self.h0_dim,
                "h1_dim": self.h1_dim,
                "h1_fast_path": self.h1_fast_path,
                "submodules": [
                    {k: w[k] for k in ("submodule", "constituent", "submodule_dim",
                                       "scalar_line", "separation")}
                    for w in self.witness_table
                ],
                "extension_witnesses": self.extension_witnesses,
            },
        }
        if timing:
            out["timing"] = self.timing
        return out


# ---------------------------------------------------------------------------
# witness machinery


def _alpha_json(spec, code):
    return int(code) if spec.degree == 1 else list(spec.coeffs(int(code)))


def qualifying_roots(spec, cp: tuple, M: int) -> list[int]:
    """Codes alpha in k that are simple, M-separated roots of cp."""
    core = eigen_core(spec, cp, M)
    out = []
    for i, (_, mult) in enumerate(core.roots):
        if mult != 1 or not core.separated(i):
            continue
        a = core.base_root(i)
        if a is not None:
            out.append(a)
    return out


def batch_adjugate(spec, stack) -> np.ndarray:
    """Adjugates of a stack (B, n, n) from cofactor determinants."""
    o = ops(spec)
    stack = np.asarray(stack)
    B, n, _ = stack.shape
    out = linalg.zeros(spec, B, n, n)
    if n == 1:
        out[:, 0, 0] = 1
        return out
    for i in range(n):
        rows = [r for r in range(n) if r != i]
        for j in range(n):
            cols = [c for c in range(n) if c != j]
            minor = stack[:, rows][:, :, cols]
            d = batch_det(spec, minor)
            if (i + j) % 2:
                d = o.vneg(d)
            out[:, j, i] = d
    return out


def witness_pairs(G: MatrixGroup, M: int):
    """All (h_index, alpha_code, functional) with alpha a qualifying root of h, closure order.

    The functional phi (length n^2, row-major) satisfies phi . vec(X) = c u^T X v, c != 0.
    Yields blocks (h_idx array, alpha array, phi matrix) of at most CHUNK pairs.
    """
    spec, n = G.spec, G.n
    o = ops(spec)
    eye = linalg.identity(spec, n)
    for a in range(0, G.order, CHUNK):
        E = G.elements[a:a + CHUNK]
        cps = batch_charpoly(spec, E)
        h_idx, alphas = [], []
        cache = {}
        for t, cp in enumerate(map(tuple, cps.tolist())):
            roots = cache.get(cp)
            if roots is None:
                roots = cache[cp] = qualifying_roots(spec, cp, M)
            for r in roots:
                h_idx.append(a + t)
                alphas.append(r)
        if not h_idx:
            continue
        h_idx = np.array(h_idx)
        alphas = np.array(alphas, dtype=o.dtype)
        shifted = o.vsub(G.elements[h_idx], o.vmul(alphas[:, None, None], eye[None]))
        adj = batch_adjugate(spec, shifted)
        # adj = c v u^T, so phi_(a,b) = u_a v_b is proportional to adj[b, a]
        phi = np.swapaxes(adj, 1, 2).reshape(len(h_idx), n * n)
        yield h_idx, alphas, phi


def _search(G: MatrixGroup, bases: list, M: int):
    """First witness (h_index, alpha) per basis in closure order, or None."""
    spec = G.spec
    o = ops(spec)
    found = [None] * len(bases)
    if not bases:
        return found
    rows = np.vstack(bases)
    owner = np.concatenate([np.full(len(b), k) for k, b in enumerate(bases)])
    pending = np.ones(len(bases), dtype=bool)
    for h_idx, alphas, phi in witness_pairs(G, M):
        live = pending[owner]
        if not live.any():
            break
        sub_rows, sub_owner = rows[live], owner[live]
        hits = o.matmul(sub_rows, phi.T) != 0  # (R, K)
        for k in np.unique(sub_owner):
            cols = hits[sub_owner == k].any(axis=0)
            if cols.any():
                c = int(np.argmax(cols))
                found[k] = (int(h_idx[c]), int(alphas[c]))
                pending[k] = False
    return found


def find_witness(G: MatrixGroup, W, M: int):
    """First closure-order (h, alpha) detecting the subspace W of gl_n, or None."""
    res = _search(G, [np.atleast_2d(np.asarray(W))], M)[0]
    if res is None:
        return None
    h, a = res
    return G.element(h), G.spec.from_code(a)


def _extension_witness(G: MatrixGroup, basis, M: int, limit: int = 20000):
    """Witness allowing alpha outside k (informational only)."""
    spec, n = G.spec, G.n
    cps = batch_charpoly(spec, G.elements[:limit])
    for h, cp in enumerate(map(tuple, cps.tolist())):
        core = eigen_core(spec, cp, M)
        if core.field == spec:
            continue
        for i, (r, mult) in enumerate(core.roots):
            if mult != 1 or not core.separated(i) or core.base_root(i) is not None:
                continue
            big = core.field
            u, v = eigenvectors(G.element(h), big.from_code(r))
            bo = ops(big)
            e = embedding(spec, big)
            for row in basis:
                X = [e(int(x)) for x in row]
                acc = 0
                for a_ in range(n):
                    for b_ in range(n):
                        if X[a_ * n + b_]:
                            acc = bo.add(acc, bo.mul(u[a_], bo.mul(X[a_ * n + b_], v[b_])))
                if acc:
                    return {"h_index": h, "alpha": _alpha_json(big, r),
                            "field": big.to_json()}
    return None


def _scalar_line(G, basis) -> bool:
    n = G.n
    ident = linalg.identity(G.spec, n).reshape(1, -1)
    return len(basis) == 1 and linalg.rank(G.spec, np.vstack([basis, ident])) == 1


# ---------------------------------------------------------------------------


def check_m_big(G: MatrixGroup, M: int, cap: int = ENUM_CAP, seed: int = DEFAULT_SEED,
                short_circuit: bool = False, extension: bool = True) -> BignessReport:
    """Evaluate all four conditions (in order) and assemble the report."""
    if M < 1:
        raise ValueError("M must be positive")
    spec = G.spec
    t0 = time.perf_counter()
    timing = {}
    report = BignessReport(G.order, spec.to_json(), G.n, M, None, None, None, None, [], True)
    report.timing = timing

    report.cond_quotient = not has_l_power_quotient(G)
    timing["quotient"] = time.perf_counter() - t0
    if short_circuit and not report.cond_quotient:
        return report

    sl = sl_module(G)
    H0 = h0(sl)
    report.h0_dim = H0.dimension
    report.cond_h0 = H0.dimension == 0
    timing["h0"] = time.perf_counter() - t0
    if short_circuit and not report.cond_h0:
        return report

    H1 = h1(sl)
    report.h1_dim = H1.dimension
    report.h1_fast_path = H1.fast_path_used
    report.cond_h1 = H1.dimension == 0
    timing["h1"] = time.perf_counter() - t0
    if short_circuit and not report.cond_h1:
        return report

    gl = conjugation_module(G)
    subs = enumerate_irreducible_submodules(gl, cap=cap, seed=seed)
    report.exhaustive = subs.exhaustive
    bases = [s.basis for s in subs.all_irreducibles]
    found = _search(G, bases, M)
    table = []
    for k, (s, hit) in enumerate(zip(subs.all_irreducibles, found)):
        row = {
            "submodule": k,
            "constituent": s.constituent,
            "submodule_dim": s.dim,
            "scalar_line": _scalar_line(G, s.basis),
            "h_index": None,
            "alpha": None,
            "separation": None,
        }
        if hit is not None:
            h, a = hit
            row["h_index"] = h
            row["alpha"] = _alpha_json(spec, a)
            row["separation"] = _separation_detail(G, h, a, M)
        table.append(row)
    report.witness_table = table
    report.cond_witnesses = all(r["h_index"] is not None for r in table)
    if extension and not report.cond_witnesses:
        for r, s in zip(table, subs.all_irreducibles):
            if r["h_index"] is None:
                ext = _extension_witness(G, s.basis, M)
                if ext is not None:
                    ext = {"submodule": r["submodule"], **ext}
                report.extension_witnesses.append(ext or {"submodule": r["submodule"],
                                                          "h_index": None})
    timing["witnesses"] = time.perf_counter() - t0
    return report


def _separation_detail(G, h, a, M):
    """alpha^M and the M-th powers of the other roots, as splitting-field codes."""
    spec = G.spec
    cp = tuple(batch_charpoly(spec, G.elements[h:h + 1])[0].tolist())
    core = eigen_core(spec, cp, M)
    big = core.field
    bo = ops(big)
    ab = embedding(spec, big)(a)
    others = [r for r, _ in core.roots if r != ab]
    return {"alpha_M": _alpha_json(big, bo.pow(ab, M)),
            "others_M": [_alpha_json(big, bo.pow(r, M)) for r in others],
            "splitting_degree": core.splitting_degree}


def verdicts_agree(a: BignessReport, b: BignessReport) -> bool:
    return a.verdict == b.verdict and a.conditions() == b.conditions()
