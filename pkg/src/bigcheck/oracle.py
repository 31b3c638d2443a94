"""Naive, independent recomputation of the M-bigness verdict.

Nothing here reuses the main pipeline: the group is re-closed from its
generators, arithmetic is plain numpy modulo p, the l-quotient test uses the
subgroup generated by l'-elements instead of the abelianisation, H^1 uses the
left Cayley graph (or the all-pairs system for tiny groups), submodules come
from spinning every line of gl_n, and separation is a polynomial gcd test.
Prime fields only.
"""

from __future__ import annotations

import math

import numpy as np

from bigcheck.bigness import BignessReport
from bigcheck.errors import TooLargeForOracle

ORDER_LIMIT = 5000
LINE_LIMIT = 10**6
PAIRS_LIMIT = 90  # all-pairs H^1 system only while |G| * dim sl_n stays this small
LINE_CHUNK = 8192


# ---------------------------------------------------------------------------
# arithmetic mod p


def _inv(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def _rref(A: np.ndarray, p: int):
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    r = 0
    piv = []
    for c in range(cols):
        nz = [i for i in range(r, rows) if A[i, c]]
        if not nz:
            continue
        i = nz[0]
        A[[r, i]] = A[[i, r]]
        A[r] = A[r] * _inv(A[r, c], p) % p
        for k in range(rows):
            if k != r and A[k, c]:
                A[k] = (A[k] - A[k, c] * A[r]) % p
        piv.append(c)
        r += 1
        if r == rows:
            break
    return A[:r], piv


def _rank(A, p) -> int:
    A = np.asarray(A)
    return 0 if A.size == 0 else len(_rref(A, p)[1])


def _kernel(A, p, ncols=None) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1] if ncols is None else ncols
    if A.size == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = _rref(A, p)
    free = [c for c in range(n) if c not in piv]
    K = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        K[t, f] = 1
        for k, c in enumerate(piv):
            K[t, c] = (-R[k, f]) % p
    return K


def _mat_inv(g: np.ndarray, p: int) -> np.ndarray:
    n = len(g)
    R, piv = _rref(np.hstack([g, np.eye(n, dtype=np.int64)]), p)
    return R[:, n:]


def _matpow(A, e, p):
    n = len(A)
    out = np.eye(n, dtype=np.int64)
    for _ in range(e):
        out = out @ A % p
    return out


# polynomials mod p, ascending lists
def _ptrim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, b, p):
    a = _ptrim([x % p for x in a])
    inv = _inv(b[-1], p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        s = len(a) - len(b)
        for i, y in enumerate(b):
            a[s + i] = (a[s + i] - c * y) % p
        a = _ptrim(a)
    return a


def _pgcd(a, b, p):
    a, b = _ptrim([x % p for x in a]), _ptrim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _pmul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _charpoly_laplace(g, p):
    """det(xI - g) by cofactor expansion with polynomial entries."""
    n = len(g)
    M = [[([(-int(g[i][j])) % p, 1] if i == j else [(-int(g[i][j])) % p]) for j in range(n)]
         for i in range(n)]

    def det(rows, cols):
        if len(rows) == 1:
            return M[rows[0]][cols[0]]
        total = [0]
        for k, c in enumerate(cols):
            sub = det(rows[1:], cols[:k] + cols[k + 1:])
            term = _pmul(M[rows[0]][c], sub, p)
            if k % 2:
                term = [(-x) % p for x in term]
            m = max(len(total), len(term))
            total = [((total[i] if i < len(total) else 0) + (term[i] if i < len(term) else 0)) % p
                     for i in range(m)]
        return total

    return _ptrim(det(list(range(n)), list(range(n))))


# ---------------------------------------------------------------------------


def _closure(gens, p, n, limit):
    ident = np.eye(n, dtype=np.int64)
    seen = {ident.tobytes(): 0}
    elems = [ident]
    queue = [ident]
    while queue:
        nxt = []
        for a in queue:
            for s in gens:
                b = a @ s % p
                k = b.tobytes()
                if k not in seen:
                    seen[k] = len(elems)
                    elems.append(b)
                    nxt.append(b)
                    if len(elems) > limit:
                        raise TooLargeForOracle(f"group order exceeds {limit}")
        queue = nxt
    return elems, seen


def _element_order(g, p, n):
    ident = np.eye(n, dtype=np.int64)
    x = g.copy()
    k = 1
    while not np.array_equal(x, ident):
        x = x @ g % p
        k += 1
    return k


def _sl_basis(n, p):
    """E_ij (i != j) and E_ii - E_(i+1)(i+1) as vec rows."""
    rows = []
    for i in range(n):
        for j in range(n):
            if i != j:
                X = np.zeros((n, n), dtype=np.int64)
                X[i, j] = 1
                rows.append(X.reshape(-1))
    for i in range(n - 1):
        X = np.zeros((n, n), dtype=np.int64)
        X[i, i] = 1
        X[i + 1, i + 1] = p - 1
        rows.append(X.reshape(-1))
    return np.array(rows, dtype=np.int64).reshape(len(rows), n * n)


def _coords(B, vecs, p):
    """Coordinates of vecs (rows) in the basis B (rows), assuming membership."""
    D = len(B)
    aug = np.hstack([B.T % p, vecs.T % p])
    R, piv = _rref(aug, p)
    assert all(c < D for c in piv), "vector outside the subspace"
    out = np.zeros((D, vecs.shape[0]), dtype=np.int64)
    for k, c in enumerate(piv):
        out[c] = R[k, D:]
    return out.T


class _Oracle:
    def __init__(self, G, M: int):
        spec = G.spec
        if spec.degree != 1:
            raise TooLargeForOracle("oracle supports prime fields only")
        self.p = p = spec.char
        self.n = n = G.n
        self.M = M
        self.gens = [np.array(g.data, dtype=np.int64) % p for g in G.generators] \
            or [np.eye(n, dtype=np.int64)]
        self.elems, self.index = _closure(self.gens, p, n, ORDER_LIMIT)
        self.order = len(self.elems)
        D = n * n
        if (p**D - 1) // (p - 1) > LINE_LIMIT:
            raise TooLargeForOracle("too many lines in gl_n")
        self.inv = [_mat_inv(g, p) for g in self.elems]
        # conjugation on row-major vec
        self.gl = [np.kron(g, hi.T) % p for g, hi in zip(self.elems, self.inv)]
        self.slB = _sl_basis(n, p)
        self.sl = [_coords(self.slB, (self.slB @ A.T) % p, p).T for A in self.gl]

    # condition 1 -------------------------------------------------------------
    def no_l_quotient(self) -> bool:
        p, n = self.p, self.n
        # O^l(G) is generated by the l'-elements; add them one at a time
        gens, seen = [], {np.eye(n, dtype=np.int64).tobytes()}
        for g in self.elems:
            if g.tobytes() in seen or _element_order(g, p, n) % p == 0:
                continue
            gens.append(g)
            seen = set(_closure(gens, p, n, ORDER_LIMIT)[1])
        return len(seen) == self.order

    # condition 2 -------------------------------------------------------------
    def h0_dim(self) -> int:
        p = self.p
        D = len(self.slB)
        if p ** D * self.order <= 2 * 10**5:
            count = 0
            for idx in range(p ** D):
                v = np.array([(idx // p**i) % p for i in range(D)], dtype=np.int64)
                if all(not ((A @ v - v) % p).any() for A in self.sl):
                    count += 1
            return round(math.log(count, p))
        I = np.eye(D, dtype=np.int64)
        return D - _rank(np.vstack([(A - I) % p for A in self.sl]), p)

    # condition 3 -------------------------------------------------------------
    def h1_dim(self) -> int:
        p = self.p
        D = len(self.slB)
        N = self.order
        I = np.eye(D, dtype=np.int64)
        b1 = _rank(np.vstack([(A - I) % p for A in self.sl]).T, p)
        if N * D <= PAIRS_LIMIT:
            # every pair: f(gh) = f(g) + g f(h)
            rows = []
            for a in range(N):
                for b in range(N):
                    c = self.index[(self.elems[a] @ self.elems[b] % p).tobytes()]
                    blk = np.zeros((D, N * D), dtype=np.int64)
                    blk[:, c * D:(c + 1) * D] += I
                    blk[:, a * D:(a + 1) * D] -= I
                    blk[:, b * D:(b + 1) * D] -= self.sl[a]
                    rows.append(blk % p)
            z1 = N * D - _rank(np.vstack(rows), p)
            return z1 - b1
        return self._h1_left(b1)

    def _h1_left(self, b1) -> int:
        """Unknowns on generators; f(s g) = f(s) + s f(g) along the left Cayley graph."""
        p, n = self.p, self.n
        D = len(self.slB)
        r = len(self.gens)
        gidx = [self.index[s.tobytes()] for s in self.gens]
        L = {0: np.zeros((D, r * D), dtype=np.int64)}
        E = []
        for t in range(r):
            sel = np.zeros((D, r * D), dtype=np.int64)
            sel[:, t * D:(t + 1) * D] = np.eye(D, dtype=np.int64)
            E.append(sel)
        order = [0]
        constraints = []
        k = 0
        while k < len(order):
            g = order[k]
            k += 1
            for t, s in enumerate(self.gens):
                sg = self.index[(s @ self.elems[g] % p).tobytes()]
                val = (E[t] + self.sl[gidx[t]] @ L[g]) % p
                if sg not in L:
                    L[sg] = val
                    order.append(sg)
                else:
                    constraints.append((L[sg] - val) % p)
        Z = r * D
        if constraints:
            C = np.vstack(constraints)
            rk = 0
            acc = np.zeros((0, Z), dtype=np.int64)
            for i in range(0, len(C), 4096):
                acc = _rref(np.vstack([acc, C[i:i + 4096]]), p)[0]
            rk = len(acc)
            z1 = Z - rk
        else:
            z1 = Z
        return z1 - b1

    # condition 4 -------------------------------------------------------------
    def irreducible_submodules(self) -> list[np.ndarray]:
        p = self.p
        D = self.n * self.n
        alg = _rref(np.array([A.reshape(-1) for A in self.gl]), p)[0]
        basis = alg.reshape(len(alg), D, D)
        counts: dict[bytes, int] = {}
        spaces: dict[bytes, np.ndarray] = {}
        for V in _lines(D, p):
            imgs = np.einsum("kij,lj->lki", basis, V) % p  # (L, a, D)
            R, rk = _batch_rref(imgs, p)
            for t in range(len(V)):
                key = R[t, :rk[t]].tobytes()
                if key not in counts:
                    counts[key] = 0
                    spaces[key] = R[t, :rk[t]].copy()
                counts[key] += 1
        out = []
        for key, c in counts.items():
            s = len(spaces[key])
            if c == (p**s - 1) // (p - 1):
                out.append(spaces[key])
        out.sort(key=lambda S: (len(S), S.tobytes()))
        return out

    def qualifying(self):
        """(element index, alpha, functional) in element order."""
        p, n, M = self.p, self.n, self.M
        I = np.eye(n, dtype=np.int64)
        for h, g in enumerate(self.elems):
            chi = None
            for alpha in range(1, p):
                A = (g - alpha * I) % p
                if _rank(A, p) != n - 1:
                    continue
                if n - _rank(_matpow(A, n, p), p) != 1:
                    continue
                if chi is None:
                    chi = _charpoly_laplace(g, p)
                xm = [0] * (M + 1)
                xm[M] = 1
                xm[0] = (-pow(alpha, M, p)) % p
                if len(_pgcd(chi, xm, p)) - 1 != 1:
                    continue
                v = _kernel(A, p)[0]
                u = _kernel(A.T, p)[0]
                yield h, alpha, np.outer(u, v).reshape(-1) % p

    def witnesses(self, subs):
        p = self.p
        pending = list(range(len(subs)))
        found = {}
        for h, alpha, phi in self.qualifying():
            still = []
            for k in pending:
                if ((subs[k] @ phi) % p).any():
                    found[k] = (h, alpha)
                else:
                    still.append(k)
            pending = still
            if not pending:
                break
        return found


def _lines(D, p):
    """All normalised nonzero vectors of F_p^D (first nonzero entry 1), in chunks."""
    for lead in range(D):
        tail = D - lead - 1
        total = p**tail
        for a in range(0, total, LINE_CHUNK):
            idx = np.arange(a, min(total, a + LINE_CHUNK))
            V = np.zeros((len(idx), D), dtype=np.int64)
            V[:, lead] = 1
            for j in range(tail):
                V[:, lead + 1 + j] = (idx // p**j) % p
            yield V


def _batch_rref(X, p):
    """Row-reduce each matrix in a stack; returns (stack, ranks)."""
    X = np.array(X, dtype=np.int64) % p
    L, a, D = X.shape
    inv = np.array([0] + [_inv(x, p) for x in range(1, p)], dtype=np.int64)
    r = np.zeros(L, dtype=np.int64)
    rowid = np.arange(a)
    for c in range(D):
        mask = (X[:, :, c] != 0) & (rowid[None, :] >= r[:, None])
        has = mask.any(axis=1) & (r < a)
        if not has.any():
            continue
        idx = np.flatnonzero(has)
        pr = np.argmax(mask[idx], axis=1)
        rr = r[idx]
        top = X[idx, rr].copy()
        X[idx, rr] = X[idx, pr]
        X[idx, pr] = top
        piv = X[idx, rr].copy()
        piv = piv * inv[piv[:, c]][:, None] % p
        X[idx, rr] = piv
        f = X[idx, :, c].copy()
        f[np.arange(len(idx)), rr] = 0
        X[idx] = (X[idx] - f[:, :, None] * piv[:, None, :]) % p
        r[idx] += 1
    return X, r


def naive_oracle_check(G, M: int) -> BignessReport:
    """Independent verdict for small groups over prime fields."""
    if M < 1:
        raise ValueError("M must be positive")
    if G.spec.degree != 1:
        raise TooLargeForOracle("oracle supports prime fields only")
    if G.order > ORDER_LIMIT:
        raise TooLargeForOracle(f"order {G.order} exceeds {ORDER_LIMIT}")
    o = _Oracle(G, M)
    subs = o.irreducible_submodules()
    found = o.witnesses(subs)
    h0d = o.h0_dim()
    h1d = o.h1_dim()
    table = []
    for k, S in enumerate(subs):
        h, a = found.get(k, (None, None))
        table.append({"submodule": k, "constituent": None, "submodule_dim": len(S),
                      "scalar_line": False, "h_index": h, "alpha": a, "separation": None})
    return BignessReport(o.order, G.spec.to_json(), o.n, M, o.no_l_quotient(), h0d == 0,
                         h1d == 0, len(found) == len(subs), table, True, h0d, h1d, False)


def oracle_submodule_count(G) -> int:
    return len(_Oracle(G, 1).irreducible_submodules())
