"""Dense linear algebra over F_q on numpy arrays of element codes.

Vectors are stored as rows.  A matrix ``A`` acts on column vectors, so the
image of the rows ``V`` is ``V @ A.T`` (see :func:`apply`).
"""

from __future__ import annotations

import numpy as np

from bigcheck.errors import NotInvertible
from bigcheck.ff import FieldSpec, ops


def zeros(spec: FieldSpec, *shape) -> np.ndarray:
    return np.zeros(shape, dtype=ops(spec).dtype)


def identity(spec: FieldSpec, n: int) -> np.ndarray:
    out = zeros(spec, n, n)
    out[np.arange(n), np.arange(n)] = 1
    return out


def matmul(spec, a, b):
    return ops(spec).matmul(np.asarray(a), np.asarray(b))


def apply(spec, A, rows):
    """Images of row vectors under the column action of A."""
    return ops(spec).matmul(np.asarray(rows), np.swapaxes(np.asarray(A), -1, -2))


def kron(spec, a, b):
    o = ops(spec)
    a, b = np.asarray(a), np.asarray(b)
    prod = o.vmul(a[:, None, :, None], b[None, :, None, :])
    return prod.reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])


def rref(spec, A):
    """Reduced row echelon form; returns (R, pivots) with R trimmed to its rank."""
    o = ops(spec)
    A = np.array(A, dtype=o.dtype, copy=True)
    if A.ndim == 1:
        A = A[None, :]
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = o.scale(o.inv(int(A[r, c])), A[r])
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.flatnonzero(col)
        if len(nzr):
            A[nzr] = o.vsub(A[nzr], o.vmul(col[nzr, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(spec, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(spec, A)[1])


def rowspace(spec, A) -> np.ndarray:
    """Canonical (reduced echelon) basis of the row space."""
    A = np.asarray(A)
    if A.size == 0:
        return zeros(spec, 0, A.shape[-1] if A.ndim == 2 else 0)
    return rref(spec, A)[0]


def nullspace(spec, A, ncols: int | None = None) -> np.ndarray:
    """Basis (rows) of {x : A x = 0}."""
    o = ops(spec)
    A = np.asarray(A)
    if A.ndim == 1:
        A = A[None, :]
    n = A.shape[1] if ncols is None else ncols
    if A.size == 0:
        return identity(spec, n)
    R, piv = rref(spec, A)
    free = [c for c in range(n) if c not in set(piv)]
    basis = zeros(spec, len(free), n)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, p in enumerate(piv):
            basis[k, p] = o.neg(int(R[r, f]))
    return basis


def inverse(spec, A) -> np.ndarray:
    return batch_inverse(spec, np.asarray(A)[None])[0]


def batch_inverse(spec, As) -> np.ndarray:
    """Inverses of a stack of square matrices (B, n, n)."""
    o = ops(spec)
    As = np.asarray(As)
    B, n, _ = As.shape
    eye = np.broadcast_to(identity(spec, n), (B, n, n))
    M = np.concatenate([As, eye], axis=2).astype(o.dtype)
    idx = np.arange(B)
    for c in range(n):
        nz = M[:, c:, c] != 0
        if not nz.any(axis=1).all():
            raise NotInvertible("singular matrix")
        p = c + np.argmax(nz, axis=1)
        rowc = M[idx, c].copy()
        rowp = M[idx, p].copy()
        M[idx, c] = rowp
        M[idx, p] = rowc
        inv = o.vinv(M[:, c, c])
        M[:, c] = o.vmul(inv[:, None], M[:, c])
        f = M[:, :, c].copy()
        f[:, c] = 0
        M = o.vsub(M, o.vmul(f[:, :, None], M[:, c][:, None, :]))
    return M[:, :, n:]


def matpoly(spec, f, A):
    """f(A) for a polynomial f given as ascending codes."""
    o = ops(spec)
    n = A.shape[0]
    acc = zeros(spec, n, n)
    eye = identity(spec, n)
    for c in reversed(f):
        acc = o.matmul(acc, A)
        acc = o.vadd(acc, o.scale(c, eye))
    return acc


def contains(spec, basis, vectors) -> bool:
    """Whether every row of ``vectors`` lies in the row space of ``basis``."""
    basis = np.asarray(basis)
    vectors = np.asarray(vectors)
    if vectors.size == 0:
        return True
    r = rank(spec, basis) if basis.size else 0
    return rank(spec, np.vstack([basis, vectors]) if basis.size else vectors) == r


def is_stable(spec, basis, gens) -> bool:
    """Whether the row space of ``basis`` is invariant under each matrix in gens."""
    return all(contains(spec, basis, apply(spec, A, basis)) for A in gens)


class Echelon:
    """Incrementally built semi-echelon basis (rows normalised at their pivot)."""

    def __init__(self, spec: FieldSpec, dim: int):
        self.spec = spec
        self.o = ops(spec)
        self.dim = dim
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    def __len__(self):
        return len(self.rows)

    def reduce(self, v):
        o = self.o
        v = np.array(v, dtype=o.dtype, copy=True)
        for row, p in zip(self.rows, self.pivots):
            c = int(v[p])
            if c:
                v = o.vsub(v, o.scale(c, row))
        return v

    def add(self, v) -> np.ndarray | None:
        """Add v if independent; returns the normalised new row or None."""
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if len(nz) == 0:
            return None
        p = int(nz[0])
        v = self.o.scale(self.o.inv(int(v[p])), v)
        self.rows.append(v)
        self.pivots.append(p)
        return v

    def matrix(self) -> np.ndarray:
        if not self.rows:
            return zeros(self.spec, 0, self.dim)
        return np.stack(self.rows)


def spin_rows(spec, gens, seeds) -> np.ndarray:
    """Smallest subspace containing ``seeds`` and stable under ``gens`` (column action)."""
    gens = [np.asarray(A) for A in gens]
    dim = gens[0].shape[0] if gens else np.asarray(seeds).shape[-1]
    ech = Echelon(spec, dim)
    queue = []
    for v in np.atleast_2d(seeds):
        w = ech.add(v)
        if w is not None:
            queue.append(w)
    i = 0
    while i < len(queue):
        w = queue[i]
        i += 1
        for A in gens:
            u = ech.add(apply(spec, A, w[None, :])[0])
            if u is not None:
                queue.append(u)
        if len(ech) == dim:
            break
    return rowspace(spec, ech.matrix())
