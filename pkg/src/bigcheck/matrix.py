"""Square matrices over F_q, characteristic polynomials and eigenvalue data."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from bigcheck import linalg, poly
from bigcheck.errors import FieldMismatch, NotSimpleRoot, ZeroPolynomial
from bigcheck.ff import DEFAULT_FIELD_BOUND, FieldElement, FieldSpec, coeff_key, make_field, ops


def _to_code(spec: FieldSpec, value) -> int:
    if isinstance(value, FieldElement):
        if value.spec != spec:
            raise FieldMismatch(f"{value.spec} vs {spec}")
        return value.code
    if isinstance(value, (int, np.integer)):
        return int(value) % spec.char
    return spec.element(value).code


@dataclass(frozen=True, eq=False)
class Matrix:
    """n x n matrix over ``spec``; ``data`` holds element codes."""

    spec: FieldSpec
    data: np.ndarray

    def __post_init__(self):
        a = np.array(self.data, dtype=ops(self.spec).dtype)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"matrix must be square, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @classmethod
    def from_entries(cls, spec: FieldSpec, rows) -> Matrix:
        """Rows of ints (prime-field residues), coefficient lists or FieldElements."""
        return cls(spec, np.array([[_to_code(spec, x) for x in row] for row in rows],
                                  dtype=ops(spec).dtype).reshape(len(rows), -1))

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> Matrix:
        return cls(spec, linalg.identity(spec, n))

    @classmethod
    def diag(cls, spec: FieldSpec, values) -> Matrix:
        vals = [_to_code(spec, v) for v in values]
        a = linalg.zeros(spec, len(vals), len(vals))
        a[np.arange(len(vals)), np.arange(len(vals))] = vals
        return cls(spec, a)

    @classmethod
    def scalar(cls, spec: FieldSpec, n: int, value) -> Matrix:
        return cls.diag(spec, [value] * n)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def entry(self, i: int, j: int) -> FieldElement:
        return self.spec.from_code(int(self.data[i, j]))

    @property
    def entries(self) -> list[list[FieldElement]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def key(self) -> bytes:
        return self.data.astype(np.int64).tobytes()

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.spec == other.spec
                and np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.spec, self.key()))

    def __repr__(self):
        return f"Matrix({self.spec}, {self.to_json()})"

    def _check(self, other: Matrix):
        if not isinstance(other, Matrix):
            return NotImplemented
        if other.spec != self.spec:
            raise FieldMismatch(f"{self.spec} vs {other.spec}")
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return other

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix(self.spec, ops(self.spec).matmul(self.data, other.data))

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix(self.spec, ops(self.spec).vadd(self.data, other.data))

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix(self.spec, ops(self.spec).vsub(self.data, other.data))

    def scale(self, c) -> Matrix:
        return Matrix(self.spec, ops(self.spec).scale(_to_code(self.spec, c), self.data))

    def inverse(self) -> Matrix:
        return Matrix(self.spec, linalg.inverse(self.spec, self.data))

    def transpose(self) -> Matrix:
        return Matrix(self.spec, self.data.T)

    def det(self) -> int:
        return int(batch_det(self.spec, self.data[None])[0])

    def is_invertible(self) -> bool:
        return self.det() != 0

    def embed(self, big: FieldSpec) -> Matrix:
        emb = poly.embedding(self.spec, big)
        return Matrix(big, emb.array(self.data))

    def to_json(self) -> list:
        if self.spec.degree == 1:
            return [[int(x) for x in row] for row in self.data]
        return [[list(self.spec.coeffs(int(x))) for x in row] for row in self.data]

    @classmethod
    def from_json(cls, spec: FieldSpec, rows) -> Matrix:
        return cls.from_entries(spec, rows)


# ---------------------------------------------------------------------------
# characteristic polynomials


def _hessenberg_charpoly(spec: FieldSpec, a) -> list[int]:
    o = ops(spec)
    n = len(a)
    H = [[int(x) for x in row] for row in a]
    for j in range(n - 2):
        piv = next((i for i in range(j + 1, n) if H[i][j]), None)
        if piv is None:
            continue
        if piv != j + 1:
            H[piv], H[j + 1] = H[j + 1], H[piv]
            for row in H:
                row[piv], row[j + 1] = row[j + 1], row[piv]
        inv = o.inv(H[j + 1][j])
        for r in range(j + 2, n):
            t = o.mul(H[r][j], inv)
            if not t:
                continue
            # row r -= t row(j+1); then column j+1 += t column r
            H[r] = [o.sub(x, o.mul(t, y)) for x, y in zip(H[r], H[j + 1])]
            for row in H:
                row[j + 1] = o.add(row[j + 1], o.mul(t, row[r]))
    # p_k = (x - h_kk) p_{k-1} - sum_i h_ik (prod_{m=i+1..k} h_{m,m-1}) p_{i-1}
    ps = [[1]]
    for k in range(n):
        pk = poly.mul(spec, [o.neg(H[k][k]), 1], ps[k])
        prod = 1
        for i in range(k - 1, -1, -1):
            prod = o.mul(prod, H[i + 1][i])
            if not prod:
                break
            c = o.mul(H[i][k], prod)
            if c:
                pk = poly.sub(spec, pk, poly.scale(spec, c, ps[i]))
        ps.append(pk)
    out = ps[n]
    return out + [0] * (n + 1 - len(out))


def charpoly(m: Matrix) -> list[int]:
    """Coefficients of det(xI - m), ascending, as element codes (length n+1)."""
    return _hessenberg_charpoly(m.spec, m.data)


def batch_det(spec: FieldSpec, stack) -> np.ndarray:
    """Determinants of a stack (B, n, n) by batched elimination."""
    o = ops(spec)
    A = np.array(stack, dtype=o.dtype, copy=True)
    B, n, _ = A.shape
    det = np.ones(B, dtype=o.dtype)
    idx = np.arange(B)
    eye = linalg.identity(spec, n)
    for c in range(n):
        nz = A[:, c:, c] != 0
        has = nz.any(axis=1)
        if not has.all():
            det[~has] = 0
            A[~has] = eye
            nz = A[:, c:, c] != 0
        p = c + np.argmax(nz, axis=1)
        swapped = p != c
        rowc = A[idx, c].copy()
        A[idx, c] = A[idx, p]
        A[idx, p] = rowc
        if swapped.any():
            det[swapped] = o.vneg(det[swapped])
        piv = A[:, c, c].copy()
        det = o.vmul(det, piv)
        A[:, c] = o.vmul(o.vinv(piv)[:, None], A[:, c])
        f = A[:, c + 1:, c].copy()
        A[:, c + 1:] = o.vsub(A[:, c + 1:], o.vmul(f[:, :, None], A[:, c][:, None, :]))
    return det


@functools.lru_cache(maxsize=None)
def _interp_matrix(spec: FieldSpec, n: int) -> np.ndarray:
    # monic degree n: the n lower coefficients from values at 0..n-1
    pts = list(range(n))
    o = ops(spec)
    V = linalg.zeros(spec, n, n)
    for i, x in enumerate(pts):
        for j in range(n):
            V[i, j] = o.pow(x, j) if (x or j) else 1
    return linalg.inverse(spec, V)


def batch_charpoly(spec: FieldSpec, stack) -> np.ndarray:
    """Characteristic polynomials of a stack (B, n, n); rows are ascending codes."""
    o = ops(spec)
    stack = np.asarray(stack)
    B, n, _ = stack.shape
    if B == 0:
        return linalg.zeros(spec, 0, n + 1)
    if spec.order <= n or (spec.degree > 1 and not o.tabled):
        return np.array([_hessenberg_charpoly(spec, a) for a in stack], dtype=o.dtype)
    eye = linalg.identity(spec, n)
    vals = linalg.zeros(spec, B, n)
    for x in range(n):
        # det(xI - A) - x^n
        shifted = o.vsub(o.scale(x, eye)[None], stack)
        d = batch_det(spec, shifted)
        xn = o.pow(x, n) if x else 0
        vals[:, x] = o.vsub(d, np.full_like(d, xn))
    low = o.matmul(vals, _interp_matrix(spec, n).T)
    return np.concatenate([low, np.ones((B, 1), dtype=o.dtype)], axis=1)


def factor_over(coeffs, spec: FieldSpec, seed: int = poly.DEFAULT_SEED):
    """Factor a polynomial (ascending codes) into monic irreducibles with exponents."""
    f = poly.trim([_to_code(spec, c) for c in coeffs])
    if not f:
        raise ZeroPolynomial("cannot factor the zero polynomial")
    return [(list(g), e) for g, e in poly.factor(spec, f, seed)]


# ---------------------------------------------------------------------------
# eigenvalue data


@dataclass(frozen=True)
class EigenCore:
    """Charpoly-level eigen data, shared by all matrices with that charpoly."""

    base: FieldSpec
    charpoly: tuple[int, ...]
    factors: tuple
    field: FieldSpec
    roots: tuple[tuple[int, int], ...]
    power_M: int
    m_separation: tuple[tuple[int, int], ...]

    @property
    def splitting_degree(self) -> int:
        return self.field.degree // self.base.degree

    def base_root(self, i: int) -> int | None:
        """Code of root i in the base field, or None if it lies outside it."""
        return poly.embedding(self.base, self.field).restrict(self.roots[i][0]) \
            if self.field.order <= 2**20 else _restrict_slow(self.base, self.field, self.roots[i][0])

    def separated(self, i: int) -> bool:
        return all(a != i for a, _ in self.m_separation)


def _restrict_slow(base, big, code):
    emb = poly.embedding(base, big)
    if base.order > 2**20:
        return None
    for c in range(base.order):
        if emb(c) == code:
            return c
    return None


@functools.lru_cache(maxsize=65536)
def eigen_core(spec: FieldSpec, cp: tuple[int, ...], M: int,
               bound: int = DEFAULT_FIELD_BOUND) -> EigenCore:
    factors = poly.factor(spec, list(cp))
    L = math.lcm(*[len(g) - 1 for g, _ in factors]) if factors else 1
    big = make_field(spec.char, spec.degree * L, bound)
    emb = poly.embedding(spec, big)
    o = ops(big)
    roots = []
    for g, e in factors:
        if len(g) == 2:
            roots.append((emb(ops(spec).neg(g[0])), e))
            continue
        gb = [emb(c) for c in g]
        found = sorted((r for r, _ in poly.roots(big, gb)), key=lambda c: coeff_key(big, c))
        roots.extend((r, e) for r in found)
    powers = [o.pow(r, M) for r, _ in roots]
    sep = tuple((i, j) for i in range(len(roots)) for j in range(len(roots))
                if i != j and powers[i] == powers[j])
    return EigenCore(spec, tuple(cp), tuple((tuple(g), e) for g, e in factors), big,
                     tuple(roots), M, sep)


@dataclass(frozen=True)
class EigenReport:
    element: Matrix
    charpoly: list[int]
    roots: list[tuple[FieldElement, int]]
    splitting_degree: int
    m_separation: list[tuple[int, int]]
    M: int
    core: EigenCore = field(repr=False, compare=False)

    @property
    def splitting_field(self) -> FieldSpec:
        return self.core.field

    def is_simple(self, i: int) -> bool:
        return self.roots[i][1] == 1

    def separated(self, i: int) -> bool:
        return self.core.separated(i)

    def separation_values(self):
        return [(self.roots[i][0], self.roots[j][0]) for i, j in self.m_separation]


def eigen_data(m: Matrix, M: int, bound: int = DEFAULT_FIELD_BOUND) -> EigenReport:
    """Roots of charpoly(m) in a splitting field, with the M-th power coincidences."""
    if M < 1:
        raise ValueError("M must be positive")
    core = eigen_core(m.spec, tuple(charpoly(m)), M, bound)
    big = core.field
    return EigenReport(m, list(core.charpoly),
                       [(big.from_code(r), e) for r, e in core.roots],
                       core.splitting_degree, list(core.m_separation), M, core)


# ---------------------------------------------------------------------------
# eigenvectors (scalar elimination; the field may be too large for tables)


def _kernel(spec: FieldSpec, rows: list[list[int]]) -> list[list[int]]:
    o = ops(spec)
    A = [list(r) for r in rows]
    nrows, ncols = len(A), len(A[0])
    piv = []
    r = 0
    for c in range(ncols):
        i = next((i for i in range(r, nrows) if A[i][c]), None)
        if i is None:
            continue
        A[r], A[i] = A[i], A[r]
        inv = o.inv(A[r][c])
        A[r] = [o.mul(inv, x) for x in A[r]]
        for k in range(nrows):
            if k != r and A[k][c]:
                t = A[k][c]
                A[k] = [o.sub(x, o.mul(t, y)) for x, y in zip(A[k], A[r])]
        piv.append(c)
        r += 1
        if r == nrows:
            break
    out = []
    for f in (c for c in range(ncols) if c not in piv):
        v = [0] * ncols
        v[f] = 1
        for k, p in enumerate(piv):
            v[p] = o.neg(A[k][f])
        out.append(v)
    return out


def root_multiplicity(spec_big: FieldSpec, cp_big: list[int], alpha: int) -> int:
    """Multiplicity of alpha as a root, by repeated division by (x - alpha)."""
    o = ops(spec_big)
    f = poly.trim(cp_big)
    lin = [o.neg(alpha), 1]
    mult = 0
    while len(f) > 1:
        q, r = poly.divmod_(spec_big, f, lin)
        if r:
            break
        f = q
        mult += 1
    return mult


def eigenspace_maps(m: Matrix, alpha: FieldElement):
    """(pi, i) for a simple root alpha: pi is 1 x n, i is n x 1, pi @ i = 1.

    Both are code arrays over alpha's field, which must contain m's field.
    """
    big = alpha.spec
    if big.char != m.spec.char or big.degree % m.spec.degree:
        raise FieldMismatch(f"{big} does not contain {m.spec}")
    emb = poly.embedding(m.spec, big)
    o = ops(big)
    a = [[emb(int(x)) for x in row] for row in m.data]
    cp = [emb(c) for c in charpoly(m)]
    mult = root_multiplicity(big, cp, alpha.code)
    if mult != 1:
        what = "not a root" if mult == 0 else f"root of multiplicity {mult}"
        raise NotSimpleRoot(f"{alpha} is {what} of the characteristic polynomial")
    n = m.n
    shifted = [[o.sub(a[i][j], alpha.code if i == j else 0) for j in range(n)] for i in range(n)]
    (v,) = _kernel(big, shifted)
    (u,) = _kernel(big, [list(col) for col in zip(*shifted)])
    s = 0
    for x, y in zip(u, v):
        s = o.add(s, o.mul(x, y))
    # nonzero because alpha is simple: u^T v = 0 would give a Jordan block
    sinv = o.inv(s)
    pi = np.array([[o.mul(sinv, x) for x in u]], dtype=object if big.order > 2**62 else np.int64)
    inj = np.array([[x] for x in v], dtype=pi.dtype)
    return pi, inj


def eigenvectors(m: Matrix, alpha: FieldElement):
    """(u, v) as code lists with m v = alpha v, u^T m = alpha u^T and u^T v = 1."""
    pi, inj = eigenspace_maps(m, alpha)
    return [int(x) for x in pi[0]], [int(x) for x in inj[:, 0]]
