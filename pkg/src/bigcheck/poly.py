"""Univariate polynomials over F_q and their factorisation.

Polynomials are lists of element codes in ascending degree order with no
trailing zeros (``[]`` is the zero polynomial).  Factorisation is the usual
square-free / distinct-degree / equal-degree pipeline; the equal-degree step
is randomised with a seeded generator and its output is sorted, so results
never depend on the seed.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass

import numpy as np

from bigcheck.errors import FieldMismatch, ZeroPolynomial
from bigcheck.ff import TABLE_BOUND, FieldSpec, coeff_key, ops

DEFAULT_SEED = 0xB16

Poly = list


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def deg(a) -> int:
    return len(a) - 1


def add(spec, a, b):
    o = ops(spec)
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return trim([o.add(x, y) for x, y in zip(a, b)])


def sub(spec, a, b):
    o = ops(spec)
    return add(spec, a, [o.neg(y) for y in b])


def scale(spec, c, a):
    o = ops(spec)
    return trim([o.mul(c, x) for x in a])


def mul(spec, a, b):
    if not a or not b:
        return []
    o = ops(spec)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = o.add(out[i + j], o.mul(x, y))
    return trim(out)


def divmod_(spec, a, b):
    if not b:
        raise ZeroPolynomial("division by the zero polynomial")
    o = ops(spec)
    a = list(a)
    db = len(b) - 1
    inv = o.inv(b[-1])
    quot = [0] * max(0, len(a) - db)
    while a and len(a) - 1 >= db:
        c = o.mul(a[-1], inv)
        shift = len(a) - 1 - db
        quot[shift] = c
        for i, y in enumerate(b):
            if y:
                a[shift + i] = o.sub(a[shift + i], o.mul(c, y))
        a = trim(a)
    return trim(quot), a


def mod(spec, a, b):
    return divmod_(spec, a, b)[1]


def monic(spec, a):
    if not a:
        raise ZeroPolynomial("zero polynomial has no monic normalisation")
    o = ops(spec)
    return scale(spec, o.inv(a[-1]), a)


def gcd(spec, a, b):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, mod(spec, a, b)
    return monic(spec, a) if a else []


def powmod(spec, base, e: int, m):
    result = [1]
    base = mod(spec, base, m)
    while e:
        if e & 1:
            result = mod(spec, mul(spec, result, base), m)
        base = mod(spec, mul(spec, base, base), m)
        e >>= 1
    return result


def derivative(spec, a):
    o = ops(spec)
    return trim([o.mul(o.from_int(i), c) for i, c in enumerate(a)][1:])


def evaluate(spec, a, x: int) -> int:
    o = ops(spec)
    acc = 0
    for c in reversed(a):
        acc = o.add(o.mul(acc, x), c)
    return acc


def from_roots(spec, roots):
    o = ops(spec)
    out = [1]
    for r in roots:
        out = mul(spec, out, [o.neg(r), 1])
    return out


def _pth_root(spec, a):
    """Inverse of Frobenius applied to a polynomial whose exponents are multiples of p."""
    p = spec.char
    o = ops(spec)
    e = spec.char ** (spec.degree - 1)
    return trim([o.pow(a[i], e) for i in range(0, len(a), p)])


def squarefree(spec, f):
    """Square-free decomposition of a monic polynomial: list of (g, e)."""
    f = monic(spec, f)
    if len(f) <= 1:
        return []
    out = []
    c = gcd(spec, f, derivative(spec, f))
    w = divmod_(spec, f, c)[0]
    i = 1
    while len(w) > 1:
        y = gcd(spec, w, c)
        z = divmod_(spec, w, y)[0]
        if len(z) > 1:
            out.append((z, i))
        i += 1
        w = y
        c = divmod_(spec, c, y)[0]
    if len(c) > 1:
        for g, e in squarefree(spec, _pth_root(spec, c)):
            out.append((g, e * spec.char))
    return out


def distinct_degree(spec, f):
    """Split a square-free monic f into (product of degree-i irreducibles, i)."""
    q = spec.order
    out = []
    h = [0, 1]
    i = 1
    while len(f) - 1 >= 2 * i:
        h = powmod(spec, h, q, f)
        g = gcd(spec, f, sub(spec, h, [0, 1]))
        if len(g) > 1:
            out.append((g, i))
            f = divmod_(spec, f, g)[0]
            h = mod(spec, h, f)
        i += 1
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def equal_degree(spec, f, r: int, rng: random.Random):
    """Split f, a product of distinct monic irreducibles of degree r."""
    n = len(f) - 1
    if n == r:
        return [f]
    q = spec.order
    while True:
        a = trim([rng.randrange(q) for _ in range(n)])
        if len(a) < 2:
            continue
        if q % 2:
            b = powmod(spec, a, (q**r - 1) // 2, f)
            b = sub(spec, b, [1])
        else:
            # trace map to F_2
            k = spec.degree * r
            b, t = [], mod(spec, a, f)
            for _ in range(k):
                b = add(spec, b, t)
                t = mod(spec, mul(spec, t, t), f)
        g = gcd(spec, f, b)
        if 0 < len(g) - 1 < n:
            return (equal_degree(spec, g, r, rng)
                    + equal_degree(spec, divmod_(spec, f, g)[0], r, rng))


def poly_key(spec, f):
    return (len(f), tuple(coeff_key(spec, c) for c in reversed(f)))


def factor(spec: FieldSpec, f, seed: int = DEFAULT_SEED):
    """Complete factorisation of f into monic irreducibles with exponents.

    The leading coefficient is dropped; the result is sorted by degree and then
    coefficients, so it does not depend on ``seed``.
    """
    f = trim(f)
    if not f:
        raise ZeroPolynomial("cannot factor the zero polynomial")
    rng = random.Random(seed)
    out = []
    for g, e in squarefree(spec, f):
        for h, r in distinct_degree(spec, g):
            for irr in equal_degree(spec, h, r, rng):
                out.append((irr, e))
    out.sort(key=lambda t: (poly_key(spec, t[0]), t[1]))
    return out


def roots(spec: FieldSpec, f, seed: int = DEFAULT_SEED):
    """Roots of f in its own coefficient field, with multiplicities."""
    o = ops(spec)
    return [(o.neg(g[0]), e) for g, e in factor(spec, f, seed) if len(g) == 2]


# ---------------------------------------------------------------------------
# embeddings between fields of the same characteristic


@dataclass
class Embedding:
    """Field embedding small -> big determined by the image of x."""

    small: FieldSpec
    big: FieldSpec
    image_of_x: int
    table: np.ndarray | None

    def __call__(self, code: int) -> int:
        if self.table is not None:
            return int(self.table[code])
        o = ops(self.big)
        acc = 0
        for c in reversed(self.small.coeffs(code)):
            acc = o.add(o.mul(acc, self.image_of_x), c)
        return acc

    def array(self, codes):
        codes = np.asarray(codes)
        if self.table is not None:
            return self.table[codes]
        return np.vectorize(self, otypes=[np.int64])(codes)

    @functools.cached_property
    def _inverse(self) -> dict[int, int]:
        if self.table is None:
            raise ValueError("restriction needs a tabulated embedding")
        return {int(v): i for i, v in enumerate(self.table)}

    def restrict(self, code: int) -> int | None:
        """Preimage of a big-field element, or None if it is not in the image."""
        return self._inverse.get(int(code))


@functools.lru_cache(maxsize=None)
def embedding(small: FieldSpec, big: FieldSpec) -> Embedding:
    if small.char != big.char or big.degree % small.degree:
        raise FieldMismatch(f"{small} does not embed in {big}")
    if small == big:
        x_img = small.code([0, 1]) if small.degree > 1 else 0
        table = np.arange(small.order, dtype=np.int64) if small.order <= TABLE_BOUND else None
        return Embedding(small, big, x_img, table)
    if small.degree == 1:
        table = np.arange(small.order, dtype=np.int64)
        return Embedding(small, big, 0, table)
    rts = roots(big, list(small.modulus))
    x_img = min((r for r, _ in rts), key=lambda c: coeff_key(big, c))
    emb = Embedding(small, big, x_img, None)
    if small.order <= TABLE_BOUND:
        emb.table = np.array([emb(c) for c in range(small.order)], dtype=np.int64)
    return emb
