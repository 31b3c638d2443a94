"""Exact arithmetic in finite fields F_{l^d}.

A field is described by a :class:`FieldSpec` (characteristic, degree and a
monic irreducible modulus, coefficients in ascending order).  Elements are
stored internally as integer *codes* ``c_0 + c_1 l + ... + c_{d-1} l^{d-1}``
where ``c_0 + c_1 x + ...`` is the polynomial representative.  For prime
fields the code is just the residue.

Heavy linear algebra goes through :func:`ops`, which returns a cached
arithmetic context working on numpy arrays of codes.  :class:`FieldElement`
is the user-facing scalar type.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from bigcheck.errors import (
    DivisionByZero,
    FieldMismatch,
    NotPrime,
    TooLarge,
    ZeroArgument,
)

DEFAULT_FIELD_BOUND = 2**40
DLOG_BOUND = 2**24
# fields up to this size get exp/log/digit tables
TABLE_BOUND = 2**20


def is_prime(n: int) -> bool:
    """Trial division."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomials over the prime field, as ascending lists of ints (internal use)


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pmod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, y in enumerate(m):
            a[shift + i] = (a[shift + i] - c * y) % p
        _trim(a)
    return a


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base, e, m, p):
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible_mod(modulus, p: int) -> bool:
    """Ben-Or test: gcd(f, x^(p^i) - x) = 1 for i <= deg f / 2."""
    f = _trim(list(modulus))
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    if f[0] == 0:
        return False
    h = [0, 1]
    for _ in range(d // 2):
        h = _ppowmod(h, p, f, p)
        diff = h + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(f, _trim(diff), p)
        if len(g) > 1:
            return False
    return True


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """The field F_l[x]/(modulus) of order l^degree."""

    char: int
    degree: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.char):
            raise NotPrime(f"{self.char} is not prime")
        if self.degree < 1 or len(self.modulus) != self.degree + 1:
            raise ValueError("modulus must have degree+1 coefficients")
        if self.modulus[-1] != 1 or any(not 0 <= c < self.char for c in self.modulus):
            raise ValueError("modulus must be monic with reduced coefficients")
        if not is_irreducible_mod(self.modulus, self.char):
            raise ValueError(f"modulus {self.modulus} is reducible over F_{self.char}")

    @property
    def order(self) -> int:
        return self.char**self.degree

    @property
    def is_prime_field(self) -> bool:
        return self.degree == 1

    def __repr__(self):
        if self.degree == 1:
            return f"F_{self.char}"
        return f"F_{self.char}^{self.degree}"

    def to_json(self) -> dict:
        return {"char": self.char, "degree": self.degree, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> FieldSpec:
        l, d = int(data["char"]), int(data.get("degree", 1))
        if "modulus" not in data:
            return make_field(l, d)
        return cls(l, d, tuple(int(c) for c in data["modulus"]))

    # element helpers -------------------------------------------------------
    def coeffs(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.degree):
            code, c = divmod(code, self.char)
            out.append(c)
        return tuple(out)

    def code(self, coeffs) -> int:
        c = 0
        for x in reversed(list(coeffs)):
            c = c * self.char + int(x) % self.char
        return c

    def element(self, value) -> FieldElement:
        """Build an element from an int (coerced into the prime field) or a coefficient list."""
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise FieldMismatch(f"{value.spec} vs {self}")
            return value
        if isinstance(value, (int, np.integer)):
            coeffs = (int(value) % self.char,) + (0,) * (self.degree - 1)
        else:
            coeffs = tuple(int(c) % self.char for c in value)
            coeffs = coeffs + (0,) * (self.degree - len(coeffs))
        return FieldElement(self, coeffs)

    def from_code(self, code: int) -> FieldElement:
        return FieldElement(self, self.coeffs(int(code)))

    def elements(self):
        """All elements in coefficient-lexicographic order."""
        for cs in itertools.product(range(self.char), repeat=self.degree):
            yield FieldElement(self, cs)


def coeff_key(spec: FieldSpec, code: int) -> tuple[int, ...]:
    """Sort key giving the coefficient-lexicographic order (c_0 most significant)."""
    return spec.coeffs(int(code))


@functools.lru_cache(maxsize=None)
def make_field(l: int, d: int = 1, bound: int = DEFAULT_FIELD_BOUND) -> FieldSpec:
    """F_{l^d} with the lexicographically least monic irreducible modulus."""
    if not is_prime(l):
        raise NotPrime(f"{l} is not prime")
    if d < 1:
        raise ValueError("degree must be positive")
    if l**d > bound:
        raise TooLarge(f"{l}^{d} exceeds field bound {bound}")
    if d == 1:
        return FieldSpec(l, 1, (0, 1))
    for low in itertools.product(range(l), repeat=d):
        if low[0] == 0:
            continue
        if is_irreducible_mod(list(low) + [1], l):
            return FieldSpec(l, d, tuple(low) + (1,))
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# arithmetic contexts


class PrimeOps:
    """Arithmetic on codes of a prime field (codes are residues)."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.p = self.l = self.q = spec.char
        # int64 matmul is exact while n * (p-1)^2 stays below 2^62
        self._safe_inner = (2**62) // max(1, (self.p - 1) ** 2)
        self._inv_table = None
        if self.p <= TABLE_BOUND:
            inv = np.zeros(self.p, dtype=np.int64)
            for a in range(1, self.p):
                inv[a] = pow(a, self.p - 2, self.p)
            self._inv_table = inv

    @property
    def dtype(self):
        return np.int64 if self.p < 2**31 else object

    # scalars
    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero("inverse of zero")
        return pow(int(a), self.p - 2, self.p)

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        return pow(int(a), e, self.p)

    def from_int(self, n: int) -> int:
        return n % self.p

    # arrays
    def asarray(self, a):
        return np.asarray(a, dtype=self.dtype) % self.p

    def vadd(self, a, b):
        return (a + b) % self.p

    def vsub(self, a, b):
        return (a - b) % self.p

    def vneg(self, a):
        return (-a) % self.p

    def vmul(self, a, b):
        return a * b % self.p

    def vinv(self, a):
        if self._inv_table is not None:
            return self._inv_table[a]
        return np.vectorize(lambda x: self.inv(int(x)), otypes=[object])(a)

    def scale(self, c, a):
        return a * int(c) % self.p

    def matmul(self, a, b):
        if a.shape[-1] <= self._safe_inner and self.dtype is np.int64:
            return (a @ b) % self.p
        return (a.astype(object) @ b.astype(object)) % self.p


class ExtOps:
    """Arithmetic on codes of F_{l^d}, d > 1, using exp/log and digit tables."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.l = self.p = spec.char
        self.d = spec.degree
        self.q = spec.order
        self.modulus = list(spec.modulus)
        self.powers = np.array([self.l**i for i in range(self.d)], dtype=np.int64)
        self.tabled = self.q <= TABLE_BOUND
        if self.tabled:
            self._build_tables()

    dtype = np.int64

    # slow polynomial path ---------------------------------------------------
    def _mul_slow(self, a: int, b: int) -> int:
        pa, pb = list(self.spec.coeffs(a)), list(self.spec.coeffs(b))
        r = _pmod(_pmul(_trim(pa), _trim(pb), self.l), self.modulus, self.l)
        return self.spec.code(r)

    def _pow_slow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_slow(result, base)
            base = self._mul_slow(base, base)
            e >>= 1
        return result

    def _mult_matrix(self, c: int) -> np.ndarray:
        """Matrix over F_l of multiplication by the element with code c."""
        cols = [np.array(self.spec.coeffs(self._mul_slow(c, self.l**i)), dtype=np.int64)
                for i in range(self.d)]
        return np.stack(cols, axis=1)

    def _build_tables(self):
        q, l = self.q, self.l
        digits = np.zeros((q, self.d), dtype=np.int64)
        codes = np.arange(q, dtype=np.int64)
        for i in range(self.d):
            digits[:, i] = (codes // self.l**i) % l
        self.digits = digits
        g = _find_primitive_code(self.spec, self._pow_slow)
        self.generator = g
        # exp table in blocks: exp[k + B*j] = exp[k] * g^(B*j)
        n = q - 1
        B = max(1, math.isqrt(n))
        block = np.zeros((B, self.d), dtype=np.int64)
        cur = 1
        for k in range(B):
            block[k] = self.spec.coeffs(cur)
            cur = self._mul_slow(cur, g)
        step = self._mult_matrix(cur)  # multiplication by g^B
        chunks = []
        while sum(len(c) for c in chunks) < n:
            chunks.append(block.copy())
            block = (block @ step.T) % l
        exp_digits = np.concatenate(chunks)[:n]
        exp = exp_digits @ self.powers
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        self.exp, self.log = exp, log
        self._exp_list, self._log_list = exp.tolist(), log.tolist()
        self._neg = ((-digits) % l) @ self.powers
        self._neg_list = self._neg.tolist()

    # scalars ----------------------------------------------------------------
    def add(self, a, b):
        out, m = 0, 1
        for _ in range(self.d):
            a, x = divmod(a, self.l)
            b, y = divmod(b, self.l)
            out += ((x + y) % self.l) * m
            m *= self.l
        return out

    def neg(self, a):
        if self.tabled:
            return self._neg_list[a]
        return self.spec.code([(-c) % self.l for c in self.spec.coeffs(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self.tabled:
            return self._exp_list[(self._log_list[a] + self._log_list[b]) % (self.q - 1)]
        return self._mul_slow(a, b)

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self.tabled:
            return self._exp_list[(-self._log_list[a]) % (self.q - 1)]
        return self._pow_slow(a, self.q - 2)

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self.tabled:
            return self._exp_list[(self._log_list[a] * e) % (self.q - 1)]
        return self._pow_slow(a, e % (self.q - 1))

    def from_int(self, n: int) -> int:
        return n % self.l

    # arrays -----------------------------------------------------------------
    def asarray(self, a):
        return np.asarray(a, dtype=np.int64)

    def _require_tables(self):
        if not self.tabled:
            raise TooLarge(f"vectorised arithmetic needs |k| <= {TABLE_BOUND}")

    def vadd(self, a, b):
        self._require_tables()
        return ((self.digits[a] + self.digits[b]) % self.l) @ self.powers

    def vneg(self, a):
        self._require_tables()
        return self._neg[a]

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        self._require_tables()
        a, b = np.asarray(a), np.asarray(b)
        r = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, r)

    def vinv(self, a):
        self._require_tables()
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def scale(self, c, a):
        return self.vmul(np.full_like(np.asarray(a), int(c)), a)

    def matmul(self, a, b):
        """Batched matrix product over the field; shapes (..., n, m) @ (..., m, p)."""
        self._require_tables()
        a, b = np.asarray(a), np.asarray(b)
        m = a.shape[-1]
        acc = None
        for t in range(m):
            term = self.vmul(a[..., :, t:t + 1], b[..., t:t + 1, :])
            acc = term if acc is None else self.vadd(acc, term)
        if acc is None:
            return np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.int64)
        return acc


def _find_primitive_code(spec: FieldSpec, power) -> int:
    n = spec.order - 1
    if n == 1:
        return 1
    primes = prime_factors(n)
    for cs in itertools.product(range(spec.char), repeat=spec.degree):
        code = spec.code(cs)
        if code == 0:
            continue
        if all(power(code, n // r) != 1 for r in primes):
            return code
    raise AssertionError("no primitive element")  # pragma: no cover


@functools.lru_cache(maxsize=None)
def ops(spec: FieldSpec):
    """Cached arithmetic context for ``spec``."""
    return PrimeOps(spec) if spec.degree == 1 else ExtOps(spec)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.spec.degree:
            raise ValueError("wrong number of coefficients")
        if any(not 0 <= c < self.spec.char for c in self.coeffs):
            raise ValueError("coefficients must be reduced mod l")

    @property
    def code(self) -> int:
        return self.spec.code(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def in_prime_subfield(self) -> bool:
        return not any(self.coeffs[1:])

    def _check(self, other) -> FieldElement:
        if isinstance(other, (int, np.integer)):
            return self.spec.element(int(other))
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.spec != self.spec:
            raise FieldMismatch(f"{self.spec} vs {other.spec}")
        return other

    def _wrap(self, code):
        return self.spec.from_code(code)

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self._wrap(ops(self.spec).add(self.code, other.code))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self._wrap(ops(self.spec).sub(self.code, other.code))

    def __rsub__(self, other):
        other = self._check(other)
        return other - self

    def __neg__(self):
        return self._wrap(ops(self.spec).neg(self.code))

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self._wrap(ops(self.spec).mul(self.code, other.code))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivisionByZero("division by zero in " + repr(self.spec))
        o = ops(self.spec)
        return self._wrap(o.mul(self.code, o.inv(other.code)))

    def __pow__(self, e: int):
        if self.is_zero() and e < 0:
            raise DivisionByZero("zero to a negative power")
        return self._wrap(ops(self.spec).pow(self.code, e))

    def inverse(self) -> FieldElement:
        return self.spec.element(1) / self

    def __repr__(self):
        if self.spec.degree == 1:
            return f"{self.coeffs[0]}"
        terms = [f"{c}" + (f"x^{i}" if i > 1 else ("x" if i == 1 else ""))
                 for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"

    def to_json(self) -> list[int]:
        return list(self.coeffs)


def arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply one of ``add``, ``sub``, ``mul``, ``div``."""
    if a.spec != b.spec:
        raise FieldMismatch(f"{a.spec} vs {b.spec}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def frobenius(a: FieldElement, i: int = 1) -> FieldElement:
    """a^(l^i)."""
    i %= a.spec.degree
    return a ** (a.spec.char**i)


def element_order(a: FieldElement) -> int:
    if a.is_zero():
        raise ZeroArgument("zero has no multiplicative order")
    n = a.spec.order - 1
    o = ops(a.spec)
    order = n
    for r in prime_factors(n):
        while order % r == 0 and o.pow(a.code, order // r) == 1:
            order //= r
    return order


def primitive_element(spec: FieldSpec) -> FieldElement:
    """Least generator of F^x in coefficient-lexicographic order."""
    if spec.order > DLOG_BOUND:
        raise TooLarge(f"|k| = {spec.order} exceeds discrete-log bound")
    o = ops(spec)
    return spec.from_code(_find_primitive_code(spec, o.pow))


def discrete_log(g: FieldElement, x: FieldElement) -> int:
    """e in [0, q-1) with g^e = x, by baby-step giant-step."""
    if g.spec != x.spec:
        raise FieldMismatch(f"{g.spec} vs {x.spec}")
    if x.is_zero() or g.is_zero():
        raise ZeroArgument("discrete log of zero")
    spec = g.spec
    if spec.order > DLOG_BOUND:
        raise TooLarge(f"|k| = {spec.order} exceeds discrete-log bound")
    o = ops(spec)
    n = spec.order - 1
    m = math.isqrt(n) + 1
    table = {}
    cur = 1
    for j in range(m):
        table.setdefault(cur, j)
        cur = o.mul(cur, g.code)
    giant = o.pow(g.code, -m)
    y = x.code
    for i in range(m + 1):
        if y in table:
            e = (i * m + table[y]) % n
            return e
        y = o.mul(y, giant)
    raise ValueError("x is not in the subgroup generated by g")
