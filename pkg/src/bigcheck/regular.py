"""Cyclic Fourier analysis, orbit bounds and regular torus elements.

Exact arithmetic throughout: cyclotomic values live in Z[x]/(Phi_d) as integer
coefficient vectors, and torus elements are handled through discrete-log
exponents modulo l^D - 1.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from math import gcd, lcm

import numpy as np
import sympy

from bigcheck.errors import BudgetExceeded, HypothesisFailed, NotFound
from bigcheck.ff import is_prime, make_field, ops, primitive_element
from bigcheck.matrix import Matrix

TORUS_BUDGET = 10**6
PAIR_BUDGET = 2 * 10**8
NIVEAU_DOMAIN_BUDGET = 10**7
K_RANGE = 10**6


@dataclass(frozen=True)
class WeightProfile:
    d: int
    mu: tuple
    N: int | None = None
    Xi: int | None = None

    def __post_init__(self):
        if self.d < 1 or len(self.mu) != self.d:
            raise ValueError("mu must have d >= 1 entries")
        object.__setattr__(self, "mu", tuple(int(m) for m in self.mu))
        if self.N is not None and any(abs(m) > self.N for m in self.mu):
            raise ValueError(f"entries exceed N = {self.N}")
        if self.Xi is not None and self.support > self.Xi:
            raise ValueError(f"support {self.support} exceeds Xi = {self.Xi}")

    @property
    def support(self) -> int:
        return sum(1 for m in self.mu if m)


def _profile(mu) -> WeightProfile:
    return mu if isinstance(mu, WeightProfile) else WeightProfile(len(mu), tuple(mu))


# ---------------------------------------------------------------------------
# Z[zeta_d]


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> tuple:
    """Phi_d, ascending integer coefficients (monic)."""
    x = sympy.Symbol("x")
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(d, x), x).all_coeffs()))


def _reduce(coeffs: list, d: int) -> tuple:
    phi = cyclotomic(d)
    m = len(phi) - 1
    a = list(coeffs)
    for top in range(len(a) - 1, m - 1, -1):
        c = a[top]
        if c:
            for k in range(m + 1):
                a[top - m + k] -= c * phi[k]
    a = a[:m] + [0] * (m - len(a))
    return tuple(a)


def zeta_sum(mu, s: int) -> tuple:
    """sum_i zeta_d^(s i) mu_i as a vector in Z[x]/(Phi_d)."""
    p = _profile(mu)
    d = p.d
    acc = [0] * d
    for i, m in enumerate(p.mu):
        acc[(s * i) % d] += m
    return _reduce(acc, d)


def is_zero(value) -> bool:
    return not any(value)


def cyclic_fourier(mu) -> list[tuple]:
    """mu_hat_j = sum_i zeta_d^(i j) mu_i for j = 0..d-1, exact."""
    p = _profile(mu)
    return [zeta_sum(p, j) for j in range(p.d)]


def _integer_rank(rows) -> int:
    """Rank over Q by fraction-free elimination."""
    a = [list(r) for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    rank, prev = 0, 1
    for c in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        for r in range(rank + 1, len(a)):
            f = a[r][c]
            a[r] = [(p * a[r][k] - f * a[rank][k]) // prev for k in range(ncols)]
        prev = p
        rank += 1
    return rank


def convolution_matrix(mu) -> list[list[int]]:
    """psi(t)_i = sum_j t_j mu_(i-j), indices mod d."""
    p = _profile(mu)
    d = p.d
    return [[p.mu[(i - j) % d] for j in range(d)] for i in range(d)]


def convolution_rank(mu) -> int:
    """#{j : mu_hat_j != 0}, asserted equal to the elimination rank of the circulant."""
    fourier = sum(1 for v in cyclic_fourier(mu) if not is_zero(v))
    direct = _integer_rank(convolution_matrix(mu))
    assert fourier == direct, (fourier, direct)
    return fourier


# ---------------------------------------------------------------------------
# orbit bound


def prime_powers_dividing(d: int, below: int | None = None, include_one: bool = True) -> list[int]:
    out = [1] if include_one else []
    for p in sympy.primefactors(d):
        q = p
        while d % q == 0:
            out.append(q)
            q *= p
    out.sort()
    return [q for q in out if below is None or q < below]


@lru_cache(maxsize=None)
def totient_constant(limit: int = K_RANGE) -> tuple[float, int]:
    """min of phi(n) log log n / n over 3 <= n <= limit, and its argmin."""
    n = np.arange(limit + 1, dtype=np.float64)
    phi = np.arange(limit + 1, dtype=np.float64)
    for p in sympy.primerange(2, limit + 1):
        phi[p::p] -= phi[p::p] / p
    r = phi[3:] * np.log(np.log(n[3:])) / n[3:]
    k = int(np.argmin(r))
    return float(r[k]), k + 3


def threshold_L(Omega: int, Xi: int, N: int, K: float | None = None) -> float:
    """2 Xi Omega^(1/K) N."""
    K = totient_constant()[0] if K is None else K
    return 2 * Xi * Omega ** (1 / K) * N


def largest_omega(l: int, Xi: int, N: int, K: float | None = None) -> int | None:
    """Largest integer Omega >= 1 with threshold_L(Omega) < l, or None."""
    K = totient_constant()[0] if K is None else K
    if threshold_L(1, Xi, N, K) >= l:
        return None
    hi = (l / (2 * Xi * N)) ** K
    Om = max(1, int(math.floor(hi)))
    while Om > 1 and threshold_L(Om, Xi, N, K) >= l:
        Om -= 1
    return Om


@dataclass(frozen=True)
class OrbitCheck:
    orbit: int
    bound: float
    passed: bool
    h: int
    bound_log: float  # the same bound with log d in place of log log d


def orbit_size_bound_check(mu, l: int, q: int, Omega: int) -> OrbitCheck:
    p = _profile(mu)
    d = p.d
    if d < 3:
        raise ValueError("log log d needs d >= 3")
    if d % q:
        raise ValueError(f"q = {q} does not divide d = {d}")
    if is_zero(zeta_sum(p, q)):
        raise HypothesisFailed(f"sum zeta_d^({q} i) mu_i vanishes")
    h = sum(m * l**j for j, m in enumerate(p.mu))
    mod = l**d - 1
    orbit = mod // gcd(h, mod)
    bound = (Omega ** (1 / q)) ** (d / math.log(math.log(d)))
    bound_log = (Omega ** (1 / q)) ** (d / math.log(d))
    return OrbitCheck(orbit, bound, orbit > bound, h, bound_log)


def bounded_profiles(d: int, N: int, max_support: int):
    """All mu in [-N, N]^d with at most max_support nonzero entries."""
    vals = [v for v in range(-N, N + 1) if v]
    for s in range(max_support + 1):
        for pos in itertools.combinations(range(d), s):
            for choice in itertools.product(vals, repeat=s):
                mu = [0] * d
                for i, v in zip(pos, choice):
                    mu[i] = v
                yield tuple(mu)


def orbit_bound_point(d: int, l: int, Xi: int = 2, N: int = 1, K: float | None = None) -> list[dict]:
    """Every hypothesis-satisfying (mu, q) at one (d, l), with Omega the largest admissible."""
    Om = largest_omega(l, Xi, N, K)
    rows = []
    if Om is None:
        return rows
    qs = prime_powers_dividing(d)
    for mu in bounded_profiles(d, N, Xi):
        for q in qs:
            try:
                r = orbit_size_bound_check(mu, l, q, Om)
            except HypothesisFailed:
                continue
            rows.append({"d": d, "l": l, "q": q, "mu": list(mu), "Omega": Om, "h": r.h,
                         "orbit": r.orbit, "bound": r.bound, "bound_log": r.bound_log,
                         "pass": r.passed})
    return rows


# ---------------------------------------------------------------------------
# forced zero


def forced_zero_check(mu, n: int) -> bool:
    """Whether both hypotheses hold with Xi = n - 1: support < Xi and every
    prime-power sum (q < n, q | d, q = 1 included) vanishes."""
    p = _profile(mu)
    Xi = n - 1
    if p.support >= Xi:
        return False
    return all(is_zero(zeta_sum(p, q)) for q in prime_powers_dividing(p.d, below=n))


def forced_zero_scan(d: int) -> dict:
    """All mu in {-1, 0, 1}^d with Xi = d: count hypothesis cases and nonzero ones among them."""
    n = d + 1
    held, counter = 0, []
    for mu in itertools.product((-1, 0, 1), repeat=d):
        if forced_zero_check(mu, n):
            held += 1
            if any(mu):
                counter.append(list(mu))
    return {"d": d, "n": n, "profiles": 3**d, "hypotheses_hold": held,
            "counterexamples": counter}


# ---------------------------------------------------------------------------
# tori


@dataclass(frozen=True)
class TorusSpec:
    """T* = prod_i k_i^x with [k_i : F_l] = degrees[i]; t is an exponent tuple
    (e_i) meaning t_i = g^(e_i (l^D - 1)/(l^d_i - 1)) for a primitive g of F_(l^D)."""
    l: int
    degrees: tuple

    def __post_init__(self):
        if not is_prime(self.l):
            raise ValueError(f"{self.l} is not prime")
        object.__setattr__(self, "degrees", tuple(int(x) for x in self.degrees))

    @property
    def D(self) -> int:
        return lcm(*self.degrees) if self.degrees else 1

    @property
    def moduli(self) -> tuple:
        return tuple(self.l**d - 1 for d in self.degrees)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    def exponents(self, index: int) -> tuple:
        """Scan order: the first coordinate varies fastest."""
        out = []
        for m in self.moduli:
            out.append(index % m)
            index //= m
        return tuple(out)

    def elements(self, e: tuple) -> list[int]:
        """Codes in F_(l^D) of the components t_i."""
        big = make_field(self.l, self.D)
        o = ops(big)
        g = primitive_element(big).code
        full = self.l**self.D - 1
        return [o.pow(g, ei * (full // m)) for ei, m in zip(e, self.moduli)]


def _profile_logs(torus: TorusSpec, profiles) -> np.ndarray:
    """Rows c with log mu(t) = sum_i c_i e_i mod l^D - 1."""
    full = torus.l**torus.D - 1
    rows = []
    for mu in profiles:
        row = []
        for mi, d_i, m in zip(mu, torus.degrees, torus.moduli):
            if len(mi) != d_i:
                raise ValueError("profile component lengths must match the degrees")
            s = sum(c * torus.l**j for j, c in enumerate(mi))
            row.append((s * (full // m)) % full)
        rows.append(row)
    return np.array(rows, dtype=object).reshape(len(rows), len(torus.degrees))


def evaluate_profile(torus: TorusSpec, mu, e: tuple) -> int:
    """mu(t) by field arithmetic in F_(l^D), as a code."""
    big = make_field(torus.l, torus.D)
    o = ops(big)
    acc = o.from_int(1)
    for ti, mi in zip(torus.elements(e), mu):
        for j, c in enumerate(mi):
            if c:
                x = o.pow(ti, torus.l**j)
                acc = o.mul(acc, o.pow(x if c > 0 else o.inv(x), abs(c)))
    return acc


@dataclass
class RegularSearch:
    t: tuple | None
    elements: list | None
    collisions: int
    torus_order: int
    profile_count: int

    @property
    def collision_fraction(self) -> float:
        return self.collisions / self.torus_order


def search_regular_t(torus: TorusSpec, profiles, M: int = 1) -> RegularSearch:
    """First t (scan order) with mu(t)^M != 1 for every nonzero profile, plus the
    number of pairs (mu, t) with mu(t)^M = 1 over the whole torus."""
    profiles = [tuple(tuple(x) for x in mu) for mu in profiles]
    nonzero = [mu for mu in profiles if any(any(c) for c in mu)]
    T = torus.order
    if T > TORUS_BUDGET or T * max(1, len(nonzero)) > PAIR_BUDGET:
        raise BudgetExceeded(f"|T*| = {T} with {len(nonzero)} profiles")
    full = torus.l**torus.D - 1
    if not nonzero:
        return RegularSearch(torus.exponents(0), torus.elements(torus.exponents(0)), 0, T, 0)
    C = _profile_logs(torus, nonzero)
    idx = np.arange(T, dtype=np.int64)
    E = np.empty((T, len(torus.degrees)), dtype=np.int64)
    rest = idx.copy()
    for k, m in enumerate(torus.moduli):
        E[:, k] = rest % m
        rest //= m
    use_int = full < 2**31
    bad = np.zeros(T, dtype=bool)
    collisions = 0
    step = max(1, PAIR_BUDGET // (50 * T) or 1)
    for a in range(0, len(nonzero), step):
        c = C[a:a + step]
        if use_int:
            logs = (E @ (c.astype(np.int64) % full).T) % full  # (T, P)
        else:
            logs = np.array([[sum(int(x) * int(y) for x, y in zip(row, cc)) % full for cc in c]
                             for row in E], dtype=object)
        hit = (logs * M) % full == 0
        collisions += int(hit.sum())
        bad |= hit.any(axis=1)
    good = np.flatnonzero(~bad)
    if not len(good):
        return RegularSearch(None, None, collisions, T, len(nonzero))
    e = torus.exponents(int(good[0]))
    big = make_field(torus.l, torus.D)
    o = ops(big)
    one = o.from_int(1)
    for mu in nonzero:
        assert o.pow(evaluate_profile(torus, mu, e), M) != one
    return RegularSearch(e, torus.elements(e), collisions, T, len(nonzero))


def very_regular_element(spec, n: int, weights, M: int = 1) -> Matrix:
    """First g in the diagonal torus of GL_n(k) whose weight values lambda(g)^M are
    pairwise distinct; scan order has the first diagonal exponent varying fastest."""
    weights = [tuple(int(x) for x in w) for w in weights]
    if any(len(w) != n for w in weights):
        raise ValueError("weights must have n coordinates")
    if len(set(weights)) < len(weights):
        raise NotFound("repeated weights cannot be separated")
    m = spec.order - 1
    if m**n > TORUS_BUDGET:
        raise BudgetExceeded(f"torus of order {m**n}")
    W = np.array(weights, dtype=np.int64).reshape(len(weights), n)
    idx = np.arange(m**n, dtype=np.int64)
    E = np.stack([(idx // m**k) % m for k in range(n)], axis=1)
    logs = (E @ W.T * M) % m  # (T, w)
    s = np.sort(logs, axis=1)
    ok = (np.diff(s, axis=1) != 0).all(axis=1) if len(weights) > 1 else np.ones(len(E), bool)
    hits = np.flatnonzero(ok)
    if not len(hits):
        raise NotFound("no torus element separates the weights")
    e = E[hits[0]]
    o = ops(spec)
    g = primitive_element(spec).code
    diag = [o.pow(g, int(x)) for x in e]
    vals = []
    for w in weights:
        v = o.from_int(1)
        for x, c in zip(diag, w):
            v = o.mul(v, o.pow(x if c >= 0 else o.inv(x), abs(c)))
        vals.append(o.pow(v, M))
    assert len(set(vals)) == len(vals)
    return Matrix.diag(spec, diag)


# ---------------------------------------------------------------------------
# niveau claim


def _niveau_values(Delta: int, ls: np.ndarray, d: int) -> np.ndarray:
    S = np.arange(-Delta, Delta + 1, dtype=np.int64)
    grid = np.array(list(itertools.product(S, repeat=d)), dtype=np.int64).reshape(-1, d)
    powers = np.stack([ls**i for i in range(d)], axis=1)  # (L, d)
    return powers @ grid.T  # (L, |S|^d)


def niveau_injectivity_batch(N: int, Delta: int, ls, d: int) -> np.ndarray:
    """For each l: whether b -> r sum b_i l^i mod (l^d - 1) is injective on
    [-Delta, Delta]^d for every 1 <= r <= N!."""
    if (2 * Delta + 1) ** d > NIVEAU_DOMAIN_BUDGET:
        raise BudgetExceeded(f"domain of size {(2 * Delta + 1) ** d}")
    ls = np.asarray(ls, dtype=np.int64)
    if ls.size and int(ls.max()) ** d > 2**40:
        raise BudgetExceeded("l^d too large for int64 products")
    vals = _niveau_values(Delta, ls, d)
    mod = (ls**d - 1)[:, None]
    ok = np.ones(len(ls), dtype=bool)
    for r in range(1, math.factorial(N) + 1):
        img = np.sort((r * vals) % mod, axis=1)
        if img.shape[1] > 1:
            ok &= (np.diff(img, axis=1) != 0).all(axis=1)
    return ok


def niveau_injectivity_check(N: int, Delta: int, l: int, d: int) -> bool:
    return bool(niveau_injectivity_batch(N, Delta, [l], d)[0])


def niveau_grid(N_max: int = 3, Delta_max: int = 2, d_max: int = 3,
                limit: int = 10**6) -> list[dict]:
    """Every (N, Delta, d) with all primes l > (3 Delta + 2) N! and l^d - 1 <= limit."""
    rows = []
    for N in range(1, N_max + 1):
        for Delta in range(0, Delta_max + 1):
            for d in range(1, d_max + 1):
                lo = (3 * Delta + 2) * math.factorial(N)
                hi = int(round((limit + 1) ** (1 / d))) + 2
                ls = [l for l in sympy.primerange(lo + 1, hi) if l**d - 1 <= limit]
                if not ls:
                    continue
                ok = niveau_injectivity_batch(N, Delta, ls, d)
                rows.append({"N": N, "Delta": Delta, "d": d, "primes": len(ls),
                             "l_min": ls[0], "l_max": ls[-1],
                             "failures": [int(l) for l, f in zip(ls, ok) if not f]})
    return rows


# ---------------------------------------------------------------------------
# sweeps


def _orbit_bound_job(args):
    d, l, Xi, N, K = args
    return orbit_bound_point(d, l, Xi, N, K)


def orbit_bound_sweep(ds=(3, 4, 6), primes=None, Xi: int = 2, N: int = 1, jobs: int = 1) -> dict:
    primes = list(sympy.primerange(11, 98)) if primes is None else list(primes)
    K, argmin = totient_constant()
    points = [(d, l, Xi, N, K) for d in ds for l in primes]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_orbit_bound_job, points))
    else:
        parts = [_orbit_bound_job(p) for p in points]
    rows = [r for part in parts for r in part]
    return {"K": K, "K_argmin": argmin, "Xi": Xi, "N": N, "rows": rows,
            "cases": len(rows), "violations": [r for r in rows if not r["pass"]]}


def forced_zero_sweep(d_max: int = 8) -> dict:
    scans = [forced_zero_scan(d) for d in range(1, d_max + 1)]
    return {"scans": scans, "counterexamples": sum(len(s["counterexamples"]) for s in scans)}


def convolution_property(count: int = 1000, d_max: int = 24, seed: int = 0xB16) -> dict:
    rng = np.random.default_rng(seed)
    bad = []
    for _ in range(count):
        d = int(rng.integers(1, d_max + 1))
        mu = tuple(int(x) for x in rng.integers(-2, 3, size=d))
        fourier = sum(1 for v in cyclic_fourier(mu) if not is_zero(v))
        direct = _integer_rank(convolution_matrix(mu))
        if fourier != direct:
            bad.append({"mu": list(mu), "fourier": fourier, "elimination": direct})
    return {"profiles": count, "mismatches": bad}


def write_csv(rows: list[dict], path) -> None:
    if not rows:
        open(path, "w").close()
        return
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0]))
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, list) else v for k, v in r.items()})


def write_json(obj, path) -> None:
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True, default=_jsonable)
        f.write("\n")


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if hasattr(x, "__dataclass_fields__"):
        return asdict(x)
    raise TypeError(type(x))
