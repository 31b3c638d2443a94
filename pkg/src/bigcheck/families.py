"""Constructors for structured subgroups of GL_n(F_q), with ground-truth metadata."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from bigcheck import linalg
from bigcheck.errors import BadOrder, BadPrime, CapExceeded
from bigcheck.ff import FieldSpec, make_field, ops, primitive_element
from bigcheck.group import MatrixGroup, close, default_cap, gl_order
from bigcheck.matrix import Matrix

TAGS = ("reducible", "imprimitive", "tensor_product", "iterated_tensor", "sl_scalars",
        "almost_simple_lift", "binary_tetrahedral_tensor", "induced_tensor", "random")


@dataclass
class LabeledGroup:
    group: MatrixGroup
    construction: str
    params: dict = field(default_factory=dict)
    # block_system: list of echelon bases; invariant_subspace: basis rows;
    # tensor_factors: [{"n":, "order":}] for tensor-type constructions
    metadata: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.construction}({inner})"


# ---------------------------------------------------------------------------
# generator sets


def _elementary(spec, n, i, j, c) -> Matrix:
    a = linalg.identity(spec, n)
    a[i, j] = c
    return Matrix(spec, a)


def _x_powers(spec) -> list[int]:
    """Codes of 1, x, ..., x^(d-1): an additive basis of F_q over F_l."""
    return [spec.code([0] * k + [1]) for k in range(spec.degree)]


def sl_generators(spec: FieldSpec, n: int) -> list[Matrix]:
    """Transvections I + c E_ij for adjacent (i, j) and c in an additive basis."""
    gens = []
    for i in range(n - 1):
        for c in _x_powers(spec):
            gens.append(_elementary(spec, n, i, i + 1, c))
            gens.append(_elementary(spec, n, i + 1, i, c))
    return gens


def gl_generators(spec: FieldSpec, n: int) -> list[Matrix]:
    w = primitive_element(spec)
    d = Matrix.diag(spec, [w] + [1] * (n - 1))
    if n == 1:
        return [d]
    return sl_generators(spec, n) + [d]


def block_diag(spec, blocks) -> Matrix:
    n = sum(b.n for b in blocks)
    a = linalg.zeros(spec, n, n)
    at = 0
    for b in blocks:
        a[at:at + b.n, at:at + b.n] = b.data
        at += b.n
    return Matrix(spec, a)


def kron(a: Matrix, b: Matrix) -> Matrix:
    return Matrix(a.spec, linalg.kron(a.spec, a.data, b.data))


def permutation_matrix(spec, perm) -> Matrix:
    """Column j maps to row perm[j]."""
    n = len(perm)
    a = linalg.zeros(spec, n, n)
    a[list(perm), list(range(n))] = 1
    return Matrix(spec, a)


def general_linear(spec: FieldSpec, n: int, cap: int | None = None) -> MatrixGroup:
    cap = default_cap() if cap is None else cap
    if gl_order(spec.order, n) > cap:
        raise CapExceeded(f"|GL_{n}({spec})| exceeds cap {cap}")
    return close(gl_generators(spec, n), cap=cap, label=f"GL{n}({spec})")


def special_linear(spec: FieldSpec, n: int, cap: int | None = None) -> MatrixGroup:
    return close(sl_generators(spec, n), cap=cap, label=f"SL{n}({spec})")


# ---------------------------------------------------------------------------
# Aschbacher-type families


def reducible_group(spec: FieldSpec, n: int, d: int, cap: int | None = None) -> LabeledGroup:
    """Full stabiliser of span(e_1, ..., e_d): block upper triangular matrices."""
    if not 0 < d < n:
        raise ValueError(f"need 0 < d < n, got d={d}, n={n}")
    gens = [block_diag(spec, [g, Matrix.identity(spec, n - d)]) for g in gl_generators(spec, d)]
    gens += [block_diag(spec, [Matrix.identity(spec, d), g]) for g in gl_generators(spec, n - d)]
    gens.append(_elementary(spec, n, 0, d, 1))
    G = close(gens, cap=cap, label=f"P{d},{n - d}({spec})")
    basis = linalg.identity(spec, n)[:d]
    return LabeledGroup(G, "reducible", {"field": repr(spec), "n": n, "d": d},
                        {"invariant_subspace": basis})


def imprimitive_wreath(spec: FieldSpec, block_dim: int, m: int,
                       cap: int | None = None) -> LabeledGroup:
    """GL_b(k) wr S_m permuting m coordinate blocks of size b."""
    if m < 2:
        raise ValueError("need at least two blocks")
    b = block_dim
    n = b * m
    gens = [block_diag(spec, [g] + [Matrix.identity(spec, b)] * (m - 1))
            for g in gl_generators(spec, b)]

    def block_perm(sigma):
        perm = [sigma[j // b] * b + j % b for j in range(n)]
        return permutation_matrix(spec, perm)

    gens.append(block_perm([1, 0] + list(range(2, m))))
    if m > 2:
        gens.append(block_perm([(j + 1) % m for j in range(m)]))
    G = close(gens, cap=cap, label=f"GL{b}({spec})wrS{m}")
    eye = linalg.identity(spec, n)
    blocks = [eye[t * b:(t + 1) * b] for t in range(m)]
    return LabeledGroup(G, "imprimitive", {"field": repr(spec), "block_dim": b, "m": m},
                        {"block_system": blocks})


def tensor_central_product(G1: MatrixGroup, G2: MatrixGroup, cap: int | None = None,
                           construction: str = "tensor_product") -> LabeledGroup:
    """Image of G1 x G2 acting on k^n1 (x) k^n2."""
    if G1.spec != G2.spec:
        raise ValueError("factors must share a field")
    spec = G1.spec
    I1, I2 = Matrix.identity(spec, G1.n), Matrix.identity(spec, G2.n)
    gens = [kron(g, I2) for g in G1.generators] + [kron(I1, h) for h in G2.generators]
    G = close(gens, cap=cap, spec=spec, n=G1.n * G2.n)
    factors = [{"n": G1.n, "order": G1.order, "label": G1.label},
               {"n": G2.n, "order": G2.order, "label": G2.label}]
    return LabeledGroup(G, construction, {"field": repr(spec), "n1": G1.n, "n2": G2.n},
                        {"tensor_factors": factors})


def iterated_tensor(G1: MatrixGroup, cap: int | None = None) -> LabeledGroup:
    """(G1 (x) G1) extended by the swap of the two tensor factors."""
    spec, m = G1.spec, G1.n
    I = Matrix.identity(spec, m)
    gens = [kron(g, I) for g in G1.generators] + [kron(I, g) for g in G1.generators]
    swap = [(j % m) * m + j // m for j in range(m * m)]
    gens.append(permutation_matrix(spec, swap))
    G = close(gens, cap=cap, spec=spec, n=m * m)
    factors = [{"n": m, "order": G1.order, "label": G1.label}] * 2
    return LabeledGroup(G, "iterated_tensor", {"field": repr(spec), "m": m, "t": 2},
                        {"tensor_factors": factors})


def sl_scalars(spec: FieldSpec, n: int, cap: int | None = None) -> LabeledGroup:
    """SL_n(k) k^x."""
    cap = default_cap() if cap is None else cap
    q = spec.order
    expected = gl_order(q, n) // (q - 1) * (q - 1) // math.gcd(n, q - 1)
    if expected > cap:
        raise CapExceeded(f"|SL_{n}({spec}) k^x| = {expected} exceeds cap {cap}")
    w = primitive_element(spec)
    gens = sl_generators(spec, n) + [Matrix.scalar(spec, n, w)]
    G = close(gens, cap=cap, label=f"SL{n}({spec})·k^x")
    return LabeledGroup(G, "sl_scalars", {"field": repr(spec), "n": n},
                        {"expected_order": expected})


# ---------------------------------------------------------------------------
# quaternionic models over F_l


def _quaternion_units(l: int):
    """i, j, k in SL_2(F_l) with i^2 = j^2 = -1, k = ij (uses a^2 + b^2 = -1)."""
    a, b = next((a, b) for a in range(l) for b in range(l) if (a * a + b * b + 1) % l == 0)
    i = np.array([[a, b], [b, -a]], dtype=np.int64) % l
    j = np.array([[0, 1], [-1, 0]], dtype=np.int64) % l
    return i, j, i @ j % l


def binary_tetrahedral(l: int) -> MatrixGroup:
    """2.A_4 = <i, (-1+i+j+k)/2> in SL_2(F_l)."""
    if l <= 3:
        raise BadPrime(f"2.A4 model needs l > 3, got {l}")
    F = make_field(l)
    i, j, k = _quaternion_units(l)
    half = pow(2, -1, l)
    om = half * (-np.eye(2, dtype=np.int64) + i + j + k) % l
    G = close([Matrix(F, i), Matrix(F, om)], label=f"2.A4(F_{l})")
    assert G.order == 24
    return G


def binary_icosahedral(l: int) -> MatrixGroup:
    """2.A_5 in SL_2(F_l), l = +-1 mod 5, from icosian units."""
    if l <= 5 or l % 5 not in (1, 4):
        raise BadPrime(f"2.A5 model over F_l needs l = +-1 mod 5, got {l}")
    F = make_field(l)
    i, j, k = _quaternion_units(l)
    half = pow(2, -1, l)
    phi = next(x for x in range(l) if (x * x - x - 1) % l == 0)
    eye = np.eye(2, dtype=np.int64)
    om = half * (-eye + i + j + k) % l
    g = half * (phi * eye + pow(phi, -1, l) * i + j) % l
    G = close([Matrix(F, om), Matrix(F, g)], label=f"2.A5(F_{l})")
    assert G.order == 120
    return G


def binary_tetrahedral_tensor(l: int, cap: int | None = None) -> LabeledGroup:
    """Image of 2.A4 x 2.A4 under the tensor square of the standard 2-dim rep."""
    if l <= 3:
        raise BadPrime(f"need l > 3, got {l}")
    T = binary_tetrahedral(l)
    lg = tensor_central_product(T, T, cap, construction="binary_tetrahedral_tensor")
    lg.params = {"l": l}
    return lg


def _dihedral_induced(spec: FieldSpec, order: int) -> MatrixGroup:
    """<diag(z, z^-1), swap>: the image of Ind of a character of order ``order``."""
    q = spec.order
    o = ops(spec)
    w = primitive_element(spec).code
    z = o.pow(w, (q - 1) // order)
    d = Matrix.diag(spec, [z, o.inv(z)])
    s = Matrix.from_entries(spec, [[0, 1], [1, 0]])
    return close([d, s], label=f"D({order})")


def induced_tensor(spec: FieldSpec, o1: int, o2: int, cap: int | None = None) -> LabeledGroup:
    """Tensor product of two monomial (induced-character) 2-dim groups."""
    q = spec.order
    for o_ in (o1, o2):
        if o_ < 1 or (q - 1) % o_:
            raise BadOrder(f"character order {o_} does not divide q - 1 = {q - 1}")
    A, B = _dihedral_induced(spec, o1), _dihedral_induced(spec, o2)
    lg = tensor_central_product(A, B, cap, construction="induced_tensor")
    lg.params = {"field": repr(spec), "o1": o1, "o2": o2}
    eye = linalg.identity(spec, 4)
    lg.metadata["block_system"] = [eye[t:t + 1] for t in range(4)]
    return lg


def sym2(g: Matrix) -> Matrix:
    """Symmetric square on the basis x^2, xy, y^2."""
    spec = g.spec
    o = ops(spec)
    a, b = int(g.data[0, 0]), int(g.data[0, 1])
    c, d = int(g.data[1, 0]), int(g.data[1, 1])
    two = o.from_int(2)
    cols = [
        [o.mul(a, a), o.mul(two, o.mul(a, c)), o.mul(c, c)],
        [o.mul(a, b), o.add(o.mul(a, d), o.mul(b, c)), o.mul(c, d)],
        [o.mul(b, b), o.mul(two, o.mul(b, d)), o.mul(d, d)],
    ]
    return Matrix(spec, np.array(cols, dtype=o.dtype).T)


def almost_simple_lift(spec: FieldSpec, n: int, cap: int | None = None) -> LabeledGroup:
    """n = 2: 2.A5 in SL_2(F_l) (l = +-1 mod 5); n = 3: Sym^2 of SL_2(k)."""
    if n == 2:
        if spec.degree != 1:
            raise BadPrime("the 2.A5 model is built over prime fields")
        G = binary_icosahedral(spec.char)
        return LabeledGroup(G, "almost_simple_lift", {"field": repr(spec), "n": 2, "source": "2.A5"},
                            {"simple": "A5"})
    if n == 3:
        if spec.char == 2:
            raise BadPrime("Sym^2 is reducible in characteristic 2")
        gens = [sym2(g) for g in sl_generators(spec, 2)]
        G = close(gens, cap=cap, label=f"Sym2(SL2({spec}))")
        return LabeledGroup(G, "almost_simple_lift", {"field": repr(spec), "n": 3, "source": "Sym2"},
                            {"simple": f"PSL2({spec.order})"})
    raise ValueError("almost_simple_lift supports n in {2, 3}")


def random_subgroup(spec: FieldSpec, n: int, generator_count: int, seed: int,
                    cap: int | None = None) -> LabeledGroup:
    """Closure of seeded random invertible matrices."""
    rng = np.random.default_rng(seed)
    gens = []
    while len(gens) < generator_count:
        m = Matrix(spec, rng.integers(0, spec.order, size=(n, n)))
        if m.is_invertible():
            gens.append(m)
    G = close(gens, cap=cap, spec=spec, n=n)
    return LabeledGroup(G, "random", {"field": repr(spec), "n": n,
                                      "generators": generator_count, "seed": seed})


# ---------------------------------------------------------------------------
# structural spot checks


def check_structure(lg: LabeledGroup) -> bool:
    """The construction tag agrees with the group's generators."""
    G = lg.group
    spec = G.spec
    gens = [g.data for g in G.generators] or [linalg.identity(spec, G.n)]
    md = lg.metadata
    if "invariant_subspace" in md:
        if not linalg.is_stable(spec, md["invariant_subspace"], gens):
            return False
    if "block_system" in md:
        if not permutes_blocks(spec, gens, md["block_system"]):
            return False
    if "tensor_factors" in md and lg.construction != "iterated_tensor":
        n2 = md["tensor_factors"][1]["n"]
        n1 = md["tensor_factors"][0]["n"]
        for g in G.generators:
            if not is_kronecker(spec, g.data, n1, n2):
                return False
    return True


def permutes_blocks(spec, gens, blocks) -> bool:
    keys = [linalg.rowspace(spec, b).tobytes() for b in blocks]
    if linalg.rank(spec, np.vstack(blocks)) != sum(len(b) for b in blocks):
        return False
    for A in gens:
        for b in blocks:
            img = linalg.rowspace(spec, linalg.apply(spec, A, b)).tobytes()
            if img not in keys:
                return False
    return True


def is_kronecker(spec, a, n1, n2) -> bool:
    """Whether a = x (x) y for some n1 x n1 x and n2 x n2 y (rank-one rearrangement)."""
    r = a.reshape(n1, n2, n1, n2).transpose(0, 2, 1, 3).reshape(n1 * n1, n2 * n2)
    return linalg.rank(spec, r) == 1


# ---------------------------------------------------------------------------
# family specifications


def from_spec(data: dict, cap: int | None = None) -> LabeledGroup:
    """Build from {"family": ..., "field": ..., "params": {...}, "seed": ...}."""
    fam = data["family"]
    fjson = data.get("field")
    spec = FieldSpec.from_json(fjson) if isinstance(fjson, dict) else \
        (make_field(int(fjson)) if fjson is not None else None)
    p = dict(data.get("params", {}))
    seed = data.get("seed", 0xB16)
    if fam in ("reducible", "borel"):
        return reducible_group(spec, p.get("n", 2), p.get("d", 1), cap)
    if fam in ("imprimitive", "wreath", "monomial"):
        return imprimitive_wreath(spec, p.get("block_dim", 1), p.get("m", 2), cap)
    if fam == "sl_scalars":
        return sl_scalars(spec, p.get("n", 2), cap)
    if fam == "gl":
        G = general_linear(spec, p.get("n", 2), cap)
        return LabeledGroup(G, "gl", {"field": repr(spec), "n": G.n})
    if fam == "binary_tetrahedral_tensor":
        return binary_tetrahedral_tensor(spec.char if spec else int(p["l"]), cap)
    if fam == "induced_tensor":
        return induced_tensor(spec, p.get("o1", 3), p.get("o2", 4), cap)
    if fam == "almost_simple_lift":
        return almost_simple_lift(spec, p.get("n", 2), cap)
    if fam == "random":
        return random_subgroup(spec, p.get("n", 2), p.get("generators", 2), seed, cap)
    if fam in ("tensor_product", "iterated_tensor"):
        factors = p.get("factors", ["sl", "2.A4"])
        built = [_named_factor(spec, f, cap) for f in factors]
        if fam == "iterated_tensor":
            return iterated_tensor(built[0], cap)
        return tensor_central_product(built[0], built[1], cap)
    raise ValueError(f"unknown family {fam!r}")


def _named_factor(spec, name, cap):
    if name == "sl":
        return special_linear(spec, 2, cap)
    if name == "2.A4":
        return binary_tetrahedral(spec.char)
    if name == "2.A5":
        return binary_icosahedral(spec.char)
    raise ValueError(f"unknown tensor factor {name!r}")


# ---------------------------------------------------------------------------
# seeded oracle corpus


def _structured(spec, n):
    out = [LabeledGroup(close([], spec=spec, n=n), "random", {"field": repr(spec), "n": n,
                                                             "trivial": True})]
    w = primitive_element(spec)
    out.append(LabeledGroup(close([Matrix.scalar(spec, n, w)]), "random",
                            {"field": repr(spec), "n": n, "scalars": True}))
    out.append(LabeledGroup(close([Matrix.diag(spec, [w] + [1] * (n - 1)),
                                   Matrix.diag(spec, [1] * (n - 1) + [w])]), "random",
                            {"field": repr(spec), "n": n, "torus": True}))
    for d in range(1, n):
        out.append(reducible_group(spec, n, d))
    if n == 2:
        out.append(imprimitive_wreath(spec, 1, 2))
        out.append(sl_scalars(spec, 2))
        out.append(LabeledGroup(general_linear(spec, 2), "gl", {"field": repr(spec), "n": 2}))
        out.append(LabeledGroup(special_linear(spec, 2), "sl", {"field": repr(spec), "n": 2}))
    else:
        out.append(imprimitive_wreath(spec, 1, n))
        if spec.char != 2:
            out.append(almost_simple_lift(spec, 3))
    return out


def oracle_corpus(seed: int = 0xB16, size: int = 56, max_order: int = 5000) -> list[LabeledGroup]:
    """Structured groups plus seeded random subgroups over GL2(F5), GL2(F7), GL3(F5)."""
    ambient = [(make_field(5), 2), (make_field(7), 2), (make_field(5), 3)]
    out = []
    for spec, n in ambient:
        out += [g for g in _structured(spec, n) if g.group.order <= max_order]
    rng = np.random.default_rng(seed)
    t = 0
    while len(out) < size:
        spec, n = ambient[t % len(ambient)]
        t += 1
        count = int(rng.integers(1, 3))
        sub_seed = int(rng.integers(0, 2**31))
        try:
            lg = random_subgroup(spec, n, count, sub_seed, cap=max_order)
        except CapExceeded:
            continue
        out.append(lg)
    return out[:size]
