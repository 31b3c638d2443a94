import pytest
from hypothesis import given, settings, strategies as st

from bigcheck.errors import DivisionByZero, FieldMismatch, NotPrime, ZeroArgument
from bigcheck.ff import (FieldSpec, arith, discrete_log, element_order, frobenius,
                         make_field, primitive_element)

FIELDS = [(2, 1), (5, 1), (7, 1), (3, 2), (2, 3), (5, 2), (7, 2)]


def test_prime_field_modulus():
    F = make_field(5, 1)
    assert F.degree == 1 and F.order == 5


def test_least_irreducible_quadratic_over_f3():
    # x^2 + 1, constant term first
    assert make_field(3, 2).modulus == (1, 0, 1)


def test_composite_characteristic():
    with pytest.raises(NotPrime):
        make_field(4, 1)


def test_make_field_deterministic():
    assert make_field(7, 3).modulus == make_field(7, 3).modulus


def test_json_round_trip(F9):
    assert FieldSpec.from_json(F9.to_json()) == F9


def test_basic_arithmetic(F5, F9):
    assert (F5.element(3) * F5.element(4)).code == 2
    x = F9.element([0, 1])
    assert (x * x).coeffs == (2, 0)
    assert arith(F5.element(3), F5.element(4), "mul").code == 2
    with pytest.raises(DivisionByZero):
        F5.element(2) / F5.element(0)


def test_cross_field_is_error(F5, F7):
    with pytest.raises(FieldMismatch):
        F5.element(1) + F7.element(1)


def test_frobenius(F9):
    x = F9.element([0, 1])
    assert frobenius(x, 1).coeffs == (0, 2)
    assert frobenius(x, 0) == x
    assert frobenius(x, 2) == x


def test_primitive_element():
    assert primitive_element(make_field(5)).code == 2
    assert primitive_element(make_field(7)).code == 3
    assert primitive_element(make_field(2)).code == 1
    assert element_order(make_field(7).element(2)) == 3


def test_discrete_log():
    F = make_field(11)
    assert discrete_log(F.element(2), F.element(8)) == 3
    assert discrete_log(F.element(2), F.element(1)) == 0
    with pytest.raises(ZeroArgument):
        discrete_log(F.element(2), F.element(0))


field_and_codes = st.sampled_from(FIELDS).flatmap(
    lambda ld: st.tuples(st.just(make_field(*ld)),
                         *[st.integers(0, ld[0] ** ld[1] - 1)] * 3))


@settings(max_examples=2000)
@given(field_and_codes)
def test_field_axioms(data):
    F, a, b, c = data
    a, b, c = F.from_code(a), F.from_code(b), F.from_code(c)
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == F.element(0)
    if not a.is_zero():
        assert a * a.inverse() == F.element(1)


@settings(max_examples=500)
@given(field_and_codes)
def test_frobenius_degree_is_identity(data):
    F, a, _, _ = data
    a = F.from_code(a)
    assert frobenius(a, F.degree) == a
    assert frobenius(a * a, 1) == frobenius(a, 1) * frobenius(a, 1)


@settings(max_examples=500)
@given(field_and_codes)
def test_dlog_round_trip(data):
    F, a, _, _ = data
    x = F.from_code(a)
    if x.is_zero():
        return
    g = primitive_element(F)
    assert g ** discrete_log(g, x) == x


@pytest.mark.parametrize("ld", FIELDS)
def test_field_axioms_bulk(ld):
    # 10^4 seeded triples per field through the vectorized kernels
    import numpy as np
    from bigcheck.ff import ops
    F = make_field(*ld)
    o = ops(F)
    rng = np.random.default_rng(ld[0] * 100 + ld[1])
    a, b, c = (o.asarray(rng.integers(0, F.order, 10**4)) for _ in range(3))
    assert np.array_equal(o.vmul(o.vmul(a, b), c), o.vmul(a, o.vmul(b, c)))
    assert np.array_equal(o.vmul(a, o.vadd(b, c)), o.vadd(o.vmul(a, b), o.vmul(a, c)))
    nz = a[a != 0]
    assert np.all(o.vmul(nz, o.vinv(nz)) == 1)
    # vectorized and scalar routes agree
    for x, y in zip(a[:200], b[:200]):
        assert o.mul(int(x), int(y)) == (F.from_code(int(x)) * F.from_code(int(y))).code
