"""Quaternion algebra unit tests."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quatconf.errors import DomainError
from quatconf.quat import (
    I,
    J,
    K,
    ONE,
    Quaternion,
    from_complex,
    from_complex_pair_left,
    from_complex_pair_right,
    q_inner,
    q_inv,
    q_mul,
    q_rotation_taking,
    rotation_taking_any,
)

rng = np.random.default_rng(20240901)


def random_quaternion(scale=1.0):
    return Quaternion(*(scale * rng.standard_normal(4)))


def random_unit_imaginary():
    v = rng.standard_normal(3)
    v = v / np.linalg.norm(v)
    return Quaternion(0.0, *v)


def test_defining_relations():
    assert I * J == K
    assert J * K == I
    assert K * I == J
    assert I * I == -ONE
    assert J * J == -ONE
    assert K * K == -ONE


def test_product_expansion():
    assert (ONE + I) * (ONE + J) == ONE + I + J + K


def test_j_conjugates_complex():
    for _ in range(50):
        x, y = rng.standard_normal(2)
        c = from_complex(complex(x, y))
        cbar = from_complex(complex(x, -y))
        assert (J * c - cbar * J).norm() < 1e-15


def test_associativity_random():
    for _ in range(100):
        a, b, c = (random_quaternion() for _ in range(3))
        assert ((a * b) * c - a * (b * c)).norm() < 1e-12 * max(1.0, a.norm() * b.norm() * c.norm())


def test_norm_multiplicative():
    for _ in range(10_000):
        a, b = random_quaternion(), random_quaternion()
        lhs = (a * b).norm()
        rhs = a.norm() * b.norm()
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)


def test_conj_reverses_products():
    for _ in range(200):
        a, b = random_quaternion(), random_quaternion()
        assert ((a * b).conj() - b.conj() * a.conj()).norm() < 1e-12


def test_inner_product_symmetric_real():
    # <a,b> = (conj(a) b + conj(b) a)/2 must be purely real
    for _ in range(200):
        a, b = random_quaternion(), random_quaternion()
        sym = (a.conj() * b + b.conj() * a) * 0.5
        assert abs(sym.w - q_inner(a, b)) < 1e-13
        assert sym.imag().norm() < 1e-14


def test_imaginary_product_is_inner_plus_cross():
    for _ in range(200):
        a = random_quaternion().imag()
        b = random_quaternion().imag()
        prod = a * b
        assert abs(prod.w + q_inner(a, b)) < 1e-13
        cross = np.cross(a.imag_components(), b.imag_components())
        assert np.allclose(prod.imag_components(), cross, atol=1e-13)


def test_inverse():
    assert q_inv(2 * I) == Quaternion(0, -0.5, 0, 0)
    assert q_inv(ONE) == ONE
    a = ONE + K
    assert (q_inv(a) * a - ONE).norm() < 1e-15
    for _ in range(100):
        a = random_quaternion()
        if a.norm() < 1e-3:
            continue
        assert (a * q_inv(a) - ONE).norm() < 1e-13


def test_inverse_of_zero_raises():
    with pytest.raises(DomainError):
        q_inv(Quaternion())


def test_rotation_identity_and_quarter_turn():
    assert q_rotation_taking(I, I) == ONE
    a = q_rotation_taking(I, J)
    expect = (ONE + K) * (1.0 / math.sqrt(2.0))
    assert (a - expect).norm() < 1e-15
    assert ((ONE + K) * I * (ONE - K) * 0.5 - J).norm() < 1e-15


def test_rotation_property_random():
    for _ in range(500):
        u, v = random_unit_imaginary(), random_unit_imaginary()
        if (u + v).norm() < 1e-6:
            continue
        a = q_rotation_taking(u, v)
        assert abs(a.norm() - 1.0) < 1e-12
        out = a * u * a.inverse()
        assert (out - v).norm() < 1e-12
        assert abs(out.w) < 1e-12  # conjugation preserves the imaginary span


def test_rotation_antipodal_raises_and_composition_works():
    with pytest.raises(DomainError):
        q_rotation_taking(I, -I)
    a = rotation_taking_any(I, -I)
    assert (a * I * a.inverse() + I).norm() < 1e-12
    for _ in range(50):
        u = random_unit_imaginary()
        a = rotation_taking_any(u, -u)
        assert (a * u * a.inverse() + u).norm() < 1e-11


def test_complex_pair_round_trips():
    for _ in range(100):
        c0 = complex(*rng.standard_normal(2))
        c1 = complex(*rng.standard_normal(2))
        qr = from_complex_pair_right(c0, c1)
        assert qr.complex_pair_right() == (c0, c1)
        # c0 + c1 j assembled explicitly
        assert (qr - (from_complex(c0) + from_complex(c1) * J)).norm() < 1e-15
        ql = from_complex_pair_left(c0, c1)
        assert ql.complex_pair_left() == (c0, c1)
        assert (ql - (from_complex(c0) + J * from_complex(c1))).norm() < 1e-15


@given(st.tuples(*(st.floats(-10, 10) for _ in range(8))))
def test_mul_bilinear_hypothesis(vals):
    a = Quaternion(*vals[:4])
    b = Quaternion(*vals[4:])
    s = 1.75
    assert ((a * s) * b - (a * b) * s).norm() < 1e-9
    assert (q_mul(a, b + b) - (a * b + a * b)).norm() < 1e-9
