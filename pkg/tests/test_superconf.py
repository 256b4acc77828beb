"""Trivializing sections, factored maps, twistor forms, and divisors."""

import numpy as np
import pytest

from quatconf.cfun import Divisor, INFINITY, RationalMap, is_infinity
from quatconf.errors import ConstructionError, DomainError, HypothesisError
from quatconf.quat import I, J, K, ONE, Quaternion
from quatconf.sphere import SphereMap, from_lambda_pair, stereo_inverse
from quatconf.superconf import (
    build_psi,
    build_superconformal,
    build_twistor,
    divisor_of_factored,
    farthest_sphere_point,
    superconformal_from_divisor,
)
from quatconf.surface import PlanarDomain, jet_at, wintgen_slack_at

rng = np.random.default_rng(55)

DISK = PlanarDomain.disk(0j, 1.0, resolution=12, h=1e-3)
ANTI = from_lambda_pair([1.0], [0j, 1.0], -1)  # anti-holomorphic (1, z)


def test_farthest_point_of_small_cap():
    # all samples near k: the farthest point is close to -k
    pts = np.array([[0.05, 0.0, 0.999], [0.0, 0.05, 0.999], [0.0, 0.0, 1.0]])
    q, gap = farthest_sphere_point(pts)
    assert q.z < -0.99
    assert gap > 3.0


def test_psi_anchor_forced_a():
    psi = build_psi(SphereMap.constant(I), DISK, a=Quaternion(0, -0.5, 0, 0))
    for z in (0j, 0.3 + 0.4j, -0.7j):
        assert (psi(z) - ONE).norm() < 1e-15


def test_psi_constant_normal_default_and_a_one():
    psi = build_psi(SphereMap.constant(I), DISK, a=ONE)
    assert (psi(0.5j) - 2 * I).norm() < 1e-15
    auto = build_psi(SphereMap.constant(I), DISK)
    v = auto(0.1 + 0.1j)
    assert v.norm() > 0.5


def test_psi_eigen_relation_and_nonvanishing():
    psi = build_psi(ANTI, DISK)
    assert psi.min_abs > 0.1
    for _ in range(100):
        z = complex(*rng.uniform(-0.7, 0.7, 2))
        v = psi(z)
        assert (ANTI(z) * v - v * I).norm() < 1e-10
        assert v.norm() > 1e-3


def test_psi_jets_match_fd():
    psi = build_psi(ANTI, DISK)
    z, h = 0.2 + 0.3j, 1e-5
    j = psi.jet1(z)
    fx = (psi(z + h) - psi(z - h)) * (1 / (2 * h))
    assert (j.dx - fx).norm() < 1e-9


def test_surjective_normal_rejected():
    import math

    def wrap(z: complex) -> Quaternion:
        # classical angle parametrization: the image is all of the sphere
        x, y = z.real, z.imag
        return Quaternion(0.0, math.cos(x) * math.sin(y), math.sin(x) * math.sin(y),
                          math.cos(y))

    cover = SphereMap.from_callable(wrap)
    big = PlanarDomain.rectangle(complex(math.pi, math.pi), (math.pi, math.pi),
                                 resolution=12, h=1e-3)
    with pytest.raises(HypothesisError):
        build_psi(cover, big, sample_resolution=128)


def test_build_superconformal_recovers_left_normal():
    psi = build_psi(ANTI, DISK)
    fm = build_superconformal(psi, RationalMap([0j, 1.0]), RationalMap([0.5, 0, 0.25]))
    fd = fm.surface().finite_difference_view(1e-3)
    sup = 0.0
    for z in DISK.grid(resolution=7):
        jet = jet_at(fd, z)
        sup = max(sup, (jet.N - ANTI(z)).norm())
    assert sup < 1e-4


def test_build_superconformal_is_wintgen_equal():
    psi = build_psi(ANTI, DISK)
    fm = build_superconformal(psi, RationalMap([0.3, 1.0]), RationalMap([0j, 0, 0.5]))
    surf = fm.surface()
    for z in (0.3 + 0.2j, -0.4 - 0.1j):
        assert abs(wintgen_slack_at(surf, z)) < 1e-10


def test_build_superconformal_rejects_holomorphic_normal():
    hol = from_lambda_pair([1.0], [0j, 1.0], 1)
    psi = build_psi(hol, DISK)
    with pytest.raises(HypothesisError):
        build_superconformal(psi, RationalMap.identity(), RationalMap([0j]))


def test_build_superconformal_rejects_interior_pole():
    psi = build_psi(ANTI, DISK)
    with pytest.raises(DomainError):
        build_superconformal(psi, RationalMap([1.0], [-0.2, 1.0]), RationalMap([0j]))


def test_unit_factor_returns_section():
    psi = build_psi(ANTI, DISK)
    fm = build_superconformal(psi, RationalMap([1.0]), RationalMap([0j]))
    for z in (0.1 + 0.1j, -0.3 + 0.2j):
        assert (fm(z) - psi(z)).norm() < 1e-14


def test_liouville_constant_pair():
    # constant components: f = psi * C exactly, everywhere
    psi = build_psi(ANTI, DISK)
    c0, c1 = 0.7 - 0.2j, 0.1 + 0.4j
    fm = build_superconformal(psi, RationalMap.constant(c0), RationalMap.constant(c1))
    cq = Quaternion(c0.real, c0.imag, c1.real, c1.imag)
    for _ in range(50):
        z = complex(*rng.uniform(-0.7, 0.7, 2))
        assert (fm(z) - psi(z) * cq).norm() < 1e-13


def test_nonconstant_rational_is_unbounded():
    # the complement of the constant case: a nonconstant rational map
    # exceeds any bound somewhere on the sphere
    r = RationalMap([0j, 1.0], [5.0, 1.0])
    sup = 0.0
    radius = 1.0
    while sup < 1e6 and radius < 1e9:
        sup = max(sup, max(abs(r.eval(radius * np.exp(1j * t))) for t in np.linspace(0, 6.28, 16)))
        if not r.den.is_constant:
            for p, _ in r.poles():
                sup = max(sup, abs(r.eval(p + 1e-9)))
        radius *= 10.0
    assert sup > 1e6


# ---------------------------------------------------------------------------
# twistor form


def test_twistor_trivial_pair_is_graph():
    dom = PlanarDomain.disk(0j, 0.9, resolution=10, h=1e-3)
    lam2 = RationalMap([0.2, 1.0])
    lam3 = RationalMap([0j, 0, 1.0])
    surf = build_twistor(RationalMap([1.0]), RationalMap([0j]), lam2, lam3, dom)
    z = 0.3 + 0.1j
    want = Quaternion(0, 0, 0, 0)
    v2, v3 = lam2.eval(z), lam3.eval(z)
    want = Quaternion(v2.real, v2.imag, v3.real, v3.imag)
    assert (surf(z) - want).norm() < 1e-13
    jet = jet_at(surf, z)
    assert (jet.N - I).norm() < 1e-12  # constant left normal i


def test_twistor_inverse_map():
    dom = PlanarDomain.disk(0j, 0.9, resolution=10, h=1e-3)
    surf = build_twistor(RationalMap([1.0]), RationalMap([0j, 1.0]),
                         RationalMap([1.0]), RationalMap([0j]), dom)
    z = 0.2 + 0j
    a = Quaternion(1, 0, 0.2, 0)
    assert (surf(z) - a.inverse()).norm() < 1e-14
    n_exp = surf.meta["left_normal"]
    for w in (0.2 + 0.1j, -0.3 + 0.4j):
        jet = jet_at(surf, w)
        assert (jet.N - n_exp(w)).norm() < 1e-12
        # matches -(l1 + j l0) i (l1 + j l0)^-1 with (l0, l1) = (1, z)
        lam = Quaternion(w.real, w.imag, 1, 0)  # z + j*1
        direct = -(lam * I * lam.inverse())
        assert (jet.N - direct).norm() < 1e-12


def test_twistor_wintgen_equality():
    dom = PlanarDomain.disk(0j, 0.9, resolution=10, h=1e-3)
    surf = build_twistor(RationalMap([1.0]), RationalMap([0j, 1.0]),
                         RationalMap([0j, 0.5]), RationalMap([0.1]), dom)
    for z in (0.25 + 0.15j, -0.2 - 0.3j):
        assert abs(wintgen_slack_at(surf, z)) < 1e-10


def test_twistor_common_zero_in_domain_rejected():
    dom = PlanarDomain.disk(0j, 0.9, resolution=8, h=1e-3)
    with pytest.raises(ConstructionError):
        build_twistor(RationalMap([0j, 1.0]), RationalMap([0j, 1.0]),
                      RationalMap([1.0]), RationalMap([0j]), dom)


# ---------------------------------------------------------------------------
# divisors


def test_divisor_of_factored_examples():
    psi = build_psi(ANTI, DISK)
    fm = build_superconformal(psi, RationalMap([0j, 0, 1.0]), RationalMap([0j, 0, 0, 1.0]))
    d = divisor_of_factored(fm)  # (z^2, z^3): min order 2 at 0
    assert d.order_at(0j) == 2
    assert len(d) == 1

    fm2 = superconformal_from_divisor(Divisor([(1.0 + 0j, -1)]), ANTI, DISK)
    # l0 = 1/(z-1), l1 = 0: polar divisor only
    d2 = divisor_of_factored(fm2)
    assert d2.entries == ((1 + 0j, -1),)

    fm3 = build_superconformal(psi, RationalMap([1.0]), RationalMap([1.0]))
    assert len(divisor_of_factored(fm3)) == 0


def test_divisor_mixed_pair():
    psi = build_psi(ANTI, DISK)
    # l0 = z/(z-1) (pole outside min-order only at its own support), l1 = 1
    fm = superconformal_from_divisor(Divisor([(0j, 1), (1 + 0j, -1)]), ANTI, DISK)
    d = divisor_of_factored(fm)
    assert d.order_at(0j) == 1
    assert d.order_at(1 + 0j) == -1
    # adding the constant second component kills the zero but keeps the pole
    from quatconf.superconf import FactoredMap

    fm2 = FactoredMap(psi, RationalMap([0j, 1.0], [-1.0, 1.0]), RationalMap([1.0]))
    d2 = divisor_of_factored(fm2)
    assert d2.order_at(0j) == 0
    assert d2.entries == ((1 + 0j, -1),)


def test_wft_constant_normal_reproduces_rational():
    fm = superconformal_from_divisor(
        Divisor([(0j, 1), (1 + 0j, -1)]),
        SphereMap.constant(I),
        DISK,
        a=Quaternion(0, -0.5, 0, 0),  # psi = 1
    )
    r = RationalMap([0j, 1.0], [-1.0, 1.0])
    for z in (0.3 + 0.3j, 2.0 + 0j, -0.5j):
        want = r.eval(z)
        got = fm(z)
        assert (got - Quaternion(want.real, want.imag, 0, 0)).norm() < 1e-13
    assert is_infinity(fm(1.0 + 0j))


def test_wft_empty_divisor_gives_section():
    fm = superconformal_from_divisor(Divisor([]), ANTI, DISK)
    for z in (0.2 + 0.1j, -0.4 - 0.2j):
        assert (fm(z) - fm.psi(z)).norm() < 1e-14


def test_wft_round_trip_random():
    for _ in range(100):
        points = []
        while len(points) < rng.integers(1, 4):
            p = complex(*rng.uniform(-1.5, 1.5, 2))
            if all(abs(p - q) > 0.3 for q, _ in points):
                points.append((p, int(rng.integers(1, 5)) * int(rng.choice([-1, 1]))))
        d = Divisor(points)
        fm = superconformal_from_divisor(d, ANTI, DISK)
        got = divisor_of_factored(fm)
        assert len(got) == len(d)
        for (p, o), (q, m) in zip(d.entries, got.entries):
            assert o == m
            assert abs(complex(p) - complex(q)) < 1e-7


def test_wft_left_normal_off_support():
    d = Divisor([(0.5 + 0j, 2)])
    fm = superconformal_from_divisor(d, ANTI, DISK)
    fd = fm.surface().finite_difference_view(1e-3)
    for z in (0.2 + 0.4j, -0.3 - 0.3j):
        jet = jet_at(fd, z)
        assert (jet.N - ANTI(z)).norm() < 1e-4
