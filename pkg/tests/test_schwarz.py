"""Ball Mobius maps, growth constants, invariant-quotient and metric bounds."""

import math

import numpy as np
import pytest

from quatconf.cfun import RationalMap
from quatconf.errors import DomainError, HypothesisError
from quatconf.quat import I, J, K, ONE, Quaternion, ZERO
from quatconf.schwarz import (
    apply_mobius,
    bound_constants,
    disk_mobius,
    disk_mobius_inverse,
    mobius_ball_check,
    pick_check,
    poincare_ratio,
)
from quatconf.sphere import SphereMap, from_lambda_pair
from quatconf.superconf import build_psi, build_superconformal
from quatconf.surface import PlanarDomain, SurfaceMap, jet_at

rng = np.random.default_rng(808)

DISK = PlanarDomain.disk(0j, 0.98, resolution=40, h=1e-3)
ANTI = from_lambda_pair([1.0], [0j, 1.0], -1)


def random_ball_point(radius=0.95):
    while True:
        q = Quaternion(*rng.uniform(-1, 1, 4))
        if q.norm() < radius:
            return q


def ball_valued_fixture(scale=0.35):
    psi = build_psi(ANTI, DISK)
    # f(0) = 0 and sup|f| < 1 after scaling the pair
    lam0 = RationalMap([0j, scale * 0.5, scale * 0.2])
    lam1 = RationalMap([0j, 0, scale * 0.3])
    return build_superconformal(psi, lam0, lam1)


def test_mobius_ball_check_examples():
    ok, _ = mobius_ball_check(ONE, ZERO, ZERO, ONE)
    assert ok
    a1 = 0.5
    c = (1 - a1 * a1) ** -0.5
    ok, res = mobius_ball_check(Quaternion(c), Quaternion(-c * a1),
                                Quaternion(-c * a1), Quaternion(c))
    assert ok and max(res.values()) < 1e-12
    ok, res = mobius_ball_check(Quaternion(2.0), ZERO, ZERO, ONE)
    assert not ok
    assert res["|p|=|s|"] > 0.9


def test_mobius_ball_check_random_centers():
    # normalized coefficients for the recentering map at a quaternion center
    for _ in range(50):
        a1 = random_ball_point(0.9)
        c = (1 - a1.norm_sq()) ** -0.5
        ok, res = mobius_ball_check(c * ONE, -c * a1, -c * a1.conj(), c * ONE)
        assert ok, res


def test_apply_mobius_defining_properties():
    for _ in range(200):
        a1 = random_ball_point(0.9)
        assert apply_mobius(a1, a1).norm() < 1e-13
        a = random_ball_point()
        assert (apply_mobius(ZERO, a) - a).norm() < 1e-15
        out = apply_mobius(a1, a)
        assert out.norm() < 1.0 + 1e-12


def test_apply_mobius_real_slice():
    out = apply_mobius(Quaternion(0.5), ZERO)
    assert (out - Quaternion(-0.5)).norm() < 1e-15


def test_apply_mobius_inversion_composition():
    # recentering at a1 is undone by recentering at its image of 0
    for _ in range(10_000):
        a1 = random_ball_point(0.9)
        a = random_ball_point()
        w = apply_mobius(a1, a)
        assert w.norm() < 1.0
        back = apply_mobius(apply_mobius(a1, ZERO), w)
        # the two-point composition returns a rotated copy of a; norms agree
        assert abs(back.norm() - a.norm()) < 1e-10


def test_apply_mobius_domain_errors():
    with pytest.raises(DomainError):
        apply_mobius(Quaternion(1.2), ZERO)
    with pytest.raises(DomainError):
        apply_mobius(ZERO, Quaternion(1.2))


def test_disk_mobius_inverse():
    z1 = 0.3 - 0.2j
    for z in (0.1 + 0.5j, -0.7j, 0.55):
        assert abs(disk_mobius_inverse(z1, disk_mobius(z1, z)) - z) < 1e-14


# ---------------------------------------------------------------------------
# growth constants


def test_bound_constants_tight_linear():
    psi = build_psi(SphereMap.constant(I), DISK, a=Quaternion(0, -0.5, 0, 0))
    fm = build_superconformal(psi, RationalMap([0j, 0.5]), RationalMap([0j]))
    rep = bound_constants(fm)
    assert abs(rep.c - 1.0) < 1e-12
    assert abs(rep.C0 - 0.5) < 1e-9
    assert rep.C1 == 0.0
    assert rep.max_violation <= 1e-12
    assert rep.equality_attained  # l0 = C0 z is the equality case
    assert abs(rep.derivative_slack) < 1e-9  # sharp at the factor-2 constant


def test_bound_constants_strict_quadratic():
    psi = build_psi(SphereMap.constant(I), DISK, a=Quaternion(0, -0.5, 0, 0))
    fm = build_superconformal(psi, RationalMap([0j, 0, 1.0]), RationalMap([0j]))
    rep = bound_constants(fm)
    assert abs(rep.C0 - 1.0) < 1e-9  # sup of |z^2| on the unit circle
    assert rep.max_violation <= 1e-12
    # strictly inside the disk the bound is slack
    z = 0.5 + 0.2j
    assert fm(z).norm() < rep.bound * abs(z) - 1e-3


def test_bound_constants_zero_map():
    psi = build_psi(ANTI, DISK)
    fm = build_superconformal(psi, RationalMap([0j]), RationalMap([0j]))
    rep = bound_constants(fm)
    assert rep.bound == 0.0
    assert rep.max_violation <= 0.0


def test_bound_constants_requires_zero_at_origin():
    psi = build_psi(ANTI, DISK)
    fm = build_superconformal(psi, RationalMap([0.3, 1.0]), RationalMap([0j]))
    with pytest.raises(HypothesisError):
        bound_constants(fm)


def test_bound_constants_generic_anti_normal():
    fm = ball_valued_fixture()
    rep = bound_constants(fm)
    assert rep.max_violation <= 1e-9
    assert rep.derivative_slack <= 1e-9
    assert rep.c >= 1.0 / rep.c_tilde - 1e-12


# ---------------------------------------------------------------------------
# invariant quotient


def test_pick_reduces_to_schwarz_at_origin():
    fm = ball_valued_fixture()
    rep0 = bound_constants(fm)
    pick = pick_check(fm, 0j)
    # at the origin the recentering maps are identities: same constant
    assert abs(pick.C - rep0.bound) < 5e-3 * rep0.bound
    assert abs(pick.ratio - 1.0) < 1e-12
    assert pick.quotient_violation <= 1e-9
    assert pick.derivative_violation <= 1e-9
    assert pick.recentered_violation <= 1e-9


def test_pick_generic_base_point():
    fm = ball_valued_fixture()
    z1 = 0.3 + 0.1j
    pick = pick_check(fm, z1)
    assert pick.f_z1.norm() <= abs(z1)  # keeps the checked constant provable
    assert pick.ratio >= 1.0
    assert pick.quotient_violation <= 1e-9
    assert pick.derivative_violation <= 1e-9
    assert pick.recentered_violation <= 1e-9
    assert pick.gap > 0.05


def test_pick_conformality_at_base_point():
    fm = ball_valued_fixture()
    j = fm.jet2(0.3 + 0.1j).lower()
    assert abs(j.dx.norm() - j.dy.norm()) < 1e-10


def test_pick_rejects_unbounded_map():
    psi = build_psi(ANTI, DISK)
    fm = build_superconformal(psi, RationalMap([0j, 3.0]), RationalMap([0j]))
    with pytest.raises(HypothesisError):
        pick_check(fm, 0.2 + 0j)


# ---------------------------------------------------------------------------
# hyperbolic metric ratio


def _scaled_inclusion(t: float) -> SurfaceMap:
    from quatconf.jets import const2, coordinate_jets2

    def jet2(z: complex):
        x, y = coordinate_jets2(z)
        return (x + const2(I) * y).scale(t)

    return SurfaceMap.from_jet2(jet2)


def test_poincare_ratio_inclusion():
    incl = _scaled_inclusion(1.0)
    for z in (0.2 + 0.1j, -0.5j, 0.7):
        assert abs(poincare_ratio(incl, z) - 1.0) < 1e-12


def test_poincare_ratio_contraction():
    half = _scaled_inclusion(0.5)
    for z in (0.2 + 0.1j, 0.6 - 0.3j):
        want = 0.25 * (1 - abs(z) ** 2) ** 2 / (1 - abs(z) ** 2 / 4) ** 2
        assert abs(poincare_ratio(half, z) - want) < 1e-12
        assert poincare_ratio(half, z) < 1.0


def test_poincare_ratio_bounded_by_pick_constant():
    fm = ball_valued_fixture()
    surf = fm.surface()
    for z1 in (0j, 0.3 + 0.1j, -0.2 + 0.25j):
        pick = pick_check(fm, z1)
        ratio = poincare_ratio(surf, z1)
        bound = (pick.C_tilde / (1 - abs(z1) ** 2)) ** 2 * (1 - pick.f_z1.norm_sq()) ** 2
        assert ratio <= bound + 1e-9


def test_poincare_ratio_mobius_composition_decreases():
    # precomposition with a disk automorphism cannot raise the supremum
    fm = ball_valued_fixture()
    surf = fm.surface()
    grid = [z for z in DISK.grid(resolution=15) if abs(z) < 0.8]
    sup_base = max(poincare_ratio(surf, z) for z in grid)
    z1 = 0.25 - 0.15j

    def composed_jet2(w: complex):
        z = disk_mobius_inverse(z1, w)
        d1 = (1 - abs(z1) ** 2) / (1 + z1.conjugate() * w) ** 2
        d2 = -2 * z1.conjugate() * (1 - abs(z1) ** 2) / (1 + z1.conjugate() * w) ** 3
        from quatconf.schwarz import _compose_jet2

        return _compose_jet2(fm.jet2(z), d1, d2)

    comp = SurfaceMap.from_jet2(composed_jet2)
    for w in (0.1 + 0.1j, -0.3 + 0.2j, 0.5j):
        assert poincare_ratio(comp, w) <= sup_base + 1e-9


def test_poincare_ratio_domain_errors():
    fm = ball_valued_fixture()
    surf = fm.surface()
    with pytest.raises(DomainError):
        poincare_ratio(surf, 1.2 + 0j)
