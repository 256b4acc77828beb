"""Surface geometry: jets, normals, conformality, curvature, order fits."""

import math

import numpy as np
import pytest

from quatconf.cfun import RationalMap
from quatconf.errors import (
    DomainError,
    InconclusiveFitError,
    NonConformalError,
    SingularPointError,
)
from quatconf.jets import Jet2, const2, coordinate_jets2
from quatconf.quat import I, J, K, Quaternion
from quatconf.surface import (
    PlanarDomain,
    SurfaceMap,
    conformal_residual_at,
    curvature_at,
    curvature_sign,
    field_rows,
    graph_map,
    inverse_stereo_surface,
    jet_at,
    vanish_order_fit,
    wintgen_slack_at,
)

rng = np.random.default_rng(2718)


def holomorphic_map(r: RationalMap) -> SurfaceMap:
    return graph_map(r, RationalMap([0j]))


def conjugate_graph() -> SurfaceMap:
    # z + conj(z)^2 j = z + j z^2: conformal with constant right normal -i
    def jet2(z: complex) -> Jet2:
        x, y = coordinate_jets2(z)
        zbar = x - y * const2(I)
        return x + y * const2(I) + (zbar * zbar) * const2(J)

    return SurfaceMap.from_jet2(jet2)


def cylinder_map() -> SurfaceMap:
    def jet2(z: complex) -> Jet2:
        x, y = z.real, z.imag
        c, s = math.cos(y), math.sin(y)
        zero = Quaternion()
        return Jet2(Quaternion(0, x, c, s), Quaternion(0, 1, 0, 0),
                    Quaternion(0, 0, -s, c), zero, zero, Quaternion(0, 0, -c, -s))

    return SurfaceMap.from_jet2(jet2)


# ---------------------------------------------------------------------------
# domains


def test_domain_grids():
    rect = PlanarDomain.rectangle(0j, (1.0, 0.5), resolution=5, h=1e-3)
    pts = rect.grid(margin=0.0)
    assert len(pts) == 25
    assert pts[0] == complex(-1.0, -0.5)
    assert pts[-1] == complex(1.0, 0.5)
    disk = PlanarDomain.disk(0j, 1.0, resolution=9, h=1e-3)
    inner = disk.grid()
    assert all(abs(z) <= 1.0 - 2 * disk.h + 1e-12 for z in inner)
    with pytest.raises(DomainError):
        PlanarDomain.rectangle(0j, (1.0, 1.0), resolution=1)


def test_domain_contains_margin():
    disk = PlanarDomain.disk(0j, 1.0, resolution=4, h=1e-2)
    assert disk.contains(0.5)
    assert not disk.contains(0.999, margin=0.01)


# ---------------------------------------------------------------------------
# jets and normals


def test_identity_map_normals():
    f = holomorphic_map(RationalMap.identity())
    j = jet_at(f, 0.3 + 0.7j)
    assert (j.N - I).norm() < 1e-12
    assert (j.R + I).norm() < 1e-12


def test_conjugate_map_normals():
    def jet2(z: complex) -> Jet2:
        x, y = coordinate_jets2(z)
        return x - y * const2(I)

    f = SurfaceMap.from_jet2(jet2)
    j = jet_at(f, 0.1 + 0.2j)
    assert (j.N + I).norm() < 1e-12
    assert (j.R - I).norm() < 1e-12


def test_holomorphic_curve_normal_at_zero():
    f = graph_map(RationalMap.identity(), RationalMap([0j, 0, 1.0]))  # z + z^2 j
    j = jet_at(f, 0j)
    assert (j.N - I).norm() < 1e-12


def test_branch_point_reports_absent_normals():
    f = holomorphic_map(RationalMap([0j, 0, 1.0]))  # z^2, branch at 0
    j = jet_at(f, 0j)
    assert j.branch
    assert j.N is None and j.R is None


def test_finite_difference_jets_converge_quadratically():
    f = graph_map(RationalMap([0j, 1.0, 0.5j]), RationalMap([0j, 0, 0, 0.25]))
    z = 0.4 + 0.3j
    exact = jet_at(f, z).N
    errs = []
    for h in (1e-3, 5e-4):
        fd = f.finite_difference_view(h)
        errs.append((jet_at(fd, z).N - exact).norm())
    ratio = errs[0] / errs[1]
    assert 3.0 < ratio < 5.0


def test_conformal_residuals():
    f = holomorphic_map(RationalMap.identity())
    res, branch = conformal_residual_at(f, 1.2 - 0.5j)
    assert res < 1e-14 and not branch

    g = conjugate_graph()
    res, _ = conformal_residual_at(g, 0.4 + 0.2j)
    assert res < 1e-10

    def degenerate(z: complex) -> Jet2:  # z + conj(z): real valued
        x, _ = coordinate_jets2(z)
        return x.scale(2.0)

    d = SurfaceMap.from_jet2(degenerate)
    res, _ = conformal_residual_at(d, 0.3 + 0.1j)
    assert res > 0.5


# ---------------------------------------------------------------------------
# curvature


def test_round_sphere_calibration():
    assert curvature_sign() in (-1, 1)
    f = inverse_stereo_surface()
    for z in (0.3 + 0.2j, -0.8 + 0.1j, 1.5j):
        c = curvature_at(f, z)
        assert abs(c.K - 1.0) < 1e-10
        assert abs(c.Kperp) < 1e-10
        assert abs(c.H_norm_sq - 1.0) < 1e-10
        assert abs(wintgen_slack_at(f, z)) < 1e-9


def test_round_sphere_finite_difference_grid():
    f = inverse_stereo_surface(h=1e-3).finite_difference_view()
    dom = PlanarDomain.rectangle(0j, (1.0, 1.0), resolution=10, h=1e-3)
    for z in dom.grid():
        c = curvature_at(f, z)
        assert abs(c.K - 1.0) < 2e-3
        assert abs(c.Kperp) < 1e-3
        assert abs(c.H_norm_sq - 1.0) < 5e-3


def test_flat_plane():
    f = holomorphic_map(RationalMap.identity())
    c = curvature_at(f, 0.1 + 0.9j)
    assert abs(c.K) < 1e-13
    assert abs(c.Kperp) < 1e-13
    assert c.H.norm() < 1e-13
    assert abs(wintgen_slack_at(f, 0.1 + 0.9j)) < 1e-13


def test_holomorphic_curve_is_minimal():
    f = graph_map(RationalMap.identity(), RationalMap([0j, 0, 1.0]))
    for z in (0.2 + 0.1j, -0.4 + 0.5j):
        c = curvature_at(f, z)
        assert c.H.norm() < 1e-12


def test_conjugate_graph_is_wintgen_equal():
    # constant right normal -i makes the curvature ellipse a circle: the
    # equality case everywhere, with K = -|Kperp| and vanishing H
    f = conjugate_graph()
    for z in (0.4 + 0.2j, 0.1 - 0.3j, 1.0 + 0.7j):
        c = curvature_at(f, z)
        assert c.H.norm() < 1e-12
        assert abs(c.K + abs(c.Kperp)) < 1e-12
        assert abs(wintgen_slack_at(f, z)) < 1e-12


def test_cylinder_has_positive_wintgen_slack():
    f = cylinder_map()
    for z in (0.3 + 0.2j, -0.5 + 1.1j):
        c = curvature_at(f, z)
        assert abs(c.K) < 1e-12
        assert abs(c.Kperp) < 1e-12
        assert abs(c.H_norm_sq - 0.25) < 1e-12
        slack = wintgen_slack_at(f, z)
        assert abs(slack - 0.25) < 1e-12


def test_curvature_rejects_branch_and_nonconformal():
    f = holomorphic_map(RationalMap([0j, 0, 1.0]))
    with pytest.raises(SingularPointError):
        curvature_at(f, 0j)

    def skew(z: complex) -> Jet2:
        x, y = coordinate_jets2(z)
        return x + (y * const2(I)).scale(2.0)

    with pytest.raises(NonConformalError):
        curvature_at(SurfaceMap.from_jet2(skew), 0.2 + 0.2j)


# ---------------------------------------------------------------------------
# order fitting


def test_vanish_order_fit_zero_and_pole():
    radii = [0.3, 0.22, 0.16, 0.11, 0.08]
    f = holomorphic_map(RationalMap.identity())
    fit = vanish_order_fit(f, 0j, radii)
    assert fit.order == 1
    assert fit.residual < 1e-10

    g = graph_map(RationalMap([0j, 0, 1.0]), RationalMap([0j, 0, 0, 1.0]))
    fit = vanish_order_fit(g, 0j, radii)
    assert fit.order == 2  # min of the component orders

    p = holomorphic_map(RationalMap([1.0], [0j, 1.0]))
    fit = vanish_order_fit(p, 0j, radii)
    assert fit.order == -1


def test_vanish_order_fit_rejects_bad_radii_and_nonintegral():
    f = holomorphic_map(RationalMap.identity())
    with pytest.raises(DomainError):
        vanish_order_fit(f, 0j, [0.1, 0.2])

    def half_power(z: complex) -> Quaternion:
        return Quaternion(abs(z) ** 0.5, 0, 0, 0)

    g = SurfaceMap.from_callable(half_power)
    with pytest.raises(InconclusiveFitError):
        vanish_order_fit(g, 0j, [0.3, 0.22, 0.16, 0.11, 0.08])


def test_field_rows_schema():
    f = holomorphic_map(RationalMap.identity())
    rows = field_rows(f, [0.1 + 0.1j, 0.5 - 0.2j])
    assert len(rows) == 2
    from quatconf.surface import CSV_COLUMNS

    assert all(len(r) == len(CSV_COLUMNS) for r in rows)
    # left normal of the identity map is i
    row = rows[0]
    assert abs(row[6] - 1.0) < 1e-12 and abs(row[7]) < 1e-12
