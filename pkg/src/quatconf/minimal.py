"""Minimal surfaces factored through a super-conformal companion.

Given a non-constant holomorphic sphere map N and a holomorphic pair
(l0, l1), the section psi = -N a + a i trivializes the eigenbundle of -N,
and the relation psi dl = dN a l mu (l = l0 + l1 j) defines mu away from
the singular set Q = {dN l = 0}.  Then

    f = a l (mu - 1),      g = -N a l mu + a i l

are conjugate minimal surfaces with left normal N, and f + i g is a
holomorphic null curve.  Evaluation uses the equivalent form
a l mu = a (N_x a)^-1 psi l_x, which extends smoothly across zeros of l,
so only branch points of N remain genuinely singular for f and g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .cfun import RationalMap, is_infinity
from .errors import ConsistencyError, DomainError, HypothesisError, SingularPointError
from .jets import Jet1, const1
from .quat import I, Quaternion, q_inner
from .sphere import SphereMap, classify
from .superconf import PsiSection, _rational, build_psi
from .surface import PlanarDomain, SurfaceMap, curvature_at, jet_at

__all__ = [
    "MinimalPair",
    "MuValue",
    "MinimalReport",
    "BranchZeroReport",
    "mu_at",
    "build_minimal_pair",
    "minimal_diagnostics",
    "branch_zero_report",
]


@dataclass(frozen=True)
class MuValue:
    mu: Quaternion
    dy_residual: float


class MinimalPair:
    """Holomorphic sphere map plus holomorphic pair, with derived surfaces."""

    def __init__(self, n_map: SphereMap, psi: PsiSection, lam0: RationalMap,
                 lam1: RationalMap, domain: PlanarDomain,
                 singular_points: tuple[complex, ...], degenerate: bool):
        self.n_map = n_map
        self.psi = psi  # section of the eigenbundle of -N
        self.a = psi.a
        self.lam0 = lam0
        self.lam1 = lam1
        self.domain = domain
        self.singular_points = singular_points
        self.degenerate = degenerate
        self._d = (lam0.derivative(), lam1.derivative())
        self._dd = (self._d[0].derivative(), self._d[1].derivative())

    # jets of the ingredients -------------------------------------------

    def lam_jet2(self, z: complex):
        from .jets import Jet2, const2, holomorphic_jet2
        from .quat import J

        vals = []
        for r in (self.lam0, self._d[0], self._dd[0], self.lam1, self._d[1], self._dd[1]):
            v = r.eval(z)
            if is_infinity(v):
                raise DomainError(f"lambda pair has a pole at {z}")
            vals.append(v)
        return (holomorphic_jet2(vals[0], vals[1], vals[2])
                + holomorphic_jet2(vals[3], vals[4], vals[5]) * const2(J))

    def _pieces(self, z: complex):
        nj2 = self.n_map.jet2(z)
        lj2 = self.lam_jet2(z)
        psij1 = (-nj2.lower()) * const1(self.a) + const1(self.a * I)
        return nj2, lj2, psij1

    def mu_value(self, z: complex, q_tol: float = 1e-8) -> MuValue:
        """Solve psi dl = dN a l mu on the x-component; cross-check on y.

        Raises SingularPointError on the singular set Q and
        ConsistencyError if the y-component residual exceeds 1e-6.
        """
        z = complex(z)
        nj2, lj2, psij1 = self._pieces(z)
        lam = lj2.v
        lhs_x = psij1.v * lj2.dx
        coeff_x = nj2.dx * self.a * lam
        if coeff_x.norm() < q_tol:
            raise SingularPointError(f"{z} lies in the singular set (dN a l below tolerance)")
        mu = coeff_x.inverse() * lhs_x
        lhs_y = psij1.v * lj2.dy
        rhs_y = nj2.dy * self.a * lam * mu
        scale = lhs_y.norm() + rhs_y.norm()
        residual = 0.0 if scale == 0.0 else (lhs_y - rhs_y).norm() / scale
        if residual >= 1e-6:
            raise ConsistencyError(
                f"mu fails its y-component cross-check at {z} (residual {residual:.2e})"
            )
        return MuValue(mu, residual)

    # surfaces -----------------------------------------------------------

    def f_jet1(self, z: complex) -> Jet1:
        nj2, lj2, psij1 = self._pieces(z)
        a = const1(self.a)
        nx = nj2.partial_x()
        f1 = a * (nx * const1(self.a)).inverse() * psij1 * lj2.partial_x()
        return f1 - a * lj2.lower()

    def g_jet1(self, z: complex) -> Jet1:
        nj2, lj2, psij1 = self._pieces(z)
        a = const1(self.a)
        nx = nj2.partial_x()
        f1 = a * (nx * const1(self.a)).inverse() * psij1 * lj2.partial_x()
        return (-nj2.lower()) * f1 + const1(self.a * I) * lj2.lower()

    def psi_lambda_jet1(self, z: complex) -> Jet1:
        _, lj2, psij1 = self._pieces(z)
        return psij1 * lj2.lower()

    def f_surface(self, h: float = 1e-3) -> SurfaceMap:
        return SurfaceMap.from_jet1(self.f_jet1, h=h, tag="minimal")

    def g_surface(self, h: float = 1e-3) -> SurfaceMap:
        return SurfaceMap.from_jet1(self.g_jet1, h=h, tag="minimal")

    def psi_lambda_surface(self, h: float = 1e-3) -> SurfaceMap:
        return SurfaceMap.from_jet1(self.psi_lambda_jet1, h=h, tag="superconformal")

    def clear_points(self, points: Iterable[complex], radius: Optional[float] = None) -> list[complex]:
        """Filter out points within the exclusion radius of the singular set."""
        r = 2.0 * self.domain.h if radius is None else radius
        return [z for z in points
                if all(abs(z - q) > r for q in self.singular_points)]


def mu_at(pair: MinimalPair, z: complex) -> MuValue:
    return pair.mu_value(z)


def _holomorphic_pole_check(lam: RationalMap, domain: PlanarDomain, name: str) -> None:
    for p, _ in lam.poles():
        if domain.contains(p):
            raise DomainError(f"{name} has a pole at {p} inside the domain")


def _singular_set(n_map: SphereMap, lam0: RationalMap, lam1: RationalMap,
                  domain: PlanarDomain) -> tuple[complex, ...]:
    """Q = branch points of N plus common zeros of the pair, inside the domain."""
    pts: list[complex] = []
    # dN = 0 exactly at the zeros of the polynomial Wronskian of the pair of N
    w = n_map.p0 * n_map.p1.derivative() - n_map.p0.derivative() * n_map.p1
    if not w.is_constant:
        for root, _ in w.clustered_roots():
            if domain.contains(root, margin=-4.0 * domain.h):
                pts.append(root)
    if not (lam0.is_zero or lam1.is_zero):
        for root, _ in lam0.zeros():
            if lam1.order_at(root) > 0 and domain.contains(root, margin=-4.0 * domain.h):
                pts.append(root)
    elif lam0.is_zero or lam1.is_zero:
        live = lam1 if lam0.is_zero else lam0
        for root, _ in live.zeros():
            if domain.contains(root, margin=-4.0 * domain.h):
                pts.append(root)
    out: list[complex] = []
    for p in pts:
        if all(abs(p - q) > 1e-9 for q in out):
            out.append(p)
    out.sort(key=lambda c: (c.real, c.imag))
    return tuple(out)


def build_minimal_pair(n_map: SphereMap, lam0, lam1, domain: PlanarDomain,
                       a: Optional[Quaternion] = None,
                       classify_tol: float = 1e-4) -> MinimalPair:
    """Assemble the factored minimal-surface data for holomorphic N.

    Constant N is rejected (such maps are holomorphic curves and belong to
    the plain factorization path); non-holomorphic N violates the
    construction's hypothesis.  Degenerate constant pairs are accepted but
    flagged: mu vanishes and f collapses to a point.
    """
    lam0 = _rational(lam0)
    lam1 = _rational(lam1)
    result = classify(n_map, domain.grid(resolution=8), tol=classify_tol)
    if result.kind == "constant":
        raise HypothesisError(
            "N is constant: the map is a holomorphic curve; use the "
            "super-conformal factorization instead"
        )
    if result.kind != "holomorphic":
        raise HypothesisError(f"N must be holomorphic, got {result.kind}")
    if n_map.kind != "lambda_pair":
        raise DomainError("the construction needs an analytic (lambda-pair) sphere map")
    _holomorphic_pole_check(lam0, domain, "l0")
    _holomorphic_pole_check(lam1, domain, "l1")
    if lam0.is_zero and lam1.is_zero:
        raise DomainError("lambda pair must not vanish identically")
    degenerate = lam0.is_constant and lam1.is_constant
    psi = build_psi(n_map.negated(), domain, a=a)
    q_points = _singular_set(n_map, lam0, lam1, domain)
    return MinimalPair(n_map, psi, lam0, lam1, domain, q_points, degenerate)


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class MinimalReport:
    conjugate_residual: float
    null_residual: float
    sup_mean_curvature_f: float
    sup_mean_curvature_g: float
    normal_mismatch_f: float
    normal_mismatch_g: float
    identity_residual: float
    null_conformality_gap: float
    points_used: int
    degenerate: bool


def minimal_diagnostics(pair: MinimalPair, points: Optional[Iterable[complex]] = None,
                        curvature_points: int = 25) -> MinimalReport:
    """Grid sup of the defining identities of the factored pair.

    Checks dg = -star df, the null condition of f + i g, the mean
    curvature of f and g, the shared left normal, and the exactness
    identity dN f = d(psi l).  Mean curvature uses nested finite
    differences and is sampled on a thinned subgrid for speed.
    """
    if pair.degenerate:
        return MinimalReport(*([0.0] * 8), 0, True)
    pts = pair.clear_points(points if points is not None else pair.domain.grid())
    if not pts:
        raise DomainError("no usable points outside the singular set")
    conj_res = 0.0
    null_res = 0.0
    mismatch_f = 0.0
    mismatch_g = 0.0
    identity_res = 0.0
    null_gap = 0.0
    for z in pts:
        fj = pair.f_jet1(z)
        gj = pair.g_jet1(z)
        df_norm = math.sqrt(fj.dx.norm_sq() + fj.dy.norm_sq())
        if df_norm < 1e-14:
            continue
        # conjugate relation dg = -star df: g_x = -f_y, g_y = f_x
        err = math.sqrt((gj.dx + fj.dy).norm_sq() + (gj.dy - fj.dx).norm_sq())
        conj_res = max(conj_res, err / df_norm)
        # null condition of Phi = f + i g on the x-derivative
        total = 0j
        for fm, gm in zip(fj.dx.components(), gj.dx.components()):
            total += complex(fm, gm) ** 2
        null_res = max(null_res, abs(total) / (fj.dx.norm_sq() + 1e-300))
        # the same quantity from conformality of f alone
        alg = complex(fj.dx.norm_sq() - fj.dy.norm_sq(), -2.0 * q_inner(fj.dx, fj.dy))
        null_gap = max(null_gap, abs(total - alg) / (fj.dx.norm_sq() + 1e-300))
        # shared left normal
        nval = pair.n_map(z)
        if fj.dx.norm() > 1e-12:
            nf = fj.dy * fj.dx.inverse()
            mismatch_f = max(mismatch_f, (nf - nval).norm())
        if gj.dx.norm() > 1e-12:
            ng = gj.dy * gj.dx.inverse()
            mismatch_g = max(mismatch_g, (ng - nval).norm())
        # exactness identity dN f = d(psi l)
        nj = pair.n_map.jet2(z)
        pl = pair.psi_lambda_jet1(z)
        lhs = (nj.dx * fj.v, nj.dy * fj.v)
        scale = lhs[0].norm() + lhs[1].norm() + pl.dx.norm() + pl.dy.norm()
        if scale > 1e-14:
            err = ((lhs[0] - pl.dx).norm() + (lhs[1] - pl.dy).norm()) / scale
            identity_res = max(identity_res, err)
    sup_h_f = _sup_mean_curvature(pair.f_surface(pair.domain.h), pts, curvature_points)
    sup_h_g = _sup_mean_curvature(pair.g_surface(pair.domain.h), pts, curvature_points)
    return MinimalReport(conj_res, null_res, sup_h_f, sup_h_g, mismatch_f,
                         mismatch_g, identity_res, null_gap, len(pts), False)


def _sup_mean_curvature(surf: SurfaceMap, pts: list[complex], count: int) -> float:
    step = max(1, len(pts) // count)
    sup = 0.0
    for z in pts[::step]:
        sup = max(sup, curvature_at(surf, z).H.norm())
    return sup


# ---------------------------------------------------------------------------
# branch/zero correspondence


@dataclass(frozen=True)
class BranchZeroReport:
    branch_points: tuple[complex, ...]  # where d(psi l) degenerates
    zero_points: tuple[complex, ...]  # where |f| vanishes
    normal_branch_points: tuple[complex, ...]  # where dN degenerates
    matched: bool
    identity_residual: float
    cell_size: float


def branch_zero_report(pair: MinimalPair, domain: Optional[PlanarDomain] = None,
                       rel_tol: float = 0.05) -> BranchZeroReport:
    """Locate branch points of psi*l, zeros of f, and branch points of N.

    Cells whose field value drops below rel_tol times the grid sup are
    clustered and refined; the report asserts, at grid resolution, that
    the branch set of psi*l is the union of the other two, and verifies
    the exactness identity dN f = d(psi l) pointwise.
    """
    dom = domain or pair.domain
    pts = [complex(z) for z in dom.grid()]
    if not pts:
        raise DomainError("empty grid")
    xs = sorted({z.real for z in pts})
    cell = xs[1] - xs[0] if len(xs) > 1 else dom.scale

    from .errors import DomainError as _DE

    nan = float("nan")
    b_vals, f_vals, n_vals = [], [], []
    identity_res = 0.0
    id_scale = 0.0
    for z in pts:
        pl = pair.psi_lambda_jet1(z)
        nj = pair.n_map.jet2(z)
        b_vals.append(math.sqrt(pl.dx.norm_sq() + pl.dy.norm_sq()))
        n_vals.append(math.sqrt(nj.dx.norm_sq() + nj.dy.norm_sq()))
        try:
            fj = pair.f_jet1(z)
        except (_DE, SingularPointError):
            # exact hit on a singular grid point; neighbors carry the data
            f_vals.append(nan)
            continue
        f_vals.append(fj.v.norm())
        lhs = (nj.dx * fj.v, nj.dy * fj.v)
        identity_res = max(identity_res,
                           (lhs[0] - pl.dx).norm() + (lhs[1] - pl.dy).norm())
        id_scale = max(id_scale, lhs[0].norm() + lhs[1].norm())
    identity_res = identity_res / max(id_scale, 1e-300)

    def detect(vals: list[float]) -> list[complex]:
        finite = sorted(v for v in vals if not math.isnan(v))
        if not finite:
            return []
        # robust scale: a stray near-pole sample must not inflate the cutoff
        top = finite[int(0.95 * (len(finite) - 1))]
        if top == 0.0:
            return []
        flagged = [z for z, v in zip(pts, vals)
                   if not math.isnan(v) and v < rel_tol * top]
        return _cluster_points(flagged, 1.5 * cell)

    branch = [_refine_zero(pair.psi_lambda_jet1, z, derivative=True) for z in detect(b_vals)]
    zeros = [_refine_zero(pair.f_jet1, z) for z in detect(f_vals)]
    nbranch = detect(n_vals)

    want = zeros + nbranch
    tol = 2.0 * cell
    matched = (
        all(any(abs(b - w) <= tol for w in want) for b in branch)
        and all(any(abs(w - b) <= tol for b in branch) for w in want)
    )
    return BranchZeroReport(tuple(branch), tuple(zeros), tuple(nbranch),
                            matched, identity_res, cell)


def _cluster_points(flagged: list[complex], radius: float) -> list[complex]:
    clusters: list[list[complex]] = []
    for z in flagged:
        for cl in clusters:
            if any(abs(z - w) <= radius for w in cl):
                cl.append(z)
                break
        else:
            clusters.append([z])
    centroids = [sum(cl) / len(cl) for cl in clusters]
    centroids.sort(key=lambda c: (c.real, c.imag))
    return centroids


def _refine_zero(jet_fn, z0: complex, derivative: bool = False, steps: int = 4) -> complex:
    """Gauss-Newton refinement of a zero of the map value (or differential)."""
    z = complex(z0)
    h = 1e-6
    for _ in range(steps):
        if derivative:
            # residual is the 8-vector (psi l)_x, (psi l)_y; FD Jacobian
            def res(w: complex) -> np.ndarray:
                j = jet_fn(w)
                return np.array(j.dx.components() + j.dy.components())
            r0 = res(z)
            jac = np.stack([(res(z + h) - res(z - h)) / (2 * h),
                            (res(z + 1j * h) - res(z - 1j * h)) / (2 * h)], axis=1)
        else:
            j = jet_fn(z)
            r0 = np.array(j.v.components())
            jac = np.stack([np.array(j.dx.components()),
                            np.array(j.dy.components())], axis=1)
        step, *_ = np.linalg.lstsq(jac, -r0, rcond=None)
        z = z + complex(step[0], step[1])
    return z
