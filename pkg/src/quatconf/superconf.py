"""Factorizations of super-conformal maps through a trivializing section.

For an anti-holomorphic (or constant) sphere map N avoiding at least one
point of the sphere, the section psi = N a + a i is nowhere zero and
satisfies N psi = psi i for a suitable unit quaternion a.  Every
super-conformal map with left normal N is then psi (l0 + l1 j) with
holomorphic l0, l1; divisors of such maps are read off from the pair by
the min-of-orders rule, and any finite divisor is realized by choosing the
pair as an explicit rational function.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import cfun
from .cfun import CPolynomial, Divisor, INFINITY, RationalMap, is_infinity, r_from_divisor
from .errors import ConstructionError, DomainError, HypothesisError
from .jets import Jet1, Jet2, const1, const2, holomorphic_jet2
from .quat import I, J, Quaternion, from_complex_pair_right, rotation_taking_any
from .sphere import SphereMap, classify, from_lambda_pair
from .surface import PlanarDomain, SurfaceMap

__all__ = [
    "PsiSection",
    "FactoredMap",
    "farthest_sphere_point",
    "build_psi",
    "build_superconformal",
    "build_twistor",
    "divisor_of_factored",
    "superconformal_from_divisor",
]


# ---------------------------------------------------------------------------
# spherical gap search


def _fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n, dtype=float)
    phi = math.pi * (3.0 - math.sqrt(5.0))
    zc = 1.0 - 2.0 * (k + 0.5) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - zc * zc))
    th = phi * k
    return np.stack([r * np.cos(th), r * np.sin(th), zc], axis=1)


def farthest_sphere_point(samples: np.ndarray, candidates: int = 1024,
                          refine_rounds: int = 2) -> tuple[Quaternion, float]:
    """Point of the unit sphere farthest (in angle) from a sample cloud.

    Returns (point, gap) where gap is the angular radius of the spherical
    cap left uncovered around the point.  Deterministic: a fixed Fibonacci
    candidate set plus local tangent-plane refinement.
    """
    pts = np.asarray(samples, dtype=float)
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    pts = pts / np.maximum(norms, 1e-300)

    def best_of(cands: np.ndarray) -> tuple[np.ndarray, float]:
        dots = cands @ pts.T
        worst = dots.max(axis=1)  # closest sample per candidate (cosine)
        k = int(np.argmin(worst))
        return cands[k], float(math.acos(max(-1.0, min(1.0, worst[k]))))

    best, gap = best_of(_fibonacci_sphere(candidates))
    cap = 0.5
    for _ in range(refine_rounds):
        # orthonormal frame at the current best point
        up = np.array([0.0, 0.0, 1.0]) if abs(best[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        e1 = np.cross(best, up)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(best, e1)
        us, vs = np.meshgrid(np.linspace(-cap, cap, 9), np.linspace(-cap, cap, 9))
        local = best[None, :] + us.ravel()[:, None] * e1[None, :] + vs.ravel()[:, None] * e2[None, :]
        local /= np.linalg.norm(local, axis=1, keepdims=True)
        cand, g = best_of(np.vstack([best[None, :], local]))
        best, gap = cand, g
        cap *= 0.3
    return Quaternion(0.0, best[0], best[1], best[2]), gap


# ---------------------------------------------------------------------------
# trivializing sections


class PsiSection:
    """Nowhere-zero section psi = N a + a i with N psi = psi i."""

    def __init__(self, n_map: SphereMap, a: Quaternion, domain: PlanarDomain,
                 gap: Optional[float] = None, min_abs: float = float("nan")):
        self.n_map = n_map
        self.a = a
        self.domain = domain
        self.gap = gap
        self.min_abs = min_abs
        self._ai = a * I

    def __call__(self, z: complex) -> Quaternion:
        return self.n_map(z) * self.a + self._ai

    def jet1(self, z: complex) -> Jet1:
        nj = self.n_map.jet2(z).lower()
        return nj * const1(self.a) + const1(self._ai)

    def jet2(self, z: complex) -> Jet2:
        return self.n_map.jet2(z) * const2(self.a) + const2(self._ai)

    @property
    def has_jets(self) -> bool:
        return self.n_map.kind != "sampled"


def build_psi(n_map: SphereMap, domain: PlanarDomain, a: Optional[Quaternion] = None,
              gap_tol: float = 0.05, sample_resolution: int = 64) -> PsiSection:
    """Construct a trivializing section for the sphere map N on a domain.

    Unless a is forced, the avoided point is chosen to maximize the
    spherical gap to the sampled image of N, and a is the rotation taking
    i to its antipode; an image covering the sphere within gap_tol is
    rejected since no global section can exist.
    """
    zs = np.array(domain.grid(margin=0.0, resolution=sample_resolution), dtype=complex)
    img = n_map.sample_image(zs)
    gap = None
    if a is None:
        q_far, gap = farthest_sphere_point(img)
        if gap < gap_tol:
            raise HypothesisError(
                f"left normal image covers the sphere (gap {gap:.3f} rad < {gap_tol}); "
                "no global trivializing section"
            )
        a = rotation_taking_any(I, -q_far)
    psi = PsiSection(n_map, a, domain, gap=gap)
    # nonvanishing + eigen relation, verified on the sample grid
    min_abs = float("inf")
    worst_eigen = 0.0
    for z in zs[:: max(1, len(zs) // 1024)]:
        v = psi(complex(z))
        min_abs = min(min_abs, v.norm())
        worst_eigen = max(worst_eigen, (n_map(complex(z)) * v - v * I).norm())
    if min_abs == 0.0:
        raise ConstructionError("section vanishes on the sample grid")
    if worst_eigen > 1e-10 * (1.0 + a.norm()):
        raise ConstructionError(f"eigen relation N psi = psi i fails ({worst_eigen:.2e})")
    psi.min_abs = min_abs
    return psi


# ---------------------------------------------------------------------------
# factored maps


def _rational(v) -> RationalMap:
    if isinstance(v, RationalMap):
        return v
    if isinstance(v, CPolynomial):
        return RationalMap(v)
    if isinstance(v, (int, float, complex)):
        return RationalMap.constant(complex(v))
    return RationalMap(list(v))


class FactoredMap:
    """Map f = psi (l0 + l1 j) with holomorphic/meromorphic rational pair."""

    def __init__(self, psi: PsiSection, lam0, lam1):
        self.psi = psi
        self.lam0 = _rational(lam0)
        self.lam1 = _rational(lam1)
        if self.lam0.is_zero and self.lam1.is_zero:
            self._zero = True
        else:
            self._zero = False
        self._d = (self.lam0.derivative(), self.lam1.derivative())
        self._dd = (self._d[0].derivative(), self._d[1].derivative())

    @property
    def n_map(self) -> SphereMap:
        return self.psi.n_map

    def lam(self, z: complex):
        """Value of l0 + l1 j, or INFINITY at a pole."""
        v0, v1 = self.lam0.eval(z), self.lam1.eval(z)
        if is_infinity(v0) or is_infinity(v1):
            return INFINITY
        return from_complex_pair_right(v0, v1)

    def __call__(self, z: complex):
        lam = self.lam(z)
        if not isinstance(lam, Quaternion):
            return INFINITY
        return self.psi(z) * lam

    def lam_jet2(self, z: complex) -> Jet2:
        vals = []
        for r in (self.lam0, self._d[0], self._dd[0], self.lam1, self._d[1], self._dd[1]):
            v = r.eval(z)
            if is_infinity(v):
                raise DomainError(f"lambda pair has a pole at {z}")
            vals.append(v)
        return (holomorphic_jet2(vals[0], vals[1], vals[2])
                + holomorphic_jet2(vals[3], vals[4], vals[5]) * const2(J))

    def jet2(self, z: complex) -> Jet2:
        return self.psi.jet2(z) * self.lam_jet2(z)

    def jet1(self, z: complex) -> Jet1:
        """First-order jet; cheaper than jet2 for derivative-only sweeps."""
        from .jets import holomorphic_jet1

        vals = []
        for r in (self.lam0, self._d[0], self.lam1, self._d[1]):
            v = r.eval(z)
            if is_infinity(v):
                raise DomainError(f"lambda pair has a pole at {z}")
            vals.append(v)
        lam = holomorphic_jet1(vals[0], vals[1]) \
            + holomorphic_jet1(vals[2], vals[3]) * const1(J)
        return self.psi.jet1(z) * lam

    def poles(self) -> list[complex]:
        out = []
        for lam in (self.lam0, self.lam1):
            out.extend(p for p, _ in lam.poles())
        return out

    def surface(self, h: float = 1e-3) -> SurfaceMap:
        if self.psi.has_jets:
            surf = SurfaceMap.from_jet2(self.jet2, h=h, tag="superconformal")
        else:
            surf = SurfaceMap.from_callable(self.__call__, h=h, tag="superconformal")
        return surf


def build_superconformal(psi: PsiSection, lam0, lam1,
                         classify_tol: float = 1e-4) -> FactoredMap:
    """Factored map psi (l0 + l1 j); requires anti-holomorphic (or constant) N
    and a pole-free pair on the section's domain."""
    result = classify(psi.n_map, psi.domain.grid(resolution=8), tol=classify_tol)
    if result.kind not in ("anti-holomorphic", "constant"):
        raise HypothesisError(
            f"left normal must be anti-holomorphic or constant, got {result.kind} "
            f"(residuals {result.residual_holomorphic:.2e}/{result.residual_antiholomorphic:.2e})"
        )
    fm = FactoredMap(psi, lam0, lam1)
    for p in fm.poles():
        if psi.domain.contains(p):
            raise DomainError(
                f"lambda pair has a pole at {p} inside the domain; "
                "use the divisor workflow for maps with poles"
            )
    return fm


# ---------------------------------------------------------------------------
# twistor-form construction


def _cancel_common_factor(polys: list[CPolynomial]) -> list[CPolynomial]:
    nonzero = [p for p in polys if not p.is_zero]
    if not nonzero:
        raise ConstructionError("all four components vanish identically")
    lowest = min(nonzero, key=lambda p: p.degree)
    if lowest.degree == 0:
        return polys
    for root, _ in lowest.clustered_roots():
        m = min(p.order_at(root) for p in nonzero)
        if m > 0:
            polys = [p if p.is_zero else p.deflate(root, m) for p in polys]
    return polys


def build_twistor(lam0, lam1, lam2, lam3, domain: PlanarDomain,
                  h: float = 1e-3) -> SurfaceMap:
    """Super-conformal map (l0 + l1 j)^-1 (l2 + l3 j) on a domain.

    The four rational inputs are cleared to polynomials over a common
    denominator (which cancels in the product) and reduced by their common
    factor.  The left normal is the anti-holomorphic -(l1 + j l0) i
    (l1 + j l0)^-1, exposed on the result's meta dict.
    """
    rs = [_rational(v) for v in (lam0, lam1, lam2, lam3)]
    polys = []
    for r in rs:
        others = CPolynomial([1.0 + 0j])
        for other in rs:
            if other is not r:
                others = others * other.den
        polys.append(r.num * others)
    polys = _cancel_common_factor(polys)
    p0, p1, p2, p3 = polys
    if p0.is_zero and p1.is_zero:
        raise ConstructionError("the pair (l0, l1) vanishes identically")
    lower = p0 if (not p0.is_zero and (p1.is_zero or p0.degree <= p1.degree)) else p1
    if not lower.is_constant:
        for root, _ in lower.clustered_roots():
            if (p0.is_zero or p0.order_at(root) > 0) and (p1.is_zero or p1.order_at(root) > 0):
                if domain.contains(root):
                    raise ConstructionError(
                        f"(l0, l1) has a common zero at {root} inside the domain"
                    )

    derivs = [(p, p.derivative(), p.derivative().derivative()) for p in polys]

    def jet2(z: complex) -> Jet2:
        js = [holomorphic_jet2(p(z), d(z), dd(z)) for p, d, dd in derivs]
        a = js[0] + js[1] * const2(J)
        b = js[2] + js[3] * const2(J)
        return a.inverse() * b

    def evaluate(z: complex):
        a = from_complex_pair_right(p0(z), p1(z))
        if a.norm_sq() == 0.0:
            return INFINITY
        b = from_complex_pair_right(p2(z), p3(z))
        return a.inverse() * b

    surf = SurfaceMap(evaluate, jet1=lambda z: jet2(z).lower(), jet2=jet2,
                      h=h, tag="twistor")
    surf.meta = {
        "left_normal": from_lambda_pair(RationalMap(p1), RationalMap(p0), sign=-1),
        "pair": (RationalMap(p0), RationalMap(p1)),
    }
    return surf


# ---------------------------------------------------------------------------
# divisors of factored maps


def divisor_of_factored(fm: FactoredMap) -> Divisor:
    """Divisor of psi (l0 + l1 j): min of the component orders at each
    finite zero or pole of either component."""
    lams = [lam for lam in (fm.lam0, fm.lam1) if not lam.is_zero]
    if not lams:
        raise DomainError("both components vanish identically")
    points: list[complex] = []
    for lam in lams:
        for p, _ in lam.zeros() + lam.poles():
            if not any(cfun._same_point(p, q) for q in points):
                points.append(p)
    entries = []
    for p in points:
        order = min(lam.order_at(p) for lam in lams)
        if order != 0:
            entries.append((p, order))
    return Divisor(entries)


def superconformal_from_divisor(divisor: Divisor, n_map: SphereMap,
                                domain: PlanarDomain, a: Optional[Quaternion] = None,
                                classify_tol: float = 1e-4) -> FactoredMap:
    """Super-conformal map with left normal N, poles allowed, and the
    prescribed finite divisor (realized as psi * r for rational r)."""
    result = classify(n_map, domain.grid(resolution=8), tol=classify_tol)
    if result.kind not in ("anti-holomorphic", "constant"):
        raise HypothesisError(
            f"left normal must be anti-holomorphic or constant, got {result.kind}"
        )
    lam = r_from_divisor(divisor)
    psi = build_psi(n_map, domain, a=a)
    return FactoredMap(psi, lam, RationalMap.constant(0.0))
