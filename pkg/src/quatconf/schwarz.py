"""Function-theoretic bounds for factored maps into the unit ball.

The growth bound |f(z)| <= c (C0^2 + C1^2)^(1/2) |z| for a factored map
with f(0) = 0 follows from the classical Schwarz lemma applied to the two
holomorphic components; c bounds |psi| on the checked points while each
C_n must dominate |l_n| on the whole disk, which the maximum principle
reduces to a refined search over the boundary circle.

Ball Mobius transformations are used in their prefactor-free normalized
form a -> (a - a1)(1 - conj(a1) a)^(-1), which genuinely preserves the
unit ball; the scalar prefactor sometimes attached to these maps would
push boundary norms above one and cancels from every final inequality
anyway (see the decisions notes).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import DomainError, HypothesisError
from .jets import Jet1, Jet2, const1, const2
from .quat import I, Quaternion, from_complex
from .sphere import SphereMap
from .superconf import FactoredMap, PsiSection, build_psi
from .surface import PlanarDomain, SurfaceMap

__all__ = [
    "BallMobius",
    "mobius_ball_check",
    "apply_mobius",
    "disk_mobius",
    "disk_mobius_inverse",
    "BoundReport",
    "bound_constants",
    "PickReport",
    "pick_check",
    "poincare_ratio",
]


# ---------------------------------------------------------------------------
# Mobius transformations


@dataclass(frozen=True)
class BallMobius:
    """Coefficients of a -> (p a + q)(r a + s)^(-1)."""

    p: Quaternion
    q: Quaternion
    r: Quaternion
    s: Quaternion

    def __call__(self, a: Quaternion) -> Quaternion:
        den = self.r * a + self.s
        return (self.p * a + self.q) * den.inverse()

    def residuals(self) -> dict[str, float]:
        p, q, r, s = self.p, self.q, self.r, self.s
        return {
            "|p|=|s|": abs(p.norm() - s.norm()),
            "|q|=|r|": abs(q.norm() - r.norm()),
            "|p|^2-|r|^2=1": abs(p.norm_sq() - r.norm_sq() - 1.0),
            "conj(p)q=conj(r)s": (p.conj() * q - r.conj() * s).norm(),
            "p conj(r)=q conj(s)": (p * r.conj() - q * s.conj()).norm(),
        }


def mobius_ball_check(p: Quaternion, q: Quaternion, r: Quaternion, s: Quaternion,
                      tol: float = 1e-10) -> tuple[bool, dict[str, float]]:
    """Whether (p a + q)(r a + s)^-1 maps the unit ball to itself."""
    res = BallMobius(p, q, r, s).residuals()
    return max(res.values()) <= tol, res


def _mobius(a1: Quaternion, a: Quaternion) -> Quaternion:
    return (a - a1) * (Quaternion(1.0) - a1.conj() * a).inverse()


def apply_mobius(a1: Quaternion, a: Quaternion) -> Quaternion:
    """Ball Mobius map (a - a1)(1 - conj(a1) a)^-1 sending a1 to 0."""
    if a1.norm() >= 1.0:
        raise DomainError("the center a1 must lie in the open unit ball")
    if a.norm() >= 1.0 + 1e-12:
        raise DomainError("the argument must lie in the (closed) unit ball")
    return _mobius(a1, a)


def _mobius_jet2(a1: Quaternion, a: Jet2) -> Jet2:
    one = const2(Quaternion(1.0))
    return (a - const2(a1)) * (one - const2(a1.conj()) * a).inverse()


def _mobius_jet1(a1: Quaternion, a: Jet1) -> Jet1:
    one = const1(Quaternion(1.0))
    return (a - const1(a1)) * (one - const1(a1.conj()) * a).inverse()


def disk_mobius(z1: complex, z: complex) -> complex:
    """Disk automorphism (z - z1)/(1 - conj(z1) z)."""
    return (z - z1) / (1.0 - z1.conjugate() * z)


def disk_mobius_inverse(z1: complex, w: complex) -> complex:
    return (w + z1) / (1.0 + z1.conjugate() * w)


# ---------------------------------------------------------------------------
# jet composition with a holomorphic reparametrization


def _compose_jet1(fj: Jet1, d1: complex) -> Jet1:
    u, v = d1.real, d1.imag
    return Jet1(fj.v, fj.dx * u + fj.dy * v, -(fj.dx * v) + fj.dy * u)


def _compose_jet2(fj: Jet2, d1: complex, d2: complex) -> Jet2:
    u, v = d1.real, d1.imag
    p, q = d2.real, d2.imag
    fx, fy = fj.dx, fj.dy
    fxx, fxy, fyy = fj.dxx, fj.dxy, fj.dyy
    return Jet2(
        fj.v,
        fx * u + fy * v,
        -(fx * v) + fy * u,
        fxx * (u * u) + fxy * (2 * u * v) + fyy * (v * v) + fx * p + fy * q,
        fxx * (-u * v) + fxy * (u * u - v * v) + fyy * (u * v) - fx * q + fy * p,
        fxx * (v * v) - fxy * (2 * u * v) + fyy * (u * u) - fx * p - fy * q,
    )


# ---------------------------------------------------------------------------
# suprema helpers


def _golden_max(fn: Callable[[float], float], a: float, b: float, iters: int = 60) -> float:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv * (b - a)
    x2 = a + inv * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = fn(x1)
    return max(f1, f2)


def _circle_sup(fn: Callable[[complex], float], radius: float = 1.0,
                coarse: int = 1024, peaks: int = 3) -> float:
    """Supremum of fn over a circle: coarse scan plus golden-section polish."""
    step = 2.0 * math.pi / coarse
    vals = [fn(radius * cmath.exp(1j * k * step)) for k in range(coarse)]
    best = max(vals)
    order = sorted(range(coarse), key=lambda k: -vals[k])[:peaks]
    for k in order:
        lo, hi = (k - 1) * step, (k + 1) * step
        best = max(best, _golden_max(lambda t: fn(radius * cmath.exp(1j * t)), lo, hi))
    return best


# ---------------------------------------------------------------------------
# Schwarz constants


@dataclass(frozen=True)
class BoundReport:
    c: float
    c_tilde: float
    C0: float
    C1: float
    bound: float  # c sqrt(C0^2 + C1^2)
    max_violation: float  # sup_z |f(z)| - bound |z|  (<= 0 expected)
    derivative_slack: float  # |f_x(0) - N(0) f_y(0)| - 2 * bound  (<= 0 expected)
    equality_attained: bool
    points_checked: int


def _component_sups(fm: FactoredMap) -> tuple[float, float]:
    out = []
    for lam in (fm.lam0, fm.lam1):
        if lam.is_zero:
            out.append(0.0)
            continue
        out.append(_circle_sup(lambda w: abs(lam.eval(w))))
    return out[0], out[1]


def bound_constants(fm: FactoredMap, points: Optional[list[complex]] = None,
                    equality_tol: float = 1e-7) -> BoundReport:
    """Schwarz constants of a factored map with f(0) = 0 and the growth check.

    c and c_tilde are suprema of |psi| and 1/|psi| over the checked points
    (plus the boundary circle); C_n is the supremum of |l_n| over the unit
    circle, which by the maximum principle bounds it on the whole disk.
    The growth inequality is then checked pointwise on the grid.
    """
    if abs(fm.lam0.eval(0j)) > 1e-12 or abs(fm.lam1.eval(0j)) > 1e-12:
        raise HypothesisError("the bound requires f(0) = 0 (both components vanish at 0)")
    pts = points if points is not None else fm.psi.domain.grid(margin=0.0)
    pts = [complex(z) for z in pts]
    if 0j not in pts:
        pts.append(0j)

    psi_vals = [fm.psi(z).norm() for z in pts]
    c = max(psi_vals)
    c = max(c, _circle_sup(lambda w: fm.psi(w).norm()))
    min_psi = min(psi_vals)
    if min_psi <= 0.0:
        raise HypothesisError("|psi| is not bounded away from zero on the grid")
    c_tilde = 1.0 / min_psi
    c0, c1 = _component_sups(fm)
    bound = c * math.sqrt(c0 * c0 + c1 * c1)

    worst = -math.inf
    equality = False
    for z in pts:
        val = fm(z)
        if not isinstance(val, Quaternion):
            raise HypothesisError(f"map has a pole at {z} inside the disk")
        slack = val.norm() - bound * abs(z)
        worst = max(worst, slack)
        if z != 0j and abs(slack) <= equality_tol * max(1.0, bound):
            equality = True

    # |f_x(0) - N(0) f_y(0)| equals |psi(0)| |l_x - i l_y|(0) = 2 |psi(0)| |l'(0)|,
    # so the sharp constant carries a factor 2 (l_x - i l_y is twice the
    # z-derivative); the tight case l0 = C0 z attains equality.
    j = fm.jet2(0j).lower()
    n0 = fm.n_map(0j)
    deriv_slack = (j.dx - n0 * j.dy).norm() - 2.0 * bound
    return BoundReport(c, c_tilde, c0, c1, bound, worst, deriv_slack,
                       equality, len(pts))


# ---------------------------------------------------------------------------
# Schwarz-Pick


@dataclass(frozen=True)
class PickReport:
    z1: complex
    f_z1: Quaternion
    C: float  # Schwarz constant of the recentered map
    C_tilde: float  # paper-form constant tested in the final inequalities
    ratio: float  # (1 - |f(z1)|^2) / (1 - |z1|^2)
    quotient_violation: float  # sup_z quotient - C_tilde |tau(z)|  (<= 0)
    derivative_violation: float
    recentered_violation: float  # sup_w |g(w)| - C |w|  (<= 0)
    gap: float
    points_checked: int


def _recentered_jets(fm: FactoredMap, z1: complex):
    """Jets of g = Mobius_{f(z1)} o f o tau^{-1} as functions of w."""
    a1 = fm(z1)
    if not isinstance(a1, Quaternion):
        raise HypothesisError(f"f has a pole at the base point {z1}")
    z1c = complex(z1)
    s = 1.0 - abs(z1c) ** 2

    def phi(w: complex) -> tuple[complex, complex, complex]:
        den = 1.0 + z1c.conjugate() * w
        return (w + z1c) / den, s / den**2, -2.0 * z1c.conjugate() * s / den**3

    def jet1(w: complex) -> Jet1:
        z, d1, _ = phi(w)
        return _mobius_jet1(a1, _compose_jet1(fm.jet1(z), d1))

    def jet2(w: complex) -> Jet2:
        z, d1, d2 = phi(w)
        return _mobius_jet2(a1, _compose_jet2(fm.jet2(z), d1, d2))

    return a1, jet1, jet2


def pick_check(fm: FactoredMap, z1: complex,
               points: Optional[list[complex]] = None,
               gap_tol: float = 0.05,
               sample_resolution: int = 40) -> PickReport:
    """Invariant-quotient bound at a base point of a ball-valued map.

    Recenter with ball and disk Mobius maps, read Schwarz constants off
    the recentered map's own factorization (its sampled left normal must
    leave a spherical gap, which certifies the base point), and check the
    quotient and derivative inequalities over the grid.
    """
    z1 = complex(z1)
    dom = fm.psi.domain
    pts = points if points is not None else dom.grid(margin=0.0)
    pts = [complex(z) for z in pts]

    sup_f = max(fm(z).norm() for z in pts if isinstance(fm(z), Quaternion))
    if sup_f >= 1.0:
        raise HypothesisError(f"map is not ball-valued on the grid (sup |f| = {sup_f:.3f})")

    a1, g_jet1, g_jet2 = _recentered_jets(fm, z1)

    def g_value(w: complex) -> Quaternion:
        return g_jet1(w).v

    def g_normal(w: complex) -> Quaternion:
        j = g_jet1(w)
        return j.dy * j.dx.inverse()

    n_sampled = SphereMap.from_callable(g_normal, h=dom.h)
    w_dom = PlanarDomain.disk(0j, 1.0 - 2.0 * dom.h, resolution=sample_resolution, h=dom.h)
    psi_g = build_psi(n_sampled, w_dom, gap_tol=gap_tol,
                      sample_resolution=sample_resolution)

    def lam_pair(w: complex) -> tuple[complex, complex]:
        val = psi_g(w).inverse() * g_value(w)
        return val.complex_pair_right()

    w_pts = w_dom.grid(margin=0.0)
    c_vals = [psi_g(w).norm() for w in w_pts]
    c = max(c_vals)
    c = max(c, _circle_sup(lambda w: psi_g(w).norm()))
    c0 = _circle_sup(lambda w: abs(lam_pair(w)[0]))
    c1 = _circle_sup(lambda w: abs(lam_pair(w)[1]))
    big_c = c * math.sqrt(c0 * c0 + c1 * c1)

    ratio = (1.0 - a1.norm_sq()) / (1.0 - abs(z1) ** 2)
    c_tilde = math.sqrt(ratio) * big_c

    recentered_violation = max(
        g_value(w).norm() - big_c * abs(w) for w in w_pts
    )

    worst = -math.inf
    denom_a1 = a1.conj()
    for z in pts:
        val = fm(z)
        quotient = (val - a1).norm() / (Quaternion(1.0) - denom_a1 * val).norm()
        worst = max(worst, quotient - c_tilde * abs(disk_mobius(z1, z)))

    j1 = fm.jet2(z1).lower()
    lhs = j1.dx.norm() / (1.0 - a1.norm_sq())
    deriv_violation = lhs - c_tilde / (1.0 - abs(z1) ** 2)

    return PickReport(z1, a1, big_c, c_tilde, ratio, worst, deriv_violation,
                      recentered_violation, psi_g.gap if psi_g.gap else 0.0, len(pts))


# ---------------------------------------------------------------------------
# hyperbolic metric comparison


def poincare_ratio(f: SurfaceMap, z: complex) -> float:
    """Pullback density of the ball hyperbolic metric against the disk one.

    Returns |f_x(z)|^2 (1 - |z|^2)^2 / (1 - |f(z)|^2)^2, the square of the
    local Lipschitz constant of f between the two hyperbolic metrics.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("base point must lie in the open unit disk")
    val = f(z)
    if not isinstance(val, Quaternion) or val.norm() >= 1.0:
        raise DomainError("map value must lie in the open unit ball")
    j = f.jet1_at(z)
    num = j.dx.norm_sq() * (1.0 - abs(z) ** 2) ** 2
    den = (1.0 - val.norm_sq()) ** 2
    return num / den
