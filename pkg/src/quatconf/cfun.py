"""Exact-ish calculus of complex rational functions on the Riemann sphere.

Polynomials are stored as complex coefficient tuples, lowest degree first.
Rational maps are stored reduced (no common roots between numerator and
denominator up to a clustering tolerance) with monic denominator, so zero
and pole orders, degree, and the point at infinity are all well defined.

Root finding uses simultaneous Durand-Kerner iteration with residual-based
convergence; multiplicities are recovered by clustering the iterates and
validating each cluster against a Taylor-shift zero count at its centroid.
An exact Euclidean gcd over Gaussian rationals is used for reduction when
the coefficients are small Gaussian integers.
"""

from __future__ import annotations

import cmath
import math
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ConstructionError, DomainError

__all__ = [
    "INFINITY",
    "is_infinity",
    "CPolynomial",
    "RationalMap",
    "Divisor",
    "durand_kerner",
    "clustered_roots",
    "r_eval",
    "r_derive",
    "r_order_at",
    "r_degree",
    "r_from_divisor",
]

#: Marker for the point at infinity on the Riemann sphere.
INFINITY = float("inf")

_TRIM_RTOL = 1e-12
_ORDER_RTOL = 1e-8


def is_infinity(p) -> bool:
    """True if p denotes the point at infinity."""
    if isinstance(p, complex):
        return math.isinf(p.real) or math.isinf(p.imag)
    return isinstance(p, float) and math.isinf(p)


# ---------------------------------------------------------------------------
# polynomials


class CPolynomial:
    """Complex-coefficient polynomial, coefficients lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[complex]):
        cs = [complex(c) for c in coeffs] or [0j]
        top = max(abs(c) for c in cs)
        cut = _TRIM_RTOL * top
        k = len(cs)
        while k > 1 and abs(cs[k - 1]) <= cut:
            k -= 1
        self.coeffs = tuple(cs[:k])

    def __repr__(self) -> str:
        return f"CPolynomial({list(self.coeffs)!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, CPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def is_constant(self) -> bool:
        return len(self.coeffs) == 1

    def leading(self) -> complex:
        return self.coeffs[-1]

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "CPolynomial":
        if len(self.coeffs) == 1:
            return CPolynomial([0j])
        return CPolynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def __add__(self, other: "CPolynomial") -> "CPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return CPolynomial(out)

    def __sub__(self, other: "CPolynomial") -> "CPolynomial":
        return self + (-other)

    def __neg__(self) -> "CPolynomial":
        return CPolynomial([-c for c in self.coeffs])

    def __mul__(self, other: "CPolynomial | complex") -> "CPolynomial":
        if isinstance(other, (int, float, complex)):
            return CPolynomial([c * other for c in self.coeffs])
        out = [0j] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return CPolynomial(out)

    __rmul__ = __mul__

    def taylor_at(self, p: complex) -> tuple[complex, ...]:
        """Coefficients of self(z + p), by repeated synthetic division."""
        work = list(self.coeffs)
        n = len(work)
        out = []
        for k in range(n):
            # one synthetic division by (z - p); remainder is the k-th coeff
            for i in range(n - 2, k - 1, -1):
                work[i] += work[i + 1] * p
            out.append(work[k])
        return tuple(out)

    def order_at(self, p: complex, rtol: float = _ORDER_RTOL) -> int:
        """Multiplicity of the root p (0 if p is not a root)."""
        if self.is_zero:
            raise DomainError("order of the zero polynomial is undefined")
        tay = self.taylor_at(p)
        cut = rtol * max(abs(c) for c in tay)
        m = 0
        while m < len(tay) - 1 and abs(tay[m]) <= cut:
            m += 1
        return m

    def deflate(self, root: complex, times: int = 1) -> "CPolynomial":
        """Divide by (z - root)^times via synthetic division."""
        work = list(self.coeffs)
        for _ in range(times):
            if len(work) < 2:
                raise DomainError("cannot deflate a constant polynomial")
            out = [0j] * (len(work) - 1)
            acc = 0j
            for i in range(len(work) - 1, 0, -1):
                acc = work[i] + acc * root
                out[i - 1] = acc
            work = out
        return CPolynomial(work)

    def monic(self) -> "CPolynomial":
        lead = self.leading()
        if lead == 0:
            raise DomainError("zero polynomial cannot be made monic")
        return CPolynomial([c / lead for c in self.coeffs])

    def roots(self) -> list[complex]:
        return durand_kerner(self.coeffs)

    def clustered_roots(self, rtol: float = _ORDER_RTOL) -> list[tuple[complex, int]]:
        return clustered_roots(self.coeffs, rtol)


# ---------------------------------------------------------------------------
# root finding


def _quadratic_roots(c0: complex, c1: complex, c2: complex) -> list[complex]:
    # numerically stable form avoiding cancellation in -b +/- sqrt(disc)
    disc = cmath.sqrt(c1 * c1 - 4.0 * c2 * c0)
    if abs(c1 - disc) > abs(c1 + disc):
        q = -0.5 * (c1 - disc)
    else:
        q = -0.5 * (c1 + disc)
    if q == 0:
        return [0j, 0j]
    r1 = q / c2
    r2 = c0 / q
    return [r1, r2]


def durand_kerner(
    coeffs: Sequence[complex], max_iter: int = 500, tol: float = 5e-14
) -> list[complex]:
    """All complex roots of a polynomial, counted with multiplicity.

    Coefficients are lowest degree first; the leading coefficient must be
    nonzero.  Multiple roots come out as tight clusters of simple iterates;
    use clustered_roots to group them.
    """
    cs = list(CPolynomial(coeffs).coeffs)
    n = len(cs) - 1
    if n <= 0:
        return []
    lead = cs[-1]
    if lead == 0:
        raise DomainError("leading coefficient is zero")
    cs = [c / lead for c in cs]
    if n == 1:
        return [-cs[0]]
    if n == 2:
        return _quadratic_roots(cs[0], cs[1], 1.0 + 0j)

    bound = 1.0 + max(abs(c) for c in cs[:-1])

    def run(init_scale: complex) -> tuple[list[complex], float]:
        zs = [init_scale * (0.4 + 0.9j) ** k for k in range(n)]
        for _ in range(max_iter):
            delta = 0.0
            for k in range(n):
                num = _horner(cs, zs[k])
                den = 1.0 + 0j
                for j in range(n):
                    if j != k:
                        den *= zs[k] - zs[j]
                if den == 0:
                    den = 1e-30
                step = num / den
                zs[k] = zs[k] - step
                delta = max(delta, abs(step))
            scale = 1.0 + max(abs(z) for z in zs)
            if delta < tol * scale:
                break
        resid = max(abs(_horner(cs, z)) for z in zs)
        return zs, resid

    zs, resid = run(1.0 + 0j)
    if resid > 1e-6 * (1.0 + bound) ** n:
        zs, resid = run(bound * cmath.exp(0.37j))
        if resid > 1e-6 * (1.0 + bound) ** n:
            raise ConstructionError(f"root finder failed to converge (residual {resid:g})")
    return zs


def _horner(cs: Sequence[complex], z: complex) -> complex:
    acc = 0j
    for c in reversed(cs):
        acc = acc * z + c
    return acc


def clustered_roots(
    coeffs: Sequence[complex], rtol: float = _ORDER_RTOL
) -> list[tuple[complex, int]]:
    """Distinct roots with multiplicities.

    Iterates are grouped at increasing cluster radii (starting from rtol)
    until every cluster's size matches the Taylor-shift zero count at its
    centroid; this keeps nearby simple roots apart while gathering the
    eps^(1/m)-wide clouds that multiple roots produce.
    """
    poly = CPolynomial(coeffs)
    if poly.degree < 1:
        return []
    raw = durand_kerner(poly.coeffs)
    # plain Newton polish tightens multiple-root clouds (their iterates sit
    # ~eps^(1/m) out, near the grouping radius) and pins simple roots
    dpoly = poly.derivative()
    polished = []
    for z in raw:
        for _ in range(3):
            d = dpoly(z)
            if d == 0:
                break
            step = poly(z) / d
            # at a near-exact multiple root the ratio is 0/0 noise: cap the
            # step and only accept it when the residual actually drops
            if not cmath.isfinite(step) or abs(step) > 1e-3 * (1.0 + abs(z)):
                break
            cand = z - step
            if abs(poly(cand)) > abs(poly(z)):
                break
            z = cand
        polished.append(z)
    raw = sorted(polished, key=lambda z: (z.real, z.imag))
    scale = 1.0 + max(abs(z) for z in raw)

    tau = max(rtol, 1e-14)
    while tau <= 1e-2:
        clusters = _single_linkage(raw, tau * scale)
        result = []
        ok = True
        # distinct clusters must be well separated relative to the radius;
        # otherwise a multiple-root cloud may be straddling the threshold
        centroids = [sum(cl) / len(cl) for cl in clusters]
        for i in range(len(centroids)):
            for j in range(i + 1, len(centroids)):
                if abs(centroids[i] - centroids[j]) < 30.0 * tau * scale:
                    ok = False
        if ok:
            for cl, c in zip(clusters, centroids):
                c = _polish_root(poly, c, len(cl))
                if poly.order_at(c, rtol=max(rtol, 1e-8)) != len(cl):
                    ok = False
                    break
                result.append((c, len(cl)))
        if ok:
            result.sort(key=lambda rm: (rm[0].real, rm[0].imag))
            return result
        tau *= math.sqrt(10.0)
    raise ConstructionError("could not resolve root multiplicities by clustering")


def _single_linkage(points: list[complex], radius: float) -> list[list[complex]]:
    """Chain points into clusters: joining via any member within radius."""
    clusters: list[list[complex]] = []
    for z in points:
        hits = [cl for cl in clusters if any(abs(z - w) <= radius for w in cl)]
        if not hits:
            clusters.append([z])
        else:
            merged = hits[0]
            merged.append(z)
            for other in hits[1:]:
                merged.extend(other)
                clusters.remove(other)
    return clusters


def _polish_root(poly: CPolynomial, z: complex, mult: int) -> complex:
    # Newton on the (mult-1)-th derivative, where the root is simple
    q = poly
    for _ in range(mult - 1):
        q = q.derivative()
    dq = q.derivative()
    for _ in range(3):
        d = dq(z)
        if d == 0:
            break
        step = q(z) / d
        if not cmath.isfinite(step) or abs(step) > 1e-3 * (1.0 + abs(z)):
            break
        cand = z - step
        if abs(q(cand)) > abs(q(z)):
            break
        z = cand
    return z


# ---------------------------------------------------------------------------
# exact gcd over Gaussian rationals (reduction fast path)


def _as_gaussian_int(c: complex, limit: float = 1e6):
    re, im = c.real, c.imag
    if abs(re) > limit or abs(im) > limit:
        return None
    if re != int(re) or im != int(im):
        return None
    return (Fraction(int(re)), Fraction(int(im)))


def _gq_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gq_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _gq_div(a, b):
    d = b[0] * b[0] + b[1] * b[1]
    return ((a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d)


def _gq_poly_trim(p):
    while len(p) > 1 and p[-1] == (0, 0):
        p.pop()
    return p


def _gq_divmod(a, b):
    # polynomial division, lowest-first lists of Gaussian rationals
    a = list(a)
    q = [(Fraction(0), Fraction(0))] * max(1, len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        factor = _gq_div(a[k + len(b) - 1], b[-1])
        q[k] = factor
        for j, bc in enumerate(b):
            a[k + j] = _gq_sub(a[k + j], _gq_mul(factor, bc))
    return _gq_poly_trim(q), _gq_poly_trim(a[: len(b) - 1] or [(Fraction(0), Fraction(0))])


def _gq_gcd(a, b):
    a, b = list(a), list(b)
    while not (len(b) == 1 and b[0] == (0, 0)):
        _, r = _gq_divmod(a, b)
        a, b = b, r
    # normalize monic
    lead = a[-1]
    return [_gq_div(c, lead) for c in a]


def _exact_reduce(num: CPolynomial, den: CPolynomial):
    gn = [_as_gaussian_int(c) for c in num.coeffs]
    gd = [_as_gaussian_int(c) for c in den.coeffs]
    if any(g is None for g in gn) or any(g is None for g in gd):
        return None
    g = _gq_gcd(gn, gd)
    if len(g) == 1:
        return num, den
    qn, rn = _gq_divmod(gn, g)
    qd, rd = _gq_divmod(gd, g)
    if any(c != (0, 0) for c in rn) or any(c != (0, 0) for c in rd):
        return None
    to_c = lambda p: CPolynomial([complex(float(c[0]), float(c[1])) for c in p])
    return to_c(qn), to_c(qd)


# ---------------------------------------------------------------------------
# rational maps


class RationalMap:
    """Reduced ratio of two complex polynomials, a map of the Riemann sphere."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, reduce: bool = True):
        num = num if isinstance(num, CPolynomial) else CPolynomial(num)
        if den is None:
            den = CPolynomial([1.0 + 0j])
        else:
            den = den if isinstance(den, CPolynomial) else CPolynomial(den)
        if den.is_zero:
            raise DomainError("denominator is identically zero")
        if num.is_zero:
            self.num = CPolynomial([0j])
            self.den = CPolynomial([1.0 + 0j])
            return
        if reduce:
            num, den = _reduce_pair(num, den)
        lead = den.leading()
        self.num = num * (1.0 / lead)
        self.den = den * (1.0 / lead)

    @staticmethod
    def constant(c: complex) -> "RationalMap":
        return RationalMap([complex(c)])

    @staticmethod
    def identity() -> "RationalMap":
        return RationalMap([0j, 1.0 + 0j])

    def __repr__(self) -> str:
        return f"RationalMap({list(self.num.coeffs)!r}, {list(self.den.coeffs)!r})"

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Value at z with Riemann-sphere conventions.

        A pole evaluates to INFINITY; the value at INFINITY is decided by
        degree comparison of the reduced representation.
        """
        if is_infinity(z):
            dn, dd = self.num.degree, self.den.degree
            if self.num.is_zero:
                return 0j
            if dn > dd:
                return INFINITY
            if dn < dd:
                return 0j
            return self.num.leading() / self.den.leading()
        n = self.num(z)
        d = self.den(z)
        if d == 0:
            if n == 0:
                raise ConstructionError(
                    "0/0 at a common root: representation is not reduced"
                )
            return INFINITY
        return n / d

    def derivative(self) -> "RationalMap":
        """Exact quotient-rule derivative, reduced.

        The common factor gcd(d, d') of an m-fold denominator root is
        divided out up front: the naive n'd - nd' over d^2 doubles every
        pole multiplicity, which the root-clustering reducer cannot
        untangle once the clouds reach eps^(1/2m) width.
        """
        n, d = self.num, self.den
        if d.is_constant:
            return RationalMap(n.derivative(), d, reduce=False)
        dp = d.derivative()
        e = d
        dp_red = dp
        for root, m in d.clustered_roots():
            if m > 1:
                e = e.deflate(root, m - 1)
                dp_red = dp_red.deflate(root, m - 1)
        return RationalMap(n.derivative() * e - n * dp_red, d * e)

    def order_at(self, p, rtol: float = _ORDER_RTOL) -> int:
        """Zero order (positive) or pole order (negative) at p."""
        if self.is_zero:
            raise DomainError("order of the zero map is undefined")
        if is_infinity(p):
            return self.den.degree - self.num.degree
        return self.num.order_at(p, rtol) - self.den.order_at(p, rtol)

    @property
    def degree(self) -> int:
        """max(deg numerator, deg denominator) of the reduced form."""
        return max(self.num.degree, self.den.degree)

    def zeros(self) -> list[tuple[complex, int]]:
        """Finite zeros with multiplicities."""
        if self.is_zero or self.num.is_constant:
            return []
        return self.num.clustered_roots()

    def poles(self) -> list[tuple[complex, int]]:
        """Finite poles with multiplicities (positive counts)."""
        if self.den.is_constant:
            return []
        return self.den.clustered_roots()

    def divisor(self) -> "Divisor":
        """Divisor on the sphere, including the forced order at infinity."""
        entries = [(p, m) for p, m in self.zeros()] + [(p, -m) for p, m in self.poles()]
        o_inf = self.order_at(INFINITY)
        if o_inf != 0:
            entries.append((INFINITY, o_inf))
        return Divisor(entries)

    # arithmetic (used when assembling derived maps; always re-reduced)

    def __add__(self, other: "RationalMap") -> "RationalMap":
        other = _as_rational(other)
        return RationalMap(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __sub__(self, other: "RationalMap") -> "RationalMap":
        return self + (-_as_rational(other))

    def __neg__(self) -> "RationalMap":
        return RationalMap(-self.num, self.den, reduce=False)

    def __mul__(self, other: "RationalMap | complex") -> "RationalMap":
        if isinstance(other, (int, float, complex)):
            return RationalMap(self.num * other, self.den, reduce=False)
        return RationalMap(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalMap":
        if self.is_zero:
            raise DomainError("reciprocal of the zero map")
        return RationalMap(self.den, self.num, reduce=False)


def _as_rational(v) -> RationalMap:
    if isinstance(v, RationalMap):
        return v
    if isinstance(v, (int, float, complex)):
        return RationalMap.constant(complex(v))
    raise TypeError(f"cannot interpret {type(v).__name__} as a rational map")


def _reduce_pair(num: CPolynomial, den: CPolynomial) -> tuple[CPolynomial, CPolynomial]:
    if num.is_constant or den.is_constant:
        return num, den
    exact = _exact_reduce(num, den)
    if exact is not None:
        return exact
    # numeric path: cancel clustered common roots, iterating to a fixpoint
    for _ in range(4):
        lower = num if num.degree <= den.degree else den
        cancelled = False
        for root, _ in lower.clustered_roots():
            m = min(num.order_at(root), den.order_at(root))
            if m > 0:
                num = num.deflate(root, m)
                den = den.deflate(root, m)
                cancelled = True
        if not cancelled or num.is_constant or den.is_constant:
            break
    return num, den


# ---------------------------------------------------------------------------
# divisors


@dataclass(frozen=True)
class Divisor:
    """Finite formal sum of sphere points with nonzero integer orders."""

    entries: tuple[tuple[complex | float, int], ...]

    def __init__(self, entries):
        merged: list[tuple[complex | float, int]] = []
        for p, order in entries:
            order = int(order)
            p = INFINITY if is_infinity(p) else complex(p)
            for k, (q, o) in enumerate(merged):
                if _same_point(p, q):
                    merged[k] = (q, o + order)
                    break
            else:
                merged.append((p, order))
        merged = [(p, o) for p, o in merged if o != 0]
        merged.sort(key=_point_sort_key)
        object.__setattr__(self, "entries", tuple(merged))

    @property
    def degree(self) -> int:
        return sum(o for _, o in self.entries)

    @property
    def support(self) -> tuple[complex | float, ...]:
        return tuple(p for p, _ in self.entries)

    def order_at(self, p) -> int:
        for q, o in self.entries:
            if _same_point(p, q):
                return o
        return 0

    def zero_part(self) -> "Divisor":
        return Divisor([(p, o) for p, o in self.entries if o > 0])

    def polar_part(self) -> "Divisor":
        """Pole orders, recorded as a nonnegative divisor."""
        return Divisor([(p, -o) for p, o in self.entries if o < 0])

    def __len__(self) -> int:
        return len(self.entries)


def _same_point(p, q, tol: float = 1e-9) -> bool:
    pi, qi = is_infinity(p), is_infinity(q)
    if pi or qi:
        return pi and qi
    return abs(complex(p) - complex(q)) <= tol


def _point_sort_key(entry):
    p, _ = entry
    if is_infinity(p):
        return (1, 0.0, 0.0)
    return (0, complex(p).real, complex(p).imag)


# ---------------------------------------------------------------------------
# spec operation aliases


def r_eval(r: RationalMap, z):
    return r.eval(z)


def r_derive(r: RationalMap) -> RationalMap:
    return r.derivative()


def r_order_at(r: RationalMap, p) -> int:
    return r.order_at(p)


def r_degree(r: RationalMap) -> int:
    return r.degree


def r_from_divisor(d: Divisor) -> RationalMap:
    """Rational map whose finite divisor equals d.

    Only finite support is accepted; the order at infinity is then forced
    to minus the degree of the finite part.
    """
    num = CPolynomial([1.0 + 0j])
    den = CPolynomial([1.0 + 0j])
    for p, order in d.entries:
        if is_infinity(p):
            raise DomainError("divisor realization requires finite support")
        lin = CPolynomial([-complex(p), 1.0 + 0j])
        for _ in range(abs(order)):
            if order > 0:
                num = num * lin
            else:
                den = den * lin
    return RationalMap(num, den, reduce=False)
