"""Maps into the unit two-sphere of imaginary quaternions.

A sphere map is a unit imaginary quaternion field N on a planar domain.
The analytic kind is built from a pair of rational functions (l0, l1) as
N = sign * (l0 + j l1) i (l0 + j l1)^-1, which is holomorphic for sign +1
and anti-holomorphic for sign -1; evaluation clears denominators through a
coprime polynomial representative so poles of the pair are regular points
of N.  Stereographic projection from k identifies the sphere with the
extended complex plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import cfun
from .cfun import CPolynomial, RationalMap, INFINITY, is_infinity
from .errors import ConstructionError, DegreeMismatchError, DomainError
from .forms import OneFormValue, n_part
from .jets import Jet2, const2, holomorphic_jet2
from .quat import I, K, Quaternion, from_complex_pair_left

__all__ = [
    "SphereMap",
    "ClassifyResult",
    "stereo",
    "stereo_forward",
    "stereo_inverse",
    "from_lambda_pair",
    "classify",
    "sphere_degree",
]


# ---------------------------------------------------------------------------
# stereographic projection


def stereo_forward(p: Quaternion, tol: float = 1e-8) -> complex:
    """Stereographic image x1/(1-x3) + i x2/(1-x3) of a unit imaginary p."""
    if not (p.is_imaginary(tol) and p.is_unit(tol)):
        raise DomainError("stereographic projection expects a unit imaginary quaternion")
    x1, x2, x3 = p.x, p.y, p.z
    d = 1.0 - x3
    if abs(d) < 1e-13:
        raise DomainError("projection pole k maps to the point at infinity")
    return complex(x1 / d, x2 / d)


def stereo_inverse(z) -> Quaternion:
    """Inverse stereographic projection; INFINITY maps to k."""
    if is_infinity(z):
        return K
    z = complex(z)
    l1, l2 = z.real, z.imag
    s = l1 * l1 + l2 * l2
    d = s + 1.0
    return Quaternion(0.0, 2.0 * l1 / d, 2.0 * l2 / d, (s - 1.0) / d)


def stereo(p, direction: str = "forward"):
    if direction == "forward":
        return stereo_forward(p)
    if direction == "inverse":
        return stereo_inverse(p)
    raise DomainError(f"direction must be 'forward' or 'inverse', got {direction!r}")


# ---------------------------------------------------------------------------
# sphere maps


def _as_rational(v) -> RationalMap:
    if isinstance(v, RationalMap):
        return v
    if isinstance(v, CPolynomial):
        return RationalMap(v)
    if isinstance(v, (int, float, complex)):
        return RationalMap.constant(complex(v))
    return RationalMap(list(v))


class SphereMap:
    """Unit imaginary quaternion field on a planar domain."""

    def __init__(self, kind: str, **data):
        self.kind = kind
        if kind == "constant":
            q: Quaternion = data["q"]
            if not (q.is_imaginary(1e-10) and q.is_unit(1e-10)):
                raise ConstructionError("constant sphere map must be unit imaginary")
            self._q = q
        elif kind == "lambda_pair":
            self.p0: CPolynomial = data["p0"]
            self.p1: CPolynomial = data["p1"]
            self.sign: int = data["sign"]
            self.lam0: RationalMap = data["lam0"]
            self.lam1: RationalMap = data["lam1"]
            self._dp = (self.p0.derivative(), self.p1.derivative())
            self._ddp = (self._dp[0].derivative(), self._dp[1].derivative())
        elif kind == "sampled":
            self._fn: Callable[[complex], Quaternion] = data["fn"]
            self.h: float = data.get("h", 1e-3)
        else:
            raise ConstructionError(f"unknown sphere map kind {kind!r}")

    # constructors

    @staticmethod
    def constant(q: Quaternion) -> "SphereMap":
        return SphereMap("constant", q=q)

    @staticmethod
    def from_callable(fn: Callable[[complex], Quaternion], h: float = 1e-3) -> "SphereMap":
        return SphereMap("sampled", fn=fn, h=h)

    # evaluation

    def __call__(self, z) -> Quaternion:
        if self.kind == "constant":
            return self._q
        if self.kind == "sampled":
            return self._fn(z)
        c0, c1 = self._pair_at(z)
        lam = from_complex_pair_left(c0, c1)
        n = lam * I * lam.inverse()
        return n if self.sign > 0 else -n

    def _pair_at(self, z) -> tuple[complex, complex]:
        if is_infinity(z):
            d = max(self.p0.degree, self.p1.degree)
            a = self.p0.coeffs[d] if self.p0.degree == d else 0j
            b = self.p1.coeffs[d] if self.p1.degree == d else 0j
            return a, b
        return self.p0(z), self.p1(z)

    def jet2(self, z: complex) -> Jet2:
        """Analytic second-order jet (constant and lambda-pair kinds)."""
        if self.kind == "constant":
            return const2(self._q)
        if self.kind == "sampled":
            raise DomainError("sampled sphere maps have no analytic jets")
        z = complex(z)
        j0 = holomorphic_jet2(self.p0(z), self._dp[0](z), self._ddp[0](z))
        j1 = holomorphic_jet2(self.p1(z), self._dp[1](z), self._ddp[1](z))
        lam = j0 + const2(Quaternion(0, 0, 1, 0)) * j1
        n = lam * const2(I) * lam.inverse()
        return n if self.sign > 0 else -n

    def d(self, z: complex) -> OneFormValue:
        """The differential dN at z as a one-form value."""
        if self.kind == "sampled":
            h = self.h
            nx = (self(z + h) - self(z - h)) / (2.0 * h)
            ny = (self(z + h * 1j) - self(z - h * 1j)) / (2.0 * h)
            return OneFormValue(nx, ny)
        j = self.jet2(z)
        return OneFormValue(j.dx, j.dy)

    def negated(self) -> "SphereMap":
        if self.kind == "constant":
            return SphereMap.constant(-self._q)
        if self.kind == "lambda_pair":
            return SphereMap(
                "lambda_pair", p0=self.p0, p1=self.p1, sign=-self.sign,
                lam0=self.lam0, lam1=self.lam1,
            )
        fn = self._fn
        return SphereMap.from_callable(lambda z: -fn(z), self.h)

    def sample_image(self, zs: np.ndarray) -> np.ndarray:
        """Imaginary components of N over an array of points, shape (n, 3)."""
        zs = np.asarray(zs, dtype=complex).ravel()
        if self.kind == "lambda_pair":
            a = _np_horner(self.p0.coeffs, zs)
            b = _np_horner(self.p1.coeffs, zs)
            q = np.stack([a.real, a.imag, b.real, -b.imag], axis=1)
            qi = _vq_mul(q, np.tile([0.0, 1.0, 0.0, 0.0], (len(zs), 1)))
            qc = q * np.array([1.0, -1.0, -1.0, -1.0])
            out = _vq_mul(qi, qc) / np.sum(q * q, axis=1)[:, None]
            return float(self.sign) * out[:, 1:]
        vals = [self(z) for z in zs]
        return np.array([[v.x, v.y, v.z] for v in vals])


def _np_horner(coeffs, zs: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(zs)
    for c in reversed(coeffs):
        acc = acc * zs + c
    return acc


def _vq_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    w = a[:, 0] * b[:, 0] - a[:, 1] * b[:, 1] - a[:, 2] * b[:, 2] - a[:, 3] * b[:, 3]
    x = a[:, 0] * b[:, 1] + a[:, 1] * b[:, 0] + a[:, 2] * b[:, 3] - a[:, 3] * b[:, 2]
    y = a[:, 0] * b[:, 2] - a[:, 1] * b[:, 3] + a[:, 2] * b[:, 0] + a[:, 3] * b[:, 1]
    z = a[:, 0] * b[:, 3] + a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1] + a[:, 3] * b[:, 0]
    return np.stack([w, x, y, z], axis=1)


def from_lambda_pair(lam0, lam1, sign: int = 1) -> SphereMap:
    """Sphere map N = sign (l0 + j l1) i (l0 + j l1)^-1 from a rational pair.

    The pair must have no common zero on the sphere.  Internally the pair
    is cleared to a coprime polynomial representative, which leaves N
    unchanged (right multiplication of l0 + j l1 by a complex scalar field
    cancels in the conjugation).
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    lam0 = _as_rational(lam0)
    lam1 = _as_rational(lam1)
    if lam0.is_zero and lam1.is_zero:
        raise ConstructionError("lambda pair must not be identically zero")
    p0 = lam0.num * lam1.den
    p1 = lam1.num * lam0.den
    p0, p1 = cfun._reduce_pair(p0, p1)
    if p0.is_zero or p1.is_zero:
        # one function vanishes identically: constant map +/- i
        base = I if sign > 0 else -I
        value = base if p1.is_zero else -base
        out = SphereMap.constant(value)
        return out
    lower = p0 if p0.degree <= p1.degree else p1
    if lower.degree >= 1:
        for root, _ in lower.clustered_roots():
            if p0.order_at(root) > 0 and p1.order_at(root) > 0:
                raise ConstructionError(f"lambda pair has a common zero near {root}")
    return SphereMap("lambda_pair", p0=p0, p1=p1, sign=sign, lam0=lam0, lam1=lam1)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassifyResult:
    kind: str  # holomorphic | anti-holomorphic | constant | neither
    residual_holomorphic: float
    residual_antiholomorphic: float
    sup_dn: float


def classify(n_map: SphereMap, points, tol: float = 1e-4) -> ClassifyResult:
    """Classify a sphere map by its type-decomposition residuals.

    points is any iterable of complex grid points.  Reports the grid sup of
    the relative residuals of the two projections of dN whose vanishing
    characterizes holomorphic and anti-holomorphic maps.
    """
    pts = list(points)
    if not pts:
        raise DomainError("classification grid is empty")
    sup_dn = 0.0
    res_hol = 0.0
    res_anti = 0.0
    for z in pts:
        dn = n_map.d(z)
        norm = dn.norm()
        sup_dn = max(sup_dn, norm)
        if norm < 1e-12:
            continue
        nval = n_map(z)
        res_hol = max(res_hol, n_part(dn, nval, "left", 1).norm() / norm)
        res_anti = max(res_anti, n_part(dn, nval, "left", -1).norm() / norm)
    if sup_dn < 1e-8:
        return ClassifyResult("constant", res_hol, res_anti, sup_dn)
    if res_hol < tol:
        kind = "holomorphic"
    elif res_anti < tol:
        kind = "anti-holomorphic"
    else:
        kind = "neither"
    return ClassifyResult(kind, res_hol, res_anti, sup_dn)


# ---------------------------------------------------------------------------
# degree


def _zero_count_on_sphere(lam: RationalMap) -> int:
    count = sum(m for _, m in lam.zeros())
    count += max(0, lam.order_at(INFINITY))
    return count


def sphere_degree(n_map: SphereMap) -> int:
    """Common preimage count of i and -i for a lambda-pair sphere map.

    Solutions of N = i are the sphere zeros of l1, solutions of N = -i the
    sphere zeros of l0 (multiplicities included, infinity included).  For
    balanced pairs the two counts agree and equal max(deg l0, deg l1); a
    mismatch raises DegreeMismatchError carrying both counts.
    """
    if n_map.kind == "constant":
        return 0
    if n_map.kind != "lambda_pair":
        raise DomainError("degree counting requires a lambda-pair sphere map")
    if n_map.p0.is_constant and n_map.p1.is_constant:
        return 0
    lam0, lam1 = n_map.lam0, n_map.lam1
    if lam0.is_zero or lam1.is_zero:
        return 0
    count_i = _zero_count_on_sphere(lam1)
    count_minus_i = _zero_count_on_sphere(lam0)
    if count_i != count_minus_i:
        raise DegreeMismatchError(count_i, count_minus_i)
    return count_i
