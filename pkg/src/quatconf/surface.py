"""Differential geometry of maps from a planar domain into the quaternions.

A surface map carries an evaluator plus, when available, analytic jets;
otherwise derivatives fall back to central finite differences of step h.
The left and right normals at an immersion point come from the first
derivatives, N = f_y f_x^-1 and R = -f_x^-1 f_y, both unit imaginary
exactly when the map is conformal there.

Curvature quantities follow the identities

    f_x Hbar = -N (dN)_N(dx),
    K  |df|^2 = (R*sigma + N*sigma)/2,   Kperp |df|^2 = (R*sigma - N*sigma)/2,

with N*sigma computed as metric_pair(star dN, N dN) and |df|^2 taken as
|f_x|^2 on (dx, dy).  The paper's sources leave the orientation of these
pairings open, so the overall sign is fixed once, numerically, by
requiring K = +1 on the round unit sphere; the choice is cached for the
process lifetime and exercised by the calibration tests.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .cfun import INFINITY, RationalMap, is_infinity
from .errors import DomainError, InconclusiveFitError, NonConformalError, SingularPointError
from .forms import OneFormValue, metric_pair, star
from .jets import Jet1, Jet2, const2, coordinate_jets2, holomorphic_jet2
from .quat import I, J, K, Quaternion, q_inner

__all__ = [
    "PlanarDomain",
    "SurfaceMap",
    "Jet",
    "CurvatureSample",
    "OrderFit",
    "jet_at",
    "conformal_residual_at",
    "curvature_at",
    "wintgen_slack_at",
    "vanish_order_fit",
    "curvature_sign",
    "inverse_stereo_surface",
    "graph_map",
    "CSV_COLUMNS",
    "field_rows",
]


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class PlanarDomain:
    """Rectangle or disk sampling domain with a finite-difference step."""

    kind: str  # "rectangle" | "disk"
    center: complex = 0j
    half_widths: tuple[float, float] = (1.0, 1.0)
    radius: float = 1.0
    resolution: int = 16
    h: float = 1e-3

    def __post_init__(self):
        if self.kind not in ("rectangle", "disk"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.resolution < 2:
            raise DomainError("resolution must be at least 2")
        if self.h <= 0:
            raise DomainError("finite-difference step must be positive")

    @staticmethod
    def rectangle(center: complex, half_widths: tuple[float, float],
                  resolution: int = 16, h: float = 1e-3) -> "PlanarDomain":
        return PlanarDomain("rectangle", complex(center), (float(half_widths[0]), float(half_widths[1])),
                            0.0, resolution, h)

    @staticmethod
    def disk(center: complex, radius: float, resolution: int = 16,
             h: float = 1e-3) -> "PlanarDomain":
        return PlanarDomain("disk", complex(center), (0.0, 0.0), float(radius), resolution, h)

    @property
    def scale(self) -> float:
        if self.kind == "rectangle":
            return max(self.half_widths)
        return self.radius

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        z = complex(z)
        if self.kind == "rectangle":
            hx, hy = self.half_widths
            return (abs(z.real - self.center.real) <= hx - margin
                    and abs(z.imag - self.center.imag) <= hy - margin)
        return abs(z - self.center) <= self.radius - margin

    def grid(self, margin: Optional[float] = None, resolution: Optional[int] = None) -> list[complex]:
        """Row-major sample points, boundary margin excluded.

        The default margin of 2h leaves room for nested finite-difference
        stencils; pass margin=0.0 to sample the full domain.
        """
        m = 2.0 * self.h if margin is None else float(margin)
        res = self.resolution if resolution is None else int(resolution)
        if self.kind == "rectangle":
            hx, hy = self.half_widths[0] - m, self.half_widths[1] - m
            if hx <= 0 or hy <= 0:
                raise DomainError("margin swallows the whole rectangle")
            xs = np.linspace(self.center.real - hx, self.center.real + hx, res)
            ys = np.linspace(self.center.imag - hy, self.center.imag + hy, res)
            return [complex(x, y) for y in ys for x in xs]
        r = self.radius - m
        if r <= 0:
            raise DomainError("margin swallows the whole disk")
        xs = np.linspace(self.center.real - r, self.center.real + r, res)
        ys = np.linspace(self.center.imag - r, self.center.imag + r, res)
        return [complex(x, y) for y in ys for x in xs
                if abs(complex(x, y) - self.center) <= r]

    def structured_grid(self, resolution: Optional[int] = None) -> tuple[list[complex], int, int]:
        """Full rectangular vertex grid (rows, cols) for meshing.

        Disk domains use their inscribed axis-aligned rectangle so the mesh
        stays structured.
        """
        res = self.resolution if resolution is None else int(resolution)
        if self.kind == "rectangle":
            hx, hy = self.half_widths
        else:
            hx = hy = self.radius / math.sqrt(2.0)
        xs = np.linspace(self.center.real - hx, self.center.real + hx, res)
        ys = np.linspace(self.center.imag - hy, self.center.imag + hy, res)
        return [complex(x, y) for y in ys for x in xs], res, res


# ---------------------------------------------------------------------------
# surface maps


class SurfaceMap:
    """Map from a planar domain into the quaternions, with derivatives."""

    def __init__(self, evaluate: Callable[[complex], Quaternion],
                 jet1: Optional[Callable[[complex], Jet1]] = None,
                 jet2: Optional[Callable[[complex], Jet2]] = None,
                 h: float = 1e-3, tag: str = "custom",
                 branch_tol: float = 1e-8):
        self._evaluate = evaluate
        self._jet1 = jet1
        self._jet2 = jet2
        self.h = float(h)
        self.tag = tag
        self.branch_tol = float(branch_tol)

    @property
    def mode(self) -> str:
        return "analytic" if self._jet1 or self._jet2 else "finite-difference"

    @property
    def has_jet2(self) -> bool:
        return self._jet2 is not None

    def __call__(self, z: complex):
        return self._evaluate(complex(z))

    def with_h(self, h: float) -> "SurfaceMap":
        return SurfaceMap(self._evaluate, self._jet1, self._jet2, h, self.tag, self.branch_tol)

    def finite_difference_view(self, h: Optional[float] = None) -> "SurfaceMap":
        """Same evaluator with analytic jets dropped (forces fd derivatives)."""
        return SurfaceMap(self._evaluate, None, None, h or self.h, self.tag, self.branch_tol)

    def jet1_at(self, z: complex) -> Jet1:
        z = complex(z)
        if self._jet1 is not None:
            return self._jet1(z)
        if self._jet2 is not None:
            return self._jet2(z).lower()
        h = self.h
        v = self._require(z)
        fx = (self._require(z + h) - self._require(z - h)) / (2.0 * h)
        fy = (self._require(z + h * 1j) - self._require(z - h * 1j)) / (2.0 * h)
        return Jet1(v, fx, fy)

    def jet2_at(self, z: complex) -> Jet2:
        if self._jet2 is None:
            raise DomainError("map carries no analytic second-order jets")
        return self._jet2(complex(z))

    def _require(self, z: complex) -> Quaternion:
        v = self._evaluate(z)
        if not isinstance(v, Quaternion):
            raise SingularPointError(f"map has a pole at {z}")
        return v

    # constructors

    @staticmethod
    def from_callable(fn: Callable[[complex], Quaternion], h: float = 1e-3,
                      tag: str = "custom") -> "SurfaceMap":
        return SurfaceMap(fn, h=h, tag=tag)

    @staticmethod
    def from_jet1(fn: Callable[[complex], Jet1], h: float = 1e-3,
                  tag: str = "custom") -> "SurfaceMap":
        return SurfaceMap(lambda z: fn(z).v, jet1=fn, h=h, tag=tag)

    @staticmethod
    def from_jet2(fn: Callable[[complex], Jet2], h: float = 1e-3,
                  tag: str = "custom") -> "SurfaceMap":
        return SurfaceMap(lambda z: fn(z).v, jet1=lambda z: fn(z).lower(),
                          jet2=fn, h=h, tag=tag)


def graph_map(lam0: RationalMap, lam1: RationalMap, h: float = 1e-3,
              tag: str = "custom") -> SurfaceMap:
    """The map z -> lam0(z) + lam1(z) j for rational lam0, lam1."""
    d0, dd0 = lam0.derivative(), None
    d1, dd1 = lam1.derivative(), None
    dd0 = d0.derivative()
    dd1 = d1.derivative()

    def jet2(z: complex) -> Jet2:
        vals = [r.eval(z) for r in (lam0, d0, dd0, lam1, d1, dd1)]
        if any(is_infinity(v) for v in vals):
            raise SingularPointError(f"pole at {z}")
        a = holomorphic_jet2(vals[0], vals[1], vals[2])
        b = holomorphic_jet2(vals[3], vals[4], vals[5])
        return a + b * const2(J)

    def evaluate(z: complex):
        v0, v1 = lam0.eval(z), lam1.eval(z)
        if is_infinity(v0) or is_infinity(v1):
            return INFINITY
        j = Quaternion(0, 0, 1, 0)
        return Quaternion(v0.real, v0.imag, 0, 0) + Quaternion(v1.real, v1.imag, 0, 0) * j

    return SurfaceMap(evaluate, jet1=lambda z: jet2(z).lower(), jet2=jet2, h=h, tag=tag)


# ---------------------------------------------------------------------------
# jets and normals


@dataclass(frozen=True)
class Jet:
    z: complex
    value: Quaternion
    fx: Quaternion
    fy: Quaternion
    N: Optional[Quaternion]
    R: Optional[Quaternion]
    branch: bool


def jet_at(f: SurfaceMap, z: complex) -> Jet:
    """First-order data and normals of f at z.

    At branch points (|f_x| below the branch tolerance) the normals are
    reported absent rather than computed from noise.
    """
    j = f.jet1_at(complex(z))
    if j.dx.norm() < f.branch_tol:
        return Jet(complex(z), j.v, j.dx, j.dy, None, None, True)
    fx_inv = j.dx.inverse()
    n = j.dy * fx_inv
    r = -(fx_inv * j.dy)
    return Jet(complex(z), j.v, j.dx, j.dy, n, r, False)


def conformal_residual_at(f: SurfaceMap, z: complex) -> tuple[float, bool]:
    """Dimensionless conformality defect at z; zero iff conformal there.

    Returns (residual, branch_flag); a point with vanishing differential
    reports residual 0 with the flag set.
    """
    j = f.jet1_at(complex(z))
    nx, ny = j.dx.norm(), j.dy.norm()
    denom = math.sqrt(nx * nx + ny * ny)
    if denom < f.branch_tol:
        return 0.0, True
    return (abs(nx - ny) + abs(q_inner(j.dx, j.dy))) / denom, False


# ---------------------------------------------------------------------------
# curvature


@dataclass(frozen=True)
class CurvatureSample:
    z: complex
    K: float
    Kperp: float
    H: Quaternion
    area: float
    Nsigma: float
    Rsigma: float

    @property
    def H_norm_sq(self) -> float:
        return self.H.norm_sq()


_SIGN_CACHE: dict[str, int] = {}


def inverse_stereo_surface(h: float = 1e-3) -> SurfaceMap:
    """The round unit sphere, parametrized by inverse stereographic projection."""

    def jet2(z: complex) -> Jet2:
        x, y = coordinate_jets2(z)
        denom = x * x + y * y + 1
        num = x.scale(2.0) * const2(I) + y.scale(2.0) * const2(J) + (x * x + y * y - 1) * const2(K)
        return num * denom.inverse()

    def evaluate(z: complex) -> Quaternion:
        x, y = z.real, z.imag
        s = x * x + y * y
        d = s + 1.0
        return Quaternion(0.0, 2.0 * x / d, 2.0 * y / d, (s - 1.0) / d)

    return SurfaceMap(evaluate, jet1=lambda z: jet2(z).lower(), jet2=jet2,
                      h=h, tag="custom")


def curvature_sign() -> int:
    """Global orientation sign, fixed by K = +1 on the round unit sphere."""
    if "s" not in _SIGN_CACHE:
        f = inverse_stereo_surface()
        raw = _curvature_raw(f, 0.37 + 0.21j)
        _SIGN_CACHE["s"] = 1 if raw.K > 0 else -1
    return _SIGN_CACHE["s"]


def _normal_derivatives(f: SurfaceMap, z: complex) -> tuple[Quaternion, Quaternion, OneFormValue, OneFormValue]:
    """(N, R, dN, dR) at z, analytic when second-order jets exist."""
    if f.has_jet2:
        jj = f.jet2_at(z)
        fx, fy = jj.dx, jj.dy
        if fx.norm() < f.branch_tol:
            raise SingularPointError(f"branch point at {z}")
        fxi = fx.inverse()
        n = fy * fxi
        r = -(fxi * fy)
        nx = jj.dxy * fxi - fy * fxi * jj.dxx * fxi
        ny = jj.dyy * fxi - fy * fxi * jj.dxy * fxi
        rx = fxi * jj.dxx * fxi * fy - fxi * jj.dxy
        ry = fxi * jj.dxy * fxi * fy - fxi * jj.dyy
        return n, r, OneFormValue(nx, ny), OneFormValue(rx, ry)
    h = f.h

    def normals(w: complex) -> tuple[Quaternion, Quaternion]:
        j = jet_at(f, w)
        if j.branch:
            raise SingularPointError(f"branch point at {w}")
        return j.N, j.R

    n, r = normals(z)
    npx, rpx = normals(z + h)
    nmx, rmx = normals(z - h)
    npy, rpy = normals(z + h * 1j)
    nmy, rmy = normals(z - h * 1j)
    dn = OneFormValue((npx - nmx) / (2 * h), (npy - nmy) / (2 * h))
    dr = OneFormValue((rpx - rmx) / (2 * h), (rpy - rmy) / (2 * h))
    return n, r, dn, dr


def _curvature_raw(f: SurfaceMap, z: complex) -> CurvatureSample:
    j = f.jet1_at(z)
    if j.dx.norm() < f.branch_tol:
        raise SingularPointError(f"branch point at {z}: curvature undefined")
    n, r, dn, dr = _normal_derivatives(f, z)
    area = j.dx.norm_sq()
    nsigma = metric_pair(star(dn), dn.left_mul(n))
    rsigma = metric_pair(star(dr), dr.left_mul(r))
    half = (dn.wx - n * dn.wy) * 0.5
    h_vec = (-(j.dx.inverse()) * n * half).conj()
    return CurvatureSample(
        z=z,
        K=(rsigma + nsigma) / (2.0 * area),
        Kperp=(rsigma - nsigma) / (2.0 * area),
        H=h_vec,
        area=area,
        Nsigma=nsigma,
        Rsigma=rsigma,
    )


def curvature_at(f: SurfaceMap, z: complex, conf_tol: float = 1e-5) -> CurvatureSample:
    """Gauss curvature, normal curvature, and mean curvature vector at z.

    The curvature identities presume conformality, so points whose
    conformal residual exceeds conf_tol are rejected.
    """
    res, branch = conformal_residual_at(f, z)
    if branch:
        raise SingularPointError(f"branch point at {z}: curvature undefined")
    if res > conf_tol:
        raise NonConformalError(
            f"conformal residual {res:.3e} at {z} exceeds {conf_tol:.1e}"
        )
    raw = _curvature_raw(f, complex(z))
    s = float(curvature_sign())
    return CurvatureSample(raw.z, s * raw.K, s * raw.Kperp, raw.H,
                           raw.area, raw.Nsigma, raw.Rsigma)


def wintgen_slack_at(f: SurfaceMap, z: complex, conf_tol: float = 1e-5) -> float:
    """|H|^2 - K - |Kperp| at z; nonnegative for conformal maps, zero iff
    the curvature ellipse there is a circle."""
    c = curvature_at(f, z, conf_tol)
    return c.H_norm_sq - c.K - abs(c.Kperp)


# ---------------------------------------------------------------------------
# zero/pole order fitting


@dataclass(frozen=True)
class OrderFit:
    order: int
    leading: float
    residual: float
    slope: float


def vanish_order_fit(f: SurfaceMap, p: complex, radii: Iterable[float],
                     samples: int = 64) -> OrderFit:
    """Vanishing/pole order of f at p from circle maxima.

    Fits the slope of log max_{|z-p|=r} |f| against log r by least squares
    and rounds to the nearest integer (negative slope = pole order).  Circle
    maxima rather than rays keep the fit robust against directional zeros
    of single components.
    """
    rs = [float(r) for r in radii]
    if len(rs) < 2 or any(r <= 0 for r in rs) or any(a <= b for a, b in zip(rs, rs[1:])):
        raise DomainError("radii must be a decreasing list of positive reals")
    p = complex(p)
    logs_r, logs_m = [], []
    for r in rs:
        best = 0.0
        for k in range(samples):
            z = p + r * cmath.exp(2j * math.pi * k / samples)
            v = f(z)
            if not isinstance(v, Quaternion):
                raise DomainError(f"pole on sample circle of radius {r}")
            best = max(best, v.norm())
        if best == 0.0:
            raise DomainError(f"map vanishes identically on circle of radius {r}")
        logs_r.append(math.log(r))
        logs_m.append(math.log(best))
    a = np.stack([np.array(logs_r), np.ones(len(rs))], axis=1)
    b = np.array(logs_m)
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    order = round(slope)
    if abs(slope - order) > 0.25:
        raise InconclusiveFitError(
            f"log-log slope {slope:.3f} is not near an integer order"
        )
    fit = a @ coef
    residual = float(np.sqrt(np.mean((b - fit) ** 2)))
    return OrderFit(order=order, leading=math.exp(intercept), residual=residual, slope=slope)


# ---------------------------------------------------------------------------
# field dumps


CSV_COLUMNS = [
    "z_re", "z_im", "f_w", "f_x", "f_y", "f_z",
    "N_i", "N_j", "N_k", "R_i", "R_j", "R_k",
    "K", "Kperp", "H_normsq", "conf_residual", "wintgen_slack",
]


def field_rows(f: SurfaceMap, points: Iterable[complex],
               conf_tol: float = 1e-5) -> list[list[float]]:
    """Per-point geometric fields in CSV_COLUMNS order; nan where undefined."""
    rows = []
    nan = float("nan")
    for z in points:
        z = complex(z)
        try:
            j = jet_at(f, z)
        except SingularPointError:
            rows.append([z.real, z.imag] + [nan] * (len(CSV_COLUMNS) - 2))
            continue
        res, _branch = conformal_residual_at(f, z)
        vals = [z.real, z.imag, *j.value.components()]
        if j.N is None:
            vals += [nan] * 6
        else:
            vals += [j.N.x, j.N.y, j.N.z, j.R.x, j.R.y, j.R.z]
        try:
            c = curvature_at(f, z, conf_tol)
            slack = c.H_norm_sq - c.K - abs(c.Kperp)
            vals += [c.K, c.Kperp, c.H_norm_sq, res, slack]
        except (SingularPointError, NonConformalError):
            vals += [nan, nan, nan, res, nan]
        rows.append(vals)
    return rows
