"""Quaternion algebra over double-precision reals.

Quaternions are written ``a = w + x i + y j + z k`` with the Hamilton
relations ``i j = k``, ``j k = i``, ``k i = j`` and ``i^2 = j^2 = k^2 = -1``.
The real span of ``1`` models the real line, the span of ``i, j, k`` models
three-space, and the full algebra models four-space.  Complex numbers embed
as ``w + x i``; a quaternion splits as a pair of complex numbers either as
``c0 + c1 j`` or as ``c0 + j c1`` (the two splits differ by a conjugation
of the second component).

All operations are pure, allocate fresh values, and carry no tolerances:
results are exact up to rounding.
"""

from __future__ import annotations

import math
from typing import Iterable

from .errors import DomainError

__all__ = [
    "Quaternion",
    "ZERO",
    "ONE",
    "I",
    "J",
    "K",
    "q_mul",
    "q_inv",
    "q_conj",
    "q_norm",
    "q_inner",
    "q_rotation_taking",
    "rotation_taking_any",
    "from_complex",
    "from_complex_pair_right",
    "from_complex_pair_left",
]


class Quaternion:
    """A quaternion with components along 1, i, j, k."""

    __slots__ = ("w", "x", "y", "z")

    def __init__(self, w: float = 0.0, x: float = 0.0, y: float = 0.0, z: float = 0.0):
        self.w = float(w)
        self.x = float(x)
        self.y = float(y)
        self.z = float(z)

    # -- value semantics ---------------------------------------------------

    def __repr__(self) -> str:
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Quaternion):
            return NotImplemented
        return (
            self.w == other.w
            and self.x == other.x
            and self.y == other.y
            and self.z == other.z
        )

    def __hash__(self):
        return hash((self.w, self.x, self.y, self.z))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Quaternion | float") -> "Quaternion":
        o = _promote(other)
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other: "Quaternion | float") -> "Quaternion":
        o = _promote(other)
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other: "Quaternion | float") -> "Quaternion":
        return _promote(other) - self

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: "Quaternion | float") -> "Quaternion":
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        a, b = self, other
        return Quaternion(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )

    def __rmul__(self, other: float) -> "Quaternion":
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __truediv__(self, other: float) -> "Quaternion":
        if isinstance(other, (int, float)):
            return Quaternion(self.w / other, self.x / other, self.y / other, self.z / other)
        return NotImplemented

    # -- structure ---------------------------------------------------------

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_sq(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def inverse(self) -> "Quaternion":
        n2 = self.norm_sq()
        if n2 == 0.0:
            raise DomainError("zero quaternion has no inverse")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def real(self) -> float:
        return self.w

    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.x, self.y, self.z)

    def normalized(self) -> "Quaternion":
        n = self.norm()
        if n == 0.0:
            raise DomainError("cannot normalize the zero quaternion")
        return self / n

    def is_unit(self, tol: float = 1e-10) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def is_imaginary(self, tol: float = 1e-10) -> bool:
        return abs(self.w) <= tol

    # -- conversions -------------------------------------------------------

    def components(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    def imag_components(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def complex_pair_right(self) -> tuple[complex, complex]:
        """Split as c0 + c1 j."""
        return (complex(self.w, self.x), complex(self.y, self.z))

    def complex_pair_left(self) -> tuple[complex, complex]:
        """Split as c0 + j c1."""
        return (complex(self.w, self.x), complex(self.y, -self.z))

    @staticmethod
    def from_components(c: Iterable[float]) -> "Quaternion":
        w, x, y, z = c
        return Quaternion(w, x, y, z)


def _promote(v) -> Quaternion:
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, (int, float)):
        return Quaternion(v, 0.0, 0.0, 0.0)
    if isinstance(v, complex):
        return Quaternion(v.real, v.imag, 0.0, 0.0)
    raise TypeError(f"cannot interpret {type(v).__name__} as a quaternion")


ZERO = Quaternion(0.0, 0.0, 0.0, 0.0)
ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def from_complex(c: complex) -> Quaternion:
    """Embed a complex number as w + x i."""
    c = complex(c)
    return Quaternion(c.real, c.imag, 0.0, 0.0)


def from_complex_pair_right(c0: complex, c1: complex) -> Quaternion:
    """Assemble c0 + c1 j."""
    c0, c1 = complex(c0), complex(c1)
    return Quaternion(c0.real, c0.imag, c1.real, c1.imag)


def from_complex_pair_left(c0: complex, c1: complex) -> Quaternion:
    """Assemble c0 + j c1."""
    c0, c1 = complex(c0), complex(c1)
    return Quaternion(c0.real, c0.imag, c1.real, -c1.imag)


def q_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product a * b."""
    return a * b


def q_conj(a: Quaternion) -> Quaternion:
    return a.conj()


def q_norm(a: Quaternion) -> float:
    return a.norm()


def q_inv(a: Quaternion) -> Quaternion:
    """Multiplicative inverse; raises DomainError on zero."""
    return a.inverse()


def q_inner(a: Quaternion, b: Quaternion) -> float:
    """Euclidean inner product of four-space, Re(conj(a) * b)."""
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z


def q_rotation_taking(u: Quaternion, v: Quaternion, tol: float = 1e-10) -> Quaternion:
    """Unit quaternion a with a u a^-1 = v for unit imaginary u, v.

    Uses the branch-free construction a = normalize(1 - v u), which is
    degenerate exactly when v = -u.  The antipodal case raises; compose two
    quarter-turn rotations instead (see rotation_taking_any).
    """
    for name, q in (("u", u), ("v", v)):
        if not q.is_unit(tol) or not q.is_imaginary(tol):
            raise DomainError(f"{name} must be a unit imaginary quaternion")
    a = ONE - v * u
    n = a.norm()
    if n < tol:
        raise DomainError(
            "antipodal inputs: normalization is degenerate; "
            "compose two rotations via rotation_taking_any"
        )
    return a / n


def rotation_taking_any(u: Quaternion, v: Quaternion, tol: float = 1e-10) -> Quaternion:
    """Like q_rotation_taking but handles the antipodal case v = -u.

    For antipodal inputs the rotation is built as a composition of two
    quarter turns through an axis orthogonal to u.
    """
    a = ONE - v * u
    if a.norm() >= tol:
        return q_rotation_taking(u, v, tol)
    # pick a unit imaginary w orthogonal to u; u x w is then a midpoint
    basis = (I, J, K)
    w = min(basis, key=lambda e: abs(q_inner(u, e)))
    mid = (u * w - w * u) * 0.5  # cross product, orthogonal to u
    mid = mid.normalized()
    return q_rotation_taking(mid, v, tol) * q_rotation_taking(u, mid, tol)
