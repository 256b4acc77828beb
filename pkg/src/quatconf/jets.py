"""Quaternion-valued jets: values with first (and second) partials.

A Jet2 carries (v, dx, dy, dxx, dxy, dyy) with respect to the planar
coordinate z = x + y i; products use the noncommutative Leibniz rule, so
any expression assembled from jets differentiates itself.  Jets of
holomorphic building blocks come from complex derivatives: for holomorphic
P, the partials of z -> P(z) are P' along x and P' i along y.
"""

from __future__ import annotations

from dataclasses import dataclass

from .quat import Quaternion, from_complex

__all__ = ["Jet1", "Jet2", "const1", "const2", "holomorphic_jet1", "holomorphic_jet2", "coordinate_jets2"]

_Q = Quaternion


def _pq(v) -> Quaternion:
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, complex):
        return from_complex(v)
    return Quaternion(float(v), 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Jet1:
    v: Quaternion
    dx: Quaternion
    dy: Quaternion

    def __add__(self, other):
        o = _j1(other)
        return Jet1(self.v + o.v, self.dx + o.dx, self.dy + o.dy)

    __radd__ = __add__

    def __sub__(self, other):
        o = _j1(other)
        return Jet1(self.v - o.v, self.dx - o.dx, self.dy - o.dy)

    def __rsub__(self, other):
        return _j1(other) - self

    def __neg__(self):
        return Jet1(-self.v, -self.dx, -self.dy)

    def __mul__(self, other):
        o = _j1(other)
        return Jet1(
            self.v * o.v,
            self.dx * o.v + self.v * o.dx,
            self.dy * o.v + self.v * o.dy,
        )

    def __rmul__(self, other):
        return _j1(other) * self

    def scale(self, t: float) -> "Jet1":
        return Jet1(self.v * t, self.dx * t, self.dy * t)

    def inverse(self) -> "Jet1":
        b = self.v.inverse()
        return Jet1(b, -(b * self.dx * b), -(b * self.dy * b))

    def conj(self) -> "Jet1":
        return Jet1(self.v.conj(), self.dx.conj(), self.dy.conj())


@dataclass(frozen=True)
class Jet2:
    v: Quaternion
    dx: Quaternion
    dy: Quaternion
    dxx: Quaternion
    dxy: Quaternion
    dyy: Quaternion

    def lower(self) -> Jet1:
        return Jet1(self.v, self.dx, self.dy)

    def partial_x(self) -> Jet1:
        """The x-partial as a Jet1 (its own first partials are second partials)."""
        return Jet1(self.dx, self.dxx, self.dxy)

    def partial_y(self) -> Jet1:
        return Jet1(self.dy, self.dxy, self.dyy)

    def __add__(self, other):
        o = _j2(other)
        return Jet2(
            self.v + o.v, self.dx + o.dx, self.dy + o.dy,
            self.dxx + o.dxx, self.dxy + o.dxy, self.dyy + o.dyy,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = _j2(other)
        return Jet2(
            self.v - o.v, self.dx - o.dx, self.dy - o.dy,
            self.dxx - o.dxx, self.dxy - o.dxy, self.dyy - o.dyy,
        )

    def __rsub__(self, other):
        return _j2(other) - self

    def __neg__(self):
        return Jet2(-self.v, -self.dx, -self.dy, -self.dxx, -self.dxy, -self.dyy)

    def __mul__(self, other):
        a, b = self, _j2(other)
        return Jet2(
            a.v * b.v,
            a.dx * b.v + a.v * b.dx,
            a.dy * b.v + a.v * b.dy,
            a.dxx * b.v + a.dx * b.dx + a.dx * b.dx + a.v * b.dxx,
            a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
            a.dyy * b.v + a.dy * b.dy + a.dy * b.dy + a.v * b.dyy,
        )

    def __rmul__(self, other):
        return _j2(other) * self

    def scale(self, t: float) -> "Jet2":
        return Jet2(self.v * t, self.dx * t, self.dy * t,
                    self.dxx * t, self.dxy * t, self.dyy * t)

    def inverse(self) -> "Jet2":
        a = self
        b = a.v.inverse()
        bx = -(b * a.dx * b)
        by = -(b * a.dy * b)
        # from differentiating b_x = -b a_x b
        bxx = -(bx * a.dx * b) - (b * a.dxx * b) - (b * a.dx * bx)
        bxy = -(by * a.dx * b) - (b * a.dxy * b) - (b * a.dx * by)
        byy = -(by * a.dy * b) - (b * a.dyy * b) - (b * a.dy * by)
        return Jet2(b, bx, by, bxx, bxy, byy)

    def conj(self) -> "Jet2":
        return Jet2(self.v.conj(), self.dx.conj(), self.dy.conj(),
                    self.dxx.conj(), self.dxy.conj(), self.dyy.conj())


def _j1(v) -> Jet1:
    if isinstance(v, Jet1):
        return v
    if isinstance(v, Jet2):
        return v.lower()
    return const1(v)


def _j2(v) -> Jet2:
    if isinstance(v, Jet2):
        return v
    if isinstance(v, Jet1):
        raise TypeError("cannot promote a Jet1 to a Jet2")
    return const2(v)


_ZQ = Quaternion()


def const1(v) -> Jet1:
    return Jet1(_pq(v), _ZQ, _ZQ)


def const2(v) -> Jet2:
    return Jet2(_pq(v), _ZQ, _ZQ, _ZQ, _ZQ, _ZQ)


def holomorphic_jet1(value: complex, d1: complex) -> Jet1:
    """Jet of a holomorphic function from its complex derivative."""
    return Jet1(from_complex(value), from_complex(d1), from_complex(d1 * 1j))


def holomorphic_jet2(value: complex, d1: complex, d2: complex) -> Jet2:
    """Jet of a holomorphic function from its first two complex derivatives."""
    return Jet2(
        from_complex(value),
        from_complex(d1),
        from_complex(d1 * 1j),
        from_complex(d2),
        from_complex(d2 * 1j),
        from_complex(-d2),
    )


def coordinate_jets2(z: complex) -> tuple[Jet2, Jet2]:
    """Jets of the real coordinate functions x and y at z."""
    one = Quaternion(1.0)
    x = Jet2(Quaternion(z.real), one, _ZQ, _ZQ, _ZQ, _ZQ)
    y = Jet2(Quaternion(z.imag), _ZQ, one, _ZQ, _ZQ, _ZQ)
    return x, y
