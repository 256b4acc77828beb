"""Pointwise calculus of quaternion-valued one-forms on a planar domain.

A one-form is represented by its values on the coordinate fields (dx, dy)
of the global planar coordinate z = x + y i; the complex structure acts by
J dx = dy, J dy = -dx, so the star operator is (wx, wy) -> (wy, -wx).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .quat import Quaternion, q_inner

__all__ = [
    "OneFormValue",
    "TwoFormValue",
    "star",
    "n_part",
    "wedge_pair",
    "metric_pair",
    "one_form_norm",
]


@dataclass(frozen=True)
class OneFormValue:
    """Value of an H-valued one-form on (dx, dy)."""

    wx: Quaternion
    wy: Quaternion

    def __add__(self, other: "OneFormValue") -> "OneFormValue":
        return OneFormValue(self.wx + other.wx, self.wy + other.wy)

    def __sub__(self, other: "OneFormValue") -> "OneFormValue":
        return OneFormValue(self.wx - other.wx, self.wy - other.wy)

    def __neg__(self) -> "OneFormValue":
        return OneFormValue(-self.wx, -self.wy)

    def left_mul(self, q: Quaternion) -> "OneFormValue":
        return OneFormValue(q * self.wx, q * self.wy)

    def right_mul(self, q: Quaternion) -> "OneFormValue":
        return OneFormValue(self.wx * q, self.wy * q)

    def conj(self) -> "OneFormValue":
        return OneFormValue(self.wx.conj(), self.wy.conj())

    def norm(self) -> float:
        return (self.wx.norm_sq() + self.wy.norm_sq()) ** 0.5


@dataclass(frozen=True)
class TwoFormValue:
    """Value of a two-form on the ordered pair (dx, dy).

    q is the quaternionic wedge; re is the real inner-product pairing of
    the same antisymmetrization.
    """

    q: Quaternion
    re: float


def star(omega: OneFormValue) -> OneFormValue:
    """Composition with the complex structure: (wx, wy) -> (wy, -wx)."""
    return OneFormValue(omega.wy, -omega.wx)


def _check_unit_imaginary(n: Quaternion, tol: float = 1e-10) -> None:
    if abs(n.w) > tol or abs(n.norm() - 1.0) > tol:
        raise DomainError("N must be unit imaginary (N^2 = -1)")


def n_part(
    omega: OneFormValue, n: Quaternion, side: str = "left", sign: int = 1
) -> OneFormValue:
    """Projection of omega onto one of the four N-type components.

    side "left", sign +1 gives (omega - N * star omega)/2, which satisfies
    star(part) = N * part; side "right" multiplies star omega by N on the
    right instead and satisfies star(part) = part * N.  sign -1 replaces N
    by -N, producing the complementary summand of the decomposition.
    """
    _check_unit_imaginary(n)
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    m = n if sign == 1 else -n
    s = star(omega)
    if side == "left":
        return OneFormValue(
            (omega.wx - m * s.wx) * 0.5,
            (omega.wy - m * s.wy) * 0.5,
        )
    if side == "right":
        return OneFormValue(
            (omega.wx - s.wx * m) * 0.5,
            (omega.wy - s.wy * m) * 0.5,
        )
    raise DomainError(f"side must be 'left' or 'right', got {side!r}")


def wedge_pair(omega: OneFormValue, eta: OneFormValue) -> TwoFormValue:
    """Wedge product evaluated on (dx, dy), with its real pairing."""
    q = omega.wx * eta.wy - omega.wy * eta.wx
    re = q_inner(omega.wx, eta.wy) - q_inner(omega.wy, eta.wx)
    return TwoFormValue(q, re)


def metric_pair(omega: OneFormValue, eta: OneFormValue) -> float:
    """Coordinate-frame inner product of two one-forms.

    Defined as (⟨omega(dx), eta(dx)⟩ + ⟨omega(dy), eta(dy)⟩)/2.  Paired as
    metric_pair(star dN, N dN) this produces the pullback density of the
    unit-sphere area element relative to dx∧dy, which is what the curvature
    identities consume.  (The wedge-style antisymmetrization of the same
    arguments vanishes identically because of the star symmetry, so it
    cannot be the pairing those identities refer to.)
    """
    return 0.5 * (q_inner(omega.wx, eta.wx) + q_inner(omega.wy, eta.wy))


def one_form_norm(omega: OneFormValue) -> float:
    return omega.norm()
