"""Rational trigonometry primitives.

Quadrance is squared distance, spread is squared sine. Everything here except
the angle converters at the bottom uses only +, -, *, / (and sqrt for the
Cross law roots).
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

from rtpose.errors import DomainError, InconsistentTriangleError

Vec3 = Sequence[float]
Quadrance = float
Spread = float

SPREAD_LAW_TOLERANCE = 1e-9


class SignedSpread(NamedTuple):
    """A spread plus the sign of the cosine it was computed from.

    Spreads cannot tell an angle from its supplement; the sign keeps that bit.
    """

    spread: float
    cosine_sign: int

    @property
    def cosine(self) -> float:
        return self.cosine_sign * math.sqrt(max(0.0, 1.0 - self.spread))


def _sign(value: float) -> int:
    return int(value > 0) - int(value < 0)


def dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a: Vec3, b: Vec3) -> tuple[float, float, float]:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def quadrance(a: Vec3, b: Vec3) -> Quadrance:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    dz = a[2] - b[2]
    return dx * dx + dy * dy + dz * dz


def spread_between(v1: Vec3, v2: Vec3) -> SignedSpread:
    """Spread between two direction vectors, keeping the cosine sign."""
    q1 = float(dot(v1, v1))
    q2 = float(dot(v2, v2))
    if q1 == 0.0 or q2 == 0.0:
        raise DomainError("spread of a zero-length vector is undefined")
    d = float(dot(v1, v2))
    s = 1.0 - (d * d) / (q1 * q2)
    # rounding can push s a hair outside [0, 1]
    s = min(1.0, max(0.0, s))
    sign = _sign(d)
    if sign == 0:
        s = 1.0
    elif s == 1.0:
        sign = 0
    return SignedSpread(s, sign)


def cross_law_q3(q1: Quadrance, q2: Quadrance, s3: Spread) -> tuple[Quadrance, Quadrance]:
    """Both roots Q3 of (Q1 + Q2 - Q3)^2 = 4 Q1 Q2 (1 - s3), smaller first."""
    if q1 < 0 or q2 < 0:
        raise DomainError("quadrances must be non-negative")
    if not 0.0 <= s3 <= 1.0:
        raise DomainError(f"spread {s3} outside [0, 1]")
    r = 2.0 * math.sqrt(q1 * q2 * (1.0 - s3))
    return (q1 + q2 - r, q1 + q2 + r)


def spread_law_missing(s_known: Spread, q_known: Quadrance, q_target: Quadrance) -> Spread:
    """Spread opposite ``q_target`` given a spread/quadrance pair of the same triangle."""
    if q_known <= 0:
        raise DomainError("q_known must be positive")
    s = s_known * q_target / q_known
    if s > 1.0 + SPREAD_LAW_TOLERANCE:
        raise InconsistentTriangleError(
            f"spread law gives {s:.12g} > 1; the quadrances and spread are not one triangle"
        )
    return min(s, 1.0)


def to_quadrance(d: float) -> Quadrance:
    return d * d


def to_distance(q: Quadrance) -> float:
    if q < 0:
        raise DomainError(f"negative quadrance {q}")
    return math.sqrt(q)


def to_spread(angle: float) -> Spread:
    s = math.sin(angle)
    return s * s


def to_angle(s: SignedSpread) -> float:
    """Angle in [0, pi] whose squared sine is ``s.spread`` and cosine has ``s.cosine_sign``."""
    acute = math.asin(math.sqrt(min(1.0, max(0.0, s.spread))))
    if s.cosine_sign < 0:
        return math.pi - acute
    return acute
