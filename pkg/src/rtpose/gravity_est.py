"""Gravity direction in the camera frame from the vanishing point of verticals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rtpose.errors import AmbiguousSignError, DomainError, ParallelLinesError
from rtpose.rt_core import SignedSpread, Vec3, cross, dot, spread_between

Pixel = Sequence[float]
ImageSegment = tuple[Pixel, Pixel]

DEFAULT_DOWN_HINT = (0.0, 1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))
PARALLEL_TOL = 1e-9


@dataclass(frozen=True)
class CameraIntrinsics:
    """Zero-skew pinhole intrinsics in pixels."""

    fx: float = 600.0
    fy: float = 600.0
    cx: float = 320.0
    cy: float = 240.0

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError("focal lengths must be positive")

    def back_project(self, uv: Pixel) -> np.ndarray:
        return np.array([(uv[0] - self.cx) / self.fx, (uv[1] - self.cy) / self.fy, 1.0])

    def to_dict(self) -> dict:
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy}


def _homogeneous_line(seg: ImageSegment) -> np.ndarray:
    a, b = seg
    if a[0] == b[0] and a[1] == b[1]:
        raise DomainError("segment endpoints coincide")
    return np.cross([a[0], a[1], 1.0], [b[0], b[1], 1.0])


def vanishing_point(s1: ImageSegment, s2: ImageSegment) -> tuple[float, float]:
    """Intersection of the infinite lines through two image segments."""
    l1 = _homogeneous_line(s1)
    l2 = _homogeneous_line(s2)
    # normalise so the w test is independent of pixel scale
    l1 = l1 / np.linalg.norm(l1[:2])
    l2 = l2 / np.linalg.norm(l2[:2])
    p = np.cross(l1, l2)
    # with unit line normals, |w| is the sine of the angle between the lines
    if abs(p[2]) < PARALLEL_TOL:
        raise ParallelLinesError("image lines are parallel; no finite vanishing point")
    return (float(p[0] / p[2]), float(p[1] / p[2]))


def gravity_from_vp(
    vp: Pixel, k: CameraIntrinsics, down_hint: Vec3 = DEFAULT_DOWN_HINT
) -> np.ndarray:
    """Unit camera-frame direction of the vertical through ``vp``, oriented downward."""
    d = k.back_project(vp)
    d = d / np.linalg.norm(d)
    h = np.asarray(down_hint, dtype=float)
    s = float(d @ h)
    if abs(s) <= 1e-9 * np.linalg.norm(h):
        raise AmbiguousSignError("down hint is orthogonal to the vertical direction")
    return d if s > 0 else -d


def gravity_from_segments(
    s1: ImageSegment, s2: ImageSegment, k: CameraIntrinsics, down_hint: Vec3 = DEFAULT_DOWN_HINT
) -> np.ndarray:
    return gravity_from_vp(vanishing_point(s1, s2), k, down_hint)


def spreads_vs_gravity(
    b1: Vec3, b2: Vec3, g: Vec3
) -> tuple[float, float, SignedSpread, int]:
    """Spreads of each bearing against gravity, the inter-bearing spread and the mirror bit.

    ``g`` must point down; the lateral sign is sign((b1 x b2) . g).
    """
    p1 = spread_between(b1, g).spread
    p2 = spread_between(b2, g).spread
    q12 = spread_between(b1, b2)
    t = dot(cross(b1, b2), g)
    return p1, p2, q12, int(t > 0) - int(t < 0)


def angle_between(a: Vec3, b: Vec3) -> float:
    """Angle in radians, accurate for tiny angles."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return math.atan2(float(np.linalg.norm(np.cross(a, b))), float(a @ b))
