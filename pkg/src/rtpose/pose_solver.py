"""Camera position from two ground points of known separation plus gravity.

The camera C, the two ground points P1, P2 and the foot of the vertical
through C form a tetrahedron with two right angles. Given the quadrance L
between P1 and P2, the spreads p1, p2 between each bearing and gravity, and
the spread q12 between the two bearings, the local solution is expressed as
quadrances: X (lateral), Y (along P1 -> P2) and H (height).

Local frame: P1 at the origin, +Y toward P2, +Z up, +X = Y x Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np

from rtpose import gravity_est
from rtpose.errors import DegenerateConfigurationError, DomainError, HorizontalBearingError
from rtpose.rt_core import SignedSpread, Vec3, quadrance

Backend = Literal["rational", "classical"]

DEGENERACY_EPS = 1e-12


@dataclass(frozen=True)
class TetrahedronMeasurement:
    L: float
    p1: float
    p2: float
    q12: SignedSpread
    lateral_sign: int

    def validate(self) -> None:
        if not self.L > 0:
            raise DomainError(f"L must be positive, got {self.L}")
        if self.p1 >= 1.0 or self.p2 >= 1.0:
            raise HorizontalBearingError("a bearing is perpendicular to gravity (spread 1)")
        if self.p1 < 0.0 or self.p2 < 0.0:
            raise DomainError("spreads must be non-negative")
        if not 0.0 <= self.q12.spread <= 1.0:
            raise DomainError("q12 spread outside [0, 1]")


@dataclass(frozen=True)
class LocalSolution:
    X: float
    Y: float
    H: float
    x_sign: int
    y_sign: int

    def coordinates(self) -> tuple[float, float, float]:
        """Signed (x, y, h) in the local frame, meters."""
        return (
            self.x_sign * math.sqrt(self.X),
            self.y_sign * math.sqrt(self.Y),
            math.sqrt(self.H),
        )


@dataclass(frozen=True)
class PoseEstimate:
    x: float
    y: float
    h: float
    backend: str = "rational"
    height_ok: bool = True


@dataclass(frozen=True)
class HeightRange:
    min_h: float = 0.440
    max_h: float = 0.550

    def __post_init__(self):
        if not 0 < self.min_h < self.max_h:
            raise ValueError(f"need 0 < min_h < max_h, got ({self.min_h}, {self.max_h})")


DEFAULT_HEIGHT_RANGE = HeightRange(0.440, 0.550)


def _sign(v: float) -> int:
    return int(v > 0) - int(v < 0)


def solve_rational(m: TetrahedronMeasurement) -> LocalSolution:
    """Solve the tetrahedron with quadrances and spreads only.

    The cross term sqrt((1-p1)(1-p2)(1-q12)) is taken with the sign of the
    cosine between the bearings, which keeps obtuse bearing pairs correct.
    """
    m.validate()
    c1 = 1.0 - m.p1
    c2 = 1.0 - m.p2
    r = m.q12.cosine_sign * math.sqrt(c1 * c2 * (1.0 - m.q12.spread))
    den = c1 + c2 - 2.0 * r
    if den <= DEGENERACY_EPS * (c1 + c2):
        raise DegenerateConfigurationError(
            "bearings coincide or the camera is on the ground line"
        )
    den2 = den * den
    H = c1 * c2 / den * m.L
    X = c1 * c2 * (m.q12.spread - c1 - c2 + 2.0 * r) / den2 * m.L
    y_num = c2 - r
    Y = y_num * y_num / den2 * m.L
    # X cancels to zero when the camera is above the P1-P2 line
    return LocalSolution(max(X, 0.0), Y, H, m.lateral_sign, _sign(y_num))


def solve_classical(m: TetrahedronMeasurement) -> LocalSolution:
    """Same solution, computed with distances, angles and cos/sin calls.

    The spreads are turned back into angles first, so the arithmetic follows
    the textbook formulation: 3 atan2 for the angles, then 11 cos/sin
    evaluations inside the three position formulas (14 transcendental
    calls per solve).
    """
    m.validate()
    # atan2 keeps the recovered angles well conditioned near 0, pi/2 and pi
    alpha1 = math.atan2(math.sqrt(m.p1), math.sqrt(1.0 - m.p1))
    alpha2 = math.atan2(math.sqrt(m.p2), math.sqrt(1.0 - m.p2))
    beta12 = math.atan2(math.sqrt(m.q12.spread), m.q12.cosine)
    l = math.sqrt(m.L)

    den = (
        math.cos(alpha1) ** 2
        + math.cos(alpha2) ** 2
        - 2.0 * math.cos(alpha1) * math.cos(alpha2) * math.cos(beta12)
    )
    c1 = 1.0 - m.p1
    if den <= DEGENERACY_EPS * (c1 + 1.0 - m.p2):
        raise DegenerateConfigurationError(
            "bearings coincide or the camera is on the ground line"
        )
    ca1 = math.cos(alpha1)
    ca2 = math.cos(alpha2)
    cb = math.cos(beta12)
    sb = math.sin(beta12)

    rad = sb * sb - ca1 * ca1 - ca2 * ca2 + 2.0 * ca1 * ca2 * cb
    x = ca1 * ca2 * math.sqrt(max(rad, 0.0)) / den * l
    y_num = ca2 * ca2 - ca1 * ca2 * cb
    y = y_num / den * l
    h = math.cos(alpha1) * math.cos(alpha2) / math.sqrt(den) * l
    return LocalSolution(x * x, y * y, h * h, m.lateral_sign, _sign(y_num))


_BACKENDS = {"rational": solve_rational, "classical": solve_classical}


def solve(m: TetrahedronMeasurement, backend: Backend = "rational") -> LocalSolution:
    try:
        fn = _BACKENDS[backend]
    except KeyError:
        raise ValueError(f"unknown backend {backend!r}") from None
    return fn(m)


def measurement_from_bearings(
    b1: Vec3, b2: Vec3, gravity: Vec3, L: float
) -> TetrahedronMeasurement:
    """Build the solver input from two camera-frame bearings and a down vector."""
    p1, p2, q12, lateral = gravity_est.spreads_vs_gravity(b1, b2, gravity)
    return TetrahedronMeasurement(L, p1, p2, q12, lateral)


def to_world(local: LocalSolution, p1_world: Vec3, p2_world: Vec3, backend: str = "rational") -> PoseEstimate:
    """Place the local solution in the world frame spanned by two ground points."""
    o = np.array([p1_world[0], p1_world[1], 0.0])
    t = np.array([p2_world[0], p2_world[1], 0.0]) - o
    n = math.hypot(t[0], t[1])
    if n == 0.0:
        raise DegenerateConfigurationError("landmarks coincide in the world frame")
    y_hat = t / n
    z_hat = np.array([0.0, 0.0, 1.0])
    x_hat = np.cross(y_hat, z_hat)
    lx, ly, lh = local.coordinates()
    w = o + lx * x_hat + ly * y_hat + lh * z_hat
    return PoseEstimate(float(w[0]), float(w[1]), float(w[2]), backend)


def height_filter(p: PoseEstimate, r: HeightRange = DEFAULT_HEIGHT_RANGE) -> PoseEstimate:
    return replace(p, height_ok=bool(r.min_h < p.h < r.max_h))


def solve_from_observation(
    obs,
    field,
    range: HeightRange = DEFAULT_HEIGHT_RANGE,
    backend: Backend = "rational",
    frame: Literal["world", "local"] = "world",
) -> PoseEstimate:
    """End-to-end: observation -> measurement -> local solution -> world pose.

    ``obs`` is a :class:`rtpose.scene_sim.Observation`, ``field`` a
    :class:`rtpose.scene_sim.FieldModel`. With ``frame="local"`` the signed
    local coordinates are returned instead of world ones.
    """
    id1, id2 = obs.landmark_ids
    if id1 == id2:
        raise ValueError("observation references the same landmark twice")
    P1 = field.point(id1)
    P2 = field.point(id2)
    b1, b2 = obs.camera_bearings()
    g = obs.camera_gravity()
    m = measurement_from_bearings(b1, b2, g, quadrance(P1, P2))
    local = solve(m, backend)
    if frame == "local":
        x, y, h = local.coordinates()
        est = PoseEstimate(x, y, h, backend)
    else:
        est = to_world(local, P1, P2, backend)
    return height_filter(est, range)


def local_from_world(camera: Sequence[float], p1_world: Vec3, p2_world: Vec3) -> tuple[float, float, float]:
    """Inverse of the frame transport: world camera position -> signed local (x, y, h)."""
    o = np.array([p1_world[0], p1_world[1], 0.0])
    t = np.array([p2_world[0], p2_world[1], 0.0]) - o
    y_hat = t / np.linalg.norm(t)
    x_hat = np.cross(y_hat, [0.0, 0.0, 1.0])
    d = np.asarray(camera, dtype=float) - o
    return (float(d @ x_hat), float(d @ y_hat), float(d[2]))
