"""Synthetic scenes: field landmarks, camera poses, pinhole projection, noise.

Also carries the recorded positions of the 2004/2005 SPL SLAM challenge
experiments (OptiTrack references and the two kinds of prediction).

Camera frame: x right, y down, z along the optical axis. A pose stores the
rotation that maps world directions into the camera frame, so a world point
p has camera coordinates ``R @ (p - position)``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from rtpose.errors import BehindCameraError, DomainError
from rtpose.gravity_est import DEFAULT_DOWN_HINT, CameraIntrinsics, ImageSegment, gravity_from_segments

FIXTURES_ENV = "RTPOSE_FIXTURES_DIR"
WORLD_DOWN = np.array([0.0, 0.0, -1.0])

Segment3 = tuple[tuple[float, float, float], tuple[float, float, float]]


@dataclass(frozen=True)
class FieldModel:
    name: str
    landmarks: dict[str, tuple[float, float]]
    # each entry is a pair of vertical 3D segments (e.g. the two goal posts)
    verticals: list[tuple[Segment3, Segment3]] = dc_field(default_factory=list)

    def point(self, landmark_id: str) -> tuple[float, float, float]:
        try:
            x, y = self.landmarks[landmark_id]
        except KeyError:
            raise KeyError(f"field {self.name!r} has no landmark {landmark_id!r}") from None
        return (float(x), float(y), 0.0)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "landmarks": {k: list(v) for k, v in self.landmarks.items()},
            "verticals": [[[list(a), list(b)] for a, b in pair] for pair in self.verticals],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FieldModel":
        verticals = [
            tuple((tuple(map(float, a)), tuple(map(float, b))) for a, b in pair)
            for pair in d.get("verticals", [])
        ]
        landmarks = {str(k): (float(v[0]), float(v[1])) for k, v in d["landmarks"].items()}
        return cls(d.get("name", "inline"), landmarks, verticals)


def goal_posts(x: float = 4.5, half_width: float = 0.8, height: float = 0.8) -> tuple[Segment3, Segment3]:
    """Outer edges of one goal as two vertical segments standing on the ground."""
    return (
        ((x, -half_width, 0.0), (x, -half_width, height)),
        ((x, half_width, 0.0), (x, half_width, height)),
    )


# center-circle X-intersections on the middle line, 1.5 m apart
CENTER_X = {"X1": (0.0, -0.75), "X2": (0.0, 0.75)}

SLAM2004_CM = [(160, 100), (180, -30), (50, -100), (-210, 0), (-100, 50)]
SLAM2005_CM = [(130, 120), (220, -150), (-160, -120), (-210, 90), (270, 0)]


def _markers(cm: list[tuple[int, int]]) -> dict[str, tuple[float, float]]:
    return {str(i + 1): (x / 100.0, y / 100.0) for i, (x, y) in enumerate(cm)}


def builtin_fields() -> dict[str, FieldModel]:
    goals = [goal_posts(4.5), goal_posts(-4.5)]
    return {
        "spl_center": FieldModel("spl_center", dict(CENTER_X), goals),
        "slam2004": FieldModel("slam2004", {**CENTER_X, **_markers(SLAM2004_CM)}, goals),
        "slam2005": FieldModel("slam2005", {**CENTER_X, **_markers(SLAM2005_CM)}, goals),
    }


def load_field(name: str) -> FieldModel:
    """Look a field up by name; ``$RTPOSE_FIXTURES_DIR/<name>.json`` wins over the built-ins."""
    override = os.environ.get(FIXTURES_ENV)
    if override:
        path = Path(override) / f"{name}.json"
        if path.exists():
            return FieldModel.from_dict(json.loads(path.read_text()))
    fields = builtin_fields()
    if name not in fields:
        raise KeyError(f"unknown field {name!r}; known: {sorted(fields)}")
    return fields[name]


# ---------------------------------------------------------------------------
# recorded experiment tables

XYH = tuple[float, float, float]


@dataclass(frozen=True)
class FixtureRow:
    challenge: str
    point: int
    marker: tuple[float, float]
    reference: Optional[XYH] = None
    imu: Optional[XYH] = None
    visual: Optional[XYH] = None
    # components printed in red in the source tables
    imu_flagged: tuple[str, ...] = ()
    visual_flagged: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "challenge": self.challenge,
            "point": self.point,
            "marker": list(self.marker),
            "reference": None if self.reference is None else list(self.reference),
            "imu": None if self.imu is None else list(self.imu),
            "visual": None if self.visual is None else list(self.visual),
            "imu_flagged": list(self.imu_flagged),
            "visual_flagged": list(self.visual_flagged),
        }


_XYH = ("x", "y", "h")

RECORDED_FIXTURES: tuple[FixtureRow, ...] = (
    FixtureRow("slam2004", 1, (1.600, 1.000),
               reference=(1.626, 1.004, 0.449),
               imu=(1.637, 0.939, 0.483),
               visual=(1.545, 1.023, 0.369), visual_flagged=("h",)),
    FixtureRow("slam2004", 2, (1.800, -0.300),
               reference=(1.849, -0.330, 0.452),
               imu=(1.576, -0.721, 0.364), imu_flagged=_XYH,
               visual=(1.784, -0.306, 0.468)),
    FixtureRow("slam2004", 3, (0.500, -1.000)),
    FixtureRow("slam2004", 4, (-2.100, 0.000),
               reference=(-2.115, 0.014, 0.452),
               imu=(-2.083, -0.125, 0.448),
               visual=(-2.100, 0.056, 0.390), visual_flagged=("h",)),
    FixtureRow("slam2004", 5, (-1.000, 0.500)),
    FixtureRow("slam2005", 1, (1.300, 1.200),
               reference=(1.296, 1.217, 0.460),
               imu=(1.296, 1.157, 0.538)),
    FixtureRow("slam2005", 2, (2.700, 0.000),
               reference=(2.791, 0.003, 0.472),
               imu=(2.596, 0.549, 0.606), imu_flagged=_XYH,
               visual=(2.706, 0.027, 0.597)),
    FixtureRow("slam2005", 3, (2.200, -1.500),
               reference=(2.207, -1.505, 0.474),
               imu=(2.560, -1.199, 0.577), imu_flagged=_XYH,
               visual=(2.230, -1.449, 0.502)),
    FixtureRow("slam2005", 4, (-1.600, -1.200),
               reference=(-1.513, -1.298, 0.454),
               imu=(-1.654, -1.298, 0.499)),
    FixtureRow("slam2005", 5, (-2.100, 0.900),
               reference=(-2.070, 0.907, 0.425),
               imu=(-1.439, 1.302, 0.301), imu_flagged=_XYH,
               visual=(-2.058, 0.919, 0.449)),
)

# mean absolute error / std of the visual predictions as printed
PUBLISHED_VISUAL_ERRORS = {
    "mae": (0.044, 0.030, 0.076),
    "std": (0.037, 0.017, 0.069),
}


def paper_fixtures() -> tuple[FixtureRow, ...]:
    return RECORDED_FIXTURES


def fixture(challenge: str, point: int) -> FixtureRow:
    for row in RECORDED_FIXTURES:
        if row.challenge == challenge and row.point == point:
            return row
    raise KeyError(f"no fixture {challenge} point {point}")


# ---------------------------------------------------------------------------
# camera model


@dataclass(frozen=True)
class CameraPose:
    position: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        if R.shape != (3, 3) or not np.allclose(R @ R.T, np.eye(3), atol=1e-12):
            raise DomainError("rotation must be orthonormal")
        if self.position[2] <= 0:
            raise DomainError("camera must be above the ground")

    def to_camera(self, world_point: Sequence[float]) -> np.ndarray:
        return self.rotation @ (np.asarray(world_point, dtype=float) - self.position)

    @property
    def gravity(self) -> np.ndarray:
        """World down expressed in the camera frame."""
        return self.rotation @ WORLD_DOWN


def look_at(position: Sequence[float], target: Sequence[float], roll: float = 0.0) -> CameraPose:
    """Camera at ``position`` with its optical axis through ``target``.

    ``roll`` rotates the camera about its optical axis (radians). A camera
    looking straight down gets its x axis along world +x.
    """
    c = np.asarray(position, dtype=float)
    z = np.asarray(target, dtype=float) - c
    z = z / np.linalg.norm(z)
    x = np.cross(z, [0.0, 0.0, 1.0])
    if np.linalg.norm(x) < 1e-12:
        x = np.array([1.0, 0.0, 0.0]) - z[0] * z
    x = x / np.linalg.norm(x)
    y = np.cross(z, x)
    if roll:
        cr, sr = math.cos(roll), math.sin(roll)
        x, y = cr * x + sr * y, -sr * x + cr * y
    return CameraPose(c, np.vstack([x, y, z]))


def project(pose: CameraPose, world_point: Sequence[float], k: CameraIntrinsics) -> tuple[float, float]:
    X, Y, Z = pose.to_camera(world_point)
    if Z <= 0:
        raise BehindCameraError(f"point {tuple(world_point)} is behind the camera")
    return (k.cx + k.fx * X / Z, k.cy + k.fy * Y / Z)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def tilt(v: Sequence[float], angle: float, axis: Sequence[float]) -> np.ndarray:
    """Rotate ``v`` by ``angle`` radians about ``axis`` (Rodrigues)."""
    v = np.asarray(v, dtype=float)
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    c, s = math.cos(angle), math.sin(angle)
    return v * c + np.cross(k, v) * s + k * (k @ v) * (1 - c)


# ---------------------------------------------------------------------------
# observations


@dataclass
class Observation:
    landmark_ids: tuple[str, str]
    bearings: Optional[tuple[np.ndarray, np.ndarray]] = None
    pixels: Optional[tuple[tuple[float, float], tuple[float, float]]] = None
    intrinsics: Optional[CameraIntrinsics] = None
    gravity: Optional[np.ndarray] = None
    vertical_segments: Optional[tuple[ImageSegment, ImageSegment]] = None
    down_hint: Sequence[float] = DEFAULT_DOWN_HINT

    def __post_init__(self):
        if (self.bearings is None) == (self.pixels is None):
            raise ValueError("exactly one of bearings or pixels must be given")
        if self.pixels is not None and self.intrinsics is None:
            raise ValueError("pixels need intrinsics")
        if self.gravity is None and self.vertical_segments is None:
            raise ValueError("need a gravity vector or vertical segments")
        if self.vertical_segments is not None and self.intrinsics is None:
            raise ValueError("vertical segments need intrinsics")
        if self.landmark_ids[0] == self.landmark_ids[1]:
            raise ValueError("landmark ids must be distinct")

    def camera_bearings(self) -> tuple[np.ndarray, np.ndarray]:
        if self.bearings is not None:
            return self.bearings
        return (self.intrinsics.back_project(self.pixels[0]), self.intrinsics.back_project(self.pixels[1]))

    def camera_gravity(self) -> np.ndarray:
        if self.gravity is not None:
            return np.asarray(self.gravity, dtype=float)
        s1, s2 = self.vertical_segments
        return gravity_from_segments(s1, s2, self.intrinsics, self.down_hint)

    def to_dict(self) -> dict:
        d: dict = {"landmarks": list(self.landmark_ids)}
        if self.bearings is not None:
            d["bearings"] = [[float(c) for c in b] for b in self.bearings]
        else:
            d["pixels"] = [[float(c) for c in p] for p in self.pixels]
        if self.intrinsics is not None:
            d["intrinsics"] = self.intrinsics.to_dict()
        if self.gravity is not None:
            d["gravity"] = [float(c) for c in self.gravity]
        if self.vertical_segments is not None:
            d["vertical_segments"] = [[[float(c) for c in p] for p in seg] for seg in self.vertical_segments]
        if tuple(self.down_hint) != DEFAULT_DOWN_HINT:
            d["down_hint"] = [float(c) for c in self.down_hint]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Observation":
        k = CameraIntrinsics(**d["intrinsics"]) if "intrinsics" in d else None
        return cls(
            landmark_ids=tuple(d["landmarks"]),
            bearings=tuple(np.asarray(b, dtype=float) for b in d["bearings"]) if "bearings" in d else None,
            pixels=tuple(tuple(map(float, p)) for p in d["pixels"]) if "pixels" in d else None,
            intrinsics=k,
            gravity=np.asarray(d["gravity"], dtype=float) if "gravity" in d else None,
            vertical_segments=tuple(
                tuple(tuple(map(float, p)) for p in seg) for seg in d["vertical_segments"]
            ) if "vertical_segments" in d else None,
            down_hint=tuple(d.get("down_hint", DEFAULT_DOWN_HINT)),
        )


@dataclass(frozen=True)
class NoiseSpec:
    """Pixel noise and how gravity is reported.

    ``gravity_mode`` is "true" (exact camera-frame down vector, the IMU path)
    or "verticals" (projected goal-post edges, the visual path).
    """

    pixel_std: float = 0.0
    gravity_mode: str = "true"
    gravity_tilt: float = 0.0  # radians, applied to the "true" gravity

    def __post_init__(self):
        if self.pixel_std < 0:
            raise ValueError("pixel_std must be non-negative")
        if self.gravity_mode not in ("true", "verticals"):
            raise ValueError(f"unknown gravity mode {self.gravity_mode!r}")


def _visible_verticals(pose: CameraPose, field: FieldModel) -> tuple[Segment3, Segment3]:
    for pair in field.verticals:
        if all(pose.to_camera(p)[2] > 0 for seg in pair for p in seg):
            return pair
    raise BehindCameraError("no vertical pair of the field is in front of the camera")


def make_observation(
    pose: CameraPose,
    ids: tuple[str, str],
    field: FieldModel,
    k: CameraIntrinsics = CameraIntrinsics(),
    noise: NoiseSpec = NoiseSpec(),
    seed: int = 0,
) -> Observation:
    """Render two landmarks (and optionally goal posts) into a noisy observation."""
    rng = np.random.default_rng(seed)
    pixels = []
    for lid in ids:
        u, v = project(pose, field.point(lid), k)
        if noise.pixel_std > 0:
            du, dv = rng.normal(0.0, noise.pixel_std, size=2)
            u, v = u + du, v + dv
        pixels.append((float(u), float(v)))

    if noise.gravity_mode == "true":
        g = pose.gravity
        if noise.gravity_tilt:
            # tilt about the camera x axis, i.e. a pitch error
            g = tilt(g, noise.gravity_tilt, (1.0, 0.0, 0.0))
        return Observation(tuple(ids), pixels=tuple(pixels), intrinsics=k, gravity=g)

    segments = []
    for seg in _visible_verticals(pose, field):
        ends = []
        for p in seg:
            u, v = project(pose, p, k)
            if noise.pixel_std > 0:
                du, dv = rng.normal(0.0, noise.pixel_std, size=2)
                u, v = u + du, v + dv
            ends.append((float(u), float(v)))
        segments.append(tuple(ends))
    return Observation(tuple(ids), pixels=tuple(pixels), intrinsics=k, vertical_segments=tuple(segments))


def bearing_observation(pose: CameraPose, ids: tuple[str, str], field: FieldModel) -> Observation:
    """Noise-free observation with exact camera-frame bearings and gravity."""
    b = tuple(pose.to_camera(field.point(i)) for i in ids)
    return Observation(tuple(ids), bearings=b, gravity=pose.gravity)


def random_goal_scene(
    rng: np.random.Generator,
    xy_range: float = 3.0,
    h_range: tuple[float, float] = (0.3, 0.7),
    post_distance: tuple[float, float] = (2.0, 4.0),
) -> tuple[CameraPose, FieldModel]:
    """Random camera looking down at the ground with a goal-post pair ahead of it.

    The posts are 0.8 m tall and 1.6 m apart, facing the camera; the camera
    looks at a ground point 1 to 2.5 m ahead with a little roll. Two
    landmarks "P1", "P2" lie 1.5 m apart across that ground point.
    """
    c = np.array([rng.uniform(-xy_range, xy_range), rng.uniform(-xy_range, xy_range), rng.uniform(*h_range)])
    yaw = rng.uniform(0.0, 2.0 * math.pi)
    fwd = np.array([math.cos(yaw), math.sin(yaw), 0.0])
    side = np.array([-fwd[1], fwd[0], 0.0])
    target = c + fwd * rng.uniform(1.0, 2.5)
    target[2] = 0.0
    pose = look_at(c, target, roll=rng.uniform(-0.2, 0.2))
    base = c + fwd * rng.uniform(*post_distance)
    base[2] = 0.0
    segs = []
    for s in (-0.8, 0.8):
        p = base + s * side
        segs.append((tuple(map(float, p)), (float(p[0]), float(p[1]), 0.8)))
    marks = {
        "P1": (float(target[0] - 0.75 * side[0]), float(target[1] - 0.75 * side[1])),
        "P2": (float(target[0] + 0.75 * side[0]), float(target[1] + 0.75 * side[1])),
    }
    field = FieldModel("random_goal", marks, [tuple(segs)])
    return pose, field
