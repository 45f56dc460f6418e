import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from rtpose import gravity_est as ge
from rtpose import scene_sim
from rtpose.errors import AmbiguousSignError, ParallelLinesError
from rtpose.rt_core import SignedSpread

K = ge.CameraIntrinsics(600, 600, 320, 240)


def intersect_parametric(s1, s2):
    """Oracle: solve a1 + t (b1 - a1) = a2 + u (b2 - a2) as a 2x2 linear system."""
    a1, b1 = map(np.asarray, s1)
    a2, b2 = map(np.asarray, s2)
    A = np.column_stack([b1 - a1, -(b2 - a2)]).astype(float)
    t, _ = np.linalg.solve(A, a2 - a1)
    return tuple(a1 + t * (b1 - a1))


@pytest.mark.parametrize(
    "s1, s2",
    [
        (((0, 0), (0, 1)), ((1, 0), (2, 2))),
        (((100, 0), (100, 400)), ((500, 0), (520, 400))),
    ],
)
def test_vanishing_point_matches_linear_solve(s1, s2):
    assert ge.vanishing_point(s1, s2) == pytest.approx(intersect_parametric(s1, s2), abs=1e-9)


def test_vanishing_point_frozen_values():
    assert ge.vanishing_point(((0, 0), (0, 1)), ((1, 0), (2, 2))) == pytest.approx((0, -2), abs=1e-12)
    assert ge.vanishing_point(((100, 0), (100, 400)), ((500, 0), (520, 400))) == pytest.approx(
        (100, -8000), abs=1e-8
    )


def test_parallel_segments():
    with pytest.raises(ParallelLinesError):
        ge.vanishing_point(((0, 0), (0, 1)), ((5, 0), (5, 1)))


def test_gravity_from_vp_examples():
    g = ge.gravity_from_vp((K.cx, K.cy + K.fy), K)
    assert g == pytest.approx(np.array([0, 1, 1]) / math.sqrt(2), abs=1e-15)
    g = ge.gravity_from_vp((K.cx, K.cy), K)
    assert g == pytest.approx([0, 0, 1], abs=1e-15)


def test_gravity_sign_follows_hint():
    g = ge.gravity_from_vp((K.cx, K.cy), K, down_hint=(0, 0, -1))
    assert g == pytest.approx([0, 0, -1])
    with pytest.raises(AmbiguousSignError):
        ge.gravity_from_vp((K.cx, K.cy), K, down_hint=(1, 0, 0))


def test_gravity_from_synthetic_goal_posts():
    rng = np.random.default_rng(7)
    for _ in range(20):
        pose, field = scene_sim.random_goal_scene(rng)
        obs = scene_sim.make_observation(
            pose, ("P1", "P2"), field, K, scene_sim.NoiseSpec(gravity_mode="verticals")
        )
        assert ge.angle_between(obs.camera_gravity(), pose.gravity) < 1e-9


def test_visual_gravity_feeds_solver():
    from rtpose import pose_solver

    rng = np.random.default_rng(8)
    for _ in range(20):
        pose, field = scene_sim.random_goal_scene(rng)
        obs = scene_sim.make_observation(pose, ("P1", "P2"), field, K, scene_sim.NoiseSpec(gravity_mode="verticals"))
        est = pose_solver.solve_from_observation(obs, field)
        assert (est.x, est.y, est.h) == pytest.approx(tuple(pose.position), abs=1e-8)


def test_spreads_vs_gravity_symmetric():
    p1, p2, q12, lateral = ge.spreads_vs_gravity((0, -0.5, -0.5), (0, 0.5, -0.5), (0, 0, -1))
    assert (p1, p2) == pytest.approx((0.5, 0.5))
    assert q12 == SignedSpread(1.0, 0)
    assert lateral == 0


def test_spreads_vs_gravity_obtuse():
    p1, p2, q12, lateral = ge.spreads_vs_gravity((-0.5, -0.75, -0.5), (-0.5, 0.75, -0.5), (0, 0, -1))
    assert (p1, p2) == pytest.approx((13 / 17, 13 / 17), rel=1e-15)
    assert q12.spread == pytest.approx(288 / 289, rel=1e-15)
    assert q12.cosine_sign == -1
    # oracle: triple product by hand is 0.75 > 0
    assert float(np.dot(np.cross((-0.5, -0.75, -0.5), (-0.5, 0.75, -0.5)), (0, 0, -1))) == pytest.approx(0.75)
    assert lateral == 1


def test_spreads_vs_gravity_equal_bearings():
    _, _, q12, _ = ge.spreads_vs_gravity((0.1, 0.2, 1), (0.1, 0.2, 1), (0, 1, 0))
    assert q12 == SignedSpread(0.0, 1)


pix = st.floats(-2000, 2000)
point = st.tuples(pix, pix)
segment = st.tuples(point, point).filter(lambda s: math.dist(*s) > 1.0)


@given(segment, segment)
def test_vanishing_point_symmetries(s1, s2):
    try:
        vp = ge.vanishing_point(s1, s2)
    except ParallelLinesError:
        return
    d1 = np.subtract(s1[1], s1[0])
    d2 = np.subtract(s2[1], s2[0])
    sine = abs(d1[0] * d2[1] - d1[1] * d2[0]) / (np.linalg.norm(d1) * np.linalg.norm(d2))
    assume(sine > 1e-3 and max(map(abs, vp)) < 1e6)
    tol = 1e-6 * max(1.0, *map(abs, vp))
    assert ge.vanishing_point(s2, s1) == pytest.approx(vp, abs=tol)
    assert ge.vanishing_point((s1[1], s1[0]), s2) == pytest.approx(vp, abs=tol)
    longer = (s1[0], tuple(np.add(s1[0], 3.0 * d1)))
    assert ge.vanishing_point(longer, s2) == pytest.approx(vp, abs=tol)
