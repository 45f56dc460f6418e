"""Sensitivity of the recovered position to pixel noise and to gravity tilt.

Camera at (2, 0, 0.45) looking at the center circle, landmarks X1/X2.
"""

import argparse
import math

import numpy as np

from rtpose import gravity_est, scene_sim
from rtpose.errors import GeometryError
from rtpose.pose_solver import solve_from_observation


def position_errors(pose, field, truth, noise, draws):
    k = gravity_est.CameraIntrinsics()
    errs = []
    for seed in range(draws):
        obs = scene_sim.make_observation(pose, ("X1", "X2"), field, k, noise, seed=seed)
        try:
            est = solve_from_observation(obs, field)
        except GeometryError:
            continue
        errs.append(math.dist((est.x, est.y, est.h), truth))
    return np.array(errs)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=1000)
    args = ap.parse_args()

    field = scene_sim.load_field("spl_center")
    truth = (2.0, 0.0, 0.45)
    pose = scene_sim.look_at(truth, (0.0, 0.0, 0.0))

    print(f"{'pixel std':>10}{'median m':>12}{'p90 m':>10}")
    for std in (0.0, 0.25, 0.5, 1.0, 2.0):
        e = position_errors(pose, field, truth, scene_sim.NoiseSpec(pixel_std=std), args.draws if std else 1)
        print(f"{std:>10.2f}{np.median(e):>12.4f}{np.percentile(e, 90):>10.4f}")

    print()
    print(f"{'tilt deg':>10}{'error m':>12}")
    for deg in (0, 1, 2, 3, 4, 5):
        e = position_errors(pose, field, truth, scene_sim.NoiseSpec(gravity_tilt=math.radians(deg)), 1)
        print(f"{deg:>10}{e[0]:>12.4f}")

    print()
    print("visual gravity from goal-post pairs, 0.5 px noise")
    rng = np.random.default_rng(0)
    k = gravity_est.CameraIntrinsics()
    ang = []
    for i in range(args.draws):
        p, f = scene_sim.random_goal_scene(rng)
        obs = scene_sim.make_observation(p, ("P1", "P2"), f, k, scene_sim.NoiseSpec(0.5, "verticals"), seed=i)
        ang.append(gravity_est.angle_between(obs.camera_gravity(), p.gravity))
    print(f"median angular error {math.degrees(float(np.median(ang))):.3f} deg")


if __name__ == "__main__":
    main()
