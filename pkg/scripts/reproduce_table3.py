"""Error of the recorded visual and IMU predictions against the OptiTrack references."""

from rtpose import bench_eval, pose_solver, scene_sim


def main():
    for kind in ("visual", "imu"):
        labels, preds, refs = bench_eval.fixture_pairs(kind)
        stats = bench_eval.evaluate(preds, refs)
        published = scene_sim.PUBLISHED_VISUAL_ERRORS if kind == "visual" else None
        print(f"== {kind} g-vector ({', '.join(labels)})")
        print(bench_eval.format_error_table(stats, published))
        print()

    print("== height filter", pose_solver.DEFAULT_HEIGHT_RANGE)
    for row in scene_sim.paper_fixtures():
        for kind in ("imu", "visual"):
            pred = getattr(row, kind)
            if pred is None:
                continue
            est = pose_solver.height_filter(pose_solver.PoseEstimate(*pred))
            flagged = "red" if getattr(row, f"{kind}_flagged") else ""
            print(f"{row.challenge}/{row.point} {kind:<7}h={pred[2]:.3f}  "
                  f"{'kept' if est.height_ok else 'dropped':<8}{flagged}")


if __name__ == "__main__":
    main()
