"""Timing and agreement of the two solver backends, and error statistics
against reference positions."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from rtpose import scene_sim
from rtpose.pose_solver import (
    TetrahedronMeasurement,
    measurement_from_bearings,
    solve_classical,
    solve_rational,
)


@dataclass(frozen=True)
class BenchReport:
    runs: int
    rational_total_s: float
    classical_total_s: float
    rational_mean_s: float
    classical_mean_s: float
    speedup_percent: float
    max_abs_disagreement_m: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ErrorStats:
    mae_x: float
    mae_y: float
    mae_h: float
    std_x: float
    std_y: float
    std_h: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def random_scene(rng: np.random.Generator, xy_range: float = 3.0, h_range=(0.3, 0.7), sep_range=(0.5, 3.0)):
    """Random camera position and landmark pair on the ground.

    Returns (camera, P1, P2) as float arrays.
    """
    camera = np.array([rng.uniform(-xy_range, xy_range), rng.uniform(-xy_range, xy_range), rng.uniform(*h_range)])
    p1 = np.array([rng.uniform(-xy_range, xy_range), rng.uniform(-xy_range, xy_range), 0.0])
    ang = rng.uniform(0.0, 2.0 * math.pi)
    sep = rng.uniform(*sep_range)
    p2 = p1 + sep * np.array([math.cos(ang), math.sin(ang), 0.0])
    return camera, p1, p2


def random_measurement(rng: np.random.Generator, **kw) -> tuple[TetrahedronMeasurement, tuple]:
    """Noise-free measurement of a random scene, bearings in a random camera orientation."""
    camera, p1, p2 = random_scene(rng, **kw)
    R = scene_sim.random_rotation(rng)
    b1 = R @ (p1 - camera)
    b2 = R @ (p2 - camera)
    g = R @ scene_sim.WORLD_DOWN
    L = float(np.sum((p2 - p1) ** 2))
    return measurement_from_bearings(b1, b2, g, L), (camera, p1, p2)


def _disagreement(ms: Sequence[TetrahedronMeasurement]) -> float:
    worst = 0.0
    for m in ms:
        a = solve_rational(m).coordinates()
        b = solve_classical(m).coordinates()
        worst = max(worst, *(abs(u - v) for u, v in zip(a, b)))
    return worst


def _time_loop(fn, ms: Sequence[TetrahedronMeasurement], reps: int) -> float:
    n = len(ms)
    t0 = time.perf_counter()
    for i in range(reps):
        fn(ms[i % n])
    return time.perf_counter() - t0


def run_bench(n_runs: int, seed: int = 0, pool_size: int = 1000) -> BenchReport:
    """Time both backends on the same pre-generated measurements.

    Measurements are generated once up front; only the solver calls sit
    inside the timed loops. The two backends alternate in halves to even out
    drift (CPU frequency, cache warm-up).
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    rng = np.random.default_rng(seed)
    ms = [random_measurement(rng)[0] for _ in range(min(pool_size, n_runs))]

    # warm-up outside the timed region
    _time_loop(solve_rational, ms, min(len(ms), 1000))
    _time_loop(solve_classical, ms, min(len(ms), 1000))

    first = n_runs // 2
    second = n_runs - first
    t_rat = _time_loop(solve_rational, ms, first)
    t_cls = _time_loop(solve_classical, ms, first)
    t_cls += _time_loop(solve_classical, ms, second)
    t_rat += _time_loop(solve_rational, ms, second)

    rat_mean = t_rat / n_runs
    cls_mean = t_cls / n_runs
    return BenchReport(
        runs=n_runs,
        rational_total_s=t_rat,
        classical_total_s=t_cls,
        rational_mean_s=rat_mean,
        classical_mean_s=cls_mean,
        speedup_percent=(cls_mean - rat_mean) / cls_mean * 100.0 if cls_mean > 0 else 0.0,
        max_abs_disagreement_m=_disagreement(ms),
    )


def solver_denominator(m: TetrahedronMeasurement) -> float:
    """(1-p1) + (1-p2) - 2 sigma sqrt((1-p1)(1-p2)(1-q12)); zero when the tetrahedron collapses."""
    c1 = 1.0 - m.p1
    c2 = 1.0 - m.p2
    return c1 + c2 - 2.0 * m.q12.cosine_sign * math.sqrt(c1 * c2 * (1.0 - m.q12.spread))


def accuracy_sweep(n: int, seed: int = 0, near_degenerate: bool = False) -> float:
    """Largest per-component |rational - classical| (meters) over random measurements.

    With ``near_degenerate`` only scenes whose solver denominator lies in
    [1e-6, 1e-3] are kept (short baselines seen from far away); anything
    closer to zero than 1e-6 is excluded.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    ms = []
    while len(ms) < n:
        if near_degenerate:
            m, _ = random_measurement(rng, sep_range=(0.003, 0.15))
            if not 1e-6 <= solver_denominator(m) <= 1e-3:
                continue
        else:
            m, _ = random_measurement(rng)
        ms.append(m)
    return _disagreement(ms)


def evaluate(predictions: Sequence[Sequence[float]], references: Sequence[Sequence[float]]) -> ErrorStats:
    """Per-component mean absolute error and population std of the absolute errors."""
    if len(predictions) != len(references):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(references)} references")
    if len(predictions) == 0:
        raise ValueError("nothing to evaluate")
    err = np.abs(np.asarray(predictions, dtype=float) - np.asarray(references, dtype=float))
    if err.ndim != 2 or err.shape[1] != 3:
        raise ValueError("expected (x, y, h) triples")
    mae = err.mean(axis=0)
    std = err.std(axis=0)
    return ErrorStats(*map(float, mae), *map(float, std), n=len(err))


def fixture_pairs(kind: str = "visual") -> tuple[list, list, list]:
    """(labels, predictions, references) for every fixture row carrying a ``kind`` prediction."""
    if kind not in ("visual", "imu"):
        raise ValueError(f"unknown prediction kind {kind!r}")
    labels, preds, refs = [], [], []
    for row in scene_sim.paper_fixtures():
        pred = getattr(row, kind)
        if pred is None or row.reference is None:
            continue
        labels.append(f"{row.challenge}/{row.point}")
        preds.append(pred)
        refs.append(row.reference)
    return labels, preds, refs


def format_bench_table(reports: Sequence[BenchReport]) -> str:
    """Fixed-width table in the shape of the execution-time table."""
    head = f"{'# runs':<22}" + "".join(f"{r.runs:>14,}x" for r in reports)
    cls = f"{'classical algorithm':<22}" + "".join(f"{r.classical_total_s:>15.3e}" for r in reports)
    rat = f"{'rational algorithm':<22}" + "".join(f"{r.rational_total_s:>15.3e}" for r in reports)
    spd = f"{'speedup %':<22}" + "".join(f"{r.speedup_percent:>15.1f}" for r in reports)
    dis = f"{'max |diff| m':<22}" + "".join(f"{r.max_abs_disagreement_m:>15.1e}" for r in reports)
    return "\n".join([head, cls, rat, spd, dis])


def format_error_table(stats: ErrorStats, published: dict | None = None) -> str:
    lines = [f"{'':<28}{'x':>9}{'y':>9}{'h':>9}"]
    lines.append(f"{'mean absolute error':<28}{stats.mae_x:>9.4f}{stats.mae_y:>9.4f}{stats.mae_h:>9.4f}")
    lines.append(f"{'standard deviation (pop.)':<28}{stats.std_x:>9.4f}{stats.std_y:>9.4f}{stats.std_h:>9.4f}")
    if published:
        mx, my, mh = published["mae"]
        sx, sy, sh = published["std"]
        lines.append(f"{'published mae':<28}{mx:>9.3f}{my:>9.3f}{mh:>9.3f}")
        lines.append(f"{'published std':<28}{sx:>9.3f}{sy:>9.3f}{sh:>9.3f}")
    lines.append(f"n = {stats.n}")
    return "\n".join(lines)
