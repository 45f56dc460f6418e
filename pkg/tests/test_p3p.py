import math

import numpy as np
import pytest

from rtpose import p3p
from rtpose.p3p import P3PInput, P3PSolution, p3p_residual, solve_p3p

EQUILATERAL = P3PInput(1.0, 1.0, 1.0, 5 / 8, 5 / 8, 5 / 8)


def test_equilateral_geometry_oracle():
    # unit triangle, camera 1 above the centroid: distance^2 = 1/3 + 1
    d = math.sqrt(1 / 3 + 1)
    assert d == pytest.approx(2 / math.sqrt(3))
    cos = (2 * d * d - 1) / (2 * d * d)
    assert cos == pytest.approx(5 / 8)
    assert p3p_residual(EQUILATERAL, P3PSolution(d, d, d, 0)) < 1e-12


def test_equilateral_contains_true_triple():
    sols = solve_p3p(EQUILATERAL)
    d = 2 / math.sqrt(3)
    assert any(max(abs(s.x - d), abs(s.y - d), abs(s.z - d)) < 1e-9 for s in sols)
    assert len(sols) <= 4
    assert [s.x for s in sols] == sorted(s.x for s in sols)
    assert all(s.residual < 1e-8 for s in sols)


def test_residual_examples():
    d = 2 / math.sqrt(3)
    assert p3p_residual(EQUILATERAL, P3PSolution(d + 1e-3, d, d, 0)) > 1e-4
    inp = P3PInput(2.0, 3.0, 5.0, 0.1, 0.2, 0.3)
    assert p3p_residual(inp, P3PSolution(0, 0, 0, 0)) == 5.0


def test_cubic_matches_pencil_determinant(rng):
    # the printed cubic, under its own labelling, is proportional to det(A + lambda B)
    for _ in range(50):
        world = np.column_stack([rng.uniform(-3, 3, 3), rng.uniform(-3, 3, 3), np.zeros(3)])
        cam = np.array([rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.3, 0.7)])
        inp = P3PInput.from_points(world, world - cam)
        A, B = p3p._pencil(inp)
        coeffs = p3p.cubic_for(inp)
        ratios = [np.linalg.det(A + lam * B) / np.polyval(coeffs, lam) for lam in (-1.7, 0.3, 2.9)]
        assert ratios[1] == pytest.approx(ratios[0], rel=1e-7)
        assert ratios[2] == pytest.approx(ratios[0], rel=1e-7)


@pytest.mark.parametrize(
    "coeffs, roots",
    [
        ((1, -6, 11, -6), [1, 2, 3]),
        ((1, 0, 0, -8), [2]),
        ((0, 1, -3, 2), [1, 2]),
        ((0, 0, 2, -4), [2]),
        ((1, -3, 3, -1), [1]),
    ],
)
def test_real_cubic_roots(coeffs, roots):
    got = p3p.real_cubic_roots(*coeffs)
    for r in roots:
        assert min(abs(g - r) for g in got) < 1e-6
    for g in got:
        assert abs(np.polyval(coeffs, g)) < 1e-9


def test_near_degenerate_view_angle():
    # two world points almost in line with the camera: cos(alpha) close to 1
    cam = np.array([0.0, 0.0, 0.5])
    world = np.array([[3.0, 0.0, 0.0], [3.3, 0.001, 0.0], [1.0, 1.0, 0.0]])
    inp = P3PInput.from_points(world, world - cam)
    assert inp.cos_alpha > 0.999
    sols = solve_p3p(inp)
    assert sols
    assert all(p3p_residual(inp, s) < 1e-8 for s in sols)
    true = np.linalg.norm(world - cam, axis=1)
    assert any(np.max(np.abs([s.x - true[0], s.y - true[1], s.z - true[2]])) < 1e-6 for s in sols)


def test_random_instances_contain_truth(rng):
    for _ in range(200):
        world = np.column_stack([rng.uniform(-3, 3, 3), rng.uniform(-3, 3, 3), np.zeros(3)])
        cam = np.array([rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.3, 0.7)])
        inp = P3PInput.from_points(world, world - cam)
        true = np.linalg.norm(world - cam, axis=1)
        sols = solve_p3p(inp)
        assert any(np.max(np.abs([s.x - true[0], s.y - true[1], s.z - true[2]])) < 1e-6 for s in sols)
        assert all(s.residual < 1e-8 for s in sols)


def test_no_solution_is_empty_list():
    # sides violate the triangle inequality for any distances seen under these angles
    inp = P3PInput(1.0, 1.0, 100.0, 0.99, 0.99, 0.99)
    assert solve_p3p(inp) == []


def test_input_validation():
    with pytest.raises(ValueError):
        P3PInput(0.0, 1, 1, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        P3PInput(1, 1, 1, 1.0, 0.5, 0.5)
