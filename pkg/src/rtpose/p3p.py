"""Three-point resection (P3P) via Finsterwalder's cubic.

Unknowns are the distances x, y, z from the camera to three world points,
tied together by the law of cosines::

    x^2 + y^2 - 2xy cos(alpha) = a^2
    x^2 + z^2 - 2xz cos(beta)  = b^2
    y^2 + z^2 - 2yz cos(gamma) = c^2

Eliminating the side lengths pairwise leaves two homogeneous quadrics in
(x, y, z). A member of their pencil degenerates into a pair of planes exactly
when lambda solves Finsterwalder's cubic; intersecting those planes with one
quadric gives candidate ray directions, and the scale follows from the first
equation. Each candidate is polished with Newton steps on the full system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ROOT_NEWTON_STEPS = 4
SYSTEM_NEWTON_STEPS = 20
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class P3PInput:
    a2: float
    b2: float
    c2: float
    cos_alpha: float
    cos_beta: float
    cos_gamma: float

    def __post_init__(self):
        if min(self.a2, self.b2, self.c2) <= 0:
            raise ValueError("squared side lengths must be positive")
        for c in (self.cos_alpha, self.cos_beta, self.cos_gamma):
            if not -1.0 < c < 1.0:
                raise ValueError(f"cosine {c} outside (-1, 1)")

    @classmethod
    def from_points(cls, world: np.ndarray, bearings: np.ndarray) -> "P3PInput":
        """Build from three world points and the three matching view rays (rows)."""
        w = np.asarray(world, dtype=float)
        b = np.asarray(bearings, dtype=float)
        b = b / np.linalg.norm(b, axis=1, keepdims=True)
        return cls(
            a2=float(np.sum((w[0] - w[1]) ** 2)),
            b2=float(np.sum((w[0] - w[2]) ** 2)),
            c2=float(np.sum((w[1] - w[2]) ** 2)),
            cos_alpha=float(b[0] @ b[1]),
            cos_beta=float(b[0] @ b[2]),
            cos_gamma=float(b[1] @ b[2]),
        )


@dataclass(frozen=True)
class P3PSolution:
    x: float
    y: float
    z: float
    residual: float


def finsterwalder_cubic(a2, b2, c2, ca, cb, cg) -> tuple[float, float, float, float]:
    """Cubic coefficients (highest degree first) in the textbook labelling.

    In this labelling ``a`` is the side seen under ``alpha`` from the
    distance pair (x, z) and ``b`` the one seen under ``beta`` from (x, y),
    i.e. a and b are swapped relative to the law-of-cosines system above.
    Use :func:`cubic_for` to get the coefficients for a :class:`P3PInput`.
    """
    sa2 = 1.0 - ca * ca
    sb2 = 1.0 - cb * cb
    sg2 = 1.0 - cg * cg
    k = 1.0 - ca * cb * cg
    return (
        c2 * (c2 * sa2 - a2 * sg2),
        a2 * (b2 - a2) * sg2 - c2 * (2.0 * b2 + c2) * sa2 + 2.0 * a2 * c2 * k,
        a2 * (a2 - c2) * sb2 + b2 * (b2 + 2.0 * c2) * sa2 - 2.0 * a2 * b2 * k,
        b2 * (a2 * sb2 - b2 * sa2),
    )


def cubic_for(inp: P3PInput) -> tuple[float, float, float, float]:
    return finsterwalder_cubic(inp.b2, inp.a2, inp.c2, inp.cos_beta, inp.cos_alpha, inp.cos_gamma)


def _pencil(inp: P3PInput) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric matrices of b^2 q_a - a^2 q_b and c^2 q_b - b^2 q_c over (x, y, z).

    det(A + lambda B) is proportional to the cubic from :func:`cubic_for`.
    """
    ca, cb, cg = inp.cos_alpha, inp.cos_beta, inp.cos_gamma
    qa = np.array([[1.0, -ca, 0.0], [-ca, 1.0, 0.0], [0.0, 0.0, 0.0]])
    qb = np.array([[1.0, 0.0, -cb], [0.0, 0.0, 0.0], [-cb, 0.0, 1.0]])
    qc = np.array([[0.0, 0.0, 0.0], [0.0, 1.0, -cg], [0.0, -cg, 1.0]])
    return inp.b2 * qa - inp.a2 * qb, inp.c2 * qb - inp.b2 * qc


def _polish_root(coeffs, r: float) -> float:
    a, b, c, d = coeffs
    for _ in range(ROOT_NEWTON_STEPS):
        f = ((a * r + b) * r + c) * r + d
        df = (3.0 * a * r + 2.0 * b) * r + c
        if df == 0.0:
            break
        step = f / df
        r -= step
        if abs(step) <= 1e-16 * max(1.0, abs(r)):
            break
    return r


def real_cubic_roots(a: float, b: float, c: float, d: float) -> list[float]:
    """Real roots of a x^3 + b x^2 + c x + d, closed form then Newton-polished.

    Falls back to the quadratic/linear formula when the leading coefficients
    vanish relative to the others.
    """
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if scale == 0.0:
        return []
    a, b, c, d = a / scale, b / scale, c / scale, d / scale
    if abs(a) < 1e-14:
        if abs(b) < 1e-14:
            return [] if abs(c) < 1e-14 else [-d / c]
        disc = c * c - 4.0 * b * d
        if disc < 0:
            return []
        sq = math.sqrt(disc)
        q = -0.5 * (c + math.copysign(sq, c))
        roots = [q / b]
        if q != 0.0:
            roots.append(d / q)
        return sorted(roots)

    # depressed cubic t^3 + p t + q with x = t - b/(3a)
    B, C, D = b / a, c / a, d / a
    shift = B / 3.0
    p = C - B * B / 3.0
    q = 2.0 * B**3 / 27.0 - B * C / 3.0 + D
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0:
        sq = math.sqrt(disc)
        u = -q / 2.0 + sq
        v = -q / 2.0 - sq
        roots = [math.copysign(abs(u) ** (1 / 3), u) + math.copysign(abs(v) ** (1 / 3), v) - shift]
    elif p == 0.0:
        roots = [-shift]
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift for k in range(3)]
    coeffs = (a, b, c, d)
    return sorted(_polish_root(coeffs, r) for r in roots)


def _line_pair(M: np.ndarray) -> list[np.ndarray]:
    """Split a rank-2 indefinite symmetric matrix into its two planes through the origin."""
    w, V = np.linalg.eigh(M)
    order = np.argsort(np.abs(w))
    w, V = w[order], V[:, order]
    e1, e2 = w[1], w[2]
    if e1 * e2 >= 0:
        # definite on the remaining plane: no real line pair, except a double line
        if abs(e1) <= 1e-12 * abs(e2):
            return [V[:, 2]]
        return []
    s1, s2 = math.sqrt(abs(e1)), math.sqrt(abs(e2))
    return [s1 * V[:, 1] + s2 * V[:, 2], s1 * V[:, 1] - s2 * V[:, 2]]


def _rays_on_plane(n: np.ndarray, C: np.ndarray) -> list[np.ndarray]:
    """Directions r with n . r = 0 and r^T C r = 0."""
    n = n / np.linalg.norm(n)
    helper = np.eye(3)[int(np.argmin(np.abs(n)))]
    e1 = np.cross(n, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    E = np.column_stack([e1, e2])
    A = E.T @ C @ E
    # A00 t^2 + 2 A01 t + A11 = 0 for r = t e1 + e2, plus the t -> inf ray e1
    a, b, c = A[0, 0], 2.0 * A[0, 1], A[1, 1]
    out = []
    if abs(a) <= 1e-14 * max(abs(b), abs(c), 1e-300):
        out.append(e1)
        if b != 0.0:
            out.append(-c / b * e1 + e2)
        return out
    disc = b * b - 4.0 * a * c
    if disc < 0:
        if disc > -1e-12 * (b * b + abs(4.0 * a * c)):
            disc = 0.0
        else:
            return out
    sq = math.sqrt(disc)
    for t in ((-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)):
        out.append(t * e1 + e2)
    return out


def _equations(inp: P3PInput, x: float, y: float, z: float) -> np.ndarray:
    return np.array([
        x * x + y * y - 2.0 * x * y * inp.cos_alpha - inp.a2,
        x * x + z * z - 2.0 * x * z * inp.cos_beta - inp.b2,
        y * y + z * z - 2.0 * y * z * inp.cos_gamma - inp.c2,
    ])


def _newton(inp: P3PInput, s: np.ndarray) -> np.ndarray:
    ca, cb, cg = inp.cos_alpha, inp.cos_beta, inp.cos_gamma
    for _ in range(SYSTEM_NEWTON_STEPS):
        x, y, z = s
        F = _equations(inp, x, y, z)
        J = np.array([
            [2 * x - 2 * y * ca, 2 * y - 2 * x * ca, 0.0],
            [2 * x - 2 * z * cb, 0.0, 2 * z - 2 * x * cb],
            [0.0, 2 * y - 2 * z * cg, 2 * z - 2 * y * cg],
        ])
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        s = s - step
        if np.max(np.abs(step)) <= 1e-15 * np.max(np.abs(s)):
            break
    return s


def p3p_residual(inp: P3PInput, sol) -> float:
    """Largest absolute violation of the three law-of-cosines equations."""
    x, y, z = sol.x, sol.y, sol.z
    return float(np.max(np.abs(_equations(inp, x, y, z))))


def solve_p3p(inp: P3PInput) -> list[P3PSolution]:
    """All positive distance triples consistent with the input, sorted by x (at most 4)."""
    A, B = _pencil(inp)
    candidates: list[np.ndarray] = []
    for lam in real_cubic_roots(*cubic_for(inp)):
        M = A + lam * B
        for n in _line_pair(M):
            for r in _rays_on_plane(n, A):
                if r[0] < 0:
                    r = -r
                qa = r[0] ** 2 + r[1] ** 2 - 2.0 * r[0] * r[1] * inp.cos_alpha
                if not qa > 0:
                    continue
                s = r * math.sqrt(inp.a2 / qa)
                if np.any(s <= 0):
                    continue
                candidates.append(_newton(inp, s))

    solutions: list[P3PSolution] = []
    for s in candidates:
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            continue
        sol = P3PSolution(float(s[0]), float(s[1]), float(s[2]), 0.0)
        res = p3p_residual(inp, sol)
        if res >= RESIDUAL_TOL:
            continue
        if any(np.max(np.abs(np.array([o.x, o.y, o.z]) - s)) < 1e-7 * max(1.0, float(np.max(s)))
               for o in solutions):
            continue
        solutions.append(P3PSolution(sol.x, sol.y, sol.z, res))
    solutions.sort(key=lambda t: t.x)
    return solutions[:4]
