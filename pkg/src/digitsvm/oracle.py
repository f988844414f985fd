"""Independent brute-force verifiers for the SVM solver.

Deliberately naive machinery, sharing no code path with the production
solver: exhaustive lattice search plus derivative-free refinement for the
dual objective, and a convex-hull closest-point search for the geometric
(maximum-margin) view on 2-D data.
"""

from __future__ import annotations

import numpy as np

from .svm import KernelSpec, kernel_matrix

MAX_ORACLE_POINTS = 6
_LATTICE_BUDGET = 3_000_000  # initial-enumeration evaluation cap


class InseparableError(ValueError):
    """The two convex hulls intersect; no separating hyperplane exists."""


def dual_objective_direct(alphas: np.ndarray, labels: np.ndarray,
                          spec: KernelSpec, samples: np.ndarray) -> float:
    """W(a) = sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij, evaluated directly."""
    a = np.asarray(alphas, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    k = kernel_matrix(spec, samples, samples)
    q = k * np.outer(y, y)
    return float(a.sum() - 0.5 * a @ q @ a)


def brute_force_dual(samples, labels, spec: KernelSpec, c: float,
                     grid_steps: int = 100) -> tuple[np.ndarray, float]:
    """Maximize the soft-margin dual on <= 6 points by lattice search.

    Enumerates the box lattice restricted to |sum(a_i y_i)| <= C/grid_steps
    (the last coordinate is solved from the running constraint sum, which
    prunes the enumeration to (g+1)^(n-1) candidates), then refines: the
    incumbent is projected onto the exact equality constraint and improved
    by shrinking-step pattern search along constraint-preserving pair
    directions. The dual is a concave quadratic, so the refinement converges
    to the global constrained optimum from any lattice seed.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    y = np.asarray(labels, dtype=np.float64).ravel()
    n = len(y)
    if n > MAX_ORACLE_POINTS:
        raise ValueError(f"refusing {n} points: exhaustive search is capped at "
                         f"{MAX_ORACLE_POINTS}")
    if grid_steps < 100:
        raise ValueError("grid_steps must be at least 100")
    if len(x) != n or not np.isin(y, (-1.0, 1.0)).all():
        raise ValueError("need matching samples and -1/+1 labels")
    if not ((y > 0).any() and (y < 0).any()):
        raise ValueError("need at least one point of each label")

    k = kernel_matrix(spec, x, x)
    q = k * np.outer(y, y)

    def w_of(a: np.ndarray) -> float:
        return float(a.sum() - 0.5 * a @ q @ a)

    slack = c / grid_steps
    g = grid_steps
    while (g + 1) ** (n - 1) > _LATTICE_BUDGET and g > 4:
        g //= 2
    vals = np.linspace(0.0, c, g + 1)
    step = c / g

    grids = np.meshgrid(*([vals] * (n - 1)), indexing="ij")
    head = np.stack([gr.ravel() for gr in grids], axis=1)  # (m, n-1)
    s_head = head @ y[:-1]
    target = -y[-1] * s_head  # the alpha_n that zeroes the constraint
    best_a = np.zeros(n)
    best_w = w_of(best_a)
    for offset in (-1.0, 0.0, 1.0):
        a_last = np.round(target / step + offset) * step
        ok = (
            (a_last >= 0.0)
            & (a_last <= c)
            & (np.abs(s_head + y[-1] * a_last) <= slack + 1e-12)
        )
        if not ok.any():
            continue
        full = np.concatenate([head[ok], a_last[ok, None]], axis=1)
        w = full.sum(1) - 0.5 * np.einsum("ij,jk,ik->i", full, q, full)
        i = int(np.argmax(w))
        if w[i] > best_w:
            best_w = float(w[i])
            best_a = full[i].copy()

    a = _project_to_constraint(best_a, y, c)
    a, w = _pattern_refine(a, y, c, w_of, step)
    return a, w


def _project_to_constraint(a: np.ndarray, y: np.ndarray, c: float) -> np.ndarray:
    # Find t with sum(clip(a - t*y) * y) = 0; the map is monotone in t.
    def s_of(t: float) -> float:
        return float(np.clip(a - t * y, 0.0, c) @ y)

    lo, hi = -c * len(y), c * len(y)
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if s_of(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return np.clip(a - ((lo + hi) / 2.0) * y, 0.0, c)


def _pattern_refine(a: np.ndarray, y: np.ndarray, c: float, w_of, h0: float):
    """Greedy pattern search over directions (y_i e_i, -y_j e_j) that keep
    the equality constraint fixed; the step halves when no direction helps."""
    n = len(y)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    w = w_of(a)
    h = max(h0, c * 1e-6)
    while h > c * 1e-12:
        improved = True
        while improved:
            improved = False
            for i, j in pairs:
                t = h
                t = min(t, (c - a[i]) if y[i] > 0 else a[i])
                t = min(t, a[j] if y[j] > 0 else (c - a[j]))
                if t <= 0.0:
                    continue
                cand = a.copy()
                cand[i] += y[i] * t
                cand[j] -= y[j] * t
                wc = w_of(cand)
                if wc > w + 1e-15:
                    a, w = cand, wc
                    improved = True
        h /= 2.0
    return a, w


def _monotone_chain(points: np.ndarray) -> np.ndarray:
    """Convex hull vertices in counter-clockwise order (degenerate-safe)."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if len(pts) <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _edges(hull: np.ndarray):
    if len(hull) == 1:
        return [(hull[0], hull[0])]
    return [(hull[i], hull[(i + 1) % len(hull)]) for i in range(len(hull))]


def _hulls_intersect(ha: np.ndarray, hb: np.ndarray) -> bool:
    # Separating-axis test on edge normals of both hulls (convex shapes).
    axes = []
    for hull in (ha, hb):
        for p, q in _edges(hull):
            d = q - p
            if d @ d > 0:
                axes.append(np.array([-d[1], d[0]]))
    if not axes:  # both degenerate to points
        return bool(np.allclose(ha[0], hb[0]))
    for axis in axes:
        pa = ha @ axis
        pb = hb @ axis
        if pa.max() < pb.min() or pb.max() < pa.min():
            return False
    return True


def _point_segment_closest(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return a
    t = float(np.clip((p - a) @ d / dd, 0.0, 1.0))
    return a + t * d


def hull_closest_points(class_a, class_b, resolution: int = 20):
    """Closest pair of points between two 2-D convex hulls.

    Coarse phase: each hull boundary is sampled on a lattice of `resolution`
    points per edge and the best cross pair seeds the search. Refinement:
    exact enumeration of every (vertex, opposing segment) distance, which
    attains the true minimum for disjoint convex polygons. Intersecting
    hulls (or distance below 1e-9) raise InseparableError.
    """
    pa = np.atleast_2d(np.asarray(class_a, dtype=np.float64))
    pb = np.atleast_2d(np.asarray(class_b, dtype=np.float64))
    if pa.shape[1] != 2 or pb.shape[1] != 2 or len(pa) == 0 or len(pb) == 0:
        raise ValueError("both classes must be non-empty sets of 2-D points")
    if resolution < 1:
        raise ValueError("resolution must be a positive integer")
    ha = _monotone_chain(pa)
    hb = _monotone_chain(pb)
    if _hulls_intersect(ha, hb):
        raise InseparableError("convex hulls intersect: classes are not separable")

    def boundary_samples(hull: np.ndarray) -> np.ndarray:
        out = []
        for p, q in _edges(hull):
            for t in np.linspace(0.0, 1.0, resolution, endpoint=False):
                out.append(p + t * (q - p))
        return np.array(out)

    sa = boundary_samples(ha)
    sb = boundary_samples(hb)
    d2 = ((sa[:, None, :] - sb[None, :, :]) ** 2).sum(-1)
    ia, ib = np.unravel_index(np.argmin(d2), d2.shape)
    best = (sa[ia], sb[ib], float(np.sqrt(d2[ia, ib])))

    for hull_pts, other, flipped in ((ha, hb, False), (hb, ha, True)):
        for v in hull_pts:
            for p, q in _edges(other):
                closest = _point_segment_closest(v, p, q)
                dist = float(np.linalg.norm(v - closest))
                if dist < best[2]:
                    best = (closest, v, dist) if flipped else (v, closest, dist)

    point_a, point_b, distance = best
    if distance < 1e-9:
        raise InseparableError("hull distance below 1e-9: treating as inseparable")
    return np.asarray(point_a), np.asarray(point_b), distance
