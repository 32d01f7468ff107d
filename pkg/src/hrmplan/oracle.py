"""Independent brute-force verifiers used by tests and acceptance checks.

Everything here works from definitions (dense surface sampling, pairwise
point sums, pattern search, textbook Dijkstra) and deliberately shares no
code path with the modules it checks, so bugs cannot cancel out. These
routines are slow by design and run at test time only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .geom import (Ellipsoid, Pose, Superquadric, pose_interpolate,
                   sq_implicit, sq_surface_grid, unit_sphere_grid)
from .robot import Shape, forward_kinematics, interpolate_shapes

COLLISION_MARGIN = 1e-6


def _part_samples(part: Ellipsoid, n: int) -> np.ndarray:
    return part.surface_points(n)


def _body_samples_world(body: Superquadric, n: int) -> np.ndarray:
    pts, _, _ = sq_surface_grid(body, n)
    return body.pose.apply(pts)


def collision_check(parts, obstacles, arenas, n_surface: int = 1000) -> bool:
    """True iff the posed parts collide with an obstacle or exit an arena.

    Definition-level test: any obstacle surface sample strictly inside a part
    (margin 1e-6), any part sample strictly inside an obstacle, any part
    sample outside an arena, or mutual center containment. Tangency at
    machine precision therefore counts as collision-free.
    """
    if n_surface < 10:
        raise InvalidArgumentError("need n_surface >= 10")
    obs_samples = [_body_samples_world(o, n_surface) for o in obstacles]
    for part in parts:
        ps = _part_samples(part, n_surface)
        for body, samples in zip(obstacles, obs_samples):
            local = body.pose.inverse().apply(ps)
            if np.any(sq_implicit(body, local) < 1.0 - COLLISION_MARGIN):
                return True
            if np.any(part.implicit(samples) < 1.0 - COLLISION_MARGIN):
                return True
            if sq_implicit(body, body.pose.inverse().apply(part.center)) < 1.0 - COLLISION_MARGIN:
                return True
            if part.implicit(body.center) < 1.0 - COLLISION_MARGIN:
                return True
        for arena in arenas:
            local = arena.pose.inverse().apply(ps)
            if np.any(sq_implicit(arena, local) > 1.0 + COLLISION_MARGIN):
                return True
    return False


@dataclass(frozen=True)
class PathViolation:
    edge_index: int
    step_index: int


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple
    checked_steps: int

    @property
    def valid(self) -> bool:
        return len(self.violations) == 0


def validate_path(path, robot, scene, steps_per_edge: int = 100,
                  n_surface: int = 1000) -> ValidationReport:
    """Interpolate every path edge and run collision_check at each step.

    ``path`` is a sequence of Configuration; rotations interpolate along the
    geodesic, joints linearly (wrapped), translations linearly.
    """
    configs = list(path)
    if not configs:
        raise InvalidArgumentError("empty path")
    violations = []
    checked = 0
    for e in range(len(configs) - 1):
        c1, c2 = configs[e], configs[e + 1]
        poses = pose_interpolate(c1.base_pose(), c2.base_pose(), steps_per_edge)
        shapes = interpolate_shapes(c1.shape, c2.shape, steps_per_edge)
        for s, (pose, shp) in enumerate(zip(poses, shapes)):
            fk = forward_kinematics(robot, shp)
            parts = [Ellipsoid(p.ellipsoid.semi_axes,
                               Pose(p.ellipsoid.pose.rotation,
                                    p.offset + pose.translation))
                     for p in fk]
            checked += 1
            if collision_check(parts, scene.obstacles, scene.arenas, n_surface):
                violations.append(PathViolation(e, s))
    return ValidationReport(tuple(violations), checked)


def brute_force_mink(s1: Superquadric, e2: Ellipsoid, n: int = 1000) -> np.ndarray:
    """Pairwise sums of surface samples of s1 and of -e2 (definition of the
    Minkowski sum); the convex hull of the result approximates the boundary."""
    if n < 100:
        raise InvalidArgumentError("need n >= 100 samples per body")
    p1 = _body_samples_world(s1, n)
    p2 = _part_samples(e2, n) - e2.center          # -E2 = E2 reflected, centered
    return (p1[:, None, :] - p2[None, :, :]).reshape(-1, p1.shape[1])


def tangency_min_phi(s1: Superquadric, e2: Ellipsoid, center: np.ndarray,
                     n_grid: int = 800, refine_iters: int = 48) -> float:
    """Min of s1's implicit value over e2's surface placed at ``center``.

    Grid sampling of the surface parameters followed by a shrinking
    pattern-search refinement; independent of the closed-form construction.
    """
    dim = s1.dim
    rot = e2.pose.rotation.matrix()
    inv = s1.pose.inverse()

    def phi_of_params(params):
        if dim == 2:
            u = np.column_stack([np.cos(params[:, 0]), np.sin(params[:, 0])])
        else:
            ce = np.cos(params[:, 0])
            u = np.column_stack([ce * np.cos(params[:, 1]),
                                 ce * np.sin(params[:, 1]),
                                 np.sin(params[:, 0])])
        world = (u * e2.semi_axes) @ rot.T + center
        return sq_implicit(s1, inv.apply(world))

    if dim == 2:
        params = np.linspace(-np.pi, np.pi, n_grid, endpoint=False)[:, None]
        step = np.array([2.0 * np.pi / n_grid])
    else:
        m = max(8, int(np.sqrt(n_grid / 2)))
        eta = np.linspace(-np.pi / 2, np.pi / 2, m)
        omega = np.linspace(-np.pi, np.pi, 2 * m, endpoint=False)
        ee, ww = np.meshgrid(eta, omega, indexing="ij")
        params = np.column_stack([ee.ravel(), ww.ravel()])
        step = np.array([np.pi / m, np.pi / m])
    vals = phi_of_params(params)
    best = params[int(np.argmin(vals))].copy()
    best_val = float(vals.min())
    for _ in range(refine_iters):
        if dim == 2:
            cand = best[None, :] + np.array([[-1.0], [0.0], [1.0]]) * step
        else:
            offs = np.array([[i, j] for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float)
            cand = best[None, :] + offs * step
        vals = phi_of_params(cand)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best = cand[k].copy()
        else:
            step = step * 0.5
    return best_val


def ablated_connect(slice_i, slice_j, robot, scene, n_point: int,
                    n_surface: int = 1000) -> list[tuple]:
    """Cross-slice connection by direct interpolation plus collision checks.

    Same candidate pairs and interpolation steps as the bridge local planner,
    but each intermediate configuration is checked with the full
    definition-level collision test instead of the bridge boundaries.
    """
    shapes = interpolate_shapes(slice_i.shape, slice_j.shape, n_point)
    fk_per_step = [forward_kinematics(robot, s) for s in shapes]
    edges = []
    by_line = {}
    for j, v in enumerate(slice_j.vertices):
        by_line.setdefault(v.line_index, []).append(j)
    for i, v1 in enumerate(slice_i.vertices):
        for j in by_line.get(v1.line_index, []):
            v2 = slice_j.vertices[j]
            ok = True
            for s in range(n_point):
                tau = s / (n_point - 1)
                t = (1.0 - tau) * v1.position + tau * v2.position
                parts = [Ellipsoid(p.ellipsoid.semi_axes,
                                   Pose(p.ellipsoid.pose.rotation, p.offset + t))
                         for p in fk_per_step[s]]
                if collision_check(parts, scene.obstacles, scene.arenas, n_surface):
                    ok = False
                    break
            if ok:
                edges.append((i, j))
    return edges


def dijkstra_cost(adjacency, start: int, goal: int):
    """Textbook Dijkstra over {node: [(neighbor, cost), ...]}; None if unreachable."""
    import heapq

    dist = {start: 0.0}
    heap = [(0.0, start)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        if u == goal:
            return d
        done.add(u)
        for v, w in adjacency.get(u, []):
            nd = d + w
            if nd < dist.get(v, np.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return None


def polygon_hausdorff(p: np.ndarray, q: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two closed polygons (2D),
    measured vertex-to-boundary in both directions."""

    def point_to_poly(points, poly):
        a = poly
        b = np.roll(poly, -1, axis=0)
        ab = b - a
        denom = np.einsum("ij,ij->i", ab, ab)
        best = np.full(len(points), np.inf)
        for i in range(len(a)):
            ap = points - a[i]
            t = np.clip(ap @ ab[i] / max(denom[i], 1e-300), 0.0, 1.0)
            proj = a[i] + t[:, None] * ab[i]
            best = np.minimum(best, np.linalg.norm(points - proj, axis=1))
        return best.max()

    return float(max(point_to_poly(p, q), point_to_poly(q, p)))


def monte_carlo_volume(sq: Superquadric, n: int = 10_000_000,
                       rng: np.random.Generator | None = None,
                       chunk: int = 1_000_000) -> float:
    """Rejection-sampling volume (3D) or area (2D) in the bounding box."""
    if rng is None:
        rng = np.random.default_rng(0)
    a = sq.semi_axes
    box = float(np.prod(2.0 * a))
    hits = 0
    left = n
    while left > 0:
        m = min(chunk, left)
        pts = rng.uniform(-a, a, size=(m, sq.dim))
        hits += int(np.count_nonzero(sq_implicit(sq, pts) <= 1.0))
        left -= m
    return box * hits / n
