"""Closed-form Minkowski sum/difference boundaries between a superquadric and
an ellipsoid, their discretization into convex polytopes, and containment /
line-intersection queries against the discretized boundaries.

The sum boundary is the locus of ellipsoid centers externally tangent to the
superquadric:

    x_mb = x1 + R2 L^2 R2^T grad(x1) / || L R2^T grad(x1) ||

with L = diag(semi-axes of the ellipsoid). The difference (arena erosion)
flips the sign of the offset term. Obstacle boundaries are discretized as the
convex hull of the mapped surface samples; arena boundaries as the
intersection of the inward-shifted supporting half-spaces, which remains
correct where the erosion develops cusps (part larger than the local
curvature radius).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from .errors import ErosionDegenerateError, GeometryDegenerateError, InvalidArgumentError
from .geom import Ellipsoid, Superquadric, sq_gradient, sq_implicit, sq_surface_grid

OBSTACLE_SUM = "obstacle-sum"
ARENA_DIFF = "arena-difference"

DEFAULT_N_VERTICES = 100

_IN_TOL = 1e-9  # fraction of bounding radius counted as inside a facet plane


@dataclass(frozen=True)
class CBoundary:
    """One discretized C-obstacle or C-arena boundary, referenced to a part.

    ``samples`` holds the polytope vertices (world frame, already shifted by
    ``-offset`` so every boundary references the same robot reference point).
    ``mesh`` is the ordered vertex index loop in 2D or the triangle index
    array in 3D. ``facet_normals`` / ``facet_offsets`` define the polytope as
    {p : N p <= b} and drive all queries.
    """

    kind: str
    samples: np.ndarray
    mesh: np.ndarray
    source_part: int
    source_body: int
    offset: np.ndarray
    facet_normals: np.ndarray = field(repr=False, default=None)
    facet_offsets: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def scale(self) -> float:
        c = self.samples.mean(axis=0)
        return float(np.max(np.linalg.norm(self.samples - c, axis=1)))

    def bbox(self):
        return self.samples.min(axis=0), self.samples.max(axis=0)


# ---------------------------------------------------------------------------
# pointwise closed-form maps
# ---------------------------------------------------------------------------

def _mink_offsets(s1: Superquadric, e2: Ellipsoid, x1: np.ndarray, grads=None):
    """Offset vectors of the closed-form map, in s1's body frame.

    ``x1`` is (n, d) in s1's body frame. The ellipsoid's orientation is
    re-expressed in that frame; its center is irrelevant.
    """
    if grads is None:
        grads = sq_gradient(s1, x1)
    r2 = s1.pose.rotation.inverse().compose(e2.pose.rotation).matrix()
    lam = e2.semi_axes
    scaled = grads @ r2 * lam            # rows: diag(a2) R2^T grad
    denom = np.linalg.norm(scaled, axis=1)
    if np.any(denom < 1e-12):
        raise GeometryDegenerateError("vanishing gradient norm in Minkowski map")
    return (scaled * lam) @ r2.T / denom[:, None]


def _mink_map(s1: Superquadric, e2: Ellipsoid, x1, sign: float):
    x1 = np.asarray(x1, dtype=float)
    single = x1.ndim == 1
    pts = np.atleast_2d(x1)
    vals = sq_implicit(s1, pts)
    if np.any(np.abs(vals - 1.0) > 1e-6):
        raise InvalidArgumentError("x1 must lie on the boundary of the superquadric")
    mapped = pts + sign * _mink_offsets(s1, e2, pts)
    world = s1.pose.apply(mapped)
    return world[0] if single else world


def mink_sum_point(s1: Superquadric, e2: Ellipsoid, x1):
    """Center position placing e2 externally tangent to s1 at x1 (world frame).

    ``x1`` is a surface point of s1 in s1's body frame.
    """
    return _mink_map(s1, e2, x1, +1.0)


def mink_diff_point(s1: Superquadric, e2: Ellipsoid, x1):
    """Center position keeping e2 internally tangent to s1 at x1 (world frame)."""
    return _mink_map(s1, e2, x1, -1.0)


# ---------------------------------------------------------------------------
# polytope construction
# ---------------------------------------------------------------------------

def _hull_boundary(points: np.ndarray, kind: str, part: int, body: int,
                   offset: np.ndarray) -> CBoundary:
    hull = ConvexHull(points)
    if points.shape[1] == 2:
        verts = points[hull.vertices]          # counter-clockwise order
        mesh = np.arange(len(verts))
    else:
        keep = hull.vertices
        remap = -np.ones(len(points), dtype=int)
        remap[keep] = np.arange(len(keep))
        verts = points[keep]
        mesh = remap[hull.simplices]
    normals = hull.equations[:, :-1]
    offsets = -hull.equations[:, -1]
    return CBoundary(kind, verts, mesh, part, body, np.asarray(offset, dtype=float),
                     normals, offsets)


def _chebyshev_center(normals: np.ndarray, offsets: np.ndarray):
    """Center of the largest inscribed ball of {x : N x <= b}, or None."""
    d = normals.shape[1]
    res = linprog(c=np.r_[np.zeros(d), -1.0],
                  A_ub=np.c_[normals, np.ones(len(normals))],
                  b_ub=offsets, bounds=[(None, None)] * d + [(0.0, None)],
                  method="highs")
    if not res.success or res.x[-1] <= 1e-12:
        return None
    return res.x[:d]


def _halfspace_boundary(normals: np.ndarray, offsets: np.ndarray, interior: np.ndarray,
                        part: int, body: int, off: np.ndarray) -> CBoundary:
    """Arena-difference polytope from inward-shifted supporting half-spaces."""
    margin = offsets - normals @ interior
    if np.any(margin <= 1e-12):
        interior = _chebyshev_center(normals, offsets)
        if interior is None:
            raise ErosionDegenerateError(part, body, "empty Minkowski difference")
    try:
        hs = HalfspaceIntersection(np.c_[normals, -offsets], interior)
    except QhullError as exc:
        raise ErosionDegenerateError(part, body, f"degenerate erosion ({exc})") from exc
    return _hull_boundary(hs.intersections, ARENA_DIFF, part, body, off)


def build_cobstacles(robot_parts, obstacles, arenas,
                     n_vertices: int = DEFAULT_N_VERTICES) -> list[CBoundary]:
    """All C-obstacle and C-arena boundaries for a robot at a fixed shape.

    ``robot_parts`` is a list of (Ellipsoid, offset) pairs, the ellipsoids
    posed at the slice's rotation and the offsets giving each part's center
    relative to the common reference point (the base center). Every boundary
    is shifted by -offset so it can be queried with reference-point positions.
    """
    if robot_parts and robot_parts[0][0].dim == 3 and n_vertices < 12:
        raise InvalidArgumentError("need n_vertices >= 12 in 3D")
    out: list[CBoundary] = []
    for pi, (part, t_i) in enumerate(robot_parts):
        t_i = np.asarray(t_i, dtype=float)
        for bi, obs in enumerate(obstacles):
            pts, _, grads = sq_surface_grid(obs, n_vertices)
            mapped = pts + _mink_offsets(obs, part, pts, grads)
            world = obs.pose.apply(mapped) - t_i
            out.append(_hull_boundary(world, OBSTACLE_SUM, pi, bi, t_i))
        for bi, arena in enumerate(arenas):
            pts, _, grads = sq_surface_grid(arena, n_vertices)
            mapped = pts - _mink_offsets(arena, part, pts, grads)
            world = arena.pose.apply(mapped) - t_i
            normals = grads @ arena.pose.rotation.matrix().T
            normals /= np.linalg.norm(normals, axis=1)[:, None]
            offsets = np.einsum("ij,ij->i", normals, world)
            interior = arena.center - t_i
            out.append(_halfspace_boundary(normals, offsets, interior, pi, bi, t_i))
    return out


# ---------------------------------------------------------------------------
# queries
# ---------------------------------------------------------------------------

def points_in_cboundary(points, cb: CBoundary, tol: float | None = None):
    """Vectorized membership test: inside or on the discretized boundary."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    if tol is None:
        tol = _IN_TOL * cb.scale
    return np.all(p @ cb.facet_normals.T <= cb.facet_offsets + tol, axis=1)


def point_in_cboundary(p, cb: CBoundary, tol: float | None = None) -> bool:
    return bool(points_in_cboundary(np.asarray(p, dtype=float)[None, :], cb, tol)[0])


def sweep_axis(dim: int) -> int:
    """Sweep lines run parallel to x in 2D and to z in 3D."""
    return 0 if dim == 2 else 2


def line_cboundary_interval(anchor, cb: CBoundary):
    """Parameter interval of an axis-parallel line inside the polytope.

    ``anchor`` holds the fixed transverse coordinates: (y,) in 2D, (x, y) in
    3D. Returns (lo, hi) along the sweep axis, or None when the line misses
    the polytope or only grazes it.
    """
    d = cb.dim
    axis = sweep_axis(d)
    p0 = np.zeros(d)
    p0[[i for i in range(d) if i != axis]] = np.asarray(anchor, dtype=float)
    den = cb.facet_normals[:, axis]
    num = cb.facet_offsets - cb.facet_normals @ p0
    lo, hi = -np.inf, np.inf
    small = np.abs(den) < 1e-14
    if np.any(num[small] < 0.0):
        return None
    pos = den > 0.0
    neg = den < 0.0
    if np.any(pos):
        hi = np.min(num[pos] / den[pos])
    if np.any(neg):
        lo = np.max(num[neg] / den[neg])
    if not np.isfinite(lo) or not np.isfinite(hi):
        return None
    if hi - lo < 1e-9 * cb.scale:
        return None
    return float(lo), float(hi)


def line_intervals(anchors: np.ndarray, cb: CBoundary):
    """Line/polytope intervals for a batch of anchors: arrays (lo, hi, hit)."""
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    d = cb.dim
    axis = sweep_axis(d)
    other = [i for i in range(d) if i != axis]
    p0 = np.zeros((len(anchors), d))
    p0[:, other] = anchors
    den = cb.facet_normals[:, axis]
    num = cb.facet_offsets[None, :] - p0 @ cb.facet_normals.T
    lo = np.full(len(anchors), -np.inf)
    hi = np.full(len(anchors), np.inf)
    pos = den > 1e-14
    neg = den < -1e-14
    small = ~(pos | neg)
    if np.any(pos):
        hi = np.min(num[:, pos] / den[pos], axis=1)
    if np.any(neg):
        lo = np.max(num[:, neg] / den[neg], axis=1)
    feasible = ~np.any(num[:, small] < 0.0, axis=1) if np.any(small) else np.ones(len(anchors), bool)
    hit = feasible & np.isfinite(lo) & np.isfinite(hi) & (hi - lo >= 1e-9 * cb.scale)
    return lo, hi, hit


def segment_clip(p: np.ndarray, q: np.ndarray, cb: CBoundary):
    """Clip segment p->q against the polytope; (t0, t1) in [0, 1] or None."""
    dvec = q - p
    den = cb.facet_normals @ dvec
    num = cb.facet_offsets - cb.facet_normals @ p
    t0, t1 = 0.0, 1.0
    small = np.abs(den) < 1e-14
    if np.any(num[small] < 0.0):
        return None
    pos = den > 0.0
    neg = den < 0.0
    if np.any(pos):
        t1 = min(t1, float(np.min(num[pos] / den[pos])))
    if np.any(neg):
        t0 = max(t0, float(np.max(num[neg] / den[neg])))
    if t1 - t0 <= 1e-12:
        return None
    return t0, t1


def dump_off(cb: CBoundary) -> str:
    """OFF-style indexed facet mesh: counts line, vertex lines, facet lines."""
    lines = ["OFF"]
    if cb.dim == 2:
        lines.append(f"{len(cb.samples)} 1 0")
        lines += [" ".join(repr(c) for c in v) for v in cb.samples]
        lines.append(f"{len(cb.samples)} " + " ".join(str(i) for i in cb.mesh))
    else:
        lines.append(f"{len(cb.samples)} {len(cb.mesh)} 0")
        lines += [" ".join(repr(c) for c in v) for v in cb.samples]
        lines += ["3 " + " ".join(str(i) for i in f) for f in cb.mesh]
    return "\n".join(lines) + "\n"
