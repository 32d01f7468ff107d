"""Enclosing-ellipsoid machinery and superquadric fitting.

* mvee: minimum volume enclosing ellipsoid of a point set (Khachiyan-style
  multiplicative updates on the lifted problem, then inflated minimally so
  containment holds to float precision).
* mvce: closed-form minimum volume concentric ellipsoid of two concentric
  ellipsoids (shrink one to a sphere, decompose the other, take axis-wise
  maxima, map back).
* compute_tfe: iterated MVCE over an interpolated orientation sequence; the
  resulting tightly-fitted ellipsoid bounds a part over a whole transition.
* fit_superquadric / fit_superellipse: damped least squares on the
  volume-weighted implicit residual, exponents kept inside (0.1, 1.9) by a
  sigmoid reparameterization, initialized from the MVEE.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, RankDeficiencyError
from .geom import (EXPONENT_MAX, EXPONENT_MIN, Ellipsoid, Pose, Rotation,
                   Superquadric, rotation_interpolate, sq_implicit)

MVEE_TOL = 1e-6
MVEE_MAX_ITER = 10_000


@dataclass(frozen=True)
class FitResult:
    """Outcome of a superquadric fit."""

    body: Superquadric
    residual: float          # mean |Phi**eps - 1| over the input points
    iterations: int
    converged: bool
    cost_history: tuple = field(default=(), repr=False)


# ---------------------------------------------------------------------------
# MVEE
# ---------------------------------------------------------------------------

def mvee(points, tol: float = MVEE_TOL, max_iter: int = MVEE_MAX_ITER) -> Ellipsoid:
    """Minimum volume enclosing ellipsoid of a point set.

    Requires at least d+1 affinely independent points; raises
    RankDeficiencyError on degenerate (collinear / coplanar) input.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    m, d = P.shape
    if m < d + 1:
        raise InvalidArgumentError(f"need at least {d + 1} points in {d}D")
    if np.linalg.matrix_rank(P - P.mean(axis=0), tol=1e-10 * max(1.0, np.abs(P).max())) < d:
        raise RankDeficiencyError("points are affinely dependent")
    Q = np.vstack([P.T, np.ones(m)])
    u = np.full(m, 1.0 / m)
    for _ in range(max_iter):
        X = Q @ (u[:, None] * Q.T)
        M = np.einsum("ij,ji->i", Q.T, np.linalg.solve(X, Q))
        j = int(np.argmax(M))
        step = (M[j] - d - 1.0) / ((d + 1.0) * (M[j] - 1.0))
        new_u = (1.0 - step) * u
        new_u[j] += step
        err = np.linalg.norm(new_u - u)
        u = new_u
        if err < tol:
            break
    c = P.T @ u
    cov = P.T @ (u[:, None] * P) - np.outer(c, c)
    Qmat = np.linalg.inv(cov) / d
    # inflate so every point satisfies the inequality exactly
    diff = P - c
    vals = np.einsum("ni,ij,nj->n", diff, Qmat, diff)
    worst = float(vals.max())
    if worst > 1.0:
        Qmat = Qmat / worst
    return _ellipsoid_from_quad(Qmat, c)


def _ellipsoid_from_quad(Qmat: np.ndarray, center: np.ndarray) -> Ellipsoid:
    """Ellipsoid from the quadratic form (x-c)^T Q (x-c) <= 1."""
    w, V = np.linalg.eigh((Qmat + Qmat.T) / 2.0)
    order = np.argsort(w)          # ascending eigenvalue = descending semi-axis
    w, V = w[order], V[:, order]
    if np.any(w <= 0.0):
        raise RankDeficiencyError("quadratic form not positive definite")
    if np.linalg.det(V) < 0.0:
        V[:, -1] = -V[:, -1]
    return Ellipsoid(1.0 / np.sqrt(w), Pose(Rotation.from_matrix(V), center))


# ---------------------------------------------------------------------------
# MVCE and TFE
# ---------------------------------------------------------------------------

def mvce(ea: Ellipsoid, eb: Ellipsoid) -> Ellipsoid:
    """Minimum volume concentric ellipsoid enclosing two concentric ellipsoids.

    Centers are ignored (the construction is concentric by definition); the
    result is centered at ea's center.
    """
    if ea.dim != eb.dim:
        raise InvalidArgumentError("dimension mismatch")
    r = float(np.min(eb.semi_axes))
    Rb = eb.pose.rotation.matrix()
    T = Rb @ np.diag(r / eb.semi_axes) @ Rb.T
    Tinv = Rb @ np.diag(eb.semi_axes / r) @ Rb.T
    Qa = ea.quad_matrix()
    Qp = Tinv @ Qa @ Tinv
    U, s, _ = np.linalg.svd((Qp + Qp.T) / 2.0)
    if np.linalg.det(U) < 0.0:
        U[:, -1] = -U[:, -1]
    a_shrunk = 1.0 / np.sqrt(s)
    a_max = np.maximum(a_shrunk, r)
    Qm = U @ np.diag(1.0 / a_max**2) @ U.T
    return _ellipsoid_from_quad(T @ Qm @ T, ea.center)


def tfe_of_orientations(semi_axes, orientations) -> Ellipsoid:
    """Iterated MVCE of one shape at a sequence of orientations (origin-centered)."""
    if len(orientations) == 0:
        raise InvalidArgumentError("need at least one orientation")
    axes = np.asarray(semi_axes, dtype=float)
    current = Ellipsoid(axes, Pose(orientations[0], np.zeros(len(axes))))
    for rot in orientations[1:]:
        current = mvce(current, Ellipsoid(axes, Pose(rot, np.zeros(len(axes)))))
    return current


def compute_tfe(parts_at_ri, r_i: Rotation, r_j: Rotation, n_point: int,
                robot=None, joint_path=None) -> list[Ellipsoid]:
    """Tightly-fitted ellipsoid per part over the r_i -> r_j transition.

    ``parts_at_ri`` are the parts posed at base rotation r_i. For articulated
    robots pass ``robot`` and ``joint_path`` = (joints_i, joints_j); part
    orientations then follow forward kinematics along the interpolated shape
    sequence. The rotation steps are the same ones edge validation uses.
    """
    if n_point < 2:
        raise InvalidArgumentError("need n_point >= 2")
    if robot is not None and joint_path is not None:
        from .robot import Shape, forward_kinematics, interpolate_shapes
        shapes = interpolate_shapes(Shape(r_i, np.asarray(joint_path[0], dtype=float)),
                                    Shape(r_j, np.asarray(joint_path[1], dtype=float)),
                                    n_point)
        seqs = None
        for shp in shapes:
            fk = forward_kinematics(robot, shp)
            if seqs is None:
                seqs = [[] for _ in fk]
            for k, part in enumerate(fk):
                seqs[k].append(part.ellipsoid.pose.rotation)
        return [tfe_of_orientations(p.ellipsoid.semi_axes, seq)
                for p, seq in zip(forward_kinematics(robot, shapes[0]), seqs)]
    steps = rotation_interpolate(r_i, r_j, n_point)
    out = []
    for part in parts_at_ri:
        rel = r_i.inverse().compose(part.pose.rotation)
        seq = [step.compose(rel) for step in steps]
        out.append(tfe_of_orientations(part.semi_axes, seq))
    return out


# ---------------------------------------------------------------------------
# superquadric fitting
# ---------------------------------------------------------------------------

def _eps_to_raw(eps):
    z = (np.asarray(eps, dtype=float) - EXPONENT_MIN) / (EXPONENT_MAX - EXPONENT_MIN)
    z = np.clip(z, 1e-6, 1.0 - 1e-6)
    return np.log(z / (1.0 - z))


def _raw_to_eps(raw):
    return EXPONENT_MIN + (EXPONENT_MAX - EXPONENT_MIN) / (1.0 + np.exp(-np.asarray(raw, dtype=float)))


def _unpack_params(p, dim):
    axes = np.exp(p[:dim])
    eps = _raw_to_eps(p[dim:dim + (dim - 1)])
    if dim == 2:
        rot = Rotation.from_angle(p[3])
        t = p[4:6]
    else:
        rot = Rotation.from_rotvec(p[5:8])
        t = p[8:11]
    return axes, eps, rot, t


def _fit_residuals(p, points, dim):
    axes, eps, rot, t = _unpack_params(p, dim)
    body = Superquadric(axes, eps, Pose(rot, t))
    local = (points - t) @ rot.matrix()
    phi = sq_implicit(body, local)
    f = np.abs(phi) ** eps[0]             # Phi**eps, the inside-outside form
    return np.sqrt(np.prod(axes)) * (f - 1.0)


def _fit_points(points, dim, max_iter: int):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    min_pts = 6 if dim == 2 else 11
    if points.shape[0] < min_pts or points.shape[1] != dim:
        raise InvalidArgumentError(f"need at least {min_pts} {dim}D points")
    init = mvee(points)
    if dim == 2:
        rot0 = np.array([init.pose.rotation.angle])
    else:
        rot0 = _rotvec_of(init.pose.rotation)
    p = np.concatenate([np.log(init.semi_axes), _eps_to_raw(np.ones(dim - 1)),
                        rot0, init.center])
    r = _fit_residuals(p, points, dim)
    cost = float(r @ r)
    history = [cost]
    lam = 1e-3
    converged = False
    accepted = 0
    for _ in range(max_iter):
        J = _numeric_jacobian(lambda q: _fit_residuals(q, points, dim), p, r)
        H = J.T @ J
        g = J.T @ r
        improved = False
        for _ in range(12):
            delta = np.linalg.solve(H + lam * np.diag(np.diag(H)) + 1e-12 * np.eye(len(p)), -g)
            p_try = p + delta
            r_try = _fit_residuals(p_try, points, dim)
            cost_try = float(r_try @ r_try)
            if cost_try < cost:
                rel_drop = (cost - cost_try) / max(cost, 1e-300)
                p, r, cost = p_try, r_try, cost_try
                history.append(cost)
                accepted += 1
                lam = max(lam / 3.0, 1e-12)
                improved = True
                if np.linalg.norm(delta) < 1e-10 or rel_drop < 1e-12:
                    converged = True
                break
            lam *= 10.0
            if lam > 1e12:
                break
        if converged:
            break
        if not improved:
            converged = True   # damping exhausted: no descent step left
            break
    axes, eps, rot, t = _unpack_params(p, dim)
    body = Superquadric(axes, eps, Pose(rot, t))
    local = (points - t) @ rot.matrix()
    resid = float(np.mean(np.abs(np.abs(sq_implicit(body, local)) ** eps[0] - 1.0)))
    return FitResult(body, resid, accepted, converged, tuple(history))


def _rotvec_of(rot: Rotation):
    from .geom import quat_to_rotvec
    return quat_to_rotvec(rot.quat)


def _numeric_jacobian(fn, p, r0):
    m, n = len(r0), len(p)
    J = np.empty((m, n))
    for i in range(n):
        h = 1e-6 * (1.0 + abs(p[i]))
        pp = p.copy()
        pp[i] += h
        J[:, i] = (fn(pp) - r0) / h
    return J


def fit_superquadric(points, max_iter: int = 150) -> FitResult:
    """Fit a 3D superquadric to points by volume-weighted damped least squares."""
    return _fit_points(points, 3, max_iter)


def fit_superellipse(points, max_iter: int = 150) -> FitResult:
    """Fit a 2D superellipse to points by volume-weighted damped least squares."""
    return _fit_points(points, 2, max_iter)
