"""Core geometry: rotations, poses, ellipsoids, superquadrics.

Conventions used throughout the package:

* 2D rotations are stored as an angle wrapped to (-pi, pi]; 3D rotations as a
  unit quaternion [w, x, y, z] canonicalized to a nonnegative scalar part
  (ties at w == 0 broken by making the first nonzero vector component
  positive).
* Superquadric exponents live strictly inside (0, 2) so bodies are strictly
  convex with a C1 boundary; out-of-range values are clamped with a warning.
* All power evaluations use signed powers, sgn(x) * |x|**p, so negative bases
  never produce complex values.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import beta as beta_fn, gamma as gamma_fn

from .errors import InvalidArgumentError

EXPONENT_MIN = 0.1
EXPONENT_MAX = 1.9

_TINY = 1e-12


def wrap_angle(theta):
    """Wrap an angle (or array of angles) into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), 2.0 * np.pi)


def spow(x, p):
    """Signed power sgn(x) * |x|**p, elementwise."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** p


# ---------------------------------------------------------------------------
# quaternion helpers ([w, x, y, z], unit norm)
# ---------------------------------------------------------------------------

def quat_canonical(q):
    """Normalize and flip sign so the scalar part is nonnegative.

    Scalar parts within 1e-12 of zero (180-degree rotations up to float
    error) are treated as ties, resolved by making the first non-negligible
    vector component positive, so antipodal representations always collapse
    to the same storage.
    """
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n < _TINY:
        raise InvalidArgumentError("zero-norm quaternion")
    q = q / n
    if q[0] < -_TINY:
        q = -q
    elif q[0] <= _TINY:
        for c in q[1:]:
            if abs(c) > _TINY:
                if c < 0.0:
                    q = -q
                break
    return q


def quat_mul(q1, q2):
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def quat_conj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_to_matrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_from_matrix(R):
    R = np.asarray(R, dtype=float)
    t = np.trace(R)
    if t > 0.0:
        s = np.sqrt(t + 1.0) * 2.0
        q = np.array([0.25 * s,
                      (R[2, 1] - R[1, 2]) / s,
                      (R[0, 2] - R[2, 0]) / s,
                      (R[1, 0] - R[0, 1]) / s])
    else:
        i = int(np.argmax(np.diag(R)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(max(R[i, i] - R[j, j] - R[k, k] + 1.0, 0.0)) * 2.0
        q = np.empty(4)
        q[0] = (R[k, j] - R[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (R[j, i] + R[i, j]) / s
        q[1 + k] = (R[k, i] + R[i, k]) / s
    return quat_canonical(q)


def quat_from_rotvec(phi):
    phi = np.asarray(phi, dtype=float)
    theta = np.linalg.norm(phi)
    if theta < 1e-10:
        q = np.array([1.0, 0.5 * phi[0], 0.5 * phi[1], 0.5 * phi[2]])
    else:
        axis = phi / theta
        q = np.concatenate([[np.cos(theta / 2.0)], np.sin(theta / 2.0) * axis])
    return quat_canonical(q)


def quat_to_rotvec(q):
    """Rotation vector of a canonical quaternion; angle in [0, pi]."""
    w = min(max(q[0], -1.0), 1.0)
    v = np.asarray(q[1:], dtype=float)
    vn = np.linalg.norm(v)
    theta = 2.0 * np.arctan2(vn, w)
    if vn < _TINY:
        return 2.0 * v
    return theta * v / vn


def quat_slerp(q1, q2, tau):
    """Spherical linear interpolation along the shorter arc."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    dot = float(np.dot(q1, q2))
    if dot < 0.0:
        q2, dot = -q2, -dot
    dot = min(dot, 1.0)
    ang = np.arccos(dot)
    if ang < 1e-10:
        return quat_canonical(q1 + tau * (q2 - q1))
    s = np.sin(ang)
    return quat_canonical((np.sin((1 - tau) * ang) / s) * q1 + (np.sin(tau * ang) / s) * q2)


def uniform_quaternion(rng):
    """Uniform random rotation quaternion from three uniform variates."""
    u1, u2, u3 = rng.random(3)
    a, b = np.sqrt(1.0 - u1), np.sqrt(u1)
    return np.array([a * np.sin(2 * np.pi * u2),
                     a * np.cos(2 * np.pi * u2),
                     b * np.sin(2 * np.pi * u3),
                     b * np.cos(2 * np.pi * u3)])


def _skew(v):
    return np.array([[0.0, -v[2], v[1]],
                     [v[2], 0.0, -v[0]],
                     [-v[1], v[0], 0.0]])


# ---------------------------------------------------------------------------
# Rotation and Pose
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rotation:
    """An element of SO(2) or SO(3) in canonical storage."""

    dim: int
    data: np.ndarray  # shape (1,) wrapped angle, or (4,) canonical quaternion

    def __post_init__(self):
        if self.dim == 2:
            d = np.atleast_1d(np.asarray(self.data, dtype=float))
            if d.shape != (1,) or not np.isfinite(d).all():
                raise InvalidArgumentError("2D rotation needs one finite angle")
            d = wrap_angle(d)
        elif self.dim == 3:
            d = np.asarray(self.data, dtype=float)
            if d.shape != (4,) or not np.isfinite(d).all():
                raise InvalidArgumentError("3D rotation needs a 4-vector quaternion")
            d = quat_canonical(d)
            if abs(np.linalg.norm(d) - 1.0) > 1e-9:
                raise InvalidArgumentError("quaternion norm deviates from 1")
        else:
            raise InvalidArgumentError(f"unsupported dimension {self.dim}")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @staticmethod
    def identity(dim: int) -> "Rotation":
        if dim == 2:
            return Rotation(2, np.zeros(1))
        return Rotation(3, np.array([1.0, 0.0, 0.0, 0.0]))

    @staticmethod
    def from_angle(theta: float) -> "Rotation":
        return Rotation(2, np.array([float(theta)]))

    @staticmethod
    def from_quat(q) -> "Rotation":
        return Rotation(3, np.asarray(q, dtype=float))

    @staticmethod
    def from_rotvec(phi) -> "Rotation":
        return Rotation(3, quat_from_rotvec(phi))

    @staticmethod
    def from_matrix(R) -> "Rotation":
        R = np.asarray(R, dtype=float)
        if R.shape == (2, 2):
            return Rotation.from_angle(np.arctan2(R[1, 0], R[0, 0]))
        return Rotation(3, quat_from_matrix(R))

    @property
    def angle(self) -> float:
        if self.dim != 2:
            raise InvalidArgumentError("angle only defined for 2D rotations")
        return float(self.data[0])

    @property
    def quat(self) -> np.ndarray:
        if self.dim != 3:
            raise InvalidArgumentError("quat only defined for 3D rotations")
        return self.data

    def matrix(self) -> np.ndarray:
        if self.dim == 2:
            c, s = np.cos(self.angle), np.sin(self.angle)
            return np.array([[c, -s], [s, c]])
        return quat_to_matrix(self.data)

    def compose(self, other: "Rotation") -> "Rotation":
        if self.dim != other.dim:
            raise InvalidArgumentError("dimension mismatch")
        if self.dim == 2:
            return Rotation.from_angle(self.angle + other.angle)
        return Rotation(3, quat_mul(self.data, other.data))

    def inverse(self) -> "Rotation":
        if self.dim == 2:
            return Rotation.from_angle(-self.angle)
        return Rotation(3, quat_conj(self.data))

    def apply(self, vectors):
        """Rotate one vector (d,) or a batch (n, d)."""
        v = np.asarray(vectors, dtype=float)
        return v @ self.matrix().T

    def isclose(self, other: "Rotation", tol: float = 1e-9) -> bool:
        return rotation_distance(self, other) < tol


@dataclass(frozen=True)
class Pose:
    """Rigid-body transform (rotation, translation) in SE(2) or SE(3)."""

    rotation: Rotation
    translation: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=float)
        if t.shape != (self.rotation.dim,) or not np.isfinite(t).all():
            raise InvalidArgumentError("translation must be a finite d-vector")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def identity(dim: int) -> "Pose":
        return Pose(Rotation.identity(dim), np.zeros(dim))

    @property
    def dim(self) -> int:
        return self.rotation.dim

    def compose(self, other: "Pose") -> "Pose":
        return Pose(self.rotation.compose(other.rotation),
                    self.translation + self.rotation.apply(other.translation))

    def inverse(self) -> "Pose":
        rinv = self.rotation.inverse()
        return Pose(rinv, -rinv.apply(self.translation))

    def apply(self, points):
        return np.asarray(points, dtype=float) @ self.rotation.matrix().T + self.translation

    def matrix(self) -> np.ndarray:
        d = self.dim
        T = np.eye(d + 1)
        T[:d, :d] = self.rotation.matrix()
        T[:d, d] = self.translation
        return T


# ---------------------------------------------------------------------------
# Bodies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ellipsoid:
    """Ellipsoid given by semi-axes and a pose; shape matrix A = R diag(a) R^T."""

    semi_axes: np.ndarray
    pose: Pose

    def __post_init__(self):
        a = np.asarray(self.semi_axes, dtype=float)
        if a.ndim != 1 or a.shape[0] != self.pose.dim:
            raise InvalidArgumentError("semi_axes must match pose dimension")
        if not np.isfinite(a).all() or np.any(a <= 0.0):
            raise InvalidArgumentError("semi-axes must be finite and strictly positive")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "semi_axes", a)

    @property
    def dim(self) -> int:
        return self.pose.dim

    @property
    def center(self) -> np.ndarray:
        return self.pose.translation

    def shape_matrix(self) -> np.ndarray:
        R = self.pose.rotation.matrix()
        return R @ np.diag(self.semi_axes) @ R.T

    def quad_matrix(self) -> np.ndarray:
        """Matrix Q of the implicit form (x - c)^T Q (x - c) <= 1."""
        R = self.pose.rotation.matrix()
        return R @ np.diag(1.0 / self.semi_axes**2) @ R.T

    def implicit(self, points):
        """(x - c)^T Q (x - c) for one point or a batch."""
        p = np.atleast_2d(np.asarray(points, dtype=float)) - self.center
        q = self.quad_matrix()
        vals = np.einsum("ni,ij,nj->n", p, q, p)
        return vals if np.asarray(points).ndim > 1 else float(vals[0])

    def support(self, directions):
        """Support function h(u) = c . u + ||diag(a) R^T u|| for unit u."""
        u = np.atleast_2d(np.asarray(directions, dtype=float))
        R = self.pose.rotation.matrix()
        vals = np.linalg.norm((u @ R) * self.semi_axes, axis=1) + u @ self.center
        return vals if np.asarray(directions).ndim > 1 else float(vals[0])

    def surface_points(self, n: int) -> np.ndarray:
        """n (approximately, in 3D) points on the surface, world frame."""
        u = unit_sphere_grid(self.dim, n)
        R = self.pose.rotation.matrix()
        return (u * self.semi_axes) @ R.T + self.center

    def volume(self) -> float:
        a = self.semi_axes
        if self.dim == 2:
            return float(np.pi * a[0] * a[1])
        return float(4.0 / 3.0 * np.pi * a[0] * a[1] * a[2])


@dataclass(frozen=True)
class Superquadric:
    """Strictly convex superellipse (2D) or superquadric (3D)."""

    semi_axes: np.ndarray
    exponents: np.ndarray
    pose: Pose

    def __post_init__(self):
        a = np.asarray(self.semi_axes, dtype=float)
        e = np.atleast_1d(np.asarray(self.exponents, dtype=float))
        d = self.pose.dim
        if a.shape != (d,):
            raise InvalidArgumentError("semi_axes must match pose dimension")
        if e.shape != (d - 1,):
            raise InvalidArgumentError("need 1 exponent in 2D, 2 in 3D")
        if not np.isfinite(a).all() or np.any(a <= 0.0):
            raise InvalidArgumentError("semi-axes must be finite and strictly positive")
        if not np.isfinite(e).all():
            raise InvalidArgumentError("exponents must be finite")
        if np.any(e < EXPONENT_MIN) or np.any(e > EXPONENT_MAX):
            warnings.warn(
                f"exponents {e.tolist()} clamped to [{EXPONENT_MIN}, {EXPONENT_MAX}] "
                "to keep the body strictly convex and well conditioned",
                stacklevel=2,
            )
            e = np.clip(e, EXPONENT_MIN, EXPONENT_MAX)
        a = a.copy()
        a.setflags(write=False)
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "semi_axes", a)
        object.__setattr__(self, "exponents", e)

    @property
    def dim(self) -> int:
        return self.pose.dim

    @property
    def center(self) -> np.ndarray:
        return self.pose.translation

    def is_ellipsoid(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.exponents - 1.0) < tol))


@dataclass(frozen=True)
class SurfaceSample:
    """A surface point with its parameter vector and outward gradient (body frame)."""

    point: np.ndarray
    param: np.ndarray
    gradient: np.ndarray


# ---------------------------------------------------------------------------
# superquadric evaluation
# ---------------------------------------------------------------------------

def _check_points(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise InvalidArgumentError(f"expected {dim}-vectors, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise InvalidArgumentError("non-finite input point")
    return x


def sq_implicit(sq: Superquadric, x):
    """Implicit value Phi(x) in the body frame: <1 inside, =1 on the boundary."""
    x = _check_points(x, sq.dim)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    a = sq.semi_axes
    if sq.dim == 2:
        eps = sq.exponents[0]
        val = np.abs(x[:, 0] / a[0]) ** (2.0 / eps) + np.abs(x[:, 1] / a[1]) ** (2.0 / eps)
    else:
        e1, e2 = sq.exponents
        g = (np.abs(x[:, 0] / a[0]) ** (2.0 / e2)
             + np.abs(x[:, 1] / a[1]) ** (2.0 / e2))
        val = g ** (e2 / e1) + np.abs(x[:, 2] / a[2]) ** (2.0 / e1)
    return float(val[0]) if single else val


def sq_gradient(sq: Superquadric, x):
    """Analytic outward gradient of Phi in the body frame.

    Exact zeros are nudged to 1e-300 * semi-axis (values that small are
    indistinguishable from zero on the C1 boundary) and the 3D cross term is
    evaluated in factored log form, so the result is finite with no spurious
    overflow even for exponents near the ends of (0, 2).
    """
    x = _check_points(x, sq.dim)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    a = sq.semi_axes
    sign = np.where(x >= 0.0, 1.0, -1.0)
    t = np.maximum(np.abs(x) / a, 1e-300)
    g = np.empty_like(t)
    if sq.dim == 2:
        eps = sq.exponents[0]
        p = 2.0 / eps
        g[:, 0] = (p / a[0]) * t[:, 0] ** (p - 1.0) * sign[:, 0]
        g[:, 1] = (p / a[1]) * t[:, 1] ** (p - 1.0) * sign[:, 1]
    else:
        e1, e2 = sq.exponents
        p2 = 2.0 / e2
        # t**(p2-1) * (tx**p2 + ty**p2)**(e2/e1 - 1), factored around the
        # larger of tx, ty to keep intermediate powers in range
        m = np.maximum(t[:, 0], t[:, 1])
        s = (t[:, 0] / m) ** p2 + (t[:, 1] / m) ** p2  # in [1, 2]
        s_pow = s ** (e2 / e1 - 1.0)
        log_m = np.log(m)
        for i in range(2):
            log_val = (2.0 / e1 - p2) * log_m + (p2 - 1.0) * np.log(t[:, i])
            g[:, i] = (2.0 / (e1 * a[i])) * np.exp(log_val) * s_pow * sign[:, i]
        g[:, 2] = (2.0 / (e1 * a[2])) * t[:, 2] ** (2.0 / e1 - 1.0) * sign[:, 2]
    return g[0] if single else g


def surface_grid_dims(n: int) -> tuple[int, int]:
    """(n_eta, n_omega) interior grid so that 2 + n_eta * n_omega is close to n."""
    n_eta = max(2, int(round(np.sqrt((n - 2) / 2.0))))
    n_omega = max(4, int(round((n - 2) / n_eta)))
    return n_eta, n_omega


def sq_surface_grid(sq: Superquadric, n: int):
    """Deterministic parameter grid on the surface (body frame).

    Returns (points, params, gradients) as arrays. In 2D there are exactly n
    samples at uniform angles in [-pi, pi); in 3D a near-equal-area
    latitude/longitude grid plus the two poles, with total count as close to n
    as the grid allows.
    """
    if sq.dim == 2:
        if n < 4:
            raise InvalidArgumentError("need n >= 4 samples in 2D")
        theta = -np.pi + 2.0 * np.pi * np.arange(n) / n
        a, b = sq.semi_axes
        eps = sq.exponents[0]
        pts = np.column_stack([a * spow(np.cos(theta), eps),
                               b * spow(np.sin(theta), eps)])
        params = theta[:, None]
    else:
        if n < 12:
            raise InvalidArgumentError("need n >= 12 samples in 3D")
        n_eta, n_omega = surface_grid_dims(n)
        u = -1.0 + 2.0 * (np.arange(n_eta) + 1.0) / (n_eta + 1.0)
        eta = np.arcsin(u)
        omega = -np.pi + 2.0 * np.pi * np.arange(n_omega) / n_omega
        ee, ww = np.meshgrid(eta, omega, indexing="ij")
        ee, ww = ee.ravel(), ww.ravel()
        # poles close the grid
        ee = np.concatenate([ee, [-np.pi / 2.0, np.pi / 2.0]])
        ww = np.concatenate([ww, [0.0, 0.0]])
        a, b, c = sq.semi_axes
        e1, e2 = sq.exponents
        ce, se = np.cos(ee), np.sin(ee)
        pts = np.column_stack([
            a * spow(ce, e1) * spow(np.cos(ww), e2),
            b * spow(ce, e1) * spow(np.sin(ww), e2),
            c * spow(se, e1),
        ])
        params = np.column_stack([ee, ww])
    grads = sq_gradient(sq, pts)
    return pts, params, grads


def sq_surface_points(sq: Superquadric, n: int) -> list[SurfaceSample]:
    """Surface samples (body frame) covering the full parameter range."""
    pts, params, grads = sq_surface_grid(sq, n)
    return [SurfaceSample(p, prm, g) for p, prm, g in zip(pts, params, grads)]


def sq_volume(sq: Superquadric) -> float:
    """Volume of a 3D superquadric from the beta-function identity."""
    if sq.dim != 3:
        raise InvalidArgumentError("sq_volume is defined for 3D bodies; see sq_area")
    a, b, c = sq.semi_axes
    e1, e2 = sq.exponents
    return float(2.0 * a * b * c * e1 * e2
                 * beta_fn(e1 / 2.0 + 1.0, e1)
                 * beta_fn(e2 / 2.0, e2 / 2.0))


def sq_area(sq: Superquadric) -> float:
    """Area of a 2D superellipse."""
    if sq.dim != 2:
        raise InvalidArgumentError("sq_area is defined for 2D bodies; see sq_volume")
    a, b = sq.semi_axes
    eps = sq.exponents[0]
    return float(4.0 * a * b * gamma_fn(1.0 + eps / 2.0) ** 2 / gamma_fn(1.0 + eps))


def unit_sphere_grid(dim: int, n: int) -> np.ndarray:
    """Deterministic unit directions: n angles in 2D, ~n grid points in 3D."""
    if dim == 2:
        theta = -np.pi + 2.0 * np.pi * np.arange(max(n, 4)) / max(n, 4)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    sphere = Superquadric(np.ones(3), np.ones(2), Pose.identity(3))
    pts, _, _ = sq_surface_grid(sphere, max(n, 12))
    return pts


# ---------------------------------------------------------------------------
# interpolation and distances
# ---------------------------------------------------------------------------

def _v_matrix_2d(phi: float) -> np.ndarray:
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    if abs(phi) < 1e-9:
        return np.eye(2) * (1.0 - phi * phi / 6.0) + J * (phi / 2.0)
    return np.eye(2) * (np.sin(phi) / phi) + J * ((1.0 - np.cos(phi)) / phi)


def _v_matrix_3d(phi: np.ndarray) -> np.ndarray:
    theta = np.linalg.norm(phi)
    K = _skew(phi)
    if theta < 1e-6:
        A = 0.5 - theta**2 / 24.0
        B = 1.0 / 6.0 - theta**2 / 120.0
    else:
        A = (1.0 - np.cos(theta)) / theta**2
        B = (theta - np.sin(theta)) / theta**3
    return np.eye(3) + A * K + B * (K @ K)


def _v_inv_3d(phi: np.ndarray) -> np.ndarray:
    theta = np.linalg.norm(phi)
    K = _skew(phi)
    if theta < 1e-6:
        gamma = 1.0 / 12.0 + theta**2 / 720.0
    elif abs(np.sin(theta)) < 1e-6:
        # theta near pi: (1 + cos t) / (2 t sin t) -> (pi - t) / (4 t)
        gamma = 1.0 / theta**2 - (np.pi - theta) / (4.0 * theta)
    else:
        gamma = 1.0 / theta**2 - (1.0 + np.cos(theta)) / (2.0 * theta * np.sin(theta))
    return np.eye(3) - 0.5 * K + gamma * (K @ K)


def _relative_log(r1: Rotation, r2: Rotation):
    """Log of r1^{-1} r2; 2D scalar angle or 3D rotation vector.

    The angle-pi branch is non-unique; canonical storage picks one
    deterministically and a RuntimeWarning flags the case.
    """
    if r1.dim == 2:
        phi = wrap_angle(r2.angle - r1.angle)
        if abs(abs(float(phi)) - np.pi) < 1e-12:
            warnings.warn("rotation angle pi between interpolation endpoints; "
                          "branch chosen deterministically", RuntimeWarning, stacklevel=3)
        return float(phi)
    q_rel = quat_canonical(quat_mul(quat_conj(r1.quat), r2.quat))
    if abs(q_rel[0]) < 1e-12:
        warnings.warn("rotation angle pi between interpolation endpoints; "
                      "branch chosen deterministically", RuntimeWarning, stacklevel=3)
    return quat_to_rotvec(q_rel)


def rotation_interpolate(r1: Rotation, r2: Rotation, n: int) -> list[Rotation]:
    """n rotations along the geodesic from r1 to r2 (endpoints exact)."""
    if n < 2:
        raise InvalidArgumentError("need n >= 2 interpolation steps")
    phi = _relative_log(r1, r2)
    out = []
    for k in range(n):
        if k == 0:
            out.append(r1)
        elif k == n - 1:
            out.append(r2)
        else:
            tau = k / (n - 1)
            if r1.dim == 2:
                out.append(Rotation.from_angle(r1.angle + tau * phi))
            else:
                out.append(Rotation(3, quat_mul(r1.quat, quat_from_rotvec(tau * np.asarray(phi)))))
    return out


def pose_interpolate(g1: Pose, g2: Pose, n: int) -> list[Pose]:
    """n poses g1 * exp(tau * log(g1^{-1} g2)) at tau = k/(n-1); endpoints exact.

    The rotation of each step equals the pure rotation-group interpolation of
    the endpoints' rotations.
    """
    if n < 2:
        raise InvalidArgumentError("need n >= 2 interpolation steps")
    if g1.dim != g2.dim:
        raise InvalidArgumentError("dimension mismatch")
    dim = g1.dim
    rel = g1.inverse().compose(g2)
    phi = _relative_log(g1.rotation, g2.rotation)
    rots = rotation_interpolate(g1.rotation, g2.rotation, n)
    if dim == 2:
        rho = np.linalg.solve(_v_matrix_2d(phi), rel.translation)
    else:
        rho = _v_inv_3d(np.asarray(phi)) @ rel.translation
    R1 = g1.rotation.matrix()
    out = []
    for k in range(n):
        if k == 0:
            out.append(g1)
            continue
        if k == n - 1:
            out.append(g2)
            continue
        tau = k / (n - 1)
        if dim == 2:
            v = _v_matrix_2d(tau * phi)
        else:
            v = _v_matrix_3d(tau * np.asarray(phi))
        t = g1.translation + R1 @ (v @ (tau * rho))
        out.append(Pose(rots[k], t))
    return out


def rotation_distance(r1: Rotation, r2: Rotation) -> float:
    """Distance between rotations: min(||q1 - q2||, ||q1 + q2||) in 3D,
    absolute wrapped angle difference in 2D."""
    if r1.dim != r2.dim:
        raise InvalidArgumentError("dimension mismatch")
    if r1.dim == 2:
        return float(abs(wrap_angle(r1.angle - r2.angle)))
    q1, q2 = r1.quat, r2.quat
    return float(min(np.linalg.norm(q1 - q2), np.linalg.norm(q1 + q2)))
