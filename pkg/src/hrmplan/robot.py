"""Multi-body rigid robots, articulated chain/tree robots, forward kinematics
and random shape sampling.

A robot is a union of ellipsoidal parts. Rigid robots store fixed relative
poses; articulated robots store a kinematic tree of revolute joints. A
"shape" fixes all rotational components (base orientation plus joint angles);
forward kinematics at a shape poses every part with the base center at the
origin of the slice frame and reports each part's positional offset, which the
Minkowski construction uses as its reference-point shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, InvalidConfigurationError
from .geom import (Ellipsoid, Pose, Rotation, rotation_distance,
                   rotation_interpolate, uniform_quaternion, wrap_angle)


@dataclass(frozen=True)
class Shape:
    """Rotational configuration: base orientation plus joint angles."""

    base_rotation: Rotation
    joint_angles: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        j = wrap_angle(np.asarray(self.joint_angles, dtype=float).reshape(-1))
        j.setflags(write=False)
        object.__setattr__(self, "joint_angles", j)

    @property
    def dim(self) -> int:
        return self.base_rotation.dim


@dataclass(frozen=True)
class MultiBodyRobot:
    """Finite union of rigidly connected ellipsoids; the base is listed first.

    Each part's pose is its fixed transform relative to the base frame.
    """

    base: Ellipsoid
    links: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        for ln in self.links:
            if ln.dim != self.base.dim:
                raise InvalidArgumentError("link dimension mismatch")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def parts(self) -> tuple:
        return (self.base,) + self.links

    @property
    def n_joints(self) -> int:
        return 0

    def joint_limits(self):
        return np.zeros((0, 2))


@dataclass(frozen=True)
class Joint:
    """Revolute joint: fixed origin from the parent frame, axis, limits, link."""

    parent: int                 # -1 for the base frame, else an earlier joint
    origin: Pose
    limits: tuple
    link: Ellipsoid             # link shape, posed relative to the rotated joint frame
    axis: np.ndarray | None = None   # 3D only; 2D joints rotate in-plane

    def __post_init__(self):
        lo, hi = self.limits
        if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
            raise InvalidArgumentError("joint limits must be ordered and finite")
        if self.origin.dim == 3:
            ax = np.asarray(self.axis, dtype=float)
            n = np.linalg.norm(ax)
            if ax.shape != (3,) or n < 1e-12:
                raise InvalidArgumentError("3D joint needs a nonzero axis")
            ax = ax / n
            ax.setflags(write=False)
            object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "limits", (float(lo), float(hi)))


@dataclass(frozen=True)
class ArticulatedRobot:
    """Kinematic tree of revolute joints rooted at an ellipsoidal base."""

    base: Ellipsoid
    joints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "joints", tuple(self.joints))
        for i, j in enumerate(self.joints):
            if not (-1 <= j.parent < i):
                raise InvalidArgumentError(
                    f"joint {i} parent {j.parent} must reference the base (-1) "
                    "or an earlier joint")
            if j.origin.dim != self.base.dim:
                raise InvalidArgumentError("joint dimension mismatch")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    @property
    def parts(self) -> tuple:
        return (self.base,) + tuple(j.link for j in self.joints)

    def joint_limits(self) -> np.ndarray:
        return np.array([j.limits for j in self.joints]).reshape(-1, 2)


@dataclass(frozen=True)
class FKPart:
    """One robot part posed in the slice frame (base center at the origin)."""

    index: int
    ellipsoid: Ellipsoid
    offset: np.ndarray      # part center relative to the base center


@dataclass(frozen=True)
class Configuration:
    """Full configuration: shape plus base translation."""

    shape: Shape
    position: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.position, dtype=float)
        if p.shape != (self.shape.dim,):
            raise InvalidArgumentError("position must match the shape dimension")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "position", p)

    @property
    def dim(self) -> int:
        return self.shape.dim

    def base_pose(self) -> Pose:
        return Pose(self.shape.base_rotation, self.position)


def _joint_rotation(joint: Joint, angle: float, dim: int) -> Rotation:
    if dim == 2:
        return Rotation.from_angle(angle)
    return Rotation.from_rotvec(angle * joint.axis)


def forward_kinematics(robot, shape: Shape) -> list[FKPart]:
    """Pose all parts at the given shape with the base center at the origin."""
    if shape.dim != robot.dim:
        raise InvalidArgumentError("shape dimension mismatch")
    base_pose = Pose(shape.base_rotation, np.zeros(robot.dim))
    out = []
    if isinstance(robot, MultiBodyRobot):
        if len(shape.joint_angles) != 0:
            raise InvalidConfigurationError("rigid robot takes no joint angles")
        for i, part in enumerate(robot.parts):
            world = base_pose.compose(part.pose)
            out.append(FKPart(i, Ellipsoid(part.semi_axes, world), world.translation))
        return out
    if len(shape.joint_angles) != robot.n_joints:
        raise InvalidConfigurationError(
            f"expected {robot.n_joints} joint angles, got {len(shape.joint_angles)}")
    limits = robot.joint_limits()
    for k, theta in enumerate(shape.joint_angles):
        if theta < limits[k, 0] - 1e-12 or theta > limits[k, 1] + 1e-12:
            raise InvalidConfigurationError(
                f"joint {k} angle {theta} outside limits {tuple(limits[k])}")
    world = base_pose.compose(robot.base.pose)
    out.append(FKPart(0, Ellipsoid(robot.base.semi_axes, world), world.translation))
    frames = []
    for k, joint in enumerate(robot.joints):
        parent = base_pose if joint.parent == -1 else frames[joint.parent]
        frame = parent.compose(joint.origin).compose(
            Pose(_joint_rotation(joint, float(shape.joint_angles[k]), robot.dim),
                 np.zeros(robot.dim)))
        frames.append(frame)
        world = frame.compose(joint.link.pose)
        out.append(FKPart(k + 1, Ellipsoid(joint.link.semi_axes, world),
                          world.translation))
    return out


def sample_shape(robot, rng: np.random.Generator) -> Shape:
    """Random shape: uniform base orientation, joints uniform within limits."""
    if robot.dim == 2:
        base = Rotation.from_angle(rng.uniform(-np.pi, np.pi))
    else:
        base = Rotation.from_quat(uniform_quaternion(rng))
    limits = robot.joint_limits()
    joints = rng.uniform(limits[:, 0], limits[:, 1]) if len(limits) else np.zeros(0)
    return Shape(base, joints)


def shape_distance(s1: Shape, s2: Shape) -> float:
    """Rotation distance plus wrapped joint-angle L2 distance."""
    d = rotation_distance(s1.base_rotation, s2.base_rotation)
    if len(s1.joint_angles) or len(s2.joint_angles):
        d += float(np.linalg.norm(wrap_angle(s1.joint_angles - s2.joint_angles)))
    return d


def interpolate_shapes(s1: Shape, s2: Shape, n: int) -> list[Shape]:
    """Geodesic base-rotation steps with linearly interpolated (wrapped) joints."""
    rots = rotation_interpolate(s1.base_rotation, s2.base_rotation, n)
    dj = wrap_angle(s2.joint_angles - s1.joint_angles) if len(s1.joint_angles) else np.zeros(0)
    out = []
    for k, rot in enumerate(rots):
        tau = k / (n - 1)
        out.append(Shape(rot, s1.joint_angles + tau * dj))
    return out


def max_part_semi_axis(robot) -> float:
    return float(max(np.max(p.semi_axes) for p in robot.parts))
