"""Scene files: a human-readable YAML schema holding the arena and obstacle
superquadrics, the robot description, the query endpoints and planner
parameters. Loading validates every body against the geometry invariants and
reports violations with their field paths; save/load round-trips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import SceneValidationError
from .geom import Ellipsoid, Pose, Rotation, Superquadric
from .planner import PlannerParams
from .robot import ArticulatedRobot, Configuration, Joint, MultiBodyRobot, Shape

SCHEMA = "hrm-scene/1"


@dataclass(frozen=True)
class Scene:
    """Validated scene: geometry, robot, query endpoints, planner parameters."""

    dimension: int
    arenas: tuple
    obstacles: tuple
    robot: object
    start: Configuration
    goal: Configuration
    params: PlannerParams = field(default_factory=PlannerParams)
    name: str = "scene"


def _fail(path: str, message: str):
    raise SceneValidationError(f"{path}: {message}")


def _floats(node, path, count=None):
    if not isinstance(node, (list, tuple)):
        _fail(path, "expected a list of numbers")
    try:
        vals = [float(v) for v in node]
    except (TypeError, ValueError):
        _fail(path, "expected numbers")
    if count is not None and len(vals) != count:
        _fail(path, f"expected {count} values, got {len(vals)}")
    return np.array(vals)


def _pose(node, dim, path) -> Pose:
    if not isinstance(node, dict):
        _fail(path, "expected a mapping with position and angle/quaternion")
    pos = _floats(node.get("position", [0.0] * dim), f"{path}.position", dim)
    if dim == 2:
        rot = Rotation.from_angle(float(node.get("angle", 0.0)))
    else:
        quat = node.get("quaternion", [1.0, 0.0, 0.0, 0.0])
        rot = Rotation.from_quat(_floats(quat, f"{path}.quaternion", 4))
    return Pose(rot, pos)


def _pose_dict(pose: Pose) -> dict:
    d = {"position": [float(v) for v in pose.translation]}
    if pose.dim == 2:
        d["angle"] = float(pose.rotation.angle)
    else:
        d["quaternion"] = [float(v) for v in pose.rotation.quat]
    return d


def _superquadric(node, dim, path) -> Superquadric:
    if not isinstance(node, dict):
        _fail(path, "expected a mapping")
    axes = _floats(node.get("semi_axes"), f"{path}.semi_axes", dim)
    exps = _floats(node.get("exponents", [1.0] * (dim - 1)), f"{path}.exponents", dim - 1)
    try:
        return Superquadric(axes, exps, _pose(node.get("pose", {}), dim, f"{path}.pose"))
    except ValueError as exc:
        _fail(path, str(exc))


def _superquadric_dict(sq: Superquadric) -> dict:
    return {"semi_axes": [float(v) for v in sq.semi_axes],
            "exponents": [float(v) for v in sq.exponents],
            "pose": _pose_dict(sq.pose)}


def _ellipsoid(node, dim, path) -> Ellipsoid:
    if not isinstance(node, dict):
        _fail(path, "expected a mapping")
    axes = _floats(node.get("semi_axes"), f"{path}.semi_axes", dim)
    try:
        return Ellipsoid(axes, _pose(node.get("pose", {}), dim, f"{path}.pose"))
    except ValueError as exc:
        _fail(path, str(exc))


def _ellipsoid_dict(e: Ellipsoid) -> dict:
    return {"semi_axes": [float(v) for v in e.semi_axes], "pose": _pose_dict(e.pose)}


def _robot(node, dim, path):
    if not isinstance(node, dict) or "base" not in node:
        _fail(path, "robot needs a base ellipsoid")
    base = _ellipsoid(node["base"], dim, f"{path}.base")
    joints_node = node.get("joints") or []
    links_node = node.get("links") or []
    if joints_node and links_node:
        _fail(path, "robot cannot mix rigid links and joints")
    if joints_node:
        joints = []
        for k, jn in enumerate(joints_node):
            jp = f"{path}.joints[{k}]"
            if not isinstance(jn, dict):
                _fail(jp, "expected a mapping")
            try:
                joints.append(Joint(
                    parent=int(jn.get("parent", k - 1)),
                    origin=_pose(jn.get("origin", {}), dim, f"{jp}.origin"),
                    limits=tuple(_floats(jn.get("limits", [-np.pi, np.pi]),
                                         f"{jp}.limits", 2)),
                    link=_ellipsoid(jn.get("link"), dim, f"{jp}.link"),
                    axis=(_floats(jn["axis"], f"{jp}.axis", 3)
                          if dim == 3 else None),
                ))
            except KeyError as exc:
                _fail(jp, f"missing field {exc}")
            except ValueError as exc:
                _fail(jp, str(exc))
        try:
            return ArticulatedRobot(base, tuple(joints))
        except ValueError as exc:
            _fail(path, str(exc))
    links = [_ellipsoid(ln, dim, f"{path}.links[{k}]")
             for k, ln in enumerate(links_node)]
    return MultiBodyRobot(base, tuple(links))


def _robot_dict(robot) -> dict:
    d = {"base": _ellipsoid_dict(robot.base)}
    if isinstance(robot, ArticulatedRobot):
        d["joints"] = []
        for j in robot.joints:
            jd = {"parent": j.parent, "origin": _pose_dict(j.origin),
                  "limits": [float(j.limits[0]), float(j.limits[1])],
                  "link": _ellipsoid_dict(j.link)}
            if j.axis is not None:
                jd["axis"] = [float(v) for v in j.axis]
            d["joints"].append(jd)
    elif robot.links:
        d["links"] = [_ellipsoid_dict(ln) for ln in robot.links]
    return d


def _configuration(node, dim, n_joints, path) -> Configuration:
    if not isinstance(node, dict):
        _fail(path, "expected a mapping")
    pos = _floats(node.get("position"), f"{path}.position", dim)
    if dim == 2:
        rot = Rotation.from_angle(float(node.get("angle", 0.0)))
    else:
        rot = Rotation.from_quat(_floats(node.get("quaternion", [1, 0, 0, 0]),
                                         f"{path}.quaternion", 4))
    joints = _floats(node.get("joints", [0.0] * n_joints), f"{path}.joints", n_joints)
    return Configuration(Shape(rot, joints), pos)


def _configuration_dict(cfg: Configuration) -> dict:
    d = {"position": [float(v) for v in cfg.position]}
    if cfg.dim == 2:
        d["angle"] = float(cfg.shape.base_rotation.angle)
    else:
        d["quaternion"] = [float(v) for v in cfg.shape.base_rotation.quat]
    if len(cfg.shape.joint_angles):
        d["joints"] = [float(v) for v in cfg.shape.joint_angles]
    return d


def _params(node, dim, path) -> PlannerParams:
    node = node or {}
    if not isinstance(node, dict):
        _fail(path, "expected a mapping")
    kwargs = {}
    if node.get("n_slice"):
        kwargs["n_slice"] = int(node["n_slice"])
    n_line = node.get("n_line")
    if n_line:
        if isinstance(n_line, (list, tuple)):
            kwargs["n_line"] = tuple(int(v) for v in n_line)
        else:
            kwargs["n_line"] = int(n_line)
    if node.get("n_point"):
        kwargs["n_point"] = int(node["n_point"])
    if node.get("max_time"):
        kwargs["max_time"] = float(node["max_time"])
    if node.get("max_line_factor"):
        kwargs["max_line_factor"] = int(node["max_line_factor"])
    if "seed" in node and node["seed"] is not None:
        kwargs["seed"] = int(node["seed"])
    if node.get("n_vertices"):
        kwargs["n_vertices"] = int(node["n_vertices"])
    if node.get("max_slices"):
        kwargs["max_slices"] = int(node["max_slices"])
    try:
        return PlannerParams(**kwargs)
    except ValueError as exc:
        _fail(path, str(exc))


def _params_dict(p: PlannerParams) -> dict:
    d = {"n_slice": p.n_slice, "max_time": p.max_time,
         "max_line_factor": p.max_line_factor, "seed": p.seed,
         "n_vertices": p.n_vertices, "max_slices": p.max_slices}
    if p.n_line is not None:
        d["n_line"] = list(p.n_line) if isinstance(p.n_line, tuple) else p.n_line
    if p.n_point is not None:
        d["n_point"] = p.n_point
    return d


def scene_from_dict(data: dict, name: str = "scene") -> Scene:
    if not isinstance(data, dict):
        _fail("scene", "expected a mapping at the top level")
    schema = data.get("schema")
    if schema != SCHEMA:
        _fail("schema", f"expected {SCHEMA!r}, got {schema!r}")
    dim = data.get("dimension")
    if dim not in (2, 3):
        _fail("dimension", "must be 2 or 3")
    arena_nodes = data.get("arena") or []
    if not arena_nodes:
        _fail("arena", "need at least one arena body")
    arenas = tuple(_superquadric(a, dim, f"arena[{i}]") for i, a in enumerate(arena_nodes))
    obstacles = tuple(_superquadric(o, dim, f"obstacles[{i}]")
                      for i, o in enumerate(data.get("obstacles") or []))
    robot = _robot(data.get("robot"), dim, "robot")
    nj = robot.n_joints
    start = _configuration(data.get("start"), dim, nj, "start")
    goal = _configuration(data.get("goal"), dim, nj, "goal")
    params = _params(data.get("planner"), dim, "planner")
    return Scene(dim, arenas, obstacles, robot, start, goal, params,
                 str(data.get("name", name)))


def scene_to_dict(scene: Scene) -> dict:
    return {
        "schema": SCHEMA,
        "name": scene.name,
        "dimension": scene.dimension,
        "arena": [_superquadric_dict(a) for a in scene.arenas],
        "obstacles": [_superquadric_dict(o) for o in scene.obstacles],
        "robot": _robot_dict(scene.robot),
        "start": _configuration_dict(scene.start),
        "goal": _configuration_dict(scene.goal),
        "planner": _params_dict(scene.params),
    }


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise SceneValidationError(f"{path}: YAML parse error: {exc}") from exc
    import os
    return scene_from_dict(data, name=os.path.splitext(os.path.basename(str(path)))[0])


def save_scene(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scene_to_dict(scene), fh, sort_keys=False)
