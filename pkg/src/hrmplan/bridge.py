"""Bridge-C-slice local planner: connects vertices across adjacent C-slices by
enclosing each part's swept orientations in a tightly-fitted ellipsoid (TFE),
building C-boundaries for the TFEs, and validating interpolated transitions
with pure point-containment queries (no pairwise collision detection).

Each part's TFE translates with respect to its own center, so its boundaries
are built with a zero reference offset and queried with the part's own center
trajectory. The rotation steps used to build the TFEs are exactly the ones
used during validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .enclosure import tfe_of_orientations
from .errors import ErosionDegenerateError, InvalidArgumentError
from .minkowski import ARENA_DIFF, OBSTACLE_SUM, build_cobstacles, points_in_cboundary
from .robot import Shape, forward_kinematics, interpolate_shapes, shape_distance

DEFAULT_STEP_DISTANCE = 0.1


def default_n_point(distance: float) -> int:
    """Interpolation count policy: one step per 0.1 of rotational distance."""
    return max(2, int(np.ceil(distance / DEFAULT_STEP_DISTANCE)) + 1)


@dataclass(frozen=True)
class BridgeSlice:
    """TFE-based boundaries validating transitions between two C-slices."""

    slice_pair: tuple
    tfes: tuple                  # one per part
    cboundaries: tuple           # flat; each entry tagged with source_part
    interp_shapes: tuple         # rotation/joint steps shared with validation
    part_offsets: np.ndarray     # (n_steps, n_parts, d) FK offsets per step

    @property
    def n_steps(self) -> int:
        return len(self.interp_shapes)


def nearest_slice(i: int, shapes) -> int:
    """Index of the rotationally closest other shape; ties take the lowest id."""
    if len(shapes) < 2:
        raise InvalidArgumentError("need at least two slices")
    best, best_d = -1, np.inf
    for j, s in enumerate(shapes):
        if j == i:
            continue
        d = shape_distance(shapes[i], s)
        if d < best_d - 1e-15:
            best, best_d = j, d
    return best


def build_bridge(robot, shape_i: Shape, shape_j: Shape, obstacles, arenas,
                 n_point: int | None = None, n_vertices: int = 100,
                 pair=(0, 1)) -> BridgeSlice | None:
    """TFEs and their C-boundaries for the shape_i -> shape_j transition.

    Returns None when an arena erosion degenerates (the TFE does not fit),
    in which case no cross-slice edges can be validated.
    """
    if n_point is None:
        n_point = default_n_point(shape_distance(shape_i, shape_j))
    steps = interpolate_shapes(shape_i, shape_j, n_point)
    fk_steps = [forward_kinematics(robot, s) for s in steps]
    n_parts = len(fk_steps[0])
    offsets = np.array([[p.offset for p in fk] for fk in fk_steps])
    tfes = []
    for k in range(n_parts):
        seq = [fk[k].ellipsoid.pose.rotation for fk in fk_steps]
        tfes.append(tfe_of_orientations(fk_steps[0][k].ellipsoid.semi_axes, seq))
    cbs = []
    try:
        for k, tfe in enumerate(tfes):
            for cb in build_cobstacles([(tfe, np.zeros(robot.dim))],
                                       obstacles, arenas, n_vertices):
                cbs.append(_retag(cb, k))
    except ErosionDegenerateError:
        return None
    return BridgeSlice(tuple(pair), tuple(tfes), tuple(cbs), tuple(steps), offsets)


def _retag(cb, part_index: int):
    from dataclasses import replace
    return replace(cb, source_part=part_index)


def is_transition_valid(v1_position, v2_position, bridge: BridgeSlice,
                        n_point: int | None = None) -> bool:
    """True iff every part's interpolated center stays inside all of its
    arena-difference boundaries and outside all of its obstacle-sum
    boundaries; stops at the first violation."""
    steps = bridge.n_steps
    taus = np.linspace(0.0, 1.0, steps)
    p1 = np.asarray(v1_position, dtype=float)
    p2 = np.asarray(v2_position, dtype=float)
    base = p1[None, :] + taus[:, None] * (p2 - p1)[None, :]
    centers = base[:, None, :] + bridge.part_offsets       # (steps, parts, d)
    for cb in bridge.cboundaries:
        pts = centers[:, cb.source_part, :]
        inside = points_in_cboundary(pts, cb)
        if cb.kind == ARENA_DIFF:
            if not np.all(inside):
                return False
        else:
            if np.any(inside):
                return False
    return True


def connect_adjacent_slice(slice_i, slice_j, robot, obstacles, arenas,
                           n_point: int | None = None, n_vertices: int = 100):
    """Validated edges between slice_i and slice_j vertices.

    Candidate neighbors are the vertices of slice_j on the same sweep-line
    index as each slice_i vertex; returns (local_i, local_j) pairs. Failed
    candidates are skipped silently.
    """
    bridge = build_bridge(robot, slice_i.shape, slice_j.shape, obstacles,
                          arenas, n_point, n_vertices,
                          pair=(slice_i.slice_id, slice_j.slice_id))
    if bridge is None:
        return [], None
    by_line = {}
    for j, v in enumerate(slice_j.vertices):
        by_line.setdefault(v.line_index, []).append(j)
    edges = []
    for i, v1 in enumerate(slice_i.vertices):
        for j in by_line.get(v1.line_index, []):
            v2 = slice_j.vertices[j]
            if is_transition_valid(v1.position, v2.position, bridge):
                edges.append((i, j))
    return edges, bridge
