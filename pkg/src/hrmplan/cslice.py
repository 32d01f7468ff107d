"""Construction of one C-slice: C-obstacles via Minkowski operations,
sweep-line free-segment extraction, vertex generation with the
adjacent-segment enhancement step, and continuous intra-slice edge checks.

Sweep lines run parallel to the x axis in 2D and to the z axis in 3D (3D
lines are arranged on an x-y grid; a line's (ix, iy) index is adjacent to the
four lines differing by one in a single index). Free segments per line are

    L_free = intersection of all C-arena intervals - union of all C-obstacle
    intervals,

with segments shorter than 1e-6 times the arena scale dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ErosionDegenerateError
from .minkowski import (ARENA_DIFF, OBSTACLE_SUM, CBoundary, build_cobstacles,
                        line_intervals, segment_clip, sweep_axis)
from .robot import Shape

MIN_SEGMENT_FRACTION = 1e-6


@dataclass(frozen=True)
class SweepLine:
    """One axis-parallel sweep line with its collision-free segments."""

    index: tuple            # (j,) in 2D, (ix, iy) in 3D
    anchor: np.ndarray      # fixed transverse coordinates
    free_segments: tuple    # sorted disjoint (lo, hi) parameter intervals


@dataclass(frozen=True)
class SliceVertex:
    """A collision-free sample inside one free segment."""

    position: np.ndarray    # full d-vector (reference-point position)
    line_index: tuple
    segment_index: int


@dataclass(frozen=True)
class CSlice:
    """One rotational configuration's translational free-space decomposition."""

    slice_id: int
    shape: Shape
    cboundaries: tuple
    lines: tuple
    vertices: tuple
    scale: float = 1.0
    diagnostic: str | None = None

    @property
    def dim(self) -> int:
        return self.shape.dim

    @property
    def obstacle_boundaries(self):
        return [c for c in self.cboundaries if c.kind == OBSTACLE_SUM]

    @property
    def arena_boundaries(self):
        return [c for c in self.cboundaries if c.kind == ARENA_DIFF]


def free_segments_on_line(arena_intervals, obstacle_intervals,
                          min_length: float = 0.0):
    """Intersection of arena intervals minus the union of obstacle intervals.

    Returns a sorted list of disjoint (lo, hi) tuples; an empty arena
    intersection yields an empty list, as do segments shorter than
    ``min_length``.
    """
    if not arena_intervals:
        return []
    lo = max(a[0] for a in arena_intervals)
    hi = min(a[1] for a in arena_intervals)
    if hi - lo <= min_length:
        return []
    segments = [(lo, hi)]
    for olo, ohi in sorted(obstacle_intervals):
        nxt = []
        for slo, shi in segments:
            if ohi <= slo or olo >= shi:
                nxt.append((slo, shi))
                continue
            if olo > slo:
                nxt.append((slo, min(olo, shi)))
            if ohi < shi:
                nxt.append((max(ohi, slo), shi))
        segments = nxt
    return [(s0, s1) for s0, s1 in segments if s1 - s0 > min_length]


def _line_anchors(dim: int, n_line, lo: np.ndarray, hi: np.ndarray):
    """Cell-center anchors across the transverse extent of the slice."""
    if dim == 2:
        n = int(n_line)
        ys = lo[1] + (np.arange(n) + 0.5) * (hi[1] - lo[1]) / n
        return [((j,), np.array([ys[j]])) for j in range(n)]
    nx, ny = n_line
    xs = lo[0] + (np.arange(nx) + 0.5) * (hi[0] - lo[0]) / nx
    ys = lo[1] + (np.arange(ny) + 0.5) * (hi[1] - lo[1]) / ny
    return [((ix, iy), np.array([xs[ix], ys[iy]]))
            for ix in range(nx) for iy in range(ny)]


def lines_adjacent(i1: tuple, i2: tuple) -> bool:
    """4-neighborhood on the 3D grid; consecutive indices in 2D."""
    if len(i1) == 1:
        return abs(i1[0] - i2[0]) == 1
    return abs(i1[0] - i2[0]) + abs(i1[1] - i2[1]) == 1


def _embed(anchor: np.ndarray, param, dim: int) -> np.ndarray:
    p = np.empty(dim)
    axis = sweep_axis(dim)
    p[axis] = param
    p[[i for i in range(dim) if i != axis]] = anchor
    return p


def build_sweep_lines(cboundaries, dim: int, n_line, scale: float):
    """Sweep lines with free segments, over the arena bounding region."""
    arena_cbs = [c for c in cboundaries if c.kind == ARENA_DIFF]
    obstacle_cbs = [c for c in cboundaries if c.kind == OBSTACLE_SUM]
    lo = np.max([c.bbox()[0] for c in arena_cbs], axis=0)
    hi = np.min([c.bbox()[1] for c in arena_cbs], axis=0)
    if np.any(hi <= lo):
        return []
    anchors = _line_anchors(dim, n_line, lo, hi)
    anchor_arr = np.array([a for _, a in anchors])
    min_len = MIN_SEGMENT_FRACTION * scale
    arena_iv = [line_intervals(anchor_arr, c) for c in arena_cbs]
    obst_iv = [line_intervals(anchor_arr, c) for c in obstacle_cbs]
    lines = []
    for i, (idx, anchor) in enumerate(anchors):
        arenas = []
        missed = False
        for alo, ahi, hit in arena_iv:
            if not hit[i]:
                missed = True
                break
            arenas.append((alo[i], ahi[i]))
        if missed:
            lines.append(SweepLine(idx, anchor, ()))
            continue
        obstacles = [(olo[i], ohi[i]) for olo, ohi, hit in obst_iv if hit[i]]
        segs = free_segments_on_line(arenas, obstacles, min_len)
        lines.append(SweepLine(idx, anchor, tuple(segs)))
    return lines


def generate_vertices(lines, dim: int) -> list[SliceVertex]:
    """Midpoint of each free segment, plus the enhancement vertices.

    For each pair of adjacent lines and each segment pair whose parameter
    ranges overlap, if a line's midpoint lies outside the overlap a new vertex
    is added on that line at the overlap point nearest the midpoint.
    """
    verts: list[SliceVertex] = []
    seen = set()

    def add(line, seg_idx, param):
        key = (line.index, round(float(param), 12))
        if key in seen:
            return
        seen.add(key)
        verts.append(SliceVertex(_embed(line.anchor, param, dim), line.index, seg_idx))

    mids = {}
    for line in lines:
        for k, (lo, hi) in enumerate(line.free_segments):
            mids[(line.index, k)] = 0.5 * (lo + hi)
            add(line, k, 0.5 * (lo + hi))
    for la in lines:
        for lb in lines:
            if not lines_adjacent(la.index, lb.index):
                continue
            for ka, (alo, ahi) in enumerate(la.free_segments):
                mid_a = mids[(la.index, ka)]
                for blo, bhi in lb.free_segments:
                    olo, ohi = max(alo, blo), min(ahi, bhi)
                    if olo > ohi:
                        continue
                    if mid_a < olo:
                        add(la, ka, olo)
                    elif mid_a > ohi:
                        add(la, ka, ohi)
    return verts


def edge_segment_valid(p: np.ndarray, q: np.ndarray, cboundaries) -> bool:
    """Continuous straight-edge check: inside every C-arena polytope and
    intersecting no C-obstacle polytope (no interpolation involved)."""
    for cb in cboundaries:
        if cb.kind == ARENA_DIFF:
            tol = 1e-9 * cb.scale
            if np.any(cb.facet_normals @ p > cb.facet_offsets + tol):
                return False
            if np.any(cb.facet_normals @ q > cb.facet_offsets + tol):
                return False
        else:
            if segment_clip(p, q, cb) is not None:
                return False
    return True


def connect_within_slice(sl: CSlice) -> list[tuple]:
    """Edges between vertices on adjacent sweep lines that pass the
    continuous segment check; returns (local_i, local_j, cost) tuples."""
    edges = []
    by_line: dict[tuple, list[int]] = {}
    for i, v in enumerate(sl.vertices):
        by_line.setdefault(v.line_index, []).append(i)
    line_indices = sorted(by_line)
    for a_pos, ia in enumerate(line_indices):
        for ib in line_indices[a_pos + 1:]:
            if not lines_adjacent(ia, ib):
                continue
            for vi in by_line[ia]:
                for vj in by_line[ib]:
                    p, q = sl.vertices[vi].position, sl.vertices[vj].position
                    if edge_segment_valid(p, q, sl.cboundaries):
                        edges.append((vi, vj, float(np.linalg.norm(p - q))))
    return edges


def construct_slice(robot_parts, shape: Shape, obstacles, arenas, n_line,
                    n_vertices: int = 100, slice_id: int = 0,
                    scale: float | None = None) -> CSlice:
    """Build one C-slice: boundaries, sweep lines, free segments, vertices.

    ``robot_parts`` is the forward-kinematics output at ``shape`` as
    (Ellipsoid, offset) pairs. A degenerate arena erosion yields an empty
    slice carrying a diagnostic instead of raising.
    """
    dim = shape.dim
    if scale is None:
        scale = float(max(np.max(a.semi_axes) for a in arenas))
    try:
        cbs = build_cobstacles(robot_parts, obstacles, arenas, n_vertices)
    except ErosionDegenerateError as exc:
        return CSlice(slice_id, shape, (), (), (), scale, diagnostic=str(exc))
    lines = build_sweep_lines(cbs, dim, n_line, scale)
    if not lines:
        return CSlice(slice_id, shape, tuple(cbs), (), (), scale,
                      diagnostic="empty arena intersection")
    verts = generate_vertices(lines, dim)
    return CSlice(slice_id, shape, tuple(cbs), tuple(lines), tuple(verts), scale)
