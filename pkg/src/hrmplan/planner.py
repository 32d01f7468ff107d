"""Top-level planners: deterministic HRM for rigid robots, the hybrid
probabilistic variant for articulated robots, roadmap refinement, orientation
sampling, endpoint attachment and A* search.

HRM builds one C-slice per pre-sampled orientation, connects each slice to
its rotationally nearest neighbor through bridge C-slices, attaches the query
endpoints, searches, and on failure doubles the sweep-line count per slice
(reusing the cached C-boundaries) until a path is found, the time budget runs
out, or the line cap is reached. The probabilistic variant samples shapes
online and refines every 60 new slices.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import bridge as bridge_mod
from . import oracle as oracle_mod
from .cslice import (CSlice, SliceVertex, build_sweep_lines, connect_within_slice,
                     construct_slice, edge_segment_valid, generate_vertices)
from .errors import InvalidArgumentError, InvalidConfigurationError
from .geom import Ellipsoid, Pose, Rotation
from .minkowski import points_in_cboundary, sweep_axis
from .robot import (Configuration, Shape, forward_kinematics, max_part_semi_axis,
                    sample_shape, shape_distance)

INTRA_SLICE = "intra-slice"
BRIDGE = "bridge"
ENDPOINT = "endpoint"


# ---------------------------------------------------------------------------
# roadmap
# ---------------------------------------------------------------------------

@dataclass
class RoadmapVertex:
    id: int
    shape: Shape
    position: np.ndarray
    slice_id: int | None
    line_index: tuple | None = None

    def configuration(self) -> Configuration:
        return Configuration(self.shape, self.position)


@dataclass
class Roadmap:
    """Undirected graph of configurations with per-edge provenance."""

    vertices: list = field(default_factory=list)
    edges: list = field(default_factory=list)        # (i, j, cost, provenance)
    adjacency: dict = field(default_factory=dict)
    slice_index: dict = field(default_factory=dict)  # slice_id -> vertex ids
    stats: dict = field(default_factory=dict)

    def add_vertex(self, shape, position, slice_id=None, line_index=None) -> int:
        vid = len(self.vertices)
        self.vertices.append(RoadmapVertex(vid, shape, np.asarray(position, float),
                                           slice_id, line_index))
        self.adjacency[vid] = []
        if slice_id is not None:
            self.slice_index.setdefault(slice_id, []).append(vid)
        return vid

    def add_edge(self, i: int, j: int, cost: float, provenance: str) -> bool:
        if i == j:
            return False
        if cost < 0.0:
            raise InvalidArgumentError("edge costs must be nonnegative")
        if any(n == j for n, _ in self.adjacency[i]):
            return False
        self.edges.append((i, j, float(cost), provenance))
        self.adjacency[i].append((j, float(cost)))
        self.adjacency[j].append((i, float(cost)))
        return True

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Path:
    configurations: tuple
    cost: float
    vertex_ids: tuple


@dataclass(frozen=True)
class PlannerParams:
    """Knobs shared by both planners; counts must be >= 1, time > 0."""

    n_slice: int = 12
    n_line: int | tuple | None = None    # None: derived from the scene bodies
    n_point: int | None = None           # None: scaled with rotational distance
    max_time: float = 60.0
    max_line_factor: int = 64
    seed: int = 0
    n_vertices: int = 100
    connector: str = "bridge"            # or "ablated" (benchmark baseline)
    vertex_generator: str = "sweep"      # or "uniform" (benchmark baseline)
    endpoint_slices: int = 3
    max_slices: int = 600                # probabilistic planner guard

    def __post_init__(self):
        if self.n_slice < 1 or self.n_vertices < 4 or self.endpoint_slices < 1:
            raise InvalidArgumentError("counts must be >= 1")
        if self.max_time <= 0.0:
            raise InvalidArgumentError("max_time must be positive")
        if self.connector not in ("bridge", "ablated"):
            raise InvalidArgumentError("connector must be 'bridge' or 'ablated'")
        if self.vertex_generator not in ("sweep", "uniform"):
            raise InvalidArgumentError("vertex_generator must be 'sweep' or 'uniform'")


# ---------------------------------------------------------------------------
# orientation sampling
# ---------------------------------------------------------------------------

def _icosahedral_rotations() -> list[Rotation]:
    """The 60 rotations of the icosahedral symmetry group, enumerated from the
    solid's axes: +-72/144 degrees about the 6 vertex axes, +-120 about the 10
    face axes, 180 about the 15 edge axes, plus the identity."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = []
    for a, b in ((1.0, phi), (-1.0, phi), (1.0, -phi), (-1.0, -phi)):
        verts += [np.array([0.0, a, b]), np.array([a, b, 0.0]), np.array([b, 0.0, a])]
    verts = np.array(verts)
    edges = []
    faces = []
    n = len(verts)
    adj = np.linalg.norm(verts[:, None, :] - verts[None, :, :], axis=2)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(adj[i, j] - 2.0) < 1e-9:
                edges.append((i, j))
                for k in range(j + 1, n):
                    if abs(adj[i, k] - 2.0) < 1e-9 and abs(adj[j, k] - 2.0) < 1e-9:
                        faces.append((i, j, k))
    elems = [Rotation.identity(3)]
    quats = [elems[0].quat]

    def add(axis, angle):
        axis = axis / np.linalg.norm(axis)
        r = Rotation.from_rotvec(angle * axis)
        for q in quats:
            if np.linalg.norm(q - r.quat) < 1e-9:
                return
        quats.append(r.quat)
        elems.append(r)

    for v in verts:
        for k in (1, 2, 3, 4):
            add(v, 2.0 * np.pi * k / 5.0)
    for i, j, k in faces:
        c = (verts[i] + verts[j] + verts[k]) / 3.0
        for m in (1, 2):
            add(c, 2.0 * np.pi * m / 3.0)
    for i, j in edges:
        add((verts[i] + verts[j]) / 2.0, np.pi)
    assert len(elems) == 60, f"icosahedral enumeration produced {len(elems)} elements"
    return elems


_ICOSAHEDRAL_CACHE: list | None = None


def icosahedral_rotations() -> list[Rotation]:
    global _ICOSAHEDRAL_CACHE
    if _ICOSAHEDRAL_CACHE is None:
        _ICOSAHEDRAL_CACHE = _icosahedral_rotations()
    return list(_ICOSAHEDRAL_CACHE)


def sample_orientations(n_slice: int, dim: int) -> list[Rotation]:
    """Deterministic orientation set: uniform angles in 2D; in 3D the 60
    icosahedral rotations, extended by a deterministic low-discrepancy set
    when more than 60 are requested."""
    if n_slice < 1:
        raise InvalidArgumentError("n_slice must be >= 1")
    if dim == 2:
        return [Rotation.from_angle(-np.pi + 2.0 * np.pi * k / n_slice)
                for k in range(n_slice)]
    rots = icosahedral_rotations()
    if n_slice <= 60:
        return rots
    rng = np.random.default_rng(424242)   # fixed: deterministic refinement set
    from .geom import uniform_quaternion
    while len(rots) < n_slice:
        rots.append(Rotation.from_quat(uniform_quaternion(rng)))
    return rots


def initial_num_lines(arenas, robot_parts, obstacles, dim: int,
                      fallback=None):
    """Per-transverse-axis sweep-line counts from the body sizes:
    floor((arena semi-axis along the axis - max part semi-axis)
    / min obstacle semi-axis), floored at 1."""
    if not obstacles:
        if fallback is not None:
            return fallback
        return 8 if dim == 2 else (8, 8)
    arena = arenas[0]
    rmat = arena.pose.rotation.matrix()
    max_robot = float(max(np.max(p.semi_axes) for p in robot_parts))
    min_obs = float(min(np.min(o.semi_axes) for o in obstacles))
    axes = [1] if dim == 2 else [0, 1]
    counts = []
    for ax in axes:
        e = np.zeros(dim)
        e[ax] = 1.0
        a_dir = float(np.linalg.norm(arena.semi_axes * (rmat.T @ e)))
        counts.append(max(1, int(np.floor((a_dir - max_robot) / min_obs))))
    return counts[0] if dim == 2 else tuple(counts)


# ---------------------------------------------------------------------------
# internal planner state
# ---------------------------------------------------------------------------

@dataclass
class _SliceState:
    cslice: CSlice
    vertex_ids: list            # roadmap ids aligned with cslice.vertices


def _slice_scale(scene) -> float:
    return float(max(np.max(a.semi_axes) for a in scene.arenas))


def _edge_lambda(scene) -> float:
    return _slice_scale(scene)


def _build_slice(scene, robot, shape, n_line, params, slice_id, rng=None):
    fk = forward_kinematics(robot, shape)
    parts = [(p.ellipsoid, p.offset) for p in fk]
    sl = construct_slice(parts, shape, scene.obstacles, scene.arenas, n_line,
                         params.n_vertices, slice_id, _slice_scale(scene))
    if params.vertex_generator == "uniform" and sl.lines:
        sl = _uniform_vertex_slice(sl, rng)
    return sl


def _uniform_vertex_slice(sl: CSlice, rng) -> CSlice:
    """Benchmark baseline: replace sweep vertices by the same number of
    uniform random draws over the slice bounds, keeping the collision-free
    ones (assigned to the nearest sweep line for cross-slice pairing)."""
    budget = len(sl.vertices)
    if budget == 0 or rng is None:
        return sl
    arena_cbs = sl.arena_boundaries
    lo = np.max([c.bbox()[0] for c in arena_cbs], axis=0)
    hi = np.min([c.bbox()[1] for c in arena_cbs], axis=0)
    draws = rng.uniform(lo, hi, size=(budget, sl.dim))
    free = np.ones(budget, dtype=bool)
    for cb in sl.cboundaries:
        inside = points_in_cboundary(draws, cb)
        if cb.kind == "arena-difference":
            free &= inside
        else:
            free &= ~inside
    anchors = np.array([ln.anchor for ln in sl.lines])
    trans = [i for i in range(sl.dim) if i != sweep_axis(sl.dim)]
    verts = []
    for p in draws[free]:
        d = np.linalg.norm(anchors - p[trans], axis=1)
        line = sl.lines[int(np.argmin(d))]
        verts.append(SliceVertex(p, line.index, -1))
    return replace(sl, vertices=tuple(verts))


def _uniform_slice_edges(sl: CSlice, k: int = 5):
    """k-nearest-neighbor edges for baseline slices, segment-checked."""
    edges = []
    pos = np.array([v.position for v in sl.vertices])
    for i in range(len(pos)):
        d = np.linalg.norm(pos - pos[i], axis=1)
        added = 0
        for j in np.argsort(d, kind="stable"):
            if added >= k:
                break
            if int(j) == i:
                continue
            if edge_segment_valid(pos[i], pos[int(j)], sl.cboundaries):
                edges.append((i, int(j), float(d[j])))
                added += 1
    return edges


def _append_slice_to_roadmap(roadmap: Roadmap, sl: CSlice, params) -> _SliceState:
    ids = []
    for v in sl.vertices:
        ids.append(roadmap.add_vertex(sl.shape, v.position, sl.slice_id, v.line_index))
    if params.vertex_generator == "uniform":
        edges = _uniform_slice_edges(sl)
    else:
        edges = connect_within_slice(sl)
    for i, j, cost in edges:
        roadmap.add_edge(ids[i], ids[j], cost, INTRA_SLICE)
    return _SliceState(sl, ids)


def _connect_slices(roadmap: Roadmap, st_i: _SliceState, st_j: _SliceState,
                    scene, robot, params, lam: float):
    if params.connector == "ablated":
        n_point = params.n_point or bridge_mod.default_n_point(
            shape_distance(st_i.cslice.shape, st_j.cslice.shape))
        pairs = oracle_mod.ablated_connect(st_i.cslice, st_j.cslice, robot,
                                           scene, n_point)
    else:
        pairs, _ = bridge_mod.connect_adjacent_slice(
            st_i.cslice, st_j.cslice, robot, scene.obstacles, scene.arenas,
            params.n_point, params.n_vertices)
    dshape = shape_distance(st_i.cslice.shape, st_j.cslice.shape)
    added = 0
    for i, j in pairs:
        p = st_i.cslice.vertices[i].position
        q = st_j.cslice.vertices[j].position
        cost = float(np.linalg.norm(p - q)) + lam * dshape
        if roadmap.add_edge(st_i.vertex_ids[i], st_j.vertex_ids[j], cost, BRIDGE):
            added += 1
    return added


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

def graph_search(roadmap: Roadmap, start_id: int, goal_id: int) -> Path | None:
    """A* with the Euclidean base-translation distance as the (admissible)
    heuristic; the rotation term of the cost metric is omitted from it."""
    if start_id >= roadmap.n_vertices or goal_id >= roadmap.n_vertices:
        raise InvalidArgumentError("unknown vertex id")
    goal_pos = roadmap.vertices[goal_id].position
    dist = {start_id: 0.0}
    parent = {start_id: None}
    h0 = float(np.linalg.norm(roadmap.vertices[start_id].position - goal_pos))
    heap = [(h0, 0, start_id)]
    counter = 1
    closed = set()
    while heap:
        f, _, u = heapq.heappop(heap)
        if u in closed:
            continue
        if u == goal_id:
            ids = []
            node = u
            while node is not None:
                ids.append(node)
                node = parent[node]
            ids.reverse()
            configs = tuple(roadmap.vertices[i].configuration() for i in ids)
            return Path(configs, dist[u], tuple(ids))
        closed.add(u)
        du = dist[u]
        for v, w in roadmap.adjacency[u]:
            nd = du + w
            if nd < dist.get(v, np.inf) - 1e-15:
                dist[v] = nd
                parent[v] = u
                h = float(np.linalg.norm(roadmap.vertices[v].position - goal_pos))
                heapq.heappush(heap, (nd + h, counter, v))
                counter += 1
    return None


# ---------------------------------------------------------------------------
# endpoint attachment
# ---------------------------------------------------------------------------

def connect_endpoints(config: Configuration, roadmap: Roadmap, scene, robot,
                      params: PlannerParams, slice_states, lam: float,
                      endpoint_id: int | None = None):
    """Insert a query configuration and attach it with bridge-validated edges
    to the rotationally nearest slices, nearest vertices by position first."""
    fk = forward_kinematics(robot, config.shape)
    parts = [Ellipsoid(p.ellipsoid.semi_axes,
                       Pose(p.ellipsoid.pose.rotation, p.offset + config.position))
             for p in fk]
    if oracle_mod.collision_check(parts, scene.obstacles, scene.arenas, 500):
        raise InvalidConfigurationError("endpoint configuration is in collision")
    if endpoint_id is None:
        endpoint_id = roadmap.add_vertex(config.shape, config.position, None)
    edges = []
    order = sorted(slice_states,
                   key=lambda s: (shape_distance(config.shape, slice_states[s].cslice.shape), s))
    for sid in order[:params.endpoint_slices]:
        st = slice_states[sid]
        if not st.cslice.vertices:
            continue
        br = bridge_mod.build_bridge(robot, config.shape, st.cslice.shape,
                                     scene.obstacles, scene.arenas,
                                     params.n_point, params.n_vertices)
        if br is None:
            continue
        dshape = shape_distance(config.shape, st.cslice.shape)
        pos = np.array([v.position for v in st.cslice.vertices])
        for k in np.argsort(np.linalg.norm(pos - config.position, axis=1), kind="stable"):
            v = st.cslice.vertices[int(k)]
            if bridge_mod.is_transition_valid(config.position, v.position, br):
                cost = float(np.linalg.norm(config.position - v.position)) + lam * dshape
                if roadmap.add_edge(endpoint_id, st.vertex_ids[int(k)], cost, ENDPOINT):
                    edges.append((endpoint_id, st.vertex_ids[int(k)], cost))
                break
    return endpoint_id, edges


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------

def _double_lines(n_line, round_index: int):
    """Double the total line count (alternating axes on the 3D grid)."""
    if isinstance(n_line, (int, np.integer)):
        return int(n_line) * 2
    nx, ny = n_line
    return (nx * 2, ny) if round_index % 2 == 0 else (nx, ny * 2)


def _line_total(n_line) -> int:
    if isinstance(n_line, (int, np.integer)):
        return int(n_line)
    return int(n_line[0]) * int(n_line[1])


def _refine_slice(roadmap: Roadmap, st: _SliceState, scene, robot, params,
                  n_line, rng=None):
    """Rebuild one slice at a doubled line count reusing its cached
    boundaries; connect the denser vertices among themselves and to the
    pre-existing vertices of the same slice."""
    old = st.cslice
    if old.diagnostic is not None and not old.cboundaries:
        return st
    lines = build_sweep_lines(old.cboundaries, old.dim, n_line, old.scale)
    new_slice = replace(old, lines=tuple(lines),
                        vertices=tuple(generate_vertices(lines, old.dim)))
    if params.vertex_generator == "uniform":
        new_slice = _uniform_vertex_slice(new_slice, rng)
    old_ids = list(st.vertex_ids)
    old_pos = [roadmap.vertices[i].position for i in old_ids]
    new_state = _append_slice_to_roadmap(roadmap, new_slice, params)
    if old_ids:
        op = np.array(old_pos)
        spacing = np.array([
            (np.max(op[:, i]) - np.min(op[:, i])) / max(1, len(set(np.round(op[:, i], 9))))
            for i in range(old.dim)])
        reach = float(np.linalg.norm(spacing)) + 2.0 * old.scale / max(_line_total(n_line), 1)
        for nid, v in zip(new_state.vertex_ids, new_slice.vertices):
            d = np.linalg.norm(op - v.position, axis=1)
            for k in np.argsort(d, kind="stable"):
                if d[k] > reach:
                    break
                if edge_segment_valid(v.position, op[int(k)], old.cboundaries):
                    roadmap.add_edge(nid, old_ids[int(k)],
                                     float(d[k]), INTRA_SLICE)
        new_state.vertex_ids = old_ids + new_state.vertex_ids
    return new_state


# ---------------------------------------------------------------------------
# HRM
# ---------------------------------------------------------------------------

def _init_n_line(scene, robot, params):
    if params.n_line is not None:
        return params.n_line
    return initial_num_lines(scene.arenas, robot.parts, scene.obstacles, robot.dim)


def plan_hrm(scene, robot, endpoints, params: PlannerParams = PlannerParams()):
    """Deterministic Highway RoadMap query; returns (roadmap, path or None).

    ``endpoints`` is a (start, goal) pair of Configuration. The roadmap's
    ``stats`` record graph/search/total times, counts and the failure reason
    when no path is found.
    """
    t_start = time.perf_counter()
    start, goal = endpoints
    dim = robot.dim
    rng = np.random.default_rng(params.seed)
    roadmap = Roadmap()
    lam = _edge_lambda(scene)
    rotations = sample_orientations(params.n_slice, dim)
    shapes = [Shape(r) for r in rotations]
    n_line = _init_n_line(scene, robot, params)
    t_graph = 0.0
    t_search = 0.0

    t0 = time.perf_counter()
    states = {}
    for sid, shape in enumerate(shapes):
        sl = _build_slice(scene, robot, shape, n_line, params, sid, rng)
        states[sid] = _append_slice_to_roadmap(roadmap, sl, params)
    pairs_done = set()
    for sid in range(len(shapes)):
        j = bridge_mod.nearest_slice(sid, shapes) if len(shapes) > 1 else None
        if j is None:
            continue
        key = (min(sid, j), max(sid, j))
        if key in pairs_done:
            continue
        pairs_done.add(key)
        _connect_slices(roadmap, states[sid], states[j], scene, robot, params, lam)
    start_id, _ = connect_endpoints(start, roadmap, scene, robot, params, states, lam)
    goal_id, _ = connect_endpoints(goal, roadmap, scene, robot, params, states, lam)
    t_graph += time.perf_counter() - t0

    t0 = time.perf_counter()
    path = graph_search(roadmap, start_id, goal_id)
    t_search += time.perf_counter() - t0

    refine_rounds = 0
    initial_total = _line_total(n_line)
    reason = None
    while path is None:
        elapsed = time.perf_counter() - t_start
        if elapsed >= params.max_time:
            reason = "time limit reached"
            break
        if _line_total(_double_lines(n_line, refine_rounds)) > initial_total * params.max_line_factor:
            reason = "sweep-line cap reached"
            break
        n_line = _double_lines(n_line, refine_rounds)
        refine_rounds += 1
        for sid in sorted(states):
            t0 = time.perf_counter()
            states[sid] = _refine_slice(roadmap, states[sid], scene, robot,
                                        params, n_line, rng)
            for eid, cfg in ((start_id, start), (goal_id, goal)):
                if not roadmap.adjacency[eid]:
                    connect_endpoints(cfg, roadmap, scene, robot, params,
                                      states, lam, endpoint_id=eid)
            t_graph += time.perf_counter() - t0
            t0 = time.perf_counter()
            path = graph_search(roadmap, start_id, goal_id)
            t_search += time.perf_counter() - t0
            if path is not None or time.perf_counter() - t_start >= params.max_time:
                break

    roadmap.stats = {
        "graph_time": t_graph,
        "search_time": t_search,
        "total_time": time.perf_counter() - t_start,
        "n_vertex": roadmap.n_vertices,
        "n_edge": roadmap.n_edges,
        "n_slice": len(states),
        "refine_rounds": refine_rounds,
        "n_line_final": _line_total(n_line),
        "reason": reason if path is None else None,
    }
    roadmap._slice_states = states
    roadmap._endpoint_ids = (start_id, goal_id)
    roadmap._n_line = n_line
    roadmap._refine_rounds = refine_rounds
    roadmap._scene = scene
    roadmap._robot = robot
    roadmap._params = params
    return roadmap, path


def refine_roadmap(roadmap: Roadmap, scene, robot, params: PlannerParams):
    """One refinement pass over an existing roadmap (doubled sweep lines per
    slice, early exit as soon as the query succeeds)."""
    states = roadmap._slice_states
    start_id, goal_id = roadmap._endpoint_ids
    path = graph_search(roadmap, start_id, goal_id)
    if path is not None:
        return roadmap, path
    round_index = getattr(roadmap, "_refine_rounds", 0)
    n_line = _double_lines(roadmap._n_line, round_index)
    roadmap._n_line = n_line
    roadmap._refine_rounds = round_index + 1
    rng = np.random.default_rng(params.seed + 1000 * (round_index + 1))
    for sid in sorted(states):
        states[sid] = _refine_slice(roadmap, states[sid], scene, robot, params,
                                    n_line, rng)
        path = graph_search(roadmap, start_id, goal_id)
        if path is not None:
            break
    roadmap.stats["n_vertex"] = roadmap.n_vertices
    roadmap.stats["n_edge"] = roadmap.n_edges
    return roadmap, path


# ---------------------------------------------------------------------------
# probabilistic variant
# ---------------------------------------------------------------------------

REFINE_EVERY_N_SLICES = 60


def plan_prob_hrm(scene, robot, endpoints, params: PlannerParams = PlannerParams()):
    """Hybrid planner for articulated robots: shapes are sampled online, each
    C-slice is decomposed deterministically, the newest slice connects to its
    rotationally nearest predecessor, and every 60 new slices an unsuccessful
    roadmap triggers a refinement pass. Reproducible for a fixed seed."""
    t_start = time.perf_counter()
    start, goal = endpoints
    rng = np.random.default_rng(params.seed)
    roadmap = Roadmap()
    lam = _edge_lambda(scene)
    n_line = _init_n_line(scene, robot, params)
    states: dict = {}
    shapes: list = []
    t_graph = 0.0
    t_search = 0.0

    t0 = time.perf_counter()
    fk_s = forward_kinematics(robot, start.shape)
    fk_g = forward_kinematics(robot, goal.shape)
    for cfg, fk in ((start, fk_s), (goal, fk_g)):
        parts = [Ellipsoid(p.ellipsoid.semi_axes,
                           Pose(p.ellipsoid.pose.rotation, p.offset + cfg.position))
                 for p in fk]
        if oracle_mod.collision_check(parts, scene.obstacles, scene.arenas, 500):
            raise InvalidConfigurationError("endpoint configuration is in collision")
    start_id = roadmap.add_vertex(start.shape, start.position, None)
    goal_id = roadmap.add_vertex(goal.shape, goal.position, None)
    t_graph += time.perf_counter() - t0

    path = None
    reason = None
    since_refine = 0
    refine_round = 0
    while path is None:
        if time.perf_counter() - t_start >= params.max_time:
            reason = "time limit reached"
            break
        if len(shapes) >= params.max_slices:
            reason = "slice cap reached"
            break
        t0 = time.perf_counter()
        shape = sample_shape(robot, rng)
        sid = len(shapes)
        sl = _build_slice(scene, robot, shape, n_line, params, sid, rng)
        states[sid] = _append_slice_to_roadmap(roadmap, sl, params)
        shapes.append(shape)
        if sid > 0:
            j = bridge_mod.nearest_slice(sid, shapes)
            _connect_slices(roadmap, states[sid], states[j], scene, robot, params, lam)
        for eid, cfg in ((start_id, start), (goal_id, goal)):
            _try_attach_endpoint(cfg, eid, roadmap, scene, robot, params,
                                 states[sid], lam)
        t_graph += time.perf_counter() - t0
        t0 = time.perf_counter()
        if roadmap.adjacency[start_id] and roadmap.adjacency[goal_id]:
            path = graph_search(roadmap, start_id, goal_id)
        t_search += time.perf_counter() - t0
        since_refine += 1
        if path is None and since_refine >= REFINE_EVERY_N_SLICES:
            since_refine = 0
            refine_round += 1
            n_line = _double_lines(n_line, refine_round - 1)
            for sid2 in sorted(states):
                if time.perf_counter() - t_start >= params.max_time:
                    break
                t0 = time.perf_counter()
                states[sid2] = _refine_slice(roadmap, states[sid2], scene,
                                             robot, params, n_line, rng)
                t_graph += time.perf_counter() - t0
                t0 = time.perf_counter()
                path = graph_search(roadmap, start_id, goal_id)
                t_search += time.perf_counter() - t0
                if path is not None:
                    break

    roadmap.stats = {
        "graph_time": t_graph,
        "search_time": t_search,
        "total_time": time.perf_counter() - t_start,
        "n_vertex": roadmap.n_vertices,
        "n_edge": roadmap.n_edges,
        "n_slice": len(states),
        "refine_rounds": refine_round,
        "n_line_final": _line_total(n_line),
        "reason": reason if path is None else None,
    }
    roadmap._slice_states = states
    roadmap._endpoint_ids = (start_id, goal_id)
    roadmap._n_line = n_line
    roadmap._refine_rounds = refine_round
    return roadmap, path


def _try_attach_endpoint(cfg, eid, roadmap, scene, robot, params, st, lam):
    """Attempt one bridge-validated connection from an endpoint to a slice."""
    if not st.cslice.vertices:
        return
    br = bridge_mod.build_bridge(robot, cfg.shape, st.cslice.shape,
                                 scene.obstacles, scene.arenas,
                                 params.n_point, params.n_vertices)
    if br is None:
        return
    dshape = shape_distance(cfg.shape, st.cslice.shape)
    pos = np.array([v.position for v in st.cslice.vertices])
    for k in np.argsort(np.linalg.norm(pos - cfg.position, axis=1), kind="stable"):
        v = st.cslice.vertices[int(k)]
        if bridge_mod.is_transition_valid(cfg.position, v.position, br):
            cost = float(np.linalg.norm(cfg.position - v.position)) + lam * dshape
            roadmap.add_edge(eid, st.vertex_ids[int(k)], cost, ENDPOINT)
            return
