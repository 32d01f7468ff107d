"""Pydantic request/response models for the planning service.

SceneModel mirrors the on-disk scene schema one-to-one, so a loaded YAML
document validates as a SceneModel and a model dump feeds scene_from_dict
unchanged. Full geometric validation stays in the scene module; these models
only pin structure and basic types.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class PoseModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    position: list[float]
    angle: float | None = None          # 2D
    quaternion: list[float] | None = None  # 3D, [w, x, y, z]


class BodyModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    semi_axes: list[float]
    exponents: list[float] | None = None
    pose: PoseModel | None = None


class EllipsoidModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    semi_axes: list[float]
    pose: PoseModel | None = None


class JointModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    parent: int = -1
    origin: PoseModel | None = None
    axis: list[float] | None = None
    limits: list[float] | None = None
    link: EllipsoidModel


class RobotModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    base: EllipsoidModel
    links: list[EllipsoidModel] | None = None
    joints: list[JointModel] | None = None


class ConfigurationModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    position: list[float]
    angle: float | None = None
    quaternion: list[float] | None = None
    joints: list[float] | None = None


class PlannerParamsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n_slice: int | None = None
    n_line: int | list[int] | None = None
    n_point: int | None = None
    max_time: float | None = None
    max_line_factor: int | None = None
    seed: int | None = None
    n_vertices: int | None = None
    max_slices: int | None = None


class SceneModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)
    schema_id: str = Field(alias="schema")
    name: str = "scene"
    dimension: int
    arena: list[BodyModel]
    obstacles: list[BodyModel] = Field(default_factory=list)
    robot: RobotModel
    start: ConfigurationModel
    goal: ConfigurationModel
    planner: PlannerParamsModel | None = None


class PathConfigurationModel(BaseModel):
    position: list[float]
    angle: float | None = None
    quaternion: list[float] | None = None
    joints: list[float] = Field(default_factory=list)


class RoadmapVertexModel(BaseModel):
    id: int
    position: list[float]
    angle: float | None = None
    quaternion: list[float] | None = None
    joints: list[float] = Field(default_factory=list)
    slice: int | None = None


class RoadmapEdgeModel(BaseModel):
    source: int
    target: int
    cost: float
    kind: str


class RoadmapModel(BaseModel):
    vertices: list[RoadmapVertexModel]
    edges: list[RoadmapEdgeModel]


class PlanRequest(BaseModel):
    scene: SceneModel
    planner: str = "hrm"                 # "hrm" | "prob-hrm"
    seed: int | None = None
    time_limit: float | None = None
    include_roadmap: bool = True
    include_svg: bool = True


class StatsModel(BaseModel):
    graph_time: float
    search_time: float
    total_time: float
    n_vertex: int
    n_edge: int
    n_slice: int
    refine_rounds: int
    n_line_final: int
    reason: str | None = None


class PlanResponse(BaseModel):
    status: str                          # "success" | "no-path"
    reason: str | None = None
    path: list[PathConfigurationModel] = Field(default_factory=list)
    cost: float | None = None
    stats: StatsModel
    roadmap: RoadmapModel | None = None
    svgs: dict[str, str] = Field(default_factory=dict)


class FitRequest(BaseModel):
    points: list[list[float]]
    max_iter: int = 150


class FitResponse(BaseModel):
    semi_axes: list[float]
    exponents: list[float]
    pose: PoseModel
    residual: float
    iterations: int
    converged: bool


class ValidateRequest(BaseModel):
    scene: SceneModel
    path: list[PathConfigurationModel]
    steps_per_edge: int = 100
    n_surface: int = 1000


class ViolationModel(BaseModel):
    edge_index: int
    step_index: int


class ValidateResponse(BaseModel):
    valid: bool
    checked_steps: int
    violations: list[ViolationModel]


class RenderRequest(BaseModel):
    scene: SceneModel
    planner: str = "hrm"
    seed: int | None = None


class RenderResponse(BaseModel):
    svgs: dict[str, str]


class BenchRequest(BaseModel):
    scenes: list[SceneModel]
    planners: list[str] = Field(default_factory=lambda: ["hrm"])
    trials: int = 10
    seed: int = 0
    time_limit: float | None = None
    workers: int = 1


class BenchRowModel(BaseModel):
    scene: str
    planner: str
    trials: int
    successes: int
    success_rate: float
    time_q25: float
    time_q50: float
    time_q75: float
    vertices_q50: float
    edges_q50: float


class BenchResponse(BaseModel):
    rows: list[BenchRowModel]
    csv: str
    trials_csv: str


class HealthResponse(BaseModel):
    status: str
    version: str
