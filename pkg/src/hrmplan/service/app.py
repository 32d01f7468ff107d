"""FastAPI service wrapping the planner core.

Endpoints: POST /plan, /fit, /validate, /render, /bench and GET /health.
Scene payloads use the same schema as the on-disk YAML files. Invalid scenes
return 400 with the offending field path; structurally malformed requests are
FastAPI's usual 422.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__, bench as bench_mod, render as render_mod
from ..enclosure import fit_superellipse, fit_superquadric
from ..errors import InvalidArgumentError, InvalidConfigurationError, PlanningError, SceneValidationError
from ..geom import Rotation
from ..oracle import validate_path
from ..planner import plan_hrm, plan_prob_hrm
from ..robot import Configuration, Shape
from ..scene import Scene, scene_from_dict
from . import models as m


def _scene_from_model(model: m.SceneModel) -> Scene:
    data = model.model_dump(by_alias=True, exclude_none=True)
    try:
        return scene_from_dict(data, name=model.name)
    except SceneValidationError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _config_model(cfg) -> m.PathConfigurationModel:
    d = {"position": [float(v) for v in cfg.position],
         "joints": [float(v) for v in cfg.shape.joint_angles]}
    if cfg.dim == 2:
        d["angle"] = float(cfg.shape.base_rotation.angle)
    else:
        d["quaternion"] = [float(v) for v in cfg.shape.base_rotation.quat]
    return m.PathConfigurationModel(**d)


def _config_from_model(node: m.PathConfigurationModel, dim: int) -> Configuration:
    if dim == 2:
        rot = Rotation.from_angle(node.angle or 0.0)
    else:
        rot = Rotation.from_quat(node.quaternion or [1.0, 0.0, 0.0, 0.0])
    return Configuration(Shape(rot, np.asarray(node.joints or [], dtype=float)),
                         np.asarray(node.position, dtype=float))


def _roadmap_model(roadmap) -> m.RoadmapModel:
    verts = []
    for v in roadmap.vertices:
        d = {"id": v.id, "position": [float(x) for x in v.position],
             "joints": [float(x) for x in v.shape.joint_angles],
             "slice": v.slice_id}
        if v.shape.dim == 2:
            d["angle"] = float(v.shape.base_rotation.angle)
        else:
            d["quaternion"] = [float(x) for x in v.shape.base_rotation.quat]
        verts.append(m.RoadmapVertexModel(**d))
    edges = [m.RoadmapEdgeModel(source=i, target=j, cost=c, kind=k)
             for i, j, c, k in roadmap.edges]
    return m.RoadmapModel(vertices=verts, edges=edges)


def _run_plan(scene: Scene, planner: str, seed, time_limit):
    from dataclasses import replace
    params = scene.params
    if seed is not None:
        params = replace(params, seed=int(seed))
    if time_limit is not None:
        params = replace(params, max_time=float(time_limit))
    if planner == "prob-hrm":
        return plan_prob_hrm(scene, scene.robot, (scene.start, scene.goal), params)
    if planner != "hrm":
        raise HTTPException(status_code=400, detail=f"unknown planner {planner!r}")
    return plan_hrm(scene, scene.robot, (scene.start, scene.goal), params)


def create_app() -> FastAPI:
    app = FastAPI(title="hrmplan", version=__version__,
                  description="Highway RoadMap planning service for "
                              "ellipsoidal robots among superquadrics")

    @app.get("/health", response_model=m.HealthResponse)
    def health():
        return m.HealthResponse(status="ok", version=__version__)

    @app.post("/plan", response_model=m.PlanResponse)
    def plan(req: m.PlanRequest):
        scene = _scene_from_model(req.scene)
        try:
            roadmap, path = _run_plan(scene, req.planner, req.seed, req.time_limit)
        except (InvalidConfigurationError, InvalidArgumentError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        stats = m.StatsModel(**roadmap.stats)
        svgs = {}
        if req.include_svg and scene.dimension == 2:
            states = getattr(roadmap, "_slice_states", {})
            for sid in sorted(states):
                svgs[f"slice_{sid:03d}.svg"] = render_mod.slice_svg(states[sid].cslice)
            svgs["roadmap.svg"] = render_mod.roadmap_svg(roadmap, scene, path)
        return m.PlanResponse(
            status="success" if path is not None else "no-path",
            reason=roadmap.stats.get("reason"),
            path=[_config_model(c) for c in path.configurations] if path else [],
            cost=path.cost if path else None,
            stats=stats,
            roadmap=_roadmap_model(roadmap) if req.include_roadmap else None,
            svgs=svgs,
        )

    @app.post("/fit", response_model=m.FitResponse)
    def fit(req: m.FitRequest):
        pts = np.asarray(req.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise HTTPException(status_code=400, detail="points must be n x 2 or n x 3")
        try:
            if pts.shape[1] == 2:
                res = fit_superellipse(pts, max_iter=req.max_iter)
            else:
                res = fit_superquadric(pts, max_iter=req.max_iter)
        except PlanningError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        body = res.body
        pose = {"position": [float(v) for v in body.pose.translation]}
        if body.dim == 2:
            pose["angle"] = float(body.pose.rotation.angle)
        else:
            pose["quaternion"] = [float(v) for v in body.pose.rotation.quat]
        return m.FitResponse(semi_axes=[float(v) for v in body.semi_axes],
                             exponents=[float(v) for v in body.exponents],
                             pose=m.PoseModel(**pose), residual=res.residual,
                             iterations=res.iterations, converged=res.converged)

    @app.post("/validate", response_model=m.ValidateResponse)
    def validate(req: m.ValidateRequest):
        scene = _scene_from_model(req.scene)
        if not req.path:
            raise HTTPException(status_code=400, detail="empty path")
        configs = [_config_from_model(c, scene.dimension) for c in req.path]
        report = validate_path(configs, scene.robot, scene,
                               req.steps_per_edge, req.n_surface)
        return m.ValidateResponse(
            valid=report.valid, checked_steps=report.checked_steps,
            violations=[m.ViolationModel(edge_index=v.edge_index,
                                         step_index=v.step_index)
                        for v in report.violations])

    @app.post("/render", response_model=m.RenderResponse)
    def render(req: m.RenderRequest):
        scene = _scene_from_model(req.scene)
        if scene.dimension != 2:
            raise HTTPException(status_code=400, detail="rendering is 2D only")
        try:
            roadmap, path = _run_plan(scene, req.planner, req.seed, None)
        except (InvalidConfigurationError, InvalidArgumentError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        svgs = {}
        states = getattr(roadmap, "_slice_states", {})
        for sid in sorted(states):
            svgs[f"slice_{sid:03d}.svg"] = render_mod.slice_svg(states[sid].cslice)
        svgs["roadmap.svg"] = render_mod.roadmap_svg(roadmap, scene, path)
        return m.RenderResponse(svgs=svgs)

    @app.post("/bench", response_model=m.BenchResponse)
    def bench(req: m.BenchRequest):
        scenes = [_scene_from_model(s) for s in req.scenes]
        try:
            rows, trials = bench_mod.run_benchmark(
                scenes, req.planners, req.trials, req.seed,
                req.time_limit, req.workers)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return m.BenchResponse(
            rows=[m.BenchRowModel(**r.__dict__) for r in rows],
            csv=bench_mod.rows_to_csv(rows),
            trials_csv=bench_mod.trials_to_csv(trials))

    return app


app = create_app()
