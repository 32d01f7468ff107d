"""Benchmark harness: repeated planning trials per (scene, planner) with
success rates, time quartiles and graph-size medians, written as a
machine-readable CSV. Trials can run in a process pool; aggregation is
deterministic by sorted trial id.

Planner names: "hrm", "prob-hrm", and "hrm-ablated" (HRM with the bridge
C-slice replaced by direct interpolation plus collision detection, the
ablation baseline).
"""

from __future__ import annotations

import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import PlanningError
from .planner import PlannerParams, plan_hrm, plan_prob_hrm
from .scene import Scene

PLANNERS = ("hrm", "prob-hrm", "hrm-ablated")

CSV_COLUMNS = ("scene", "planner", "trials", "successes", "success_rate",
               "time_q25", "time_q50", "time_q75",
               "vertices_q50", "edges_q50")


@dataclass(frozen=True)
class TrialResult:
    scene: str
    planner: str
    trial: int
    success: bool
    total_time: float
    n_vertex: int
    n_edge: int
    reason: str | None = None


@dataclass(frozen=True)
class BenchRow:
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


def run_trial(scene: Scene, planner: str, trial: int, seed: int,
              time_limit: float | None = None) -> TrialResult:
    params = scene.params
    if time_limit is not None:
        params = replace(params, max_time=float(time_limit))
    params = replace(params, seed=seed + trial)
    if planner == "hrm-ablated":
        params = replace(params, connector="ablated")
    try:
        if planner == "prob-hrm":
            roadmap, path = plan_prob_hrm(scene, scene.robot,
                                          (scene.start, scene.goal), params)
        else:
            roadmap, path = plan_hrm(scene, scene.robot,
                                     (scene.start, scene.goal), params)
    except PlanningError as exc:
        return TrialResult(scene.name, planner, trial, False, 0.0, 0, 0, str(exc))
    return TrialResult(scene.name, planner, trial, path is not None,
                       roadmap.stats["total_time"], roadmap.stats["n_vertex"],
                       roadmap.stats["n_edge"], roadmap.stats.get("reason"))


def _trial_star(args):
    return run_trial(*args)


def run_benchmark(scenes, planners, trials: int = 10, seed: int = 0,
                  time_limit: float | None = None, workers: int = 1):
    """Run all (scene, planner, trial) combinations; returns
    (rows, trial_results) with rows aggregated per scene and planner."""
    for p in planners:
        if p not in PLANNERS:
            raise ValueError(f"unknown planner {p!r}; choose from {PLANNERS}")
    jobs = [(scene, planner, t, seed, time_limit)
            for scene in scenes for planner in planners for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_star, jobs))
    else:
        results = [run_trial(*j) for j in jobs]
    results.sort(key=lambda r: (r.scene, r.planner, r.trial))
    rows = []
    for scene in scenes:
        for planner in planners:
            rs = [r for r in results if r.scene == scene.name and r.planner == planner]
            times = np.array([r.total_time for r in rs])
            q25, q50, q75 = np.percentile(times, [25, 50, 75])
            rows.append(BenchRow(
                scene.name, planner, len(rs), sum(r.success for r in rs),
                sum(r.success for r in rs) / len(rs),
                float(q25), float(q50), float(q75),
                float(np.median([r.n_vertex for r in rs])),
                float(np.median([r.n_edge for r in rs])),
            ))
    return rows, results


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join([
            r.scene, r.planner, str(r.trials), str(r.successes),
            repr(r.success_rate), repr(r.time_q25), repr(r.time_q50),
            repr(r.time_q75), repr(r.vertices_q50), repr(r.edges_q50),
        ]) + "\n")
    return buf.getvalue()


def trials_to_csv(results) -> str:
    buf = io.StringIO()
    buf.write("scene,planner,trial,success,total_time,n_vertex,n_edge,reason\n")
    for r in results:
        buf.write(f"{r.scene},{r.planner},{r.trial},{int(r.success)},"
                  f"{r.total_time!r},{r.n_vertex},{r.n_edge},"
                  f"{'' if r.reason is None else r.reason}\n")
    return buf.getvalue()
