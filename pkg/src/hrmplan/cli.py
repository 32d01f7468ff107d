"""Command-line front end, a thin client of the planning service.

Every verb marshals its inputs into the service's request models and posts
them either to an in-process app instance (default) or to a remote server
given with --server. Exit codes: 0 success, 2 planning found no path,
3 invalid input (bad scene, bad points, bad arguments).

Verbs: plan, bench, fit, render, validate, serve.
"""

from __future__ import annotations

import json
import os
import sys

import click
import httpx
import yaml

EXIT_OK = 0
EXIT_NO_PATH = 2
EXIT_INVALID = 3


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=None)
    from .service.app import app
    return httpx.Client(transport=httpx.ASGITransport(app=app),
                        base_url="http://hrmplan.local", timeout=None)


def _post(server, endpoint, payload):
    with _client(server) as client:
        resp = client.post(endpoint, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        click.echo(f"error: {detail}", err=True)
        sys.exit(EXIT_INVALID)
    return resp.json()


def _load_scene_payload(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        click.echo(f"error: cannot read scene {path}: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    if isinstance(data, dict) and "name" not in data:
        data["name"] = os.path.splitext(os.path.basename(path))[0]
    return data


def _fmt(value) -> str:
    return repr(float(value))


def _write_path_csv(path_rows, dim: int, out_path: str):
    """One configuration per row: translation, rotation, joint angles."""
    n_joints = max((len(r.get("joints") or []) for r in path_rows), default=0)
    if dim == 2:
        header = ["x", "y", "angle"]
    else:
        header = ["x", "y", "z", "qw", "qx", "qy", "qz"]
    header += [f"joint{i}" for i in range(n_joints)]
    lines = [",".join(header)]
    for row in path_rows:
        cells = [_fmt(v) for v in row["position"]]
        if dim == 2:
            cells.append(_fmt(row.get("angle") or 0.0))
        else:
            cells += [_fmt(v) for v in (row.get("quaternion") or [1, 0, 0, 0])]
        cells += [_fmt(v) for v in (row.get("joints") or [])]
        lines.append(",".join(cells))
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


@click.group()
def main():
    """Highway RoadMap planning for ellipsoidal robots among superquadrics."""


@main.command()
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True))
@click.option("--planner", type=click.Choice(["hrm", "prob-hrm"]), default="hrm")
@click.option("--seed", type=int, default=None, help="Overrides the scene seed.")
@click.option("--time-limit", type=float, default=None)
@click.option("--out", "out_dir", type=click.Path(), default="plan_out")
@click.option("--server", default=None, help="Remote service URL (default: in-process).")
@click.option("--svg/--no-svg", "want_svg", default=True)
def plan(scene_path, planner, seed, time_limit, out_dir, server, want_svg):
    """Plan a path for a scene file; writes path.csv, roadmap.json, stats.json
    and (2D) slice/roadmap SVGs into --out."""
    scene = _load_scene_payload(scene_path)
    payload = {"scene": scene, "planner": planner, "seed": seed,
               "time_limit": time_limit, "include_roadmap": True,
               "include_svg": want_svg}
    result = _post(server, "/plan", payload)
    os.makedirs(out_dir, exist_ok=True)
    dim = scene.get("dimension", 2)
    with open(os.path.join(out_dir, "stats.json"), "w", encoding="utf-8") as fh:
        json.dump(result["stats"], fh, indent=2, sort_keys=True)
    with open(os.path.join(out_dir, "roadmap.json"), "w", encoding="utf-8") as fh:
        json.dump(result["roadmap"], fh, sort_keys=True)
    for name, svg in (result.get("svgs") or {}).items():
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(svg)
    if result["status"] != "success":
        click.echo(f"no path: {result.get('reason') or 'unreachable'}", err=True)
        sys.exit(EXIT_NO_PATH)
    _write_path_csv(result["path"], dim, os.path.join(out_dir, "path.csv"))
    st = result["stats"]
    click.echo(f"path found: cost {result['cost']:.4f}, "
               f"{len(result['path'])} configurations, "
               f"graph {st['graph_time']:.3f}s search {st['search_time']:.3f}s "
               f"total {st['total_time']:.3f}s -> {out_dir}/path.csv")


@main.command()
@click.option("--scene", "scene_paths", required=True, multiple=True,
              type=click.Path(exists=True))
@click.option("--planner", "planners", multiple=True,
              type=click.Choice(["hrm", "prob-hrm", "hrm-ablated"]),
              default=("hrm",))
@click.option("--trials", type=int, default=10)
@click.option("--seed", type=int, default=0)
@click.option("--time-limit", type=float, default=None)
@click.option("--workers", type=int, default=1)
@click.option("--out", "out_dir", type=click.Path(), default="bench_out")
@click.option("--server", default=None)
def bench(scene_paths, planners, trials, seed, time_limit, workers, out_dir, server):
    """Benchmark planners over scenes; writes results.csv and trials.csv."""
    payload = {"scenes": [_load_scene_payload(p) for p in scene_paths],
               "planners": list(planners), "trials": trials, "seed": seed,
               "time_limit": time_limit, "workers": workers}
    result = _post(server, "/bench", payload)
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "results.csv"), "w", encoding="utf-8") as fh:
        fh.write(result["csv"])
    with open(os.path.join(out_dir, "trials.csv"), "w", encoding="utf-8") as fh:
        fh.write(result["trials_csv"])
    click.echo(result["csv"].rstrip())
    click.echo(f"written to {out_dir}/results.csv")


@main.command()
@click.option("--points", "points_path", required=True, type=click.Path(exists=True),
              help="CSV/whitespace file of 2D or 3D points, one per line.")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--server", default=None)
def fit(points_path, out_path, server):
    """Fit a superquadric (or superellipse) to a point set."""
    pts = []
    try:
        with open(points_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip().replace(",", " ")
                if not line or line.startswith("#"):
                    continue
                pts.append([float(v) for v in line.split()])
    except (OSError, ValueError) as exc:
        click.echo(f"error: cannot read points: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    result = _post(server, "/fit", {"points": pts})
    text = yaml.safe_dump(result, sort_keys=False)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    click.echo(text.rstrip())


@main.command()
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True))
@click.option("--planner", type=click.Choice(["hrm", "prob-hrm"]), default="hrm")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(), default="render_out")
@click.option("--server", default=None)
def render(scene_path, planner, seed, out_dir, server):
    """Render the C-slices and roadmap of a 2D scene as SVG files."""
    payload = {"scene": _load_scene_payload(scene_path), "planner": planner,
               "seed": seed}
    result = _post(server, "/render", payload)
    os.makedirs(out_dir, exist_ok=True)
    for name, svg in result["svgs"].items():
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(svg)
    click.echo(f"{len(result['svgs'])} SVG files -> {out_dir}")


@main.command()
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True))
@click.option("--path", "path_csv", required=True, type=click.Path(exists=True))
@click.option("--steps", type=int, default=100, help="Interpolation steps per edge.")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--server", default=None)
def validate(scene_path, path_csv, steps, out_path, server):
    """Check a path.csv against the scene with the brute-force oracle."""
    scene = _load_scene_payload(scene_path)
    dim = scene.get("dimension", 2)
    rows = []
    try:
        with open(path_csv, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            for line in fh:
                vals = [float(v) for v in line.strip().split(",")]
                if dim == 2:
                    row = {"position": vals[:2], "angle": vals[2],
                           "joints": vals[3:]}
                else:
                    row = {"position": vals[:3], "quaternion": vals[3:7],
                           "joints": vals[7:]}
                rows.append(row)
    except (OSError, ValueError, IndexError) as exc:
        click.echo(f"error: cannot read path csv: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    result = _post(server, "/validate",
                   {"scene": scene, "path": rows, "steps_per_edge": steps})
    text = json.dumps(result, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    click.echo(text)
    if not result["valid"]:
        sys.exit(EXIT_NO_PATH)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8321)
def serve(host, port):
    """Run the planning service."""
    import uvicorn

    uvicorn.run("hrmplan.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
