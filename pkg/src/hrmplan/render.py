"""Debug SVG export for 2D slices and roadmaps.

The element vocabulary is fixed so output is machine-checkable: every free
segment is exactly one <polyline class="segment">, every vertex exactly one
<circle class="vertex">; C-boundaries are <polygon> elements and edges plain
<line> elements.
"""

from __future__ import annotations

import numpy as np

from .minkowski import ARENA_DIFF


def _viewbox(points, pad=1.0):
    pts = np.asarray(points, dtype=float)
    lo = pts.min(axis=0) - pad
    hi = pts.max(axis=0) + pad
    return lo, hi


def _header(lo, hi):
    w, h = hi - lo
    return (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="{lo[0]:.4f} {lo[1]:.4f} {w:.4f} {h:.4f}" '
            f'width="640" height="{640 * h / w:.0f}">'
            f'<g transform="translate(0,{(lo[1] + hi[1]):.4f}) scale(1,-1)">')


_FOOTER = "</g></svg>"


def slice_svg(cslice) -> str:
    """Render one 2D C-slice: boundaries, sweep lines, segments, vertices,
    intra-slice edges."""
    if cslice.dim != 2:
        raise ValueError("slice SVG export is 2D only")
    from .cslice import connect_within_slice

    pts = [v.position for v in cslice.vertices]
    for cb in cslice.cboundaries:
        pts.extend(cb.samples)
    if not pts:
        pts = [np.zeros(2)]
    lo, hi = _viewbox(np.vstack(pts))
    out = [_header(lo, hi)]
    sw = max(hi - lo) / 400.0
    for cb in cslice.cboundaries:
        color = "#2a7" if cb.kind == ARENA_DIFF else "#c33"
        fill = "none" if cb.kind == ARENA_DIFF else "#c3333322"
        pstr = " ".join(f"{p[0]:.4f},{p[1]:.4f}" for p in cb.samples)
        out.append(f'<polygon class="{cb.kind}" points="{pstr}" '
                   f'fill="{fill}" stroke="{color}" stroke-width="{sw:.4f}"/>')
    for line in cslice.lines:
        y = line.anchor[0]
        out.append(f'<line class="sweepline" x1="{lo[0]:.4f}" y1="{y:.4f}" '
                   f'x2="{hi[0]:.4f}" y2="{y:.4f}" stroke="#ccc" '
                   f'stroke-width="{sw / 2:.4f}"/>')
        for s0, s1 in line.free_segments:
            out.append(f'<polyline class="segment" points="{s0:.4f},{y:.4f} '
                       f'{s1:.4f},{y:.4f}" fill="none" stroke="#07c" '
                       f'stroke-width="{sw * 1.5:.4f}"/>')
    for i, j, _ in connect_within_slice(cslice):
        p, q = cslice.vertices[i].position, cslice.vertices[j].position
        out.append(f'<line class="edge" x1="{p[0]:.4f}" y1="{p[1]:.4f}" '
                   f'x2="{q[0]:.4f}" y2="{q[1]:.4f}" stroke="#999" '
                   f'stroke-width="{sw / 2:.4f}"/>')
    for v in cslice.vertices:
        out.append(f'<circle class="vertex" cx="{v.position[0]:.4f}" '
                   f'cy="{v.position[1]:.4f}" r="{sw * 3:.4f}" fill="#059"/>')
    out.append(_FOOTER)
    return "\n".join(out)


def roadmap_svg(roadmap, scene, path=None) -> str:
    """Project a 2D roadmap to the plane, with the solved path highlighted."""
    if scene.dimension != 2:
        raise ValueError("roadmap SVG export is 2D only")
    pts = [v.position for v in roadmap.vertices]
    for a in scene.arenas:
        pts.append(a.center + a.semi_axes)
        pts.append(a.center - a.semi_axes)
    lo, hi = _viewbox(np.vstack(pts))
    out = [_header(lo, hi)]
    sw = max(hi - lo) / 400.0
    for body, color in [(a, "#2a7") for a in scene.arenas] + \
                       [(o, "#c33") for o in scene.obstacles]:
        from .geom import sq_surface_grid
        bpts = body.pose.apply(sq_surface_grid(body, 100)[0])
        pstr = " ".join(f"{p[0]:.4f},{p[1]:.4f}" for p in bpts)
        out.append(f'<polygon class="body" points="{pstr}" fill="none" '
                   f'stroke="{color}" stroke-width="{sw:.4f}"/>')
    for i, j, _, kind in roadmap.edges:
        p, q = roadmap.vertices[i].position, roadmap.vertices[j].position
        color = {"intra-slice": "#bbb", "bridge": "#b8d", "endpoint": "#fb0"}[kind]
        out.append(f'<line class="edge" x1="{p[0]:.4f}" y1="{p[1]:.4f}" '
                   f'x2="{q[0]:.4f}" y2="{q[1]:.4f}" stroke="{color}" '
                   f'stroke-width="{sw / 2:.4f}"/>')
    for v in roadmap.vertices:
        out.append(f'<circle class="vertex" cx="{v.position[0]:.4f}" '
                   f'cy="{v.position[1]:.4f}" r="{sw * 2:.4f}" fill="#059"/>')
    if path is not None:
        d = " L ".join(f"{c.position[0]:.4f} {c.position[1]:.4f}"
                       for c in path.configurations)
        out.append(f'<path class="path" d="M {d}" fill="none" '
                   f'stroke="#e0a" stroke-width="{sw * 2:.4f}"/>')
    out.append(_FOOTER)
    return "\n".join(out)
