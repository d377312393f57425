"""Plain SVG rendering of slices and r3-plots."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from . import geometry
from .gamma import GammaRegion, transform_matrix
from .slicing import Slice

WIDTH, HEIGHT, MARGIN = 640, 640, 60


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _axis_names(region: GammaRegion | None) -> tuple[str, str, str]:
    if region is None or not region.is_circle:
        return "kI", "kD", "kP"
    return "r1", "r2", "r3"


def _view(sl: Slice) -> tuple[float, float, float, float]:
    pts = [v for f in sl.stable_polygons for v in f.vertices]
    if not pts:
        coeffs = [ln.coeffs for ln in sl.lines]
        pts = [p for a, b in combinations(coeffs, 2) if (p := geometry.intersect(a, b)) is not None]
        pts = [p for p in pts if sl.box[0] <= p[0] <= sl.box[1] and sl.box[2] <= p[1] <= sl.box[3]]
    if not pts:
        return (-10.0, 10.0, -10.0, 10.0)
    xs, ys = np.array([p[0] for p in pts]), np.array([p[1] for p in pts])
    w = max(xs.max() - xs.min(), 1e-9 * max(1.0, abs(xs).max()))
    h = max(ys.max() - ys.min(), 1e-9 * max(1.0, abs(ys).max()))
    return (xs.min() - 0.25 * w, xs.max() + 0.25 * w, ys.min() - 0.25 * h, ys.max() + 0.25 * h)


def _clip_line(h, view):
    """Segment of the line h1 x + h2 y + h0 = 0 inside the view rectangle."""
    x0, x1, y0, y1 = view
    rect = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    pts = []
    for k in range(4):
        p, q = rect[k], rect[(k + 1) % 4]
        fp, fq = geometry.line_value(h, p), geometry.line_value(h, q)
        if fp == 0:
            pts.append(p)
        elif fp * fq < 0:
            t = fp / (fp - fq)
            pts.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    if len(pts) < 2:
        return None
    return pts[0], pts[-1]


class _Canvas:
    def __init__(self, view):
        self.view = view
        self.parts: list[str] = []

    def xy(self, p):
        x0, x1, y0, y1 = self.view
        px = MARGIN + (p[0] - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)
        py = HEIGHT - MARGIN - (p[1] - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)
        return f"{px:.2f}", f"{py:.2f}"

    def axes(self, xlabel: str, ylabel: str, title: str):
        x0, x1, y0, y1 = self.view
        lo, hi = MARGIN, WIDTH - MARGIN
        self.parts.append(f'<rect x="{lo}" y="{lo}" width="{hi - lo}" height="{hi - lo}" '
                          'fill="none" stroke="#444"/>')
        for k in range(5):
            fx = x0 + (x1 - x0) * k / 4
            fy = y0 + (y1 - y0) * k / 4
            px, _ = self.xy((fx, y0))
            _, py = self.xy((x0, fy))
            self.parts.append(f'<text class="tick" x="{px}" y="{HEIGHT - MARGIN + 16}" '
                              f'text-anchor="middle" font-size="10">{_fmt(fx)}</text>')
            self.parts.append(f'<text class="tick" x="{MARGIN - 6}" y="{py}" '
                              f'text-anchor="end" font-size="10">{_fmt(fy)}</text>')
        self.parts.append(f'<text class="axis-label" x="{WIDTH / 2}" y="{HEIGHT - 16}" '
                          f'text-anchor="middle" font-size="14">{xlabel}</text>')
        self.parts.append(f'<text class="axis-label" x="16" y="{HEIGHT / 2}" text-anchor="middle" '
                          f'font-size="14" transform="rotate(-90 16 {HEIGHT / 2})">{ylabel}</text>')
        self.parts.append(f'<text class="title" x="{WIDTH / 2}" y="24" text-anchor="middle" '
                          f'font-size="14">{title}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
                f'viewBox="0 0 {WIDTH} {HEIGHT}">')
        return "\n".join([head, *self.parts, "</svg>"]) + "\n"


def slice_svg(sl: Slice, region: GammaRegion | None = None, view=None) -> str:
    """Boundary lines and shaded stable polygons of one slice."""
    view = view or _view(sl)
    cv = _Canvas(view)
    for f in sl.stable_polygons:
        pts = " ".join(",".join(cv.xy(v)) for v in f.vertices)
        cv.parts.append(f'<polygon class="stable" points="{pts}" fill="#7fbf7f" '
                        'fill-opacity="0.6" stroke="#2f6f2f"/>')
    for ln in sl.lines:
        seg = _clip_line(ln.coeffs, view)
        if seg is None:
            continue
        (ax, ay), (bx, by) = cv.xy(seg[0]), cv.xy(seg[1])
        cv.parts.append(f'<line class="boundary" x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" '
                        f'stroke="#c03030" stroke-width="1" data-omega="{_fmt(ln.source.param)}"/>')
    xl, yl, zl = _axis_names(region)
    cv.axes(xl, yl, f"{zl} = {_fmt(sl.r3)}")
    if region is not None and region.is_circle:
        _c_space_notes(cv, sl, transform_matrix(region))
    return cv.render()


def _c_space_notes(cv: _Canvas, sl: Slice, T: np.ndarray):
    """Controller coefficients c = T r: the matrix and each polygon's point."""
    rows = "; ".join(" ".join(_fmt(v + 0.0) for v in row) for row in T)
    cv.parts.append(f'<text class="c-space" x="{WIDTH / 2}" y="42" text-anchor="middle" '
                    f'font-size="10">c = T r, T = [{rows}]</text>')
    for f in sl.stable_polygons:
        c = T @ np.array([f.point[0], f.point[1], sl.r3])
        px, py = cv.xy(f.point)
        cv.parts.append(f'<text class="c-space" x="{px}" y="{py}" text-anchor="middle" '
                        f'font-size="9">c = ({", ".join(_fmt(v) for v in c)})</text>')


def kp_plot_svg(plot, region: GammaRegion | None = None) -> str:
    """Branches of the r3-plot against the boundary parameter."""
    pts = [tuple(row) for br in plot.branches for row in br]
    ys = np.array([y for _, y in pts if np.isfinite(y)]) if pts else np.array([0.0])
    xs = np.array([x for x, _ in pts]) if pts else np.array([0.0, 1.0])
    crit = [v for _, v in plot.extrema]
    crit += [v for v in (plot.limit_low, plot.limit_high) if np.isfinite(v)]
    lo, hi = (min(crit), max(crit)) if crit else (np.percentile(ys, 5), np.percentile(ys, 95))
    pad = 0.5 * max(hi - lo, 1.0)
    view = (float(xs.min()), float(xs.max()) if xs.max() > xs.min() else float(xs.min()) + 1.0,
            float(lo - pad), float(hi + pad))
    cv = _Canvas(view)
    for br in plot.branches:
        seg = []
        for x, y in br:
            if np.isfinite(y) and view[2] <= y <= view[3]:
                seg.append(",".join(cv.xy((x, y))))
            elif seg:
                cv.parts.append(f'<polyline class="branch" points="{" ".join(seg)}" fill="none" stroke="#2050a0"/>')
                seg = []
        if seg:
            cv.parts.append(f'<polyline class="branch" points="{" ".join(seg)}" fill="none" stroke="#2050a0"/>')
    xl = "theta" if region is not None and region.is_circle else "omega"
    cv.axes(xl, _axis_names(region)[2], "r3-plot")
    return cv.render()
