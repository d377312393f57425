"""Planar line arrangements and convex-polygon utilities.

Lines are triples ``(h1, h2, h0)`` meaning ``h1*x + h2*y + h0 = 0``. Faces
are built by repeatedly cutting the convex faces of a bounding box, so every
face stays convex and every edge remembers which line supports it (negative
ids mark box edges).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

Point = tuple[float, float]
BOX_EDGE = -1


@dataclass
class Face:
    vertices: list[Point]
    edge_lines: list[int]  # edge k runs vertices[k] -> vertices[k+1]
    signs: dict[int, int] = field(default_factory=dict)
    point: Point = (0.0, 0.0)
    truncated: bool = False
    neighbors: list[tuple[int, int]] = field(default_factory=list)  # (face index, line id)

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)


def polygon_area(vs) -> float:
    if len(vs) < 3:
        return 0.0
    x = np.array([v[0] for v in vs])
    y = np.array([v[1] for v in vs])
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def is_convex(vs, tol: float = 1e-12) -> bool:
    """All cross products of consecutive edges share one sign."""
    n = len(vs)
    if n < 3:
        return False
    sign = 0
    for i in range(n):
        ax, ay = vs[i]
        bx, by = vs[(i + 1) % n]
        cx, cy = vs[(i + 2) % n]
        cr = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
        span = max(abs(bx - ax) + abs(by - ay), abs(cx - bx) + abs(cy - by), 1e-300)
        if abs(cr) <= tol * span * span:
            continue
        s = 1 if cr > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def normalize_line(h) -> tuple[float, float, float]:
    h1, h2, h0 = (float(v) for v in h)
    n = np.hypot(h1, h2)
    if n == 0:
        raise ValueError("line with zero normal")
    return h1 / n, h2 / n, h0 / n


def line_value(h, p: Point) -> float:
    return h[0] * p[0] + h[1] * p[1] + h[2]


def intersect(h, g) -> Point | None:
    det = h[0] * g[1] - h[1] * g[0]
    if abs(det) <= 1e-14 * np.hypot(h[0], h[1]) * np.hypot(g[0], g[1]):
        return None
    x = (h[1] * g[2] - h[2] * g[1]) / det
    y = (h[2] * g[0] - h[0] * g[2]) / det
    return (float(x), float(y))


def bounding_box(lines, base: float = 10.0, max_doublings: int = 40) -> tuple[float, float, float, float]:
    """Square box [-R, R]^2 containing every pairwise intersection."""
    scale = 1.0
    for h in lines:
        for k in (0, 1):
            if abs(h[k]) > 1e-12 * np.hypot(h[0], h[1]):
                scale = max(scale, abs(h[2] / h[k]))
    r = base * scale
    pts = []
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            p = intersect(lines[i], lines[j])
            if p is not None:
                pts.append(p)
    for _ in range(max_doublings):
        if all(abs(x) < r and abs(y) < r for x, y in pts):
            break
        r *= 2.0
    return (-r, r, -r, r)


def _split(face: Face, line_id: int, h, eps: float):
    """Cut ``face`` by line ``h``; returns (neg_face, pos_face) with None for empty sides."""
    vals = [line_value(h, v) for v in face.vertices]
    if all(v >= -eps for v in vals):
        return None, face
    if all(v <= eps for v in vals):
        return face, None
    n = len(face.vertices)
    neg_v, pos_v = [], []
    for k in range(n):
        p, q = face.vertices[k], face.vertices[(k + 1) % n]
        fp, fq = vals[k], vals[(k + 1) % n]
        if fp <= eps:
            neg_v.append(p)
        if fp >= -eps:
            pos_v.append(p)
        if (fp < -eps and fq > eps) or (fp > eps and fq < -eps):
            t = fp / (fp - fq)
            x = (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
            neg_v.append(x)
            pos_v.append(x)
    neg = _rebuild(neg_v, line_id, h, eps, face, -1)
    pos = _rebuild(pos_v, line_id, h, eps, face, +1)
    return neg, pos


def _rebuild(vs, line_id, h, eps, parent: Face, side: int) -> Face | None:
    """Drop duplicate vertices and relabel edges; an edge lying on ``h`` gets ``line_id``."""
    clean: list[Point] = []
    for v in vs:
        if not clean or abs(v[0] - clean[-1][0]) + abs(v[1] - clean[-1][1]) > eps:
            clean.append(v)
    while len(clean) > 1 and abs(clean[0][0] - clean[-1][0]) + abs(clean[0][1] - clean[-1][1]) <= eps:
        clean.pop()
    if len(clean) < 3 or abs(polygon_area(clean)) <= eps * eps:
        return None
    labels = []
    n = len(clean)
    for k in range(n):
        p, q = clean[k], clean[(k + 1) % n]
        if abs(line_value(h, p)) <= eps and abs(line_value(h, q)) <= eps:
            labels.append(line_id)
        else:
            labels.append(_label_from_parent(parent, p, q, eps))
    signs = dict(parent.signs)
    signs[line_id] = side
    return Face(clean, labels, signs)


def _label_from_parent(parent: Face, p: Point, q: Point, eps: float) -> int:
    mid = (0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]))
    n = len(parent.vertices)
    best, best_d = BOX_EDGE, np.inf
    for k in range(n):
        a, b = parent.vertices[k], parent.vertices[(k + 1) % n]
        d = _seg_dist(mid, a, b)
        if d < best_d:
            best, best_d = parent.edge_lines[k], d
    return best


def _seg_dist(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2))
    return float(np.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy))


def chebyshev_center(vs) -> tuple[Point, float]:
    """Center and radius of the largest disc inside a convex polygon."""
    n = len(vs)
    if polygon_area(vs) < 0:
        vs = vs[::-1]
    A, b = [], []
    for k in range(n):
        p, q = vs[k], vs[(k + 1) % n]
        # interior is to the left of p->q: outward normal (dy, -dx)
        nx, ny = q[1] - p[1], -(q[0] - p[0])
        nn = np.hypot(nx, ny)
        if nn == 0:
            continue
        A.append([nx / nn, ny / nn, 1.0])
        b.append((nx * p[0] + ny * p[1]) / nn)
    res = linprog([0, 0, -1], A_ub=A, b_ub=b, bounds=[(None, None), (None, None), (0, None)],
                  method="highs")
    if not res.success:
        c = np.mean(np.asarray(vs), axis=0)
        return (float(c[0]), float(c[1])), 0.0
    return (float(res.x[0]), float(res.x[1])), float(res.x[2])


def representative_point(vs, nudge: float = 1e-6) -> Point:
    """Vertex centroid, or the Chebyshev center when the centroid hugs an edge."""
    c = np.mean(np.asarray(vs), axis=0)
    cp = (float(c[0]), float(c[1]))
    n = len(vs)
    dmin = min(_seg_dist(cp, vs[k], vs[(k + 1) % n]) for k in range(n))
    if dmin > nudge:
        return cp
    return chebyshev_center(vs)[0]


def _shared_length(fa: Face, fb: Face, line_id: int) -> float:
    """Length of the overlap of the edges of fa and fb that lie on ``line_id``."""
    best = 0.0
    for ea in _edges_on(fa, line_id):
        for eb in _edges_on(fb, line_id):
            d = np.subtract(ea[1], ea[0])
            L = float(np.hypot(*d))
            if L == 0:
                continue
            u = d / L
            ta = sorted([0.0, L])
            tb = sorted([float(np.dot(np.subtract(eb[0], ea[0]), u)), float(np.dot(np.subtract(eb[1], ea[0]), u))])
            best = max(best, min(ta[1], tb[1]) - max(ta[0], tb[0]))
    return best


def _edges_on(f: Face, line_id: int):
    n = len(f.vertices)
    return [(f.vertices[k], f.vertices[(k + 1) % n]) for k in range(n) if f.edge_lines[k] == line_id]


def arrangement(lines, box=None) -> list[Face]:
    """Faces of the arrangement of ``lines`` inside ``box`` = (xmin, xmax, ymin, ymax).

    Each face gets a sign vector over the lines, a representative point, a
    truncation flag (touches the box) and its neighbor list.
    """
    lines = [normalize_line(h) for h in lines]
    if box is None:
        box = bounding_box(lines)
    xmin, xmax, ymin, ymax = box
    span = max(xmax - xmin, ymax - ymin)
    eps = 1e-12 * span
    faces = [Face([(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)], [BOX_EDGE] * 4)]
    for i, h in enumerate(lines):
        nxt = []
        for f in faces:
            neg, pos = _split(f, i, h, eps)
            if neg is not None and pos is not None:
                nxt += [neg, pos]
            else:
                g = neg if neg is not None else pos
                g.signs = dict(g.signs)
                g.signs[i] = -1 if neg is not None else 1
                nxt.append(g)
        faces = nxt
    for f in faces:
        f.truncated = BOX_EDGE in f.edge_lines
        f.point = representative_point(f.vertices)
    tol = 1e-9 * span
    by_line: dict[int, list[int]] = {}
    for idx, f in enumerate(faces):
        for lab in set(f.edge_lines):
            if lab >= 0:
                by_line.setdefault(lab, []).append(idx)
    for lab, idxs in by_line.items():
        for a in range(len(idxs)):
            for b in range(a + 1, len(idxs)):
                fa, fb = faces[idxs[a]], faces[idxs[b]]
                if fa.signs.get(lab) == fb.signs.get(lab):
                    continue
                if _shared_length(fa, fb, lab) > tol:
                    fa.neighbors.append((idxs[b], lab))
                    fb.neighbors.append((idxs[a], lab))
    return faces


def clip_convex(subject, clip) -> list[Point]:
    """Sutherland-Hodgman clipping of polygon ``subject`` by convex ``clip``."""
    if polygon_area(clip) < 0:
        clip = clip[::-1]
    out = list(subject)
    n = len(clip)
    for k in range(n):
        if not out:
            break
        a, b = clip[k], clip[(k + 1) % n]

        def inside(p):
            return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0

        def cross_pt(p, q):
            dx1, dy1 = q[0] - p[0], q[1] - p[1]
            dx2, dy2 = b[0] - a[0], b[1] - a[1]
            den = dx1 * dy2 - dy1 * dx2
            t = ((a[0] - p[0]) * dy2 - (a[1] - p[1]) * dx2) / den
            return (p[0] + t * dx1, p[1] + t * dy1)

        inp, out = out, []
        for i in range(len(inp)):
            p, q = inp[i], inp[(i + 1) % len(inp)]
            if inside(q):
                if not inside(p):
                    out.append(cross_pt(p, q))
                out.append(q)
            elif inside(p):
                out.append(cross_pt(p, q))
    return out
