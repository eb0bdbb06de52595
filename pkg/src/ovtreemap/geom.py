"""Axis-aligned geometric primitives: points, rectangles, rectilinear polygons.

Coordinates are doubles in image orientation (y grows downward).  Polygons
are normalized on construction (consecutive duplicates dropped, collinear
edges merged, orientation and start vertex made canonical) so equality and
the shoelace-based operations behave predictably.  Coordinate comparisons
use the absolute tolerance TOL, far below visual resolution on canvases of
a few thousand units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

TOL = 1e-9


class GeometryError(ValueError):
    """Degenerate, non-finite, or non-rectilinear geometric input."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    width: float
    height: float

    def __post_init__(self):
        for v in (self.x0, self.y0, self.width, self.height):
            if not math.isfinite(v):
                raise GeometryError("rect coordinates must be finite")
        if self.width <= 0 or self.height <= 0:
            raise GeometryError(
                f"rect sides must be positive, got {self.width}x{self.height}")

    @property
    def x1(self) -> float:
        return self.x0 + self.width

    @property
    def y1(self) -> float:
        return self.y0 + self.height

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Point:
        return Point(self.x0 + self.width / 2.0, self.y0 + self.height / 2.0)

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def contains(self, p: Point, tol: float = TOL) -> bool:
        """Strict interior test (boundary points are outside)."""
        return (self.x0 + tol < p.x < self.x1 - tol
                and self.y0 + tol < p.y < self.y1 - tol)

    def to_polygon(self) -> "RectilinearPolygon":
        return RectilinearPolygon(
            [(self.x0, self.y0), (self.x1, self.y0),
             (self.x1, self.y1), (self.x0, self.y1)],
            validate=False)


def _as_xy(p) -> tuple[float, float]:
    if isinstance(p, Point):
        return (p.x, p.y)
    x, y = p
    return (float(x), float(y))


def _signed_area2(pts: Sequence[tuple[float, float]]) -> float:
    s = 0.0
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def _normalize(pts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    # drop consecutive duplicates, including the wrap-around pair
    out: list[tuple[float, float]] = []
    for p in pts:
        if not out or abs(p[0] - out[-1][0]) > TOL or abs(p[1] - out[-1][1]) > TOL:
            out.append(p)
    while len(out) > 1 and abs(out[0][0] - out[-1][0]) <= TOL \
            and abs(out[0][1] - out[-1][1]) <= TOL:
        out.pop()

    # merge runs of collinear axis-parallel edges (also removes spikes)
    changed = True
    while changed and len(out) >= 3:
        changed = False
        kept: list[tuple[float, float]] = []
        n = len(out)
        for i in range(n):
            a, b, c = out[i - 1], out[i], out[(i + 1) % n]
            same_x = abs(a[0] - b[0]) <= TOL and abs(b[0] - c[0]) <= TOL
            same_y = abs(a[1] - b[1]) <= TOL and abs(b[1] - c[1]) <= TOL
            if same_x or same_y:
                changed = True
            else:
                kept.append(b)
        out = kept

    if len(out) >= 3 and _signed_area2(out) < 0:
        out.reverse()
    if out:
        k = min(range(len(out)), key=lambda i: out[i])
        out = out[k:] + out[:k]
    return out


class RectilinearPolygon:
    """A simple closed polygon whose edges are all axis-parallel.

    Vertex order is canonical after construction: positive shoelace sign
    (clockwise on screen given downward y) starting from the smallest
    (x, y) vertex.
    """

    __slots__ = ("_pts", "_area2")

    def __init__(self, vertices: Iterable, *, validate: bool = True):
        pts = _normalize([_as_xy(p) for p in vertices])
        if len(pts) < 4:
            raise GeometryError(f"polygon needs >= 4 corners, got {len(pts)}")
        self._pts: tuple[tuple[float, float], ...] = tuple(pts)
        self._area2 = _signed_area2(pts)
        if self._area2 <= TOL:
            raise GeometryError("polygon area must be positive")
        if validate:
            self._validate()

    def _validate(self):
        pts = self._pts
        n = len(pts)
        for v in pts:
            if not (math.isfinite(v[0]) and math.isfinite(v[1])):
                raise GeometryError("polygon coordinates must be finite")
        for i in range(n):
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % n]
            if abs(x0 - x1) > TOL and abs(y0 - y1) > TOL:
                raise GeometryError(
                    f"edge {i} is not axis-parallel: {pts[i]} -> {pts[(i + 1) % n]}")
        if self._self_intersects():
            raise GeometryError("polygon is self-intersecting")

    def _self_intersects(self) -> bool:
        edges = self.edges()
        n = len(edges)
        for i in range(n):
            (ax0, ay0), (ax1, ay1) = edges[i]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                (bx0, by0), (bx1, by1) = edges[j]
                a_vert = abs(ax0 - ax1) <= TOL
                b_vert = abs(bx0 - bx1) <= TOL
                if a_vert != b_vert:
                    v = ((ax0, ay0, ay1) if a_vert else (bx0, by0, by1))
                    h = ((by0, bx0, bx1) if a_vert else (ay0, ax0, ax1))
                    vx, vy0, vy1 = v[0], min(v[1], v[2]), max(v[1], v[2])
                    hy, hx0, hx1 = h[0], min(h[1], h[2]), max(h[1], h[2])
                    if hx0 + TOL < vx < hx1 - TOL and vy0 + TOL < hy < vy1 - TOL:
                        return True
                elif a_vert:  # both vertical: overlap on shared x is invalid
                    if abs(ax0 - bx0) <= TOL:
                        lo = max(min(ay0, ay1), min(by0, by1))
                        hi = min(max(ay0, ay1), max(by0, by1))
                        if hi - lo > TOL:
                            return True
                else:
                    if abs(ay0 - by0) <= TOL:
                        lo = max(min(ax0, ax1), min(bx0, bx1))
                        hi = min(max(ax0, ax1), max(bx0, bx1))
                        if hi - lo > TOL:
                            return True
        return False

    @property
    def vertices(self) -> tuple[Point, ...]:
        return tuple(Point(x, y) for x, y in self._pts)

    @property
    def raw(self) -> tuple[tuple[float, float], ...]:
        return self._pts

    def edges(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        pts = self._pts
        n = len(pts)
        return [(pts[i], pts[(i + 1) % n]) for i in range(n)]

    def __eq__(self, other) -> bool:
        return isinstance(other, RectilinearPolygon) and self._pts == other._pts

    def __hash__(self):
        return hash(self._pts)

    def __repr__(self):
        return f"RectilinearPolygon({list(self._pts)!r})"


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def area(poly: RectilinearPolygon) -> float:
    """Enclosed area via the shoelace formula (exact for rectilinear input)."""
    return 0.5 * poly._area2


def centroid(poly: RectilinearPolygon) -> Point:
    """Area-weighted centroid of the enclosed region."""
    pts = poly._pts
    n = len(pts)
    cx = cy = 0.0
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    f = 3.0 * poly._area2
    return Point(cx / f, cy / f)


def on_boundary(poly: RectilinearPolygon, p: Point, tol: float = TOL) -> bool:
    x, y = _as_xy(p)
    for (x0, y0), (x1, y1) in poly.edges():
        if abs(x0 - x1) <= tol:
            if abs(x - x0) <= tol and min(y0, y1) - tol <= y <= max(y0, y1) + tol:
                return True
        else:
            if abs(y - y0) <= tol and min(x0, x1) - tol <= x <= max(x0, x1) + tol:
                return True
    return False


def contains(poly: RectilinearPolygon, p: Point, tol: float = TOL) -> bool:
    """Strict interior test; points on the boundary count as outside."""
    if on_boundary(poly, p, tol):
        return False
    x, y = _as_xy(p)
    inside = False
    for (x0, y0), (x1, y1) in poly.edges():
        if abs(x0 - x1) <= tol:  # vertical edge; ray goes toward +x
            if (y0 > y) != (y1 > y) and x0 > x:
                inside = not inside
    return inside


def bbox(poly: RectilinearPolygon) -> Rect:
    xs = [p[0] for p in poly._pts]
    ys = [p[1] for p in poly._pts]
    return Rect(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


def bbox_aspect_ratio(poly: RectilinearPolygon) -> float:
    """max(w, h) / min(w, h) of the axis-aligned bounding box."""
    bb = bbox(poly)
    return max(bb.width, bb.height) / min(bb.width, bb.height)


def is_rectangle(poly: RectilinearPolygon) -> bool:
    return len(poly._pts) == 4


def horizontal_spans(poly: RectilinearPolygon, y: float) -> list[tuple[float, float]]:
    """Interior x-intervals of the horizontal line at y (empty if y misses)."""
    xs = []
    for (x0, y0), (x1, y1) in poly.edges():
        if abs(x0 - x1) <= TOL and min(y0, y1) < y < max(y0, y1):
            xs.append(x0)
    xs.sort()
    return [(xs[i], xs[i + 1]) for i in range(0, len(xs) - 1, 2)]


def _y_intervals_at_x(poly: RectilinearPolygon, x: float) -> list[tuple[float, float]]:
    ys = []
    for (x0, y0), (x1, y1) in poly.edges():
        if abs(y0 - y1) <= TOL and min(x0, x1) < x < max(x0, x1):
            ys.append(y0)
    ys.sort()
    return [(ys[i], ys[i + 1]) for i in range(0, len(ys) - 1, 2)]


def _intersect_intervals(a: list[tuple[float, float]],
                         b: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if hi - lo > TOL:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def intersection_area(a: RectilinearPolygon, b: RectilinearPolygon) -> float:
    """Area of a ∩ b without building the intersection polygons."""
    ba, bb_ = bbox(a), bbox(b)
    if ba.x1 <= bb_.x0 + TOL or bb_.x1 <= ba.x0 + TOL \
            or ba.y1 <= bb_.y0 + TOL or bb_.y1 <= ba.y0 + TOL:
        return 0.0
    total = 0.0
    for x0, x1, ints in _slab_intersection(a, b):
        w = x1 - x0
        for lo, hi in ints:
            total += w * (hi - lo)
    return total


def _slab_intersection(a: RectilinearPolygon, b: RectilinearPolygon):
    """Yield (x0, x1, y-intervals of a ∩ b) per vertical slab."""
    xs = sorted({p[0] for p in a._pts} | {p[0] for p in b._pts})
    merged = [xs[0]]
    for x in xs[1:]:
        if x - merged[-1] > TOL:
            merged.append(x)
    for k in range(len(merged) - 1):
        x0, x1 = merged[k], merged[k + 1]
        mid = 0.5 * (x0 + x1)
        ints = _intersect_intervals(_y_intervals_at_x(a, mid),
                                    _y_intervals_at_x(b, mid))
        if ints:
            yield (x0, x1, ints)


def clip(poly: RectilinearPolygon,
         region: RectilinearPolygon) -> list[RectilinearPolygon]:
    """Rectilinear intersection of poly with region.

    Built from a vertical slab decomposition so the piece areas sum exactly
    to the true intersection area.  Returns zero, one, or several disjoint
    simple polygons; a component that would need a hole is returned as its
    individual slab rectangles instead.
    """
    ba, br = bbox(poly), bbox(region)
    if ba.x1 <= br.x0 + TOL or br.x1 <= ba.x0 + TOL \
            or ba.y1 <= br.y0 + TOL or br.y1 <= ba.y0 + TOL:
        return []
    if is_rectangle(region) and br.x0 <= ba.x0 + TOL and ba.x1 <= br.x1 + TOL \
            and br.y0 <= ba.y0 + TOL and ba.y1 <= br.y1 + TOL:
        return [poly]
    if is_rectangle(poly) and ba.x0 <= br.x0 + TOL and br.x1 <= ba.x1 + TOL \
            and ba.y0 <= br.y0 + TOL and br.y1 <= ba.y1 + TOL:
        return [region]

    rects = []
    for x0, x1, ints in _slab_intersection(poly, region):
        for lo, hi in ints:
            rects.append((x0, lo, x1, hi))
    if not rects:
        return []
    return _stitch_rects(rects)


def _stitch_rects(rects: list[tuple[float, float, float, float]]
                  ) -> list[RectilinearPolygon]:
    """Merge a disjoint rectangle set into boundary polygons."""
    ys_at_x: dict[float, set[float]] = {}
    xs_at_y: dict[float, set[float]] = {}
    for x0, y0, x1, y1 in rects:
        for x in (x0, x1):
            ys_at_x.setdefault(x, set()).update((y0, y1))
        for y in (y0, y1):
            xs_at_y.setdefault(y, set()).update((x0, x1))
    for x in ys_at_x:
        ys_at_x[x] = sorted(ys_at_x[x])
    for y in xs_at_y:
        xs_at_y[y] = sorted(xs_at_y[y])

    counts: dict[tuple, int] = {}

    def add(a, b):
        if counts.get((b, a), 0) > 0:
            counts[(b, a)] -= 1
        else:
            counts[(a, b)] = counts.get((a, b), 0) + 1

    import bisect

    def fragment(a, b):
        # split the directed edge a->b at every breakpoint on its line
        if a[0] == b[0]:
            marks = ys_at_x[a[0]]
            lo, hi = sorted((a[1], b[1]))
            cuts = marks[bisect.bisect_right(marks, lo):bisect.bisect_left(marks, hi)]
            seq = [a[1]] + (cuts if a[1] < b[1] else cuts[::-1]) + [b[1]]
            for k in range(len(seq) - 1):
                add((a[0], seq[k]), (a[0], seq[k + 1]))
        else:
            marks = xs_at_y[a[1]]
            lo, hi = sorted((a[0], b[0]))
            cuts = marks[bisect.bisect_right(marks, lo):bisect.bisect_left(marks, hi)]
            seq = [a[0]] + (cuts if a[0] < b[0] else cuts[::-1]) + [b[0]]
            for k in range(len(seq) - 1):
                add((seq[k], a[1]), (seq[k + 1], a[1]))

    for x0, y0, x1, y1 in rects:
        fragment((x0, y0), (x1, y0))
        fragment((x1, y0), (x1, y1))
        fragment((x1, y1), (x0, y1))
        fragment((x0, y1), (x0, y0))

    out_edges: dict[tuple, list[tuple]] = {}
    for (a, b), c in counts.items():
        if c > 0:
            out_edges.setdefault(a, []).append(b)
    for a in out_edges:
        out_edges[a].sort()

    def turn_rank(din, dout):
        # prefer the sharpest clockwise-on-screen turn (interior on the right)
        cross = din[0] * dout[1] - din[1] * dout[0]
        dot = din[0] * dout[0] + din[1] * dout[1]
        if cross > 0:
            return 0
        if cross == 0 and dot > 0:
            return 1
        if cross < 0:
            return 2
        return 3

    rings: list[list[tuple]] = []
    while out_edges:
        start = min(out_edges)
        ring = [start]
        cur = start
        nxt = out_edges[cur][0]
        din = (nxt[0] - cur[0], nxt[1] - cur[1])
        _pop_edge(out_edges, cur, nxt)
        cur = nxt
        while cur != start:
            ring.append(cur)
            cands = out_edges.get(cur)
            if not cands:
                raise GeometryError("open boundary while stitching clip result")
            best = min(cands, key=lambda b: turn_rank(
                din, (b[0] - cur[0], b[1] - cur[1])))
            din = (best[0] - cur[0], best[1] - cur[1])
            _pop_edge(out_edges, cur, best)
            cur = best
        rings.append(ring)

    polys = []
    for ring in rings:
        if _signed_area2(ring) < 0:
            # a hole: fall back to the raw slab rectangles for exactness
            return sorted(
                (Rect(x0, y0, x1 - x0, y1 - y0).to_polygon()
                 for x0, y0, x1, y1 in rects),
                key=lambda p: p.raw)
        polys.append(RectilinearPolygon(ring, validate=False))
    polys.sort(key=lambda p: p.raw)
    return polys


def _pop_edge(out_edges, a, b):
    lst = out_edges[a]
    lst.remove(b)
    if not lst:
        del out_edges[a]
