"""Initial site placement: squarified-treemap seeding plus a random fallback.

The squarified mode lays the children out as a squarified treemap over the
parent cell's bounding box, records each child's rectangle center relative
to that box, re-projects it into the (possibly concave) parent cell, and
seeds the weight from half the rectangle's area.  This starts the
adaptation loop close to an area-correct configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import geom
from .geom import TOL, Point, Rect, RectilinearPolygon
from .hierarchy import HierarchyNode
from .rng import SplitMix64, derive_seed
from .segmentation import Site


class InitializationError(ValueError):
    pass


@dataclass(frozen=True)
class RelPos:
    """Center of a child rectangle relative to its parent box, in [0,1]²."""
    rx: float
    ry: float

    def __post_init__(self):
        if not (0 <= self.rx <= 1 and 0 <= self.ry <= 1):
            raise InitializationError(f"relative position out of range: {self}")


def _worst_ratio(areas: list[float], side: float) -> float:
    total = sum(areas)
    thickness = total / side
    worst = 1.0
    for a in areas:
        length = a / thickness
        worst = max(worst, length / thickness, thickness / length)
    return worst


def squarify(children_values: Sequence[float], rect: Rect) -> list[Rect]:
    """Squarified treemap of the values inside rect, in input order.

    Greedy row building: items join the current row while the row's worst
    aspect ratio keeps strictly improving; rows are laid along the shorter
    side of the remaining rectangle.
    """
    if not children_values:
        raise InitializationError("squarify needs at least one value")
    for v in children_values:
        if not v > 0:
            raise InitializationError(f"squarify values must be positive, got {v}")
    total = float(sum(children_values))
    order = sorted(range(len(children_values)),
                   key=lambda k: -children_values[k])
    areas = [children_values[k] / total * rect.area for k in order]

    out: list[Rect | None] = [None] * len(children_values)
    x, y, w, h = rect.x0, rect.y0, rect.width, rect.height
    i = 0
    while i < len(areas):
        side = min(w, h)
        row = [areas[i]]
        j = i + 1
        worst = _worst_ratio(row, side)
        while j < len(areas):
            cand = _worst_ratio(row + [areas[j]], side)
            if cand < worst:
                row.append(areas[j])
                worst = cand
                j += 1
            else:
                break
        row_area = sum(row)
        if w >= h:
            # vertical strip on the left, items stacked downward
            strip_w = row_area / h
            cy = y
            for k, a in enumerate(row):
                ih = a / strip_w if k < len(row) - 1 else y + h - cy
                out[order[i + k]] = Rect(x, cy, strip_w, ih)
                cy += ih
            x += strip_w
            w -= strip_w
        else:
            strip_h = row_area / w
            cx = x
            for k, a in enumerate(row):
                iw = a / strip_h if k < len(row) - 1 else x + w - cx
                out[order[i + k]] = Rect(cx, y, iw, strip_h)
                cx += iw
            y += strip_h
            h -= strip_h
        i = j
        if i < len(areas) and (w <= TOL or h <= TOL):
            raise InitializationError("squarify degenerated; values span too much")
    return out  # type: ignore[return-value]


def encode_relpos(child_rect: Rect, parent_rect: Rect) -> RelPos:
    """Relative position of the child's center inside the parent."""
    c = child_rect.center
    return RelPos((c.x - parent_rect.x0) / parent_rect.width,
                  (c.y - parent_rect.y0) / parent_rect.height)


def decode_relpos(rel: RelPos, parent_cell: RectilinearPolygon) -> Point:
    """Project a relative position into a (possibly concave) parent cell.

    The y coordinate is resolved first against the cell's bounding box; the
    x coordinate is then interpolated along the cell's horizontal span at
    that y (the span under the box-interpolated x, else the widest one).
    The result is nudged inward if it lands on the boundary.
    """
    bb = geom.bbox(parent_cell)
    nudge = 1e-9 * bb.diagonal
    y = bb.y0 + rel.ry * bb.height
    y = min(max(y, bb.y0 + nudge), bb.y1 - nudge)

    edge_ys = sorted({p.y for p in parent_cell.vertices})
    for ey in edge_ys:
        if abs(y - ey) <= nudge:
            y = ey + nudge if rel.ry <= 0.5 else ey - nudge
            break

    spans = geom.horizontal_spans(parent_cell, y)
    if not spans:
        y = min(max(bb.y0 + rel.ry * bb.height, bb.y0 + 16 * nudge),
                bb.y1 - 16 * nudge)
        spans = geom.horizontal_spans(parent_cell, y)
        if not spans:
            raise InitializationError(
                f"no horizontal span of the parent cell at y={y}")

    x_hint = bb.x0 + rel.rx * bb.width
    span = None
    for lo, hi in spans:
        if lo - TOL <= x_hint <= hi + TOL:
            span = (lo, hi)
            break
    if span is None:
        span = max(spans, key=lambda s: (s[1] - s[0], -s[0]))
    x = span[0] + rel.rx * (span[1] - span[0])
    x = min(max(x, span[0] + nudge), span[1] - nudge)
    p = Point(x, y)
    if not geom.contains(parent_cell, p):
        p = Point(min(max(x, span[0] + 16 * nudge), span[1] - 16 * nudge), y)
        if not geom.contains(parent_cell, p):
            raise InitializationError(f"decoded point {p} is outside the cell")
    return p


def random_point_in(cell: RectilinearPolygon, rng: SplitMix64,
                    max_tries: int = 100000) -> Point:
    """Uniform point strictly inside the cell by rejection sampling."""
    bb = geom.bbox(cell)
    for _ in range(max_tries):
        p = Point(rng.uniform(bb.x0, bb.x1), rng.uniform(bb.y0, bb.y1))
        if geom.contains(cell, p):
            return p
    raise InitializationError("rejection sampling failed to hit the cell")


def initialize_sites(children: Sequence[HierarchyNode],
                     parent_cell: RectilinearPolygon,
                     mode: str = "squarified", seed: int = 0, *,
                     epsilon: float = 1e-6,
                     sqrt_area_weights: bool = False) -> list[Site]:
    """Build the initial sites for one layer of children.

    squarified mode: positions re-projected from a squarified treemap of
    the children over the parent box, weight = half the treemap rectangle
    area (scaled by the concavity ratio of the parent cell); pass
    sqrt_area_weights=True to use half the square root of that area, which
    keeps weights in length units.  random mode: uniform seeded positions,
    weights at the floor epsilon.
    """
    if not children:
        raise InitializationError("need at least one child")
    values = [c.value for c in children]
    for c in children:
        if not c.value > 0:
            raise InitializationError(f"child '{c.name}' has no positive value")

    if mode == "squarified":
        bb = geom.bbox(parent_cell)
        rects = squarify(values, bb)
        scale = geom.area(parent_cell) / bb.area
        sites = []
        for k, rect in enumerate(rects):
            rel = encode_relpos(rect, bb)
            pos = decode_relpos(rel, parent_cell)
            cell_area = rect.area * scale
            weight = 0.5 * (cell_area ** 0.5) if sqrt_area_weights \
                else 0.5 * cell_area
            sites.append(Site(id=k, position=pos, weight=max(weight, epsilon),
                              target_value=values[k]))
        return sites
    if mode == "random":
        rng = SplitMix64(derive_seed(seed, "random-init"))
        return [Site(id=k, position=random_point_in(parent_cell, rng),
                     weight=epsilon, target_value=values[k])
                for k in range(len(children))]
    raise InitializationError(f"unknown initialization mode '{mode}'")
