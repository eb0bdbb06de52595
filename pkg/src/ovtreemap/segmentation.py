"""Pairwise axis-aligned partitioning rules.

A pair of sites is separated by a vertical or a horizontal line depending on
which coordinate difference dominates.  The separating coordinate accounts
for the two weights: when they fit in the gap the line sits where the
weighted distances to both sites are equal, otherwise the gap is divided in
proportion to the weights, which keeps the line strictly between the sites
and prevents empty cells no matter how large the weights grow.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .geom import TOL, Point

ACTIVE = "active"
CLOSED = "closed"


class CoincidentSitesError(ValueError):
    """Two sites share a position; the pair line is undefined."""


@dataclass
class Site:
    id: int
    position: Point
    weight: float
    target_value: float = 1.0
    status: str = ACTIVE


class SegAxis(enum.Enum):
    """Orientation of a segmentation line.

    HORIZONTAL separates a vertically-related pair; VERTICAL separates a
    horizontally-related pair.
    """
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


@dataclass(frozen=True)
class SegLine:
    axis: SegAxis
    coordinate: float


def classify_pair(si: Site, sj: Site) -> SegAxis:
    """Pick the separating axis from the dominant coordinate difference.

    A tie (|dx| == |dy| within tolerance) resolves to a horizontal line.
    """
    dx = abs(si.position.x - sj.position.x)
    dy = abs(si.position.y - sj.position.y)
    if dx <= TOL and dy <= TOL:
        raise CoincidentSitesError(
            f"sites {si.id} and {sj.id} coincide at {si.position}")
    if dx > dy + TOL:
        return SegAxis.VERTICAL
    return SegAxis.HORIZONTAL


def weighted_distance(p: Point, si: Site, axis: SegAxis) -> float:
    """Per-axis weighted distance; may be negative inside the weight disc."""
    if axis is SegAxis.VERTICAL:
        return abs(p.x - si.position.x) - si.weight
    return abs(p.y - si.position.y) - si.weight


def generate_weighted_line(si: Site, sj: Site) -> SegLine:
    """Weighted segmentation line between two sites.

    Equidistant placement when the weights fit in the gap, weight-ratio
    placement otherwise; either way the coordinate is strictly between the
    two site coordinates on the separating axis.
    """
    axis = classify_pair(si, sj)
    if axis is SegAxis.VERTICAL:
        ci, cj = si.position.x, sj.position.x
    else:
        ci, cj = si.position.y, sj.position.y
    wi, wj = si.weight, sj.weight
    delta = abs(ci - cj)
    if delta - wi - wj >= 0:
        coord = min(ci + wi, cj + wj) + 0.5 * (delta - wi - wj)
    elif ci < cj:
        coord = ci + wi / (wi + wj) * delta
    else:
        coord = cj + wj / (wi + wj) * delta
    lo, hi = min(ci, cj), max(ci, cj)
    eps = min(TOL, 0.25 * delta)
    coord = min(max(coord, lo + eps), hi - eps)
    return SegLine(axis, coord)


def is_valid_neighbor(si: Site, sj: Site, all_sites: Iterable[Site]) -> bool:
    """True when no third site sits strictly inside the pair's spanning rect.

    The spanning rectangle is open: sites exactly on its boundary do not
    invalidate the pair.
    """
    x_lo, x_hi = sorted((si.position.x, sj.position.x))
    y_lo, y_hi = sorted((si.position.y, sj.position.y))
    for s in all_sites:
        if s.id == si.id or s.id == sj.id:
            continue
        p = s.position
        if x_lo + TOL < p.x < x_hi - TOL and y_lo + TOL < p.y < y_hi - TOL:
            return False
    return True
