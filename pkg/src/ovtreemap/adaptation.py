"""Single-layer iterative loop: adapt site weights and positions until the
cell areas match their value-proportional targets.

Each iteration adapts every site once (weight scaled by the square root of
its target/current area ratio, position pulled toward its cell centroid)
and then redraws the diagram exactly once; the loop stops when the summed
relative area deviation drops under the threshold or the iteration budget
runs out.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import geom
from .geom import Rect, RectilinearPolygon
from .segmentation import Site
from .sweep import Diagram, compute_wov_diagram


class ClipFailure(RuntimeError):
    """A cell clipped against a concave parent came out empty or in pieces."""

    def __init__(self, site_id: int, pieces: int):
        super().__init__(f"cell of site {site_id} clipped into {pieces} pieces")
        self.site_id = site_id
        self.pieces = pieces


@dataclass
class AdaptParams:
    rho: float = 0.3               # damping factor for oscillating sites
    epsilon: float = 1e-6          # weight floor, canvas units
    max_iterations: int = 500
    error_threshold: float = 0.01

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must be in (0,1), got {self.rho}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.error_threshold <= 0:
            raise ValueError("error_threshold must be positive")


def default_params(region: Rect, *, rho: float = 0.3,
                   epsilon_scale: float = 1e-6, max_iterations: int = 500,
                   error_threshold: float = 0.01) -> AdaptParams:
    """Parameters with the weight floor scaled to the region diagonal."""
    return AdaptParams(rho=rho, epsilon=epsilon_scale * region.diagonal,
                       max_iterations=max_iterations,
                       error_threshold=error_threshold)


@dataclass(frozen=True)
class IterationPoint:
    iteration: int
    area_error: float
    seconds: float


@dataclass
class IterationTrace:
    initial_error: float
    entries: list[IterationPoint] = field(default_factory=list)

    @property
    def final_error(self) -> float:
        return self.entries[-1].area_error if self.entries else self.initial_error

    @property
    def iterations(self) -> int:
        return len(self.entries)


def _cell_map(cells) -> Mapping[int, RectilinearPolygon]:
    return cells.cells if isinstance(cells, Diagram) else cells


def area_error(cells, sites: Sequence[Site], region_area: float) -> float:
    """Summed |cell area - target area| normalized by the region area."""
    cell_map = _cell_map(cells)
    total_value = sum(s.target_value for s in sites)
    err = 0.0
    for s in sites:
        target = region_area * s.target_value / total_value
        err += abs(geom.area(cell_map[s.id]) - target)
    return err / region_area


def _sgn(v: float) -> float:
    return 1.0 if v >= 0 else -1.0


def adapt_positions_weights(sites: Sequence[Site], cells, params: AdaptParams,
                            region_area: float, *,
                            cross_site_damping: bool = True,
                            factor_history: dict[int, float] | None = None
                            ) -> list[Site]:
    """One adaptation pass over all sites, in sweep (x ascending) order.

    The damping clamp compares each site's raw area factor against the
    factor of the previously processed site; set cross_site_damping=False
    to compare against the same site's factor from the previous pass
    instead (factor_history carries it between calls).
    """
    cell_map = _cell_map(cells)
    total_value = sum(s.target_value for s in sites)
    order = sorted(range(len(sites)),
                   key=lambda k: (sites[k].position.x, sites[k].position.y,
                                  sites[k].id))
    out: list[Site | None] = [None] * len(sites)
    f_prev = 0.0
    for k in order:
        s = sites[k]
        cell = cell_map[s.id]
        a_current = geom.area(cell)
        if a_current <= 0:
            raise ValueError(f"site {s.id} has a zero-area cell")
        a_target = region_area * s.target_value / total_value
        f_adapt = a_target / a_current
        if cross_site_damping:
            f_ref = f_prev
        else:
            f_ref = factor_history.get(s.id, 0.0) if factor_history else 0.0
        if f_ref != 0 and _sgn(f_adapt - 1) != _sgn(f_ref - 1):
            f_adapt = min(1 + params.rho, max(f_adapt, 1 - params.rho))
        weight = max(s.weight * math.sqrt(f_adapt), params.epsilon)
        f_prev = f_adapt
        if factor_history is not None:
            factor_history[s.id] = f_adapt
        c = geom.centroid(cell)
        gain = 1 - 0.5 * params.rho
        candidate = geom.Point(s.position.x + (c.x - s.position.x) * gain,
                               s.position.y + (c.y - s.position.y) * gain)
        position = candidate if geom.contains(cell, candidate) else s.position
        out[k] = Site(id=s.id, position=position, weight=weight,
                      target_value=s.target_value)
    return out  # type: ignore[return-value]


def _clip_cells(diagram: Diagram, clip_to: RectilinearPolygon | None
                ) -> dict[int, RectilinearPolygon]:
    if clip_to is None:
        return diagram.cells
    clipped = {}
    for sid, cell in diagram.cells.items():
        pieces = geom.clip(cell, clip_to)
        if len(pieces) != 1:
            raise ClipFailure(sid, len(pieces))
        clipped[sid] = pieces[0]
    return clipped


def layout_single_layer(sites: Sequence[Site], region: Rect,
                        params: AdaptParams, *,
                        clip_to: RectilinearPolygon | None = None,
                        check_convergence: bool = True,
                        cross_site_damping: bool = True,
                        jitter: bool = False, jitter_seed: int = 0
                        ) -> tuple[Diagram, IterationTrace]:
    """Run the adapt/redraw loop for one layer of sites.

    With clip_to set (a concave parent cell), the sweep still runs on the
    rectangular region but areas, centroids, and the returned cells are all
    evaluated on the cells clipped to the parent.  The diagram is drawn
    once per iteration plus once up front; the first diagram whose error
    beats the threshold is returned (or the last one when the budget is
    exhausted, or when check_convergence is off).
    """
    region_area = geom.area(clip_to) if clip_to is not None else region.area
    history: dict[int, float] | None = None if cross_site_damping else {}

    diagram = compute_wov_diagram(sites, region, jitter=jitter,
                                  jitter_seed=jitter_seed)
    cells = _clip_cells(diagram, clip_to)
    diagram.cells = cells
    current = list(sites)
    trace = IterationTrace(initial_error=area_error(cells, current, region_area))

    for it in range(1, params.max_iterations + 1):
        t0 = time.perf_counter()
        current = adapt_positions_weights(
            current, cells, params, region_area,
            cross_site_damping=cross_site_damping, factor_history=history)
        diagram = compute_wov_diagram(current, region, jitter=jitter,
                                      jitter_seed=jitter_seed)
        cells = _clip_cells(diagram, clip_to)
        diagram.cells = cells
        err = area_error(cells, current, region_area)
        trace.entries.append(IterationPoint(it, err, time.perf_counter() - t0))
        if check_convergence and err < params.error_threshold:
            break
    diagram.sites = current
    return diagram, trace
