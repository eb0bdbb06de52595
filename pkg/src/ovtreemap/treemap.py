"""Full nested layout: depth-first recursion over a value hierarchy.

Every internal node's children are laid out inside its cell.  Concave
parent cells are handled by sweeping over the cell's bounding box and
clipping each produced cell back to the parent, so areas and adaptation
always refer to the visible, clipped cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import geom
from .adaptation import AdaptParams, ClipFailure, layout_single_layer
from .geom import Rect
from .hierarchy import HierarchyNode, aggregate_values
from .initialization import initialize_sites
from .rng import derive_seed


class LayoutError(RuntimeError):
    """A layer could not be laid out even after the random-init retry."""


@dataclass
class LayerReport:
    path: str
    depth: int
    n_children: int
    iterations: int
    error: float
    init_mode: str


@dataclass
class TreemapReport:
    layers: list[LayerReport] = field(default_factory=list)

    @property
    def max_error(self) -> float:
        return max((l.error for l in self.layers), default=0.0)


def layout_tree(root: HierarchyNode, canvas: Rect, params: AdaptParams,
                mode: str = "squarified", seed: int = 0,
                report: TreemapReport | None = None) -> HierarchyNode:
    """Fill every node's cell (and every child's site) under the canvas.

    Sibling groups are laid out independently; a layer whose clipping
    degenerates (empty or multi-piece cell inside a concave parent) is
    retried once with random initialization and a derived seed before
    giving up with the node's path.
    """
    aggregate_values(root)
    root.cell = canvas.to_polygon()
    counter = 0

    def visit(node: HierarchyNode, path: str, depth: int) -> None:
        nonlocal counter
        if node.is_leaf:
            return
        counter += 1
        layer_seed = derive_seed(seed, counter, path)
        cell = node.cell
        bb = geom.bbox(cell)
        clip_to = None if geom.is_rectangle(cell) else cell
        attempts = [(mode, layer_seed)]
        attempts.append(("random", derive_seed(layer_seed, "retry")))
        last_exc: Exception | None = None
        for attempt_mode, attempt_seed in attempts:
            sites = initialize_sites(node.children, cell, attempt_mode,
                                     attempt_seed, epsilon=params.epsilon)
            try:
                diagram, trace = layout_single_layer(
                    sites, bb, params, clip_to=clip_to)
            except ClipFailure as exc:
                last_exc = exc
                continue
            for child, site in zip(node.children, diagram.sites):
                child.site = site
                child.cell = diagram.cells[site.id]
                child.layout_error = trace.final_error
                child.layout_iterations = trace.iterations
            if report is not None:
                report.layers.append(LayerReport(
                    path=path, depth=depth, n_children=len(node.children),
                    iterations=trace.iterations, error=trace.final_error,
                    init_mode=attempt_mode))
            break
        else:
            raise LayoutError(f"layout failed at node '{path}': {last_exc}")
        for child in node.children:
            visit(child, f"{path}/{child.name}", depth + 1)

    visit(root, root.name, 0)
    return root
