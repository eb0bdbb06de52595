"""Random dataset generation, metrics collection, and benchmark runs.

Four experiment drivers: neighbor-count scaling of the sweep, per-iteration
timing, convergence traces for the two initialization modes, and bounding
box aspect-ratio statistics against a plain squarified treemap.  All runs
are deterministic under (config, seed) and emit fixed-schema CSV files.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import geom
from .adaptation import AdaptParams, area_error, default_params, layout_single_layer
from .geom import Point, Rect
from .hierarchy import HierarchyNode
from .initialization import initialize_sites, squarify
from .rng import SplitMix64, derive_seed
from .segmentation import Site
from .sweep import compute_wov_diagram
from .treemap import layout_tree


@dataclass
class BenchConfig:
    site_counts: list[int] = field(default_factory=lambda: [500, 5000, 20000])
    repeats: int = 10
    seed: int = 20240
    fraction_high: float = 0.3
    high_range: tuple[float, float] = (0.0, 10.0)
    low_range: tuple[float, float] = (0.0, 1.0)
    canvas: Rect = field(default_factory=lambda: Rect(0, 0, 900, 900))

    def __post_init__(self):
        if not 0 <= self.fraction_high <= 1:
            raise ValueError("fraction_high must be in [0,1]")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


def _draw_value(rng: SplitMix64, cfg: BenchConfig) -> float:
    lo, hi = (cfg.high_range if rng.random() < cfg.fraction_high
              else cfg.low_range)
    v = rng.uniform(lo, hi)
    return v if v > 0 else 1e-12


def gen_random_layer(n: int, cfg: BenchConfig, seed: int) -> list[Site]:
    """n zero-weight sites uniform in the canvas with mixed random values."""
    if n < 1:
        raise ValueError("need at least one site")
    pos_rng = SplitMix64(derive_seed(seed, "positions"))
    val_rng = SplitMix64(derive_seed(seed, "values"))
    margin = 1e-6 * cfg.canvas.diagonal
    sites = []
    for k in range(n):
        x = pos_rng.uniform(cfg.canvas.x0 + margin, cfg.canvas.x1 - margin)
        y = pos_rng.uniform(cfg.canvas.y0 + margin, cfg.canvas.y1 - margin)
        sites.append(Site(id=k, position=Point(x, y), weight=0.0,
                          target_value=_draw_value(val_rng, cfg)))
    return sites


def _values_as_leaves(sites: Sequence[Site]) -> list[HierarchyNode]:
    return [HierarchyNode(name=str(s.id), value=s.target_value) for s in sites]


def _write_csv(path: str | Path | None, header: list[str], rows: list[tuple]):
    if path is None:
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def run_neighbor_scaling(cfg: BenchConfig, out_csv: str | None = None
                         ) -> list[tuple[int, int, float, float]]:
    """Rows of (n, repeat, pairs_per_site, valid_per_site)."""
    rows = []
    for n in cfg.site_counts:
        for rep in range(cfg.repeats):
            sites = gen_random_layer(n, cfg, derive_seed(cfg.seed, n, rep))
            diagram = compute_wov_diagram(sites, cfg.canvas)
            c = diagram.counters
            rows.append((n, rep, c.pairs_checked / n, c.valid_neighbors / n))
    _write_csv(out_csv, ["n", "repeat", "pairs_per_site", "valid_per_site"],
               rows)
    return rows


def run_timing_scaling(cfg: BenchConfig, iterations: int = 1000,
                       warmup: int = 10, out_csv: str | None = None
                       ) -> list[tuple[int, float]]:
    """Rows of (n, mean ms per iteration), convergence check disabled.

    Uses a monotonic clock, squarified initialization, and skips the first
    warmup iterations when averaging.
    """
    rows = []
    for n in cfg.site_counts:
        sites = gen_random_layer(n, cfg, derive_seed(cfg.seed, "time", n))
        leaves = _values_as_leaves(sites)
        params = default_params(cfg.canvas, max_iterations=iterations)
        init = initialize_sites(leaves, cfg.canvas.to_polygon(), "squarified",
                                cfg.seed, epsilon=params.epsilon)
        _, trace = layout_single_layer(init, cfg.canvas, params,
                                       check_convergence=False)
        times = [e.seconds for e in trace.entries[warmup:]]
        rows.append((n, 1000.0 * statistics.fmean(times)))
    _write_csv(out_csv, ["n", "ms_per_iter"], rows)
    return rows


def run_convergence(cfg: BenchConfig, init_mode: str, n: int = 200,
                    n_seeds: int = 5, max_iterations: int = 500,
                    out_csv: str | None = None
                    ) -> list[tuple[str, int, int, float]]:
    """Rows of (mode, seed, iter, error); iter 0 carries the initial error."""
    rows = []
    for sd in range(n_seeds):
        sites = gen_random_layer(n, cfg, derive_seed(cfg.seed, "conv", sd))
        params = default_params(cfg.canvas, max_iterations=max_iterations)
        if init_mode == "squarified":
            init = initialize_sites(_values_as_leaves(sites),
                                    cfg.canvas.to_polygon(), "squarified",
                                    derive_seed(cfg.seed, "conv", sd),
                                    epsilon=params.epsilon)
        else:
            init = [Site(id=s.id, position=s.position, weight=params.epsilon,
                         target_value=s.target_value) for s in sites]
        _, trace = layout_single_layer(init, cfg.canvas, params)
        rows.append((init_mode, sd, 0, trace.initial_error))
        rows.extend((init_mode, sd, e.iteration, e.area_error)
                    for e in trace.entries)
    _write_csv(out_csv, ["mode", "seed", "iter", "error"], rows)
    return rows


def run_aspect_ratio(cfg: BenchConfig, n: int = 100, n_seeds: int = 5,
                     dataset: HierarchyNode | None = None,
                     out_csv: str | None = None
                     ) -> list[tuple[str, int, str, float]]:
    """Rows of (method, seed, cell_path, ratio) for leaf cells.

    Methods: "designed" (squarified-initialized layout), "random"
    (random-initialized layout), and "squarified" (the plain treemap
    rectangles on the same values).  With a dataset, the full tree is laid
    out once per method instead of a random single layer.
    """
    rows: list[tuple[str, int, str, float]] = []
    for sd in range(n_seeds):
        seed = derive_seed(cfg.seed, "aspect", sd)
        if dataset is not None:
            params = default_params(cfg.canvas)
            for method, mode in (("designed", "squarified"), ("random", "random")):
                root = layout_tree(dataset, cfg.canvas, params, mode, seed)
                for path, _, node in root.walk():
                    if node.is_leaf and node.cell is not None:
                        rows.append((method, sd, path,
                                     geom.bbox_aspect_ratio(node.cell)))
            values = [leaf.value for leaf in dataset.leaves()]
            for k, rect in enumerate(squarify(values, cfg.canvas)):
                ratio = max(rect.width, rect.height) / min(rect.width, rect.height)
                rows.append(("squarified", sd, f"leaf/{k}", ratio))
            continue
        sites = gen_random_layer(n, cfg, seed)
        leaves = _values_as_leaves(sites)
        params = default_params(cfg.canvas)
        for method, mode in (("designed", "squarified"), ("random", "random")):
            if mode == "squarified":
                init = initialize_sites(leaves, cfg.canvas.to_polygon(), mode,
                                        seed, epsilon=params.epsilon)
            else:
                init = [Site(id=s.id, position=s.position,
                             weight=params.epsilon,
                             target_value=s.target_value) for s in sites]
            diagram, _ = layout_single_layer(init, cfg.canvas, params)
            for sid, cell in sorted(diagram.cells.items()):
                rows.append((method, sd, str(sid), geom.bbox_aspect_ratio(cell)))
        for k, rect in enumerate(squarify([s.target_value for s in sites],
                                          cfg.canvas)):
            ratio = max(rect.width, rect.height) / min(rect.width, rect.height)
            rows.append(("squarified", sd, str(k), ratio))
    _write_csv(out_csv, ["method", "seed", "cell_path", "ratio"], rows)
    return rows


def aspect_summary(rows, method: str, seed: int | None = None) -> dict:
    ratios = sorted(r[3] for r in rows
                    if r[0] == method and (seed is None or r[1] == seed))
    q = statistics.quantiles(ratios, n=4) if len(ratios) >= 4 else [0, 0, 0]
    return {
        "n": len(ratios),
        "min": ratios[0],
        "median": statistics.median(ratios),
        "mean": statistics.fmean(ratios),
        "max": ratios[-1],
        "iqr": q[2] - q[0],
    }


# ---------------------------------------------------------------------------
# Synthetic hierarchical dataset
# ---------------------------------------------------------------------------

def gen_hierarchy(n_leaves: int = 220, fanouts: tuple[int, int] = (8, 4),
                  seed: int = 7, value_range: tuple[float, float] = (1.0, 100.0)
                  ) -> HierarchyNode:
    """Deterministic class-library-like tree: root, two grouping levels,
    then leaves, with the leaf count split as evenly as possible."""
    rng = SplitMix64(derive_seed(seed, "hierarchy"))
    n_groups = fanouts[0] * fanouts[1]
    base, extra = divmod(n_leaves, n_groups)
    root = HierarchyNode(name="root")
    leaf_idx = 0
    for a in range(fanouts[0]):
        pkg = HierarchyNode(name=f"pkg{a}")
        for b in range(fanouts[1]):
            grp = HierarchyNode(name=f"mod{b}")
            count = base + (1 if a * fanouts[1] + b < extra else 0)
            for _ in range(max(count, 1)):
                grp.children.append(HierarchyNode(
                    name=f"leaf{leaf_idx}",
                    value=rng.uniform(*value_range)))
                leaf_idx += 1
            pkg.children.append(grp)
        root.children.append(pkg)
    return root
