"""Weighted orthogonal Voronoi diagram via a left-to-right sweep.

A vertical sweepline visits sites in x order.  A skyline (a partition of the
region's vertical extent into segments, each recording the frontier x and
the active site that owns it) tracks the growing cells.  When the sweep hits
a new site, every active site forming a valid pair with it produces an
event:

* a horizontally-related pair yields a vertical line that closes the left
  site, whose cell is emitted from its skyline run and whose segments pass
  to the closing site at the new frontier;
* a vertically-related pair yields a horizontal line that re-divides the
  band containing the line between the two sites.

Sites still active at the end are closed against the region's right edge.
Each active site always owns one contiguous y interval (its band) that
contains its own y, which keeps every emitted cell a simple staircase
polygon and makes the cells tile the region exactly.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .geom import TOL, Point, Rect, RectilinearPolygon
from .rng import SplitMix64, derive_seed
from .segmentation import (ACTIVE, CLOSED, SegAxis, SegLine, Site,
                           generate_weighted_line, is_valid_neighbor)


class SweepError(RuntimeError):
    """Internal sweep state violated an invariant."""


class DuplicateSitesError(ValueError):
    """Two input sites share a position and jitter is disabled."""


class SiteOutsideRegionError(ValueError):
    """An input site does not lie strictly inside the region."""


# ---------------------------------------------------------------------------
# Skyline
# ---------------------------------------------------------------------------

@dataclass
class SkySegment:
    y0: float
    y1: float
    frontier_x: float
    owner: int


class Skyline:
    """Sorted, gap-free segment list covering the region's vertical extent.

    Ownership per site is always one contiguous y interval (the site's
    band); bands are tracked alongside the segments.
    """

    __slots__ = ("segments", "_y0s", "bands")

    def __init__(self, segments: Iterable[SkySegment]):
        self.segments = list(segments)
        if not self.segments:
            raise SweepError("skyline cannot be empty")
        self._y0s = [s.y0 for s in self.segments]
        prev = None
        self.bands: dict[int, tuple[float, float]] = {}
        for s in self.segments:
            if s.y1 - s.y0 <= TOL:
                raise SweepError("zero-height skyline segment")
            if prev is not None and abs(prev - s.y0) > TOL:
                raise SweepError("skyline segments must be contiguous")
            prev = s.y1
            band = self.bands.get(s.owner)
            if band is None:
                self.bands[s.owner] = (s.y0, s.y1)
            elif abs(band[1] - s.y0) <= TOL:
                self.bands[s.owner] = (band[0], s.y1)
            else:
                raise SweepError(f"owner {s.owner} holds non-contiguous segments")

    @classmethod
    def spanning(cls, region: Rect, owner: int,
                 frontier_x: float | None = None) -> "Skyline":
        x = region.x0 if frontier_x is None else frontier_x
        return cls([SkySegment(region.y0, region.y1, x, owner)])

    @property
    def y_top(self) -> float:
        return self.segments[0].y0

    @property
    def y_bottom(self) -> float:
        return self.segments[-1].y1

    def index_at(self, y: float) -> int:
        i = bisect.bisect_right(self._y0s, y) - 1
        return min(max(i, 0), len(self.segments) - 1)

    def split_at(self, y: float) -> None:
        i = self.index_at(y)
        s = self.segments[i]
        if y - s.y0 > TOL and s.y1 - y > TOL:
            self.segments[i:i + 1] = [
                SkySegment(s.y0, y, s.frontier_x, s.owner),
                SkySegment(y, s.y1, s.frontier_x, s.owner),
            ]
            self._y0s.insert(i + 1, y)

    def run(self, lo: float, hi: float) -> tuple[int, int]:
        """Segment index range exactly covering [lo, hi]."""
        i0 = self.index_at(lo)
        if abs(self.segments[i0].y0 - lo) > TOL:
            raise SweepError("range start is not on a segment boundary")
        i1 = i0
        while self.segments[i1].y1 < hi - TOL:
            i1 += 1
        if abs(self.segments[i1].y1 - hi) > TOL:
            raise SweepError("range end is not on a segment boundary")
        return i0, i1

    def band_adjacent(self, owner: int, lo: float, hi: float) -> bool:
        band = self.bands.get(owner)
        return band is None or (hi >= band[0] - TOL and lo <= band[1] + TOL)

    def assign(self, lo: float, hi: float, new_owner: int,
               x_line: float | None = None) -> None:
        """Hand [lo, hi] to new_owner; with x_line, advance the frontier too."""
        self.split_at(lo)
        self.split_at(hi)
        i0, i1 = self.run(lo, hi)
        displaced: dict[int, tuple[float, float]] = {}
        for k in range(i0, i1 + 1):
            s = self.segments[k]
            if s.owner != new_owner:
                old = displaced.get(s.owner)
                displaced[s.owner] = (s.y0 if old is None else old[0], s.y1)
            s.owner = new_owner
            if x_line is not None and x_line > s.frontier_x:
                s.frontier_x = x_line
        for owner, (dlo, dhi) in displaced.items():
            self._shrink_band(owner, dlo, dhi)
        self._extend_band(new_owner, lo, hi)
        self._merge_window(i0, i1)

    def _shrink_band(self, owner: int, lo: float, hi: float) -> None:
        band = self.bands.get(owner)
        if band is None:
            return
        blo, bhi = band
        if lo <= blo + TOL and bhi <= hi + TOL:
            del self.bands[owner]
        elif lo <= blo + TOL:
            self.bands[owner] = (hi, bhi)
        elif bhi <= hi + TOL:
            self.bands[owner] = (blo, lo)
        else:
            raise SweepError(f"band of {owner} would be split in the middle")

    def _extend_band(self, owner: int, lo: float, hi: float) -> None:
        band = self.bands.get(owner)
        if band is None:
            self.bands[owner] = (lo, hi)
            return
        blo, bhi = band
        if hi < blo - TOL or lo > bhi + TOL:
            raise SweepError(f"non-adjacent band extension for {owner}")
        self.bands[owner] = (min(blo, lo), max(bhi, hi))

    def _merge_window(self, i0: int, i1: int) -> None:
        k = min(i1 + 1, len(self.segments) - 1)
        stop = max(i0 - 1, 0)
        while k > stop:
            a, b = self.segments[k - 1], self.segments[k]
            if a.owner == b.owner and abs(a.frontier_x - b.frontier_x) <= TOL:
                a.y1 = b.y1
                del self.segments[k]
                del self._y0s[k]
            k -= 1

    def segments_of(self, owner: int) -> list[SkySegment]:
        band = self.bands.get(owner)
        if band is None:
            return []
        i0, i1 = self.run(*band)
        return self.segments[i0:i1 + 1]

    def check(self) -> None:
        """Invariant audit used by tests."""
        rebuilt = Skyline([SkySegment(s.y0, s.y1, s.frontier_x, s.owner)
                           for s in self.segments])
        if rebuilt.bands != self.bands:
            raise SweepError("band map out of sync with segments")


def _band_polygon(segments: Sequence[SkySegment],
                  x_right: float) -> RectilinearPolygon:
    pieces = [(s.y0, s.y1, s.frontier_x) for s in segments
              if x_right - s.frontier_x > TOL]
    if not pieces:
        raise SweepError("site band has no area left of the closing line")
    for a, b in zip(pieces, pieces[1:]):
        if abs(a[1] - b[0]) > TOL:
            raise SweepError("discontiguous band pieces")
    pts: list[tuple[float, float]] = [(x_right, pieces[0][0])]
    for y0, y1, fx in pieces:
        pts.append((fx, y0))
        pts.append((fx, y1))
    pts.append((x_right, pieces[-1][1]))
    return RectilinearPolygon(pts, validate=False)


def close_site(skyline: Skyline, site: Site, vline: SegLine, region: Rect,
               closing_site: Site | None = None) -> RectilinearPolygon:
    """Emit the cell of a site closed by a vertical line.

    The cell is bounded left by the site's skyline run, right by the line,
    and top/bottom by the run's extent.  The run's segments move to the
    closing site with their frontier advanced to the line, and the closed
    site is marked closed.
    """
    if vline.axis is not SegAxis.VERTICAL:
        raise ValueError("close_site needs a vertical segmentation line")
    band = skyline.bands.get(site.id)
    if band is None:
        raise SweepError(f"site {site.id} owns no skyline segment")
    i0, i1 = skyline.run(*band)
    poly = _band_polygon(skyline.segments[i0:i1 + 1], vline.coordinate)
    new_owner = site.id if closing_site is None else closing_site.id
    skyline.assign(band[0], band[1], new_owner, x_line=vline.coordinate)
    site.status = CLOSED
    return poly


def finalize_open_sites(skyline: Skyline,
                        region: Rect) -> dict[int, RectilinearPolygon]:
    """Close every remaining band against the region's right edge."""
    out: dict[int, RectilinearPolygon] = {}
    for owner, band in sorted(skyline.bands.items(), key=lambda kv: kv[1][0]):
        i0, i1 = skyline.run(*band)
        out[owner] = _band_polygon(skyline.segments[i0:i1 + 1], region.x1)
    return out


# ---------------------------------------------------------------------------
# Diagram computation
# ---------------------------------------------------------------------------

@dataclass
class DiagCounters:
    pairs_checked: int = 0
    valid_neighbors: int = 0


@dataclass(frozen=True)
class SweepEvent:
    kind: str            # "close" or "split"
    site_id: int         # the newly hit site
    other_id: int        # its pair partner (the closed site for "close")
    coordinate: float    # x of the vertical line, y of the horizontal line
    forced: bool = False


@dataclass
class Diagram:
    cells: dict[int, RectilinearPolygon]
    counters: DiagCounters
    sites: list[Site]
    events: list[SweepEvent] = field(default_factory=list)


def _line_coord(ci: float, wi: float, cj: float, wj: float) -> float:
    delta = abs(ci - cj)
    if delta - wi - wj >= 0:
        coord = min(ci + wi, cj + wj) + 0.5 * (delta - wi - wj)
    elif ci < cj:
        coord = ci + wi / (wi + wj) * delta
    else:
        coord = cj + wj / (wi + wj) * delta
    lo, hi = (ci, cj) if ci < cj else (cj, ci)
    eps = min(TOL, 0.25 * delta)
    return min(max(coord, lo + eps), hi - eps)


class _ActiveIndex:
    """Active sites sorted by y with their x and sweep position."""

    __slots__ = ("ys", "xs", "pos")

    def __init__(self):
        self.ys = np.empty(0, dtype=np.float64)
        self.xs = np.empty(0, dtype=np.float64)
        self.pos = np.empty(0, dtype=np.int64)

    def insert(self, y: float, x: float, p: int) -> None:
        i = int(np.searchsorted(self.ys, y, side="right"))
        self.ys = np.insert(self.ys, i, y)
        self.xs = np.insert(self.xs, i, x)
        self.pos = np.insert(self.pos, i, p)

    def remove(self, y: float, p: int) -> None:
        i = int(np.searchsorted(self.ys, y, side="left"))
        while self.pos[i] != p:
            i += 1
        self.ys = np.delete(self.ys, i)
        self.xs = np.delete(self.xs, i)
        self.pos = np.delete(self.pos, i)

    def valid_for(self, y_i: float, x_i: float) -> set[int]:
        """Sweep positions of active sites whose open spanning rectangle
        with (x_i, y_i) contains no other active site."""
        n = self.ys.size
        if n == 0:
            return set()
        k_lo = int(np.searchsorted(self.ys, y_i, side="left"))
        k_hi = int(np.searchsorted(self.ys, y_i, side="right"))
        out = self.pos[k_lo:k_hi].tolist()
        if k_lo:
            xs_up = self.xs[k_lo - 1::-1]          # nearest-above first
            rel = np.where(xs_up < x_i, xs_up, -np.inf)
            rm = np.maximum.accumulate(rel)
            ok = np.empty(k_lo, dtype=bool)
            ok[0] = True
            np.greater_equal(xs_up[1:], rm[:-1], out=ok[1:])
            np.logical_or(ok, xs_up >= x_i, out=ok)
            out += self.pos[k_lo - 1::-1][ok].tolist()
        if k_hi < n:
            xs_dn = self.xs[k_hi:]
            rel = np.where(xs_dn < x_i, xs_dn, -np.inf)
            rm = np.maximum.accumulate(rel)
            ok = np.empty(n - k_hi, dtype=bool)
            ok[0] = True
            np.greater_equal(xs_dn[1:], rm[:-1], out=ok[1:])
            np.logical_or(ok, xs_dn >= x_i, out=ok)
            out += self.pos[k_hi:][ok].tolist()
        return set(out)


def _jitter_duplicates(sites: list[Site], region: Rect, seed: int) -> None:
    rng = SplitMix64(derive_seed(seed, "jitter"))
    mag = 1e-6 * region.diagonal
    for _ in range(100):
        order = sorted(range(len(sites)),
                       key=lambda k: (sites[k].position.x, sites[k].position.y))
        dup = set()
        for a, b in zip(order, order[1:]):
            pa, pb = sites[a].position, sites[b].position
            if abs(pa.x - pb.x) <= TOL and abs(pa.y - pb.y) <= TOL:
                dup.add(b)
        if not dup:
            return
        for k in sorted(dup):
            p = sites[k].position
            x = min(max(p.x + rng.uniform(-mag, mag), region.x0 + 2 * TOL),
                    region.x1 - 2 * TOL)
            y = min(max(p.y + rng.uniform(-mag, mag), region.y0 + 2 * TOL),
                    region.y1 - 2 * TOL)
            sites[k].position = Point(x, y)
    raise DuplicateSitesError("could not separate coincident sites by jitter")


def compute_wov_diagram(sites: Sequence[Site], region: Rect, *,
                        jitter: bool = False, jitter_seed: int = 0) -> Diagram:
    """Partition region into one rectilinear cell per site.

    Sites must lie strictly inside the region with pairwise distinct
    positions (set jitter=True to displace duplicates deterministically
    instead of failing).  The input sites are not modified; the returned
    Diagram carries working copies with their final status.
    """
    if not sites:
        raise ValueError("need at least one site")
    work = [replace(s, status=ACTIVE) for s in sites]
    seen_ids = set()
    for s in work:
        if s.id in seen_ids:
            raise ValueError(f"duplicate site id {s.id}")
        seen_ids.add(s.id)
        if not region.contains(s.position):
            raise SiteOutsideRegionError(
                f"site {s.id} at {s.position} is not strictly inside {region}")

    order = sorted(range(len(work)),
                   key=lambda k: (work[k].position.x, work[k].position.y,
                                  work[k].id))
    for a, b in zip(order, order[1:]):
        pa, pb = work[a].position, work[b].position
        if abs(pa.x - pb.x) <= TOL and abs(pa.y - pb.y) <= TOL:
            if not jitter:
                raise DuplicateSitesError(
                    f"sites {work[a].id} and {work[b].id} coincide at {pa}")
            _jitter_duplicates(work, region, jitter_seed)
            order = sorted(range(len(work)),
                           key=lambda k: (work[k].position.x,
                                          work[k].position.y, work[k].id))
            break

    ordered = [work[k] for k in order]
    xs = [s.position.x for s in ordered]
    ys = [s.position.y for s in ordered]
    ws = [s.weight for s in ordered]
    ids = [s.id for s in ordered]
    n = len(ordered)

    counters = DiagCounters()
    events: list[SweepEvent] = []
    cells: dict[int, RectilinearPolygon] = {}
    closed_f = [False] * n
    active = _ActiveIndex()
    alive = 0
    skyline: Skyline | None = None

    def do_close(p: int, t: int, coord: float, forced: bool = False) -> None:
        nonlocal alive
        band = skyline.bands[ids[p]]
        recipient = ordered[t]
        if not skyline.band_adjacent(recipient.id, *band):
            # the closing site's band does not touch the vacated run; hand
            # the run to the active neighbor beside it instead
            i0, i1 = skyline.run(*band)
            k = i0 - 1 if i0 > 0 else i1 + 1
            recipient = ordered[pos_by_id[skyline.segments[k].owner]]
        cells[ids[p]] = close_site(
            skyline, ordered[p], SegLine(SegAxis.VERTICAL, coord), region,
            closing_site=recipient)
        closed_f[p] = True
        active.remove(ys[p], p)
        alive -= 1
        if not forced:
            counters.valid_neighbors += 1
        events.append(SweepEvent("close", ids[t], ids[p], coord, forced))

    def do_split(p: int, t: int, coord: float, forced: bool = False) -> bool:
        seg = skyline.segments[skyline.index_at(coord)]
        if seg.owner == ids[p]:
            donor, recip_id, recip_y = p, ids[t], ys[t]
        elif seg.owner == ids[t]:
            donor, recip_id, recip_y = t, ids[p], ys[p]
        else:
            return False
        band = skyline.bands[ids[donor]]
        # the line must fall inside the band with margin on both sides so
        # the donor keeps a slice around its own y
        if coord - band[0] <= TOL or band[1] - coord <= TOL:
            return False
        chunk = (band[0], coord) if recip_y < coord else (coord, band[1])
        if not skyline.band_adjacent(recip_id, *chunk):
            i0, i1 = skyline.run(*band)
            k = i0 - 1 if abs(chunk[0] - band[0]) <= TOL else i1 + 1
            if k < 0 or k >= len(skyline.segments):
                return False
            recip_id = skyline.segments[k].owner
            if recip_id == ids[donor]:
                return False
        skyline.assign(chunk[0], chunk[1], recip_id)
        if not forced:
            counters.valid_neighbors += 1
        events.append(SweepEvent("split", ids[t], ids[p], coord, forced))
        return True

    pos_by_id = {ids[k]: k for k in range(n)}

    for t in range(n):
        x_i, y_i, w_i = xs[t], ys[t], ws[t]
        if t == 0:
            skyline = Skyline.spanning(region, ids[0])
            active.insert(y_i, x_i, 0)
            alive = 1
            continue

        counters.pairs_checked += alive
        valid = active.valid_for(y_i, x_i)
        queue = sorted(valid)
        done: set[int] = set()
        k = 0
        while k < len(queue):
            p = queue[k]
            k += 1
            if p in done or closed_f[p]:
                continue
            done.add(p)
            dx = abs(x_i - xs[p])
            dy = abs(y_i - ys[p])
            if dx > dy + TOL:
                coord = _line_coord(xs[p], ws[p], x_i, w_i)
                do_close(p, t, coord)
                # closing unblocks pairs for sites later in sweep order
                valid = active.valid_for(y_i, x_i)
                queue = sorted(q for q in valid
                               if q > p and q not in done and not closed_f[q])
                k = 0
            else:
                coord = _line_coord(ys[p], ws[p], y_i, w_i)
                do_split(p, t, coord)

        if ids[t] not in skyline.bands:
            # no event carved a band for the new site (possible when closed
            # sites still blocked every live pair); pair it with the owner
            # of the segment under its own y
            o_id = skyline.segments[skyline.index_at(y_i)].owner
            p = pos_by_id[o_id]
            dx = abs(x_i - xs[p])
            dy = abs(y_i - ys[p])
            if dx > dy + TOL:
                do_close(p, t, _line_coord(xs[p], ws[p], x_i, w_i), forced=True)
            else:
                do_split(p, t, _line_coord(ys[p], ws[p], y_i, w_i), forced=True)
            if ids[t] not in skyline.bands:
                raise SweepError(f"site {ids[t]} acquired no skyline band")

        active.insert(y_i, x_i, t)
        alive += 1

    for owner, poly in finalize_open_sites(skyline, region).items():
        cells[owner] = poly

    result_sites = [work[k] for k in range(len(work))]
    return Diagram(cells=cells, counters=counters, sites=result_sites,
                   events=events)


# ---------------------------------------------------------------------------
# Small-instance clustering oracle
# ---------------------------------------------------------------------------

def clustering_oracle(sites: Sequence[Site], region: Rect, grid_step: float
                      ) -> tuple[dict[int, set[tuple[float, float]]],
                                 set[tuple[float, float]]]:
    """Assign grid points to sites by the pairwise growing-window principle.

    Brute-force test oracle for small instances (intended n <= 8): each
    grid cell center is clustered by first consulting the nearest
    horizontally-related valid pair's vertical line, then ranking the
    chosen site's vertically-related neighbors by weighted y distance and
    resolving with the nearest one's horizontal line, widening to the next
    pair when the ranking is inconclusive.  Returns (site id -> points,
    unresolved points); unresolved points are excluded from comparisons.
    """
    side_pairs = []    # separated by a vertical line
    stacked = {s.id: [] for s in sites}   # vertical relations per site
    sides = {s.id: [] for s in sites}
    for i, si in enumerate(sites):
        for sj in sites[i + 1:]:
            if not is_valid_neighbor(si, sj, sites):
                continue
            line = generate_weighted_line(si, sj)
            if line.axis is SegAxis.VERTICAL:
                side_pairs.append((si, sj, line))
                sides[si.id].append((sj, line))
                sides[sj.id].append((si, line))
            else:
                stacked[si.id].append((sj, line))
                stacked[sj.id].append((si, line))

    def cheb(p, s):
        return max(abs(p[0] - s.position.x), abs(p[1] - s.position.y))

    def pick(pair_line, a, b, coord, is_x):
        left = a if (a.position.x if is_x else a.position.y) <= \
            (b.position.x if is_x else b.position.y) else b
        right = b if left is a else a
        v = coord[0] if is_x else coord[1]
        return left if v <= pair_line.coordinate else right

    def resolve(p, primary_pairs, neighbors, axis_is_x):
        cands = sorted(primary_pairs,
                       key=lambda t: max(cheb(p, t[0]), cheb(p, t[1])))
        for sa, sb, line in cands:
            c = pick(line, sa, sb, p, axis_is_x)
            rel = neighbors[c.id]
            coord_p = p[1] if axis_is_x else p[0]
            dc = abs(coord_p - (c.position.y if axis_is_x else c.position.x)) \
                - c.weight
            if not rel:
                return c.id
            ranked = sorted(
                (abs(coord_p - (v.position.y if axis_is_x else v.position.x))
                 - v.weight, v.id, v, ln) for v, ln in rel)
            if dc <= ranked[0][0]:
                return c.id
            if len(ranked) == 1 or dc <= ranked[1][0]:
                v, ln = ranked[0][2], ranked[0][3]
                chosen = pick(ln, c, v, p, not axis_is_x)
                return chosen.id
        return None

    assignment: dict[int, set[tuple[float, float]]] = {s.id: set() for s in sites}
    unresolved: set[tuple[float, float]] = set()
    nx = max(1, int(round(region.width / grid_step)))
    ny = max(1, int(round(region.height / grid_step)))
    for iy in range(ny):
        py = region.y0 + (iy + 0.5) * grid_step
        for ix in range(nx):
            px = region.x0 + (ix + 0.5) * grid_step
            p = (px, py)
            if len(sites) == 1:
                assignment[sites[0].id].add(p)
                continue
            owner = None
            if side_pairs:
                owner = resolve(p, side_pairs, stacked, axis_is_x=True)
            if owner is None:
                stacked_pairs = [(si, sj, ln) for si in sites
                                 for sj, ln in stacked[si.id] if si.id < sj.id]
                if stacked_pairs:
                    owner = resolve(p, stacked_pairs, sides, axis_is_x=False)
            if owner is None:
                unresolved.add(p)
            else:
                assignment[owner].add(p)
    return assignment, unresolved
