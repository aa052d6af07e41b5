"""Image-guided exploration: lasso polygons to matching channel nodes.

A pixel belongs to the region when its center (col + 0.5, row + 0.5) is
inside the polygon under the even-odd rule; the region is then intersected
with the dataset mask. A channel matches when at least ceil(sigma * region
size) of the region's pixels reach normalized intensity mu. Both thresholds
are fractions in [0, 1] and raising either one can only shrink the match set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import MsiDataset, PixelGrid
from .errors import EmptyRegionError, PolygonError

Point = tuple[float, float]


def clean_polygon(vertices: list[Point] | tuple[Point, ...]) -> list[Point]:
    """Drop repeated points and an explicit closing vertex; require simplicity.

    Raises PolygonError when fewer than 3 distinct vertices remain or when two
    non-adjacent edges intersect.
    """
    points = [(float(x), float(y)) for x, y in vertices]
    cleaned: list[Point] = []
    for p in points:
        if not cleaned or p != cleaned[-1]:
            cleaned.append(p)
    if len(cleaned) > 1 and cleaned[0] == cleaned[-1]:
        cleaned.pop()
    if len(cleaned) < 3:
        raise PolygonError(f"polygon needs at least 3 distinct vertices, got {len(cleaned)}")

    n = len(cleaned)
    for i in range(n):
        a1, a2 = cleaned[i], cleaned[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share a vertex
            b1, b2 = cleaned[j], cleaned[(j + 1) % n]
            if _segments_cross(a1, a2, b1, b2):
                raise PolygonError(f"polygon self-intersects between edges {i} and {j}")
    return cleaned


def _orient(p: Point, q: Point, r: Point) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _on_segment(p: Point, q: Point, r: Point) -> bool:
    return (min(p[0], r[0]) <= q[0] <= max(p[0], r[0])
            and min(p[1], r[1]) <= q[1] <= max(p[1], r[1]))


def _segments_cross(a1: Point, a2: Point, b1: Point, b2: Point) -> bool:
    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    for (p, q, r) in ((b1, a1, b2), (b1, a2, b2), (a1, b1, a2), (a1, b2, a2)):
        if _orient(p, q, r) == 0 and _on_segment(p, q, r):
            return True
    return False


def rasterize_polygon(polygon: list[Point] | tuple[Point, ...], grid: PixelGrid) -> np.ndarray:
    """Flat row-major indices of the masked pixels inside the polygon.

    Scanline even-odd fill against pixel centers; a horizontal line at a
    row center collects the x-crossings of all non-horizontal edges (lower
    endpoint inclusive, upper exclusive) and fills between alternating pairs.
    """
    cleaned = clean_polygon(polygon)
    n = len(cleaned)
    selected: list[np.ndarray] = []
    ys = np.array([p[1] for p in cleaned])
    row_lo = max(0, int(math.floor(ys.min() - 0.5)))
    row_hi = min(grid.height - 1, int(math.ceil(ys.max())))
    for row in range(row_lo, row_hi + 1):
        scan_y = row + 0.5
        crossings: list[float] = []
        for i in range(n):
            (x1, y1), (x2, y2) = cleaned[i], cleaned[(i + 1) % n]
            if (y1 > scan_y) == (y2 > scan_y):
                continue  # horizontal edges and non-straddling edges never cross
            crossings.append(x1 + (scan_y - y1) * (x2 - x1) / (y2 - y1))
        if not crossings:
            continue
        crossings.sort()
        centers = np.arange(grid.width) + 0.5
        inside = np.zeros(grid.width, dtype=bool)
        # Left-closed spans match a rightward ray cast counting strictly
        # greater crossings, the same rule a per-pixel test applies.
        for k in range(0, len(crossings) - 1, 2):
            inside |= (centers >= crossings[k]) & (centers < crossings[k + 1])
        cols = np.flatnonzero(inside)
        if cols.size:
            selected.append(row * grid.width + cols)

    if selected:
        flat = np.concatenate(selected)
        flat = flat[grid.mask.reshape(-1)[flat]]
    else:
        flat = np.empty(0, dtype=np.int64)
    if flat.size == 0:
        raise EmptyRegionError("polygon covers no masked pixel")
    flat.setflags(write=False)
    return flat


def required_pixel_count(sigma: float, region_size: int) -> int:
    """ceil(sigma * size) with a tolerance so 0.6 * 5 asks for 3, not 4."""
    exact = sigma * region_size
    nearest = round(exact)
    if abs(exact - nearest) < 1e-9:
        return int(nearest)
    return int(math.ceil(exact))


def match_nodes(ds: MsiDataset, region: np.ndarray, mu: float, sigma: float) -> frozenset[str]:
    """Channels with >= sigma-fraction of region pixels at normalized intensity >= mu."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must be in [0, 1], got {mu}")
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must be in [0, 1], got {sigma}")
    region = np.asarray(region, dtype=np.int64)
    if region.size == 0:
        raise EmptyRegionError("region is empty")
    masked_positions = ds.grid.flat_to_masked[region]
    if np.any(masked_positions < 0):
        bad = int(region[int(np.argmin(masked_positions))])
        raise ValueError(f"region pixel {bad} lies outside the mask")
    needed = required_pixel_count(sigma, region.size)
    matched = []
    for cid in ds.channel_ids:
        values = ds.normalized_channel(cid)[masked_positions]
        if int(np.count_nonzero(values >= mu)) >= needed:
            matched.append(cid)
    return frozenset(matched)


@dataclass(frozen=True)
class RoiSelection:
    """A lasso query and its result: polygon, thresholds, matched channels."""

    polygon: tuple[Point, ...]
    mu: float
    sigma: float
    region: np.ndarray  # flat row-major pixel indices, masked only
    matched_nodes: frozenset[str]


def select_roi(ds: MsiDataset, polygon: list[Point] | tuple[Point, ...],
               mu: float, sigma: float) -> RoiSelection:
    """Rasterize a lasso polygon on the dataset grid and match channels."""
    cleaned = clean_polygon(polygon)
    region = rasterize_polygon(cleaned, ds.grid)
    matched = match_nodes(ds, region, mu, sigma)
    return RoiSelection(polygon=tuple(cleaned), mu=mu, sigma=sigma,
                        region=region, matched_nodes=matched)
