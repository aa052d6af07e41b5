"""Synthetic MSI datasets with planted co-localization structure.

Each planted pattern is an axis-aligned rectangular support on the grid;
every channel of a pattern is that indicator image scaled by a per-channel
amplitude plus half-normal noise. Half-normal noise keeps intensities
non-negative without clipping and keeps pattern-free channels well below
mid-range normalized intensities, so region queries separate cleanly.

Channel ids encode the ground truth (``p0c03`` = pattern 0, channel 3;
``nz02`` = pattern-free noise channel), which is what the recovery and
region-query tests key on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import MassChannelImage, MsiDataset, PixelGrid


@dataclass(frozen=True)
class PlantedPattern:
    """Ground truth for one planted pattern: its support and its channels."""

    index: int
    rect: tuple[int, int, int, int]  # x0, y0, x1, y1 (exclusive)
    channel_ids: tuple[str, ...]

    def polygon(self) -> list[tuple[float, float]]:
        """Rectangle outline in pixel coordinates, usable as a lasso polygon."""
        x0, y0, x1, y1 = self.rect
        return [(float(x0), float(y0)), (float(x1), float(y0)),
                (float(x1), float(y1)), (float(x0), float(y1))]


@dataclass(frozen=True)
class SyntheticTruth:
    patterns: tuple[PlantedPattern, ...]
    noise_channel_ids: tuple[str, ...]

    def labels(self) -> dict[str, int]:
        """channel id -> pattern index, for partition-recovery scoring."""
        return {cid: p.index for p in self.patterns for cid in p.channel_ids}


def _pattern_rects(n_patterns: int, width: int, height: int) -> list[tuple[int, int, int, int]]:
    """Disjoint rectangles, one per pattern, laid out on a near-square tiling."""
    cols = int(np.ceil(np.sqrt(n_patterns)))
    rows = int(np.ceil(n_patterns / cols))
    cell_w, cell_h = width // cols, height // rows
    if cell_w < 3 or cell_h < 3:
        raise ValueError(f"grid {width}x{height} too small for {n_patterns} patterns")
    rects = []
    for k in range(n_patterns):
        r, c = divmod(k, cols)
        margin_x = max(1, cell_w // 6)
        margin_y = max(1, cell_h // 6)
        x0, y0 = c * cell_w + margin_x, r * cell_h + margin_y
        x1, y1 = (c + 1) * cell_w - margin_x, (r + 1) * cell_h - margin_y
        rects.append((x0, y0, x1, y1))
    return rects


def generate_synthetic_dataset(
    n_patterns: int = 3,
    channels_per_pattern: int = 15,
    noise_channels: int = 0,
    width: int = 32,
    height: int = 32,
    noise_sigma: float = 0.05,
    seed: int = 7,
    name: str | None = None,
    with_optical: bool = True,
) -> tuple[MsiDataset, SyntheticTruth]:
    """Build a dataset of planted spatial patterns plus optional noise channels.

    noise_sigma is the half-normal scale relative to the pattern amplitude;
    0.05 is a low-noise regime where community recovery should be exact.
    """
    rng = np.random.default_rng(seed)
    grid = PixelGrid(width=width, height=height, mask=np.ones((height, width), dtype=bool))
    rects = _pattern_rects(n_patterns, width, height)

    xs, ys = np.meshgrid(np.arange(width), np.arange(height))
    supports = []
    for (x0, y0, x1, y1) in rects:
        inside = (xs >= x0) & (xs < x1) & (ys >= y0) & (ys < y1)
        supports.append(inside.reshape(-1)[grid.masked_indices].astype(np.float64))

    channels: list[MassChannelImage] = []
    patterns: list[PlantedPattern] = []
    mz = 400.0
    for k, support in enumerate(supports):
        ids = []
        for j in range(channels_per_pattern):
            amplitude = float(rng.uniform(80.0, 120.0))
            noise = np.abs(rng.normal(0.0, noise_sigma * amplitude, size=grid.n_valid))
            values = amplitude * support + noise
            cid = f"p{k}c{j:02d}"
            channels.append(MassChannelImage(channel_id=cid, mz=mz, intensities=values))
            ids.append(cid)
            mz += 5.0
        patterns.append(PlantedPattern(index=k, rect=rects[k], channel_ids=tuple(ids)))

    noise_ids = []
    for j in range(noise_channels):
        amplitude = float(rng.uniform(80.0, 120.0))
        values = np.abs(rng.normal(0.0, noise_sigma * amplitude, size=grid.n_valid))
        cid = f"nz{j:02d}"
        channels.append(MassChannelImage(channel_id=cid, mz=mz, intensities=values))
        noise_ids.append(cid)
        mz += 5.0

    optical = {}
    if with_optical:
        # HE-like false color: pale background, one tint per pattern support.
        tints = [(186, 120, 170), (120, 150, 200), (150, 190, 130),
                 (210, 170, 110), (170, 130, 130)]
        raster = np.full((height, width, 3), 235, dtype=np.uint8)
        for k, (x0, y0, x1, y1) in enumerate(rects):
            raster[y0:y1, x0:x1] = tints[k % len(tints)]
        optical["he"] = raster

    if name is None:
        name = f"synthetic-{n_patterns}x{channels_per_pattern}+{noise_channels}"
    ds = MsiDataset(grid=grid, channels=channels, optical_images=optical, name=name)
    return ds, SyntheticTruth(patterns=tuple(patterns), noise_channel_ids=tuple(noise_ids))
