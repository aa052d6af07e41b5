"""Raster rendering of channel images, aggregates, projections, and opticals.

Single channels and mean images map normalized intensities through a lookup
table (default: the frozen monotone-luminance table in _colormaps, plus a
plain gray ramp). Output is RGBA PNG with alpha 255 inside the mask and 0
outside, so the UI can overlay images on any background.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

from ._colormaps import VIRIDIS_256
from .dataset import MsiDataset
from .errors import NotFoundError
from .projection import RgbProjection

COLORMAPS: dict[str, np.ndarray] = {
    "viridis": np.array(VIRIDIS_256, dtype=np.uint8),
    "gray": np.stack([np.arange(256)] * 3, axis=1).astype(np.uint8),
}


def _lookup(name: str) -> np.ndarray:
    try:
        return COLORMAPS[name]
    except KeyError:
        raise NotFoundError(f"unknown colormap {name!r}; expected one of {sorted(COLORMAPS)}") from None


def _encode_png(rgba: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(rgba, mode="RGBA").save(buffer, format="PNG")
    return buffer.getvalue()


def _colorize(ds: MsiDataset, values01: np.ndarray, colormap: str) -> bytes:
    """Map masked-pixel values in [0, 1] through a colormap into an RGBA PNG."""
    table = _lookup(colormap)
    indices = np.clip(np.round(values01 * 255.0), 0, 255).astype(np.uint8)
    grid = ds.grid
    rgba = np.zeros((grid.n_pixels, 4), dtype=np.uint8)
    rgba[grid.masked_indices, :3] = table[indices]
    rgba[grid.masked_indices, 3] = 255
    return _encode_png(rgba.reshape(grid.height, grid.width, 4))


def render_channel_png(ds: MsiDataset, channel_id: str, colormap: str = "viridis") -> bytes:
    """Normalized channel image through the colormap."""
    return _colorize(ds, ds.normalized_channel(channel_id), colormap)


def aggregate_image(ds: MsiDataset, channel_ids: list[str] | tuple[str, ...]) -> np.ndarray:
    """Pixelwise mean of the normalized channels (an image stack overview)."""
    if not channel_ids:
        raise ValueError("aggregate needs at least one channel")
    stack = np.stack([ds.normalized_channel(cid) for cid in channel_ids])
    return stack.mean(axis=0)


def render_aggregate_png(ds: MsiDataset, channel_ids: list[str] | tuple[str, ...],
                         colormap: str = "viridis") -> bytes:
    return _colorize(ds, aggregate_image(ds, channel_ids), colormap)


def render_projection_png(ds: MsiDataset, projection: RgbProjection) -> bytes:
    grid = ds.grid
    rgba = np.zeros((grid.n_pixels, 4), dtype=np.uint8)
    rgba[grid.masked_indices, :3] = np.clip(np.round(projection.rgb * 255.0), 0, 255).astype(np.uint8)
    rgba[grid.masked_indices, 3] = 255
    return _encode_png(rgba.reshape(grid.height, grid.width, 4))


def render_optical_png(ds: MsiDataset, name: str) -> bytes:
    raster = ds.optical_images.get(name)
    if raster is None:
        raise NotFoundError(f"unknown optical image {name!r}; "
                            f"dataset has {sorted(ds.optical_images)}")
    rgba = np.concatenate([raster, np.full((*raster.shape[:2], 1), 255, dtype=np.uint8)], axis=2)
    return _encode_png(rgba)
