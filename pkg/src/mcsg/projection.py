"""False-color overview image: first three principal components as RGB.

Observations are the masked pixels, features the channels. The leading three
components map to R, G, B in order of explained variance, each min-max scaled
to [0, 1]. Signs follow a fixed convention (the largest-magnitude loading of
each component is positive), so the output is reproducible and invariant to
channel order. Components with (numerically) zero variance render as black.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import MsiDataset
from .errors import InsufficientDataError

_ZERO_VARIANCE = 1e-12


@dataclass(frozen=True)
class RgbProjection:
    rgb: np.ndarray  # (n_valid, 3) float64 in [0, 1], one row per masked pixel
    method: str
    component_variances: tuple[float, float, float]  # non-increasing
    loadings: np.ndarray  # (n_channels, 3), sign-fixed eigenvectors

    def full_image(self, ds: MsiDataset) -> np.ndarray:
        """Scatter onto the (height, width, 3) grid, black outside the mask."""
        out = np.zeros((ds.grid.n_pixels, 3), dtype=np.float64)
        out[ds.grid.masked_indices] = self.rgb
        return out.reshape(ds.grid.height, ds.grid.width, 3)


def compute_projection(ds: MsiDataset) -> RgbProjection:
    """PCA of the pixel-by-channel matrix, three components, RGB-mapped."""
    if ds.n_channels < 3:
        raise InsufficientDataError(
            f"projection needs at least 3 channels, dataset has {ds.n_channels}")
    x = np.stack([ch.intensities for ch in ds.channels], axis=1)  # (n_valid, n_channels)
    centered = x - x.mean(axis=0, keepdims=True)
    n = x.shape[0]
    cov = centered.T @ centered / max(n - 1, 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:3]
    variances = np.maximum(eigenvalues[order], 0.0)
    loadings = eigenvectors[:, order]
    for k in range(3):
        pivot = int(np.argmax(np.abs(loadings[:, k])))
        if loadings[pivot, k] < 0:
            loadings[:, k] = -loadings[:, k]

    scores = centered @ loadings  # (n_valid, 3)
    rgb = np.zeros_like(scores)
    for k in range(3):
        if variances[k] <= _ZERO_VARIANCE:
            continue
        lo, hi = scores[:, k].min(), scores[:, k].max()
        if hi > lo:
            rgb[:, k] = (scores[:, k] - lo) / (hi - lo)
    rgb.setflags(write=False)
    loadings.setflags(write=False)
    return RgbProjection(rgb=rgb, method="pca",
                         component_variances=tuple(float(v) for v in variances),
                         loadings=loadings)
