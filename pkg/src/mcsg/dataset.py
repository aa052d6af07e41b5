"""Immutable MSI dataset: mass-channel images over a masked pixel grid.

The on-disk container is a single self-describing JSON file. Small datasets
inline their intensities; large ones point into a flat binary sidecar of
little-endian float32 values (channel-major, row-major within a channel,
masked pixels only). The pixel mask is run-length encoded: alternating run
lengths over the row-major scan, starting with the number of leading invalid
pixels (which may be 0).

All arrays handed out by this module are read-only; downstream modules treat
a loaded dataset as immutable and share it freely across threads.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetFormatError, DatasetValidationError, NotFoundError

DATASET_VERSION = 1


def encode_mask_rle(mask_flat: np.ndarray) -> list[int]:
    """Run-length encode a flat boolean mask, first run counting False pixels."""
    runs: list[int] = []
    current = False
    count = 0
    for value in mask_flat:
        if bool(value) == current:
            count += 1
        else:
            runs.append(count)
            current = bool(value)
            count = 1
    runs.append(count)
    return runs


def decode_mask_rle(runs: list[int], n_pixels: int) -> np.ndarray:
    """Decode alternating run lengths (starting with False) into a flat bool array."""
    out = np.zeros(n_pixels, dtype=bool)
    pos = 0
    current = False
    for i, run in enumerate(runs):
        if not isinstance(run, int) or run < 0:
            raise DatasetFormatError(f"mask_rle[{i}]: run lengths must be non-negative integers, got {run!r}")
        if current:
            out[pos:pos + run] = True
        pos += run
        current = not current
    if pos != n_pixels:
        raise DatasetFormatError(f"mask_rle: runs cover {pos} pixels, grid has {n_pixels}")
    return out


@dataclass(frozen=True)
class PixelGrid:
    """Pixel domain of all images in a dataset: dimensions plus validity mask."""

    width: int
    height: int
    mask: np.ndarray  # bool, shape (height, width); True = tissue/valid

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DatasetValidationError(f"grid dimensions must be positive, got {self.width}x{self.height}")
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != (self.height, self.width):
            raise DatasetValidationError(
                f"mask shape {mask.shape} does not match grid {self.height}x{self.width}")
        if not mask.any():
            raise DatasetValidationError("mask has no valid pixel")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        flat = mask.reshape(-1)
        masked_idx = np.flatnonzero(flat)
        flat_to_masked = np.full(flat.size, -1, dtype=np.int64)
        flat_to_masked[masked_idx] = np.arange(masked_idx.size)
        masked_idx.setflags(write=False)
        flat_to_masked.setflags(write=False)
        object.__setattr__(self, "_masked_indices", masked_idx)
        object.__setattr__(self, "_flat_to_masked", flat_to_masked)

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    @property
    def n_valid(self) -> int:
        return int(self._masked_indices.size)

    @property
    def masked_indices(self) -> np.ndarray:
        """Flat row-major indices of the valid pixels, ascending."""
        return self._masked_indices

    @property
    def flat_to_masked(self) -> np.ndarray:
        """Maps a flat pixel index to its position among masked pixels (-1 outside mask)."""
        return self._flat_to_masked


@dataclass(frozen=True)
class MassChannelImage:
    """One mass channel: intensities over the masked pixels, in mask scan order."""

    channel_id: str
    mz: float
    intensities: np.ndarray  # float, shape (n_valid,)

    def __post_init__(self):
        if not isinstance(self.channel_id, str) or not self.channel_id:
            raise DatasetValidationError(f"channel id must be a nonempty string, got {self.channel_id!r}")
        if not (isinstance(self.mz, (int, float)) and math.isfinite(self.mz) and self.mz > 0):
            raise DatasetValidationError(f"channel {self.channel_id!r}: mz must be a positive finite real, got {self.mz!r}")
        values = np.asarray(self.intensities, dtype=np.float64)
        if values.ndim != 1:
            raise DatasetValidationError(f"channel {self.channel_id!r}: intensities must be a flat array")
        if not np.all(np.isfinite(values)):
            raise DatasetValidationError(f"channel {self.channel_id!r}: intensities contain non-finite values")
        if np.any(values < 0):
            raise DatasetValidationError(f"channel {self.channel_id!r}: intensities must be >= 0")
        values.setflags(write=False)
        object.__setattr__(self, "intensities", values)
        object.__setattr__(self, "mz", float(self.mz))


class MsiDataset:
    """Immutable stack of mass-channel images plus optional aligned RGB rasters.

    Channels are ordered by strictly ascending mz. Per-channel min/max are
    cached at construction; normalized images are computed lazily and cached.
    """

    def __init__(
        self,
        grid: PixelGrid,
        channels: list[MassChannelImage],
        optical_images: dict[str, np.ndarray] | None = None,
        name: str = "dataset",
        sidecar_name: str | None = None,
    ):
        self.grid = grid
        self.name = name
        self.sidecar_name = sidecar_name

        seen: set[str] = set()
        previous_mz = -math.inf
        for i, ch in enumerate(channels):
            if ch.intensities.size != grid.n_valid:
                raise DatasetValidationError(
                    f"channels[{i}] ({ch.channel_id!r}): {ch.intensities.size} intensities "
                    f"for {grid.n_valid} masked pixels")
            if ch.channel_id in seen:
                raise DatasetValidationError(f"channels[{i}]: duplicate channel id {ch.channel_id!r}")
            seen.add(ch.channel_id)
            if ch.mz <= previous_mz:
                raise DatasetValidationError(
                    f"channels[{i}] ({ch.channel_id!r}): mz {ch.mz} not strictly ascending")
            previous_mz = ch.mz
        self.channels: tuple[MassChannelImage, ...] = tuple(channels)
        self._by_id = {ch.channel_id: ch for ch in self.channels}

        optical: dict[str, np.ndarray] = {}
        for opt_name, raster in (optical_images or {}).items():
            arr = np.asarray(raster, dtype=np.uint8)
            if arr.shape != (grid.height, grid.width, 3):
                raise DatasetValidationError(
                    f"optical image {opt_name!r}: shape {arr.shape} does not match "
                    f"grid ({grid.height}, {grid.width}, 3)")
            arr.setflags(write=False)
            optical[opt_name] = arr
        self.optical_images = optical

        self._minima = {ch.channel_id: float(ch.intensities.min()) for ch in self.channels}
        self._maxima = {ch.channel_id: float(ch.intensities.max()) for ch in self.channels}
        self._normalized_cache: dict[str, np.ndarray] = {}

    @property
    def channel_ids(self) -> tuple[str, ...]:
        return tuple(ch.channel_id for ch in self.channels)

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    def channel(self, channel_id: str) -> MassChannelImage:
        try:
            return self._by_id[channel_id]
        except KeyError:
            raise NotFoundError(f"unknown channel id {channel_id!r}") from None

    def channel_range(self, channel_id: str) -> tuple[float, float]:
        self.channel(channel_id)
        return self._minima[channel_id], self._maxima[channel_id]

    def normalized_channel(self, channel_id: str) -> np.ndarray:
        """Per-channel min-max scaled intensities in [0, 1] over masked pixels.

        Constant channels map to all zeros: they carry no localization signal,
        so they stay below any positive intensity threshold.
        """
        cached = self._normalized_cache.get(channel_id)
        if cached is not None:
            return cached
        ch = self.channel(channel_id)
        lo, hi = self._minima[channel_id], self._maxima[channel_id]
        if hi > lo:
            out = (ch.intensities - lo) / (hi - lo)
        else:
            out = np.zeros_like(ch.intensities)
        out.setflags(write=False)
        self._normalized_cache[channel_id] = out
        return out

    def full_image(self, channel_id: str, normalized: bool = True, fill: float = 0.0) -> np.ndarray:
        """Scatter a channel back onto the (height, width) grid; `fill` outside mask."""
        values = self.normalized_channel(channel_id) if normalized else self.channel(channel_id).intensities
        flat = np.full(self.grid.n_pixels, fill, dtype=np.float64)
        flat[self.grid.masked_indices] = values
        return flat.reshape(self.grid.height, self.grid.width)


def normalized_channel(ds: MsiDataset, channel_id: str) -> np.ndarray:
    """Module-level alias for :meth:`MsiDataset.normalized_channel`."""
    return ds.normalized_channel(channel_id)


def _require(doc: dict, key: str, kind: type, where: str = ""):
    prefix = f"{where}." if where else ""
    if key not in doc:
        raise DatasetFormatError(f"{prefix}{key}: missing required field")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise DatasetFormatError(f"{prefix}{key}: expected a number, got {type(value).__name__}")
        return float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise DatasetFormatError(f"{prefix}{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def load_dataset(path: str | Path) -> MsiDataset:
    """Load and validate a dataset container from disk.

    Raises DatasetFormatError for malformed files (with field diagnostics) and
    DatasetValidationError for well-formed files violating dataset invariants.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetFormatError(f"dataset file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"{path.name}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise DatasetFormatError(f"{path.name}: top level must be a JSON object")

    version = _require(doc, "msi_dataset_version", int)
    if version != DATASET_VERSION:
        raise DatasetFormatError(f"msi_dataset_version: unsupported version {version} (expected {DATASET_VERSION})")
    width = _require(doc, "width", int)
    height = _require(doc, "height", int)
    name = _require(doc, "name", str)
    rle = _require(doc, "mask_rle", list)
    if width < 1 or height < 1:
        raise DatasetValidationError(f"grid dimensions must be positive, got {width}x{height}")
    mask_flat = decode_mask_rle(rle, width * height)
    grid = PixelGrid(width=width, height=height, mask=mask_flat.reshape(height, width))

    sidecar_values: np.ndarray | None = None
    sidecar_name = doc.get("intensity_sidecar")
    if sidecar_name is not None:
        if not isinstance(sidecar_name, str):
            raise DatasetFormatError("intensity_sidecar: expected a file name string")
        sidecar_path = path.parent / sidecar_name
        if not sidecar_path.exists():
            raise DatasetFormatError(f"intensity_sidecar: file not found: {sidecar_path}")
        sidecar_values = np.fromfile(sidecar_path, dtype="<f4")

    channels: list[MassChannelImage] = []
    raw_channels = _require(doc, "channels", list)
    for i, entry in enumerate(raw_channels):
        where = f"channels[{i}]"
        if not isinstance(entry, dict):
            raise DatasetFormatError(f"{where}: expected an object")
        channel_id = _require(entry, "id", str, where)
        mz = _require(entry, "mz", float, where)
        if "intensities" in entry and "offset" in entry:
            raise DatasetFormatError(f"{where}: has both inline intensities and a sidecar offset")
        if "intensities" in entry:
            values = entry["intensities"]
            if not isinstance(values, list):
                raise DatasetFormatError(f"{where}.intensities: expected an array")
            arr = np.asarray(values, dtype=np.float64)
        elif "offset" in entry:
            if sidecar_values is None:
                raise DatasetFormatError(f"{where}.offset: dataset declares no intensity_sidecar")
            offset = _require(entry, "offset", int, where)
            end = offset + grid.n_valid
            if offset < 0 or end > sidecar_values.size:
                raise DatasetFormatError(
                    f"{where}.offset: range [{offset}, {end}) outside sidecar of {sidecar_values.size} values")
            arr = sidecar_values[offset:end].astype(np.float64)
        else:
            raise DatasetFormatError(f"{where}: needs either inline intensities or a sidecar offset")
        if arr.size != grid.n_valid:
            raise DatasetValidationError(
                f"{where} ({channel_id!r}): {arr.size} intensities for {grid.n_valid} masked pixels")
        channels.append(MassChannelImage(channel_id=channel_id, mz=mz, intensities=arr))

    optical: dict[str, np.ndarray] = {}
    for i, entry in enumerate(doc.get("optical_images", [])):
        where = f"optical_images[{i}]"
        if not isinstance(entry, dict):
            raise DatasetFormatError(f"{where}: expected an object")
        opt_name = _require(entry, "name", str, where)
        encoded = _require(entry, "rgb_base64", str, where)
        try:
            raw = base64.b64decode(encoded, validate=True)
        except Exception as exc:
            raise DatasetFormatError(f"{where}.rgb_base64: invalid base64 payload") from exc
        expected = grid.height * grid.width * 3
        if len(raw) != expected:
            raise DatasetValidationError(
                f"{where} ({opt_name!r}): {len(raw)} bytes for an RGB raster of {expected}")
        optical[opt_name] = np.frombuffer(raw, dtype=np.uint8).reshape(grid.height, grid.width, 3)

    return MsiDataset(grid=grid, channels=channels, optical_images=optical, name=name,
                      sidecar_name=sidecar_name)


def save_dataset(ds: MsiDataset, path: str | Path, sidecar: str | None | bool = True) -> None:
    """Write a dataset back to the container format.

    sidecar=True keeps the layout the dataset was loaded with; a string forces
    that sidecar file name; None forces inline intensities. Sidecar values are
    written as little-endian float32 (the declared sidecar precision), inline
    values as full-precision decimals.
    """
    path = Path(path)
    if sidecar is True:
        sidecar_name = ds.sidecar_name
    elif sidecar is False:
        sidecar_name = None
    else:
        sidecar_name = sidecar

    doc: dict = {
        "msi_dataset_version": DATASET_VERSION,
        "name": ds.name,
        "width": ds.grid.width,
        "height": ds.grid.height,
        "mask_rle": encode_mask_rle(ds.grid.mask.reshape(-1)),
    }
    if sidecar_name is None:
        doc["channels"] = [
            {"id": ch.channel_id, "mz": ch.mz, "intensities": ch.intensities.tolist()}
            for ch in ds.channels
        ]
    else:
        doc["intensity_sidecar"] = sidecar_name
        doc["channels"] = [
            {"id": ch.channel_id, "mz": ch.mz, "offset": i * ds.grid.n_valid}
            for i, ch in enumerate(ds.channels)
        ]
        stacked = np.concatenate([ch.intensities for ch in ds.channels]) if ds.channels else np.empty(0)
        stacked.astype("<f4").tofile(path.parent / sidecar_name)
    if ds.optical_images:
        doc["optical_images"] = [
            {"name": opt_name, "rgb_base64": base64.b64encode(raster.tobytes()).decode("ascii")}
            for opt_name, raster in sorted(ds.optical_images.items())
        ]
    path.write_text(json.dumps(doc, indent=2) + "\n")
