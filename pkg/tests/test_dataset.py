"""Dataset container: loading, validation, normalization, round-trips."""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcsg import (DatasetFormatError, DatasetValidationError, MassChannelImage,
                  MsiDataset, NotFoundError, PixelGrid, generate_synthetic_dataset,
                  load_dataset, save_dataset)
from mcsg.dataset import decode_mask_rle, encode_mask_rle


def tiny_dataset_doc(second_channel_pixels=4):
    return {
        "msi_dataset_version": 1,
        "name": "tiny",
        "width": 2,
        "height": 2,
        "mask_rle": [0, 4],
        "channels": [
            {"id": "a", "mz": 100.0, "intensities": [1.0, 1.0, 1.0, 1.0]},
            {"id": "b", "mz": 200.0, "intensities": [2.0] * second_channel_pixels},
        ],
    }


def write_doc(tmp_path, doc, name="data.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestLoad:
    def test_minimal_wellformed(self, tmp_path):
        ds = load_dataset(write_doc(tmp_path, tiny_dataset_doc()))
        assert ds.n_channels == 2
        assert ds.grid.n_valid == 4
        assert ds.channel_ids == ("a", "b")

    def test_dimension_mismatch(self, tmp_path):
        path = write_doc(tmp_path, tiny_dataset_doc(second_channel_pixels=3))
        with pytest.raises(DatasetValidationError, match=r"channels\[1\].*3 intensities"):
            load_dataset(path)

    def test_synthetic_fifty_channels(self, tmp_path):
        ds, _ = generate_synthetic_dataset(n_patterns=3, channels_per_pattern=15,
                                           noise_channels=5, seed=11)
        path = tmp_path / "synth.json"
        save_dataset(ds, path)
        loaded = load_dataset(path)
        assert loaded.n_channels == 50
        mzs = [ch.mz for ch in loaded.channels]
        assert all(a < b for a, b in zip(mzs, mzs[1:]))

    def test_malformed_json_reports_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"msi_dataset_version": 1,,}')
        with pytest.raises(DatasetFormatError, match=r"line 1, column"):
            load_dataset(path)

    def test_missing_field_diagnostic(self, tmp_path):
        doc = tiny_dataset_doc()
        del doc["channels"][1]["mz"]
        with pytest.raises(DatasetFormatError, match=r"channels\[1\].mz"):
            load_dataset(write_doc(tmp_path, doc))

    def test_empty_mask_rejected(self, tmp_path):
        doc = tiny_dataset_doc()
        doc["mask_rle"] = [4]
        for ch in doc["channels"]:
            ch["intensities"] = []
        with pytest.raises(DatasetValidationError, match="no valid pixel"):
            load_dataset(write_doc(tmp_path, doc))

    def test_mz_must_ascend(self, tmp_path):
        doc = tiny_dataset_doc()
        doc["channels"][1]["mz"] = 100.0
        with pytest.raises(DatasetValidationError, match="strictly ascending"):
            load_dataset(write_doc(tmp_path, doc))

    def test_duplicate_channel_id(self, tmp_path):
        doc = tiny_dataset_doc()
        doc["channels"][1]["id"] = "a"
        with pytest.raises(DatasetValidationError, match="duplicate channel id"):
            load_dataset(write_doc(tmp_path, doc))

    def test_negative_intensity_rejected(self, tmp_path):
        doc = tiny_dataset_doc()
        doc["channels"][0]["intensities"][2] = -0.5
        with pytest.raises(DatasetValidationError, match=">= 0"):
            load_dataset(write_doc(tmp_path, doc))

    def test_missing_sidecar_file(self, tmp_path):
        doc = tiny_dataset_doc()
        doc["intensity_sidecar"] = "missing.bin"
        doc["channels"] = [{"id": "a", "mz": 100.0, "offset": 0}]
        with pytest.raises(DatasetFormatError, match="missing.bin"):
            load_dataset(write_doc(tmp_path, doc))

    def test_offset_out_of_range(self, tmp_path):
        doc = tiny_dataset_doc()
        doc["intensity_sidecar"] = "side.bin"
        doc["channels"] = [{"id": "a", "mz": 100.0, "offset": 2}]
        (tmp_path / "side.bin").write_bytes(np.arange(4, dtype="<f4").tobytes())
        with pytest.raises(DatasetFormatError, match=r"offset.*outside sidecar"):
            load_dataset(write_doc(tmp_path, doc))

    def test_optical_image_wrong_size(self, tmp_path):
        import base64
        doc = tiny_dataset_doc()
        doc["optical_images"] = [{"name": "he", "rgb_base64": base64.b64encode(b"\x00" * 5).decode()}]
        with pytest.raises(DatasetValidationError, match="5 bytes"):
            load_dataset(write_doc(tmp_path, doc))


class TestNormalization:
    def grid(self):
        return PixelGrid(width=2, height=2, mask=np.ones((2, 2), dtype=bool))

    def make(self, values, mz=100.0):
        ch = MassChannelImage(channel_id="c", mz=mz, intensities=np.array(values, dtype=float))
        return MsiDataset(grid=self.grid(), channels=[ch])

    def test_minmax_by_definition(self):
        ds = self.make([0.0, 5.0, 10.0, 10.0])
        assert ds.normalized_channel("c").tolist() == [0.0, 0.5, 1.0, 1.0]

    def test_constant_channel_maps_to_zero(self):
        ds = self.make([7.0, 7.0, 7.0, 7.0])
        assert ds.normalized_channel("c").tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_unknown_channel(self):
        with pytest.raises(NotFoundError, match="nope"):
            self.make([1, 2, 3, 4]).normalized_channel("nope")

    @given(st.lists(st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
                    min_size=4, max_size=4))
    def test_random_channel_bounds_match_direct_recomputation(self, values):
        ds = self.make(values)
        out = ds.normalized_channel("c")
        assert np.all(out >= 0.0) and np.all(out <= 1.0)
        lo, hi = min(values), max(values)
        if hi > lo:
            expected = [(v - lo) / (hi - lo) for v in values]
            assert out.tolist() == pytest.approx(expected, abs=0)
            assert out.min() == 0.0 and out.max() == 1.0

    @given(st.lists(st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
                    min_size=4, max_size=4))
    def test_rank_preservation(self, values):
        ds = self.make(values)
        out = ds.normalized_channel("c")
        raw = ds.channel("c").intensities
        if raw.max() > raw.min():
            span = raw.max() - raw.min()
            for i in range(4):
                for j in range(4):
                    if raw[i] < raw[j]:
                        # scaling never inverts an order...
                        assert out[i] <= out[j]
                    if raw[j] - raw[i] > 1e-9 * span:
                        # ...and separates every gap float division can resolve
                        assert out[i] < out[j]


class TestRoundTrip:
    def test_inline_bit_exact(self, tmp_path):
        ds, _ = generate_synthetic_dataset(n_patterns=2, channels_per_pattern=3,
                                           width=8, height=8, seed=3)
        first = tmp_path / "a.json"
        save_dataset(ds, first, sidecar=None)
        loaded = load_dataset(first)
        for ch, orig in zip(loaded.channels, ds.channels):
            assert np.array_equal(ch.intensities, orig.intensities)
        second = tmp_path / "b.json"
        save_dataset(loaded, second, sidecar=None)
        assert first.read_bytes() == second.read_bytes()

    def test_sidecar_bit_exact(self, tmp_path):
        ds, _ = generate_synthetic_dataset(n_patterns=2, channels_per_pattern=3,
                                           width=8, height=8, seed=4)
        first = tmp_path / "a.json"
        save_dataset(ds, first, sidecar="a.bin")
        loaded = load_dataset(first)
        assert loaded.sidecar_name == "a.bin"
        second_dir = tmp_path / "again"
        second_dir.mkdir()
        second = second_dir / "a.json"
        save_dataset(loaded, second)  # keeps the sidecar layout
        assert first.read_bytes() == second.read_bytes()
        assert (tmp_path / "a.bin").read_bytes() == (second_dir / "a.bin").read_bytes()

    def test_optical_images_round_trip(self, tmp_path):
        ds, _ = generate_synthetic_dataset(n_patterns=2, channels_per_pattern=2,
                                           width=8, height=8, seed=5, with_optical=True)
        path = tmp_path / "opt.json"
        save_dataset(ds, path)
        loaded = load_dataset(path)
        assert sorted(loaded.optical_images) == ["he"]
        assert np.array_equal(loaded.optical_images["he"], ds.optical_images["he"])


class TestMaskRle:
    @given(st.lists(st.booleans(), min_size=1, max_size=64))
    def test_encode_decode_round_trip(self, bits):
        arr = np.array(bits, dtype=bool)
        runs = encode_mask_rle(arr)
        assert decode_mask_rle(runs, arr.size).tolist() == bits
        # first run counts leading invalid pixels
        assert (runs[0] == 0) == bool(bits[0])

    def test_partial_mask_load(self, tmp_path):
        doc = tiny_dataset_doc()
        doc["mask_rle"] = [1, 2, 1]  # pixels 1 and 2 valid
        for ch in doc["channels"]:
            ch["intensities"] = ch["intensities"][:2]
        ds = load_dataset(write_doc(tmp_path, doc))
        assert ds.grid.n_valid == 2
        assert ds.grid.masked_indices.tolist() == [1, 2]

    def test_rle_length_mismatch(self, tmp_path):
        doc = tiny_dataset_doc()
        doc["mask_rle"] = [0, 3]
        with pytest.raises(DatasetFormatError, match="cover 3 pixels"):
            load_dataset(write_doc(tmp_path, doc))
