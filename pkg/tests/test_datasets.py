import json

import numpy as np
import pytest
from PIL import Image

from rvseg.datasets import (
    GroundTruthSequence,
    load_annotation_dir,
    load_annotation_labels,
    load_davis_layout,
    load_manifest,
    with_object,
)
from rvseg.errors import DatasetError


def write_palette_png(path, labels):
    img = Image.fromarray(labels.astype(np.uint8), mode="P")
    img.putpalette([0, 0, 0, 128, 0, 0, 0, 128, 0] + [0] * 759)
    img.save(path)


def write_frame_jpg(path, width=6, height=4):
    Image.fromarray(np.zeros((height, width, 3), dtype=np.uint8), mode="RGB").save(path)


class TestAnnotationLoading:
    def test_palette_png_roundtrip(self, tmp_path):
        labels = np.array([[0, 1, 2], [2, 1, 0]])
        path = tmp_path / "a.png"
        write_palette_png(path, labels)
        assert np.array_equal(load_annotation_labels(path), labels)

    def test_binary_png_normalized_to_single_id(self, tmp_path):
        arr = np.array([[0, 255], [255, 0]], dtype=np.uint8)
        path = tmp_path / "b.png"
        Image.fromarray(arr, mode="L").save(path)
        assert np.array_equal(load_annotation_labels(path), np.array([[0, 1], [1, 0]]))

    def test_palette_split_by_object_id(self, tmp_path):
        labels = np.array([[0, 1, 2], [2, 2, 0]])
        path = tmp_path / "c.png"
        write_palette_png(path, labels)
        gt = GroundTruthSequence(labels=(load_annotation_labels(path),), object_id=2)
        mask = gt.binary_masks()[0]
        assert np.array_equal(mask.bits, labels == 2)
        assert gt.object_ids() == {1, 2}
        gt1 = with_object(gt, 1)
        assert np.array_equal(gt1.binary_masks()[0].bits, labels == 1)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DatasetError):
            load_annotation_dir(tmp_path / "nope")


class TestManifest:
    def test_two_entries(self, tmp_path):
        lines = [
            json.dumps({"video_dir": "vids/a", "query": "q1", "gt_dir": "gt/a"}),
            json.dumps({"video_dir": "vids/b", "query": "q2", "gt_dir": "gt/b",
                        "object_id": 2, "name": "b-role"}),
        ]
        path = tmp_path / "jobs.jsonl"
        path.write_text("\n".join(lines), encoding="utf-8")
        jobs = load_manifest(path)
        assert len(jobs) == 2
        assert jobs[0].name == "a" and jobs[0].object_id == 1
        assert jobs[1].name == "b-role" and jobs[1].object_id == 2
        assert jobs[1].gt_dir.endswith("gt/b")

    def test_malformed_entry(self, tmp_path):
        path = tmp_path / "jobs.jsonl"
        path.write_text('{"video_dir": "x"}\n', encoding="utf-8")
        with pytest.raises(DatasetError, match="jobs.jsonl:1"):
            load_manifest(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetError):
            load_manifest(tmp_path / "none.jsonl")


def make_davis_tree(root, sequences=("seq_a",), frames=2, drop_annotation=False):
    for seq in sequences:
        img_dir = root / "JPEGImages" / seq
        ann_dir = root / "Annotations" / seq
        img_dir.mkdir(parents=True)
        ann_dir.mkdir(parents=True)
        for i in range(frames):
            write_frame_jpg(img_dir / f"{i:05d}.jpg")
            if not (drop_annotation and i == frames - 1):
                write_palette_png(ann_dir / f"{i:05d}.png", np.array([[0, 1], [1, 0]]))


class TestDavisLayout:
    def test_minimal_tree(self, tmp_path):
        make_davis_tree(tmp_path, frames=2)
        sequences = load_davis_layout(tmp_path)
        assert len(sequences) == 1
        seq = sequences[0]
        assert seq.name == "seq_a"
        assert len(seq.clip) == 2
        assert len(seq.annotations) == 2

    def test_missing_annotation_listed_as_gap(self, tmp_path):
        make_davis_tree(tmp_path, frames=2, drop_annotation=True)
        with pytest.raises(DatasetError) as exc_info:
            load_davis_layout(tmp_path)
        assert any("00001" in gap for gap in exc_info.value.gaps)

    def test_not_a_davis_tree(self, tmp_path):
        with pytest.raises(DatasetError, match="DAVIS-style"):
            load_davis_layout(tmp_path)
