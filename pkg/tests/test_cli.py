import json

import numpy as np
import pytest
from PIL import Image

from parallaxfx import io
from parallaxfx.cli import main
from parallaxfx.imagecore import alpha_composite
from parallaxfx.layering import InstanceSet, PipelineConfig, assign_layers, filter_small, make_instance
from parallaxfx.synth import DISK_DEPTH, SQUARE_DEPTH, make_scene


def frames_in(d):
    return sorted(p.name for p in d.glob("frame_*.png"))


def test_synth_outputs_are_stable(tmp_path):
    assert main(["synth", "--out", str(tmp_path / "a")]) == 0
    assert main(["synth", "--out", str(tmp_path / "b")]) == 0
    for name in ("image.png", "depth.pfm", "labels.png"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_synth_scene_straddles_rules(synth_scene):
    labels = synth_scene.labels
    instances = InstanceSet(make_instance(k, labels == k) for k in (1, 2, 3))
    _, demoted = filter_small(instances)
    assert [i.id for i in demoted] == [3]
    assert (DISK_DEPTH - SQUARE_DEPTH) / DISK_DEPTH == pytest.approx(1 / 3)
    assert assign_layers(instances, synth_scene.depth).foreground_ids == {1}
    joined = assign_layers(instances, synth_scene.depth, PipelineConfig(join_tolerance=0.40))
    assert joined.foreground_ids == {1, 2}


def test_generate_defaults(tmp_path, synth_files):
    out = tmp_path / "out"
    rc = main(["generate", str(synth_files["image"]), str(synth_files["depth"]),
               "--masks", str(synth_files["labels"]), "--out", str(out)])
    assert rc == 0
    assert len(frames_in(out)) == 30
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["offsets"]) == 30 and manifest["fallback_segmenter"] is False
    assert Image.open(out / "frame_0001.png").size == (256 - 29, 256)


def test_overrides_in_manifest(tmp_path, synth_files):
    out = tmp_path / "out"
    args = ["generate", str(synth_files["image"]), str(synth_files["depth"]), "--masks", str(synth_files["labels"]),
            "--out", str(out), "--movement", "right", "--frames", "4", "--c-fore", "3.5", "--c-back", "0.5",
            "--fore1", "1", "--back1", "0.25", "--join-tolerance", "0.4", "--min-area", "0.1",
            "--inpaint-radius", "3", "--feather", "--invert-depth", "--two-layer"]
    assert main(args) == 0
    m = io.read_manifest(out / "manifest.json")
    assert m.motion == {"movement": "right", "n": 4, "fore_1": 1.0, "back_1": 0.25, "c_fore": 3.5, "c_back": 0.5}
    assert m.config["join_tolerance"] == 0.4 and m.config["min_relative_area"] == 0.1
    assert m.config["inpaint_radius"] == 3.0 and m.config["feather"] and m.config["two_layer_mode"]
    assert m.options == {"invert_depth": True}
    assert len(frames_in(out)) == 4


def test_single_rest_frame(tmp_path, synth_files):
    out = tmp_path / "one"
    assert main(["generate", str(synth_files["image"]), str(synth_files["depth"]), "--masks",
                 str(synth_files["labels"]), "--out", str(out), "--frames", "1"]) == 0
    dbg = tmp_path / "dbg"
    assert main(["layers", str(synth_files["image"]), str(synth_files["depth"]), "--masks",
                 str(synth_files["labels"]), "--out", str(dbg)]) == 0
    fg = np.asarray(Image.open(dbg / "foreground.png"))
    bg = io.load_rgb(dbg / "background_inpainted.png")
    assert np.array_equal(io.load_rgb(out / "frame_0001.png"), alpha_composite(bg, fg))


def test_missing_depth(tmp_path, synth_files, capsys):
    out = tmp_path / "out"
    rc = main(["generate", str(synth_files["image"]), str(tmp_path / "nodepth.pfm"), "--out", str(out)])
    assert rc == 1
    assert "nodepth.pfm" in capsys.readouterr().err
    assert not out.exists() or not frames_in(out)


def test_fallback_segmenter_run(tmp_path, synth_files):
    out = tmp_path / "fb"
    assert main(["generate", str(synth_files["image"]), str(synth_files["depth"]),
                 "--out", str(out), "--frames", "2"]) == 0
    assert io.read_manifest(out / "manifest.json").fallback_segmenter is True
    assert io.read_manifest(out / "manifest.json").inputs["masks"] is None


def test_flat_depth_without_masks_fails(tmp_path, synth_files, capsys):
    flat = tmp_path / "flat.png"
    Image.fromarray(np.full((256, 256), 9, np.uint8)).save(flat)
    out = tmp_path / "out"
    assert main(["layers", str(synth_files["image"]), str(flat), "--out", str(out)]) == 2
    assert "layering" in capsys.readouterr().err
    assert not out.exists()


def test_layers_ranking_table(tmp_path):
    # two objects at the nearness values read off the squirrel/stone example
    depth = np.full((64, 64), 0.1)
    labels = np.zeros((64, 64), np.uint8)
    labels[5:25, 5:25] = 1
    labels[35:60, 30:60] = 2
    depth[labels == 1] = 0.27138
    depth[labels == 2] = 0.63459
    depth[0, 0], depth[0, 1] = 0.0, 1.0  # pin the min-max normalization
    io.write_pfm(tmp_path / "d.pfm", depth)
    io.write_png(tmp_path / "l.png", labels)
    io.write_png(tmp_path / "i.png", np.zeros((64, 64, 3), np.uint8) + 120)
    out = tmp_path / "dbg"
    assert main(["layers", str(tmp_path / "i.png"), str(tmp_path / "d.pfm"), "--masks",
                 str(tmp_path / "l.png"), "--out", str(out)]) == 0
    assert len(list(out.iterdir())) == 5
    rows = (out / "ranking.tsv").read_text().splitlines()
    assert rows[0].split("\t") == ["id", "area", "mean_depth", "layer"]
    assert rows[1].split("\t") == ["2", "750", "0.63459", "foreground"]
    assert rows[2].split("\t") == ["1", "400", "0.27138", "background"]


def test_unwritable_output(tmp_path, synth_files):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    rc = main(["generate", str(synth_files["image"]), str(synth_files["depth"]), "--masks",
               str(synth_files["labels"]), "--out", str(blocker / "x"), "--frames", "2"])
    assert rc == 3


def test_manifest_failure_removes_frames(tmp_path, synth_files, monkeypatch):
    from parallaxfx.errors import OutputError

    def boom(manifest, path):
        raise OutputError(f"{path}: disk full")

    monkeypatch.setattr(io, "write_manifest", boom)
    out = tmp_path / "out"
    rc = main(["generate", str(synth_files["image"]), str(synth_files["depth"]), "--masks",
               str(synth_files["labels"]), "--out", str(out), "--frames", "3"])
    assert rc == 3 and frames_in(out) == []


def test_bad_motion_is_pipeline_error(tmp_path, synth_files):
    rc = main(["generate", str(synth_files["image"]), str(synth_files["depth"]), "--masks",
               str(synth_files["labels"]), "--out", str(tmp_path / "o"), "--c-fore", "1", "--c-back", "2"])
    assert rc == 2
