import json

import numpy as np
import pytest

from labloop.episodes import (
    TICK_MS,
    TRAINING_MIXES,
    DirNotEmpty,
    EmptyEpisode,
    EpisodeWriter,
    Io,
    SchemaError,
    TickGap,
    _downscale,
    generate_training_mix,
    read_episode,
    recorder_for,
)
from labloop.instructions import PROPRIO_DIM, PolicyObservation
from labloop.raster import RasterImage
from labloop.simlab.render import VIEWS


def _marked(value):
    arr = np.full((6, 8, 3), 255, dtype=np.uint8)
    arr[0, 0] = (value, value, value)
    return RasterImage(arr)


def _views(tick=0, shade=None):
    """Four small distinct frames; pass shade to make all four identical."""
    views = {}
    for i, name in enumerate(VIEWS):
        value = shade if shade is not None else (10 * tick + i) % 256
        views[name] = _marked(value)
    return views


def _append(writer, tick=0, **kw):
    args = dict(
        views=_views(tick),
        proprio=[0.0] * 14,
        action=[float(tick)] * 14,
        instruction="hold still",
    )
    args.update(kw)
    return writer.append(**args)


# --- writing ----------------------------------------------------------------------


def test_write_and_read_back_round_trip(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep")
    for t in range(3):
        _append(writer, tick=t, step_index=2)
    manifest = writer.finalize("grasp_rod", "success", note="hello")
    assert manifest["record_count"] == 3
    assert manifest["kind"] == "success"
    assert manifest["note"] == "hello"

    episode = read_episode(tmp_path / "ep")
    assert episode.manifest["task_id"] == "grasp_rod"
    assert [r["t"] for r in episode.records] == [0, 1, 2]
    assert [r["time_ms"] for r in episode.records] == [0, TICK_MS, 2 * TICK_MS]
    assert all(r["step_index"] == 2 for r in episode.records)
    assert episode.records[1]["action"] == [1.0] * 14
    for rec in episode.records:
        for view in VIEWS:
            assert (episode.path / rec["view_refs"][view]).is_file()
    frame = episode.load_frame(episode.records[0]["view_refs"]["front"])
    assert (frame.width, frame.height) == (8, 6)


def test_refuses_nonempty_directory(tmp_path):
    target = tmp_path / "ep"
    target.mkdir()
    (target / "leftover.txt").write_text("x")
    with pytest.raises(DirNotEmpty):
        EpisodeWriter(target)


def test_tick_counter_must_advance_by_one(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep")
    _append(writer, tick=0)
    with pytest.raises(TickGap) as info:
        _append(writer, tick=0, t=2)
    assert (info.value.expected, info.value.got) == (1, 2)
    writer.abort()

    other = EpisodeWriter(tmp_path / "ep2")
    with pytest.raises(TickGap):
        _append(other, t=5)
    other.abort()


def test_finalize_requires_records_and_valid_kind(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep")
    with pytest.raises(EmptyEpisode):
        writer.finalize("grasp_rod", "success")
    _append(writer)
    with pytest.raises(SchemaError, match="kind"):
        writer.finalize("grasp_rod", "bogus")
    writer.finalize("grasp_rod", "retry")
    with pytest.raises(SchemaError, match="finalized"):
        writer.finalize("grasp_rod", "retry")
    with pytest.raises(SchemaError, match="finalized"):
        _append(writer, tick=1)


def test_vector_widths_are_enforced(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep")
    with pytest.raises(SchemaError, match="proprio"):
        _append(writer, proprio=[0.0] * 13)
    with pytest.raises(SchemaError, match="action"):
        _append(writer, action=[0.0] * 15)
    writer.abort()


def test_all_camera_views_are_required(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep")
    views = _views()
    del views["top"]
    with pytest.raises(SchemaError, match="top"):
        _append(writer, views=views)
    writer.abort()


def test_prompt_flag_must_mirror_prompted_image(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep")
    with pytest.raises(SchemaError, match="prompt"):
        _append(writer, prompt_flag=True)
    with pytest.raises(SchemaError, match="prompt"):
        _append(writer, prompted=RasterImage.blank(8, 6))
    rec = _append(writer, prompt_flag=True, prompted=RasterImage.blank(8, 6))
    assert rec["prompt_flag"] is True
    assert "prompted_ref" in rec
    writer.finalize("grasp_rod", "success")
    episode = read_episode(tmp_path / "ep")
    assert (episode.path / episode.records[0]["prompted_ref"]).is_file()


def test_frame_scale_validation(tmp_path):
    with pytest.raises(SchemaError, match="frame_scale"):
        EpisodeWriter(tmp_path / "ep", frame_scale=0)


def test_aborted_episode_has_no_manifest(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep")
    _append(writer)
    writer.abort()
    writer.abort()  # idempotent
    assert not (tmp_path / "ep" / "manifest.json").exists()
    with pytest.raises(Io):
        read_episode(tmp_path / "ep")


# --- frame dedup and downscale ----------------------------------------------------


def test_identical_frames_are_stored_once(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep")
    rec0 = _append(writer, views=_views(shade=42))
    rec1 = _append(writer, tick=1, views=_views(shade=42))
    distinct = _views(shade=99)
    rec2 = _append(writer, tick=2, views=distinct)
    manifest = writer.finalize("grasp_rod", "success")

    # all four views of tick 0 share one file; tick 1 reuses it
    refs0 = set(rec0["view_refs"].values())
    assert len(refs0) == 1
    assert set(rec1["view_refs"].values()) == refs0
    assert set(rec2["view_refs"].values()) != refs0
    assert manifest["frame_count"] == 2
    ppm_files = list((tmp_path / "ep" / "frames").glob("*.ppm"))
    assert len(ppm_files) == 2


def test_downscale_strides_pixels():
    arr = np.full((6, 8, 3), 255, dtype=np.uint8)
    arr[0, 0] = (1, 2, 3)
    arr[2, 4] = (4, 5, 6)
    img = RasterImage(arr)
    small = _downscale(img, 2)
    assert (small.width, small.height) == (4, 3)
    assert tuple(small.pixels[0, 0]) == (1, 2, 3)
    assert tuple(small.pixels[1, 2]) == (4, 5, 6)
    assert _downscale(img, 1) is img


def test_frame_scale_shrinks_stored_frames(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep", frame_scale=2)
    _append(writer)
    writer.finalize("grasp_rod", "success")
    episode = read_episode(tmp_path / "ep")
    assert episode.manifest["frame_scale"] == 2
    frame = episode.load_frame(episode.records[0]["view_refs"]["front"])
    assert (frame.width, frame.height) == (4, 3)


# --- read-back validation ---------------------------------------------------------


def _finished_episode(tmp_path, n=2):
    writer = EpisodeWriter(tmp_path / "ep")
    for t in range(n):
        _append(writer, tick=t)
    writer.finalize("grasp_rod", "success")
    return tmp_path / "ep"


def _rewrite_records(path, mutate):
    lines = (path / "steps.jsonl").read_text().splitlines()
    records = [json.loads(line) for line in lines]
    mutate(records)
    path.joinpath("steps.jsonl").write_text(
        "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    )


def test_read_rejects_tick_gap(tmp_path):
    path = _finished_episode(tmp_path)

    def bump(records):
        records[1]["t"] = 5

    _rewrite_records(path, bump)
    with pytest.raises(TickGap):
        read_episode(path)


def test_read_rejects_wrong_timestamp(tmp_path):
    path = _finished_episode(tmp_path)

    def drift(records):
        records[1]["time_ms"] = 49

    _rewrite_records(path, drift)
    with pytest.raises(SchemaError, match="time_ms"):
        read_episode(path)


def test_read_rejects_missing_frame_file(tmp_path):
    path = _finished_episode(tmp_path)
    episode = read_episode(path)
    ref = episode.records[0]["view_refs"]["front"]
    (path / ref).unlink()
    with pytest.raises(SchemaError, match="missing frame file"):
        read_episode(path)


def test_read_rejects_record_count_mismatch(tmp_path):
    path = _finished_episode(tmp_path)
    manifest = json.loads((path / "manifest.json").read_text())
    manifest["record_count"] = 9
    (path / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(SchemaError, match="records"):
        read_episode(path)


def test_read_rejects_bad_kind_and_prompt_mismatch(tmp_path):
    path = _finished_episode(tmp_path)
    manifest = json.loads((path / "manifest.json").read_text())
    manifest["kind"] = "partial"
    (path / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(SchemaError, match="kind"):
        read_episode(path)

    other = _finished_episode(tmp_path / "b")

    def lie(records):
        records[0]["prompt_flag"] = True

    _rewrite_records(other, lie)
    with pytest.raises(SchemaError, match="prompt_flag"):
        read_episode(other)


def test_read_missing_directory_is_io_error(tmp_path):
    with pytest.raises(Io):
        read_episode(tmp_path / "never_written")


# --- runtime adapter --------------------------------------------------------------


def test_recorder_adapter_streams_observations(tmp_path):
    writer = EpisodeWriter(tmp_path / "ep")
    record = recorder_for(writer)
    obs = PolicyObservation(
        views={name: RasterImage.blank(8, 6) for name in VIEWS},
        proprio=tuple(float(i) for i in range(PROPRIO_DIM)),
        instruction="grasp the rod",
        prompted=None,
        prompt_flag=False,
    )
    record(3, obs, np.linspace(0.0, 1.3, 14))
    record(3, obs, np.zeros(14))
    writer.finalize("grasp_rod", "success")
    episode = read_episode(tmp_path / "ep")
    assert len(episode.records) == 2
    rec = episode.records[0]
    assert rec["step_index"] == 3
    assert rec["instruction"] == "grasp the rod"
    assert rec["proprio"] == [float(i) for i in range(14)]
    assert rec["action"][0] == 0.0
    assert rec["action"][-1] == pytest.approx(1.3)


# --- dataset generation -----------------------------------------------------------


def test_named_mixes_cover_the_four_ratios():
    assert TRAINING_MIXES == {
        "config1": (400, 0),
        "config2": (300, 100),
        "config3": (200, 200),
        "config4": (0, 400),
    }


def test_generate_training_mix_small(tmp_path):
    manifest = generate_training_mix(
        tmp_path / "ds", 2, 1, task_id="grasp_rod", base_seed=3, frame_scale=4
    )
    assert manifest["counts"] == {"success": 2, "retry": 1}
    assert [e["dir"] for e in manifest["episodes"]] == [
        "ep_00000_success",
        "ep_00001_success",
        "ep_00002_retry",
    ]
    on_disk = json.loads((tmp_path / "ds" / "manifest.json").read_text())
    assert on_disk == manifest

    success = read_episode(tmp_path / "ds" / "ep_00000_success")
    success2 = read_episode(tmp_path / "ds" / "ep_00001_success")
    retry = read_episode(tmp_path / "ds" / "ep_00002_retry")
    assert success.manifest["kind"] == "success"
    assert retry.manifest["kind"] == "retry"
    # the scripted retry runs the step twice, so its stream is twice as long
    assert retry.manifest["record_count"] == 2 * success.manifest["record_count"]
    assert success2.manifest["record_count"] == success.manifest["record_count"]
    # frames come out downscaled by 4 from the 640x480 cameras
    frame = success.load_frame(success.records[0]["view_refs"]["front"])
    assert (frame.width, frame.height) == (160, 120)

    with pytest.raises(DirNotEmpty):
        generate_training_mix(tmp_path / "ds", 1, 0)
