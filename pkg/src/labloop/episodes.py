"""On-disk episode store for policy training data.

One episode = one directory:

    manifest.json   written last, on finalize (its presence marks a complete episode)
    steps.jsonl     one record per control tick
    frames/         PPM images, deduplicated by content

Records carry a tick counter t that starts at 0 and increments by exactly 1,
a wall-time stamp time_ms = 50*t (20 Hz control), references to the four
camera frames, the 14-dim proprioceptive state, the 14-dim action (first row
of the chunk active at that tick), the language instruction, and — when the
tick ran with a visually prompted image — a reference to that image.

Frames are stored once per unique pixel content: a record's refs may point
at a file first written for an earlier tick or another view.

An episode's kind is "success" when the policy succeeded outright and
"retry" when a failed attempt preceded the success; training mixes are
built by forcing those outcome scripts through the runtime.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .raster import RasterImage
from .simlab.render import VIEWS

SCHEMA_VERSION = 1
TICK_MS = 50
EPISODE_KINDS = ("success", "retry")

# Named training mixes: (success episodes, retry episodes).
TRAINING_MIXES: dict[str, tuple[int, int]] = {
    "config1": (400, 0),
    "config2": (300, 100),
    "config3": (200, 200),
    "config4": (0, 400),
}


class EpisodeError(Exception):
    pass


class DirNotEmpty(EpisodeError):
    def __init__(self, path):
        super().__init__(f"episode directory {path} already has contents")
        self.path = path


class SchemaError(EpisodeError):
    pass


class TickGap(SchemaError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"tick counter must advance by 1: expected t={expected}, got t={got}")
        self.expected = expected
        self.got = got


class EmptyEpisode(EpisodeError):
    def __init__(self):
        super().__init__("episode holds no records; refusing to finalize")


class Io(EpisodeError):
    def __init__(self, cause: OSError):
        super().__init__(f"episode store I/O failed: {cause}")
        self.cause = cause


def _downscale(image: RasterImage, scale: int) -> RasterImage:
    if scale <= 1:
        return image
    return RasterImage(image.pixels[::scale, ::scale].copy())


class EpisodeWriter:
    """Streams one episode to disk; finalize() writes the manifest."""

    def __init__(self, directory, *, frame_scale: int = 1):
        self.directory = Path(directory)
        if frame_scale < 1:
            raise SchemaError("frame_scale must be >= 1")
        self.frame_scale = frame_scale
        self._next_t = 0
        self._by_hash: dict[str, str] = {}
        self._finalized = False
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            if any(self.directory.iterdir()):
                raise DirNotEmpty(self.directory)
            (self.directory / "frames").mkdir()
            self._steps = open(self.directory / "steps.jsonl", "w", encoding="utf-8")
        except OSError as exc:
            raise Io(exc) from exc

    def _store_frame(self, image: RasterImage, slot: str, t: int) -> str:
        data = _downscale(image, self.frame_scale).to_ppm()
        digest = hashlib.sha1(data).hexdigest()
        ref = self._by_hash.get(digest)
        if ref is None:
            ref = f"frames/{t:06d}_{slot}.ppm"
            try:
                (self.directory / ref).write_bytes(data)
            except OSError as exc:
                raise Io(exc) from exc
            self._by_hash[digest] = ref
        return ref

    def append(
        self,
        views: Mapping[str, RasterImage],
        proprio: Sequence[float],
        action: Sequence[float],
        instruction: str,
        *,
        prompt_flag: bool = False,
        prompted: RasterImage | None = None,
        step_index: int = 0,
        t: int | None = None,
    ) -> dict:
        if self._finalized:
            raise SchemaError("writer already finalized")
        if t is None:
            t = self._next_t
        if t != self._next_t:
            raise TickGap(self._next_t, t)
        missing = [v for v in VIEWS if v not in views]
        if missing:
            raise SchemaError(f"record is missing camera views: {missing}")
        proprio = [float(x) for x in proprio]
        action = [float(x) for x in action]
        if len(proprio) != 14:
            raise SchemaError(f"proprio must have 14 values, got {len(proprio)}")
        if len(action) != 14:
            raise SchemaError(f"action must have 14 values, got {len(action)}")
        if prompt_flag != (prompted is not None):
            raise SchemaError("prompted image must be present exactly when prompt_flag is set")
        record = {
            "t": t,
            "time_ms": t * TICK_MS,
            "step_index": int(step_index),
            "view_refs": {v: self._store_frame(views[v], v, t) for v in VIEWS},
            "proprio": proprio,
            "action": action,
            "instruction": instruction,
            "prompt_flag": bool(prompt_flag),
        }
        if prompted is not None:
            record["prompted_ref"] = self._store_frame(prompted, "prompted", t)
        try:
            self._steps.write(json.dumps(record, sort_keys=True) + "\n")
        except OSError as exc:
            raise Io(exc) from exc
        self._next_t = t + 1
        return record

    def finalize(self, task_id: str, kind: str, **extra) -> dict:
        if self._finalized:
            raise SchemaError("writer already finalized")
        if self._next_t == 0:
            raise EmptyEpisode()
        if kind not in EPISODE_KINDS:
            raise SchemaError(f"episode kind must be one of {EPISODE_KINDS}, got {kind!r}")
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "task_id": task_id,
            "kind": kind,
            "record_count": self._next_t,
            "frame_count": len(self._by_hash),
            "frame_scale": self.frame_scale,
            **extra,
        }
        try:
            self._steps.close()
            with open(self.directory / "manifest.json", "w", encoding="utf-8") as fh:
                json.dump(manifest, fh, sort_keys=True, indent=1)
                fh.write("\n")
        except OSError as exc:
            raise Io(exc) from exc
        self._finalized = True
        return manifest

    def abort(self):
        if not self._finalized:
            self._steps.close()
            self._finalized = True


def recorder_for(writer: EpisodeWriter):
    """Adapt a writer to the runtime's per-tick recorder callback."""

    def record(step_index, observation, action_row):
        writer.append(
            observation.views,
            observation.proprio,
            action_row,
            observation.instruction,
            prompt_flag=observation.prompt_flag,
            prompted=observation.prompted.rendered if observation.prompted else None,
            step_index=step_index,
        )

    return record


@dataclass(frozen=True)
class Episode:
    path: Path
    manifest: dict
    records: tuple[dict, ...]

    def load_frame(self, ref: str) -> RasterImage:
        try:
            data = (self.path / ref).read_bytes()
        except OSError as exc:
            raise Io(exc) from exc
        return RasterImage.from_ppm(data)


def read_episode(directory) -> Episode:
    """Load and validate one episode directory."""
    path = Path(directory)
    try:
        manifest = json.loads((path / "manifest.json").read_text(encoding="utf-8"))
        lines = (path / "steps.jsonl").read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise Io(exc) from exc
    records = []
    for t_expected, line in enumerate(lines):
        rec = json.loads(line)
        if rec.get("t") != t_expected:
            raise TickGap(t_expected, rec.get("t", -1))
        if rec.get("time_ms") != t_expected * TICK_MS:
            raise SchemaError(f"record t={t_expected} has time_ms={rec.get('time_ms')}")
        refs = rec.get("view_refs", {})
        for view in VIEWS:
            if view not in refs:
                raise SchemaError(f"record t={t_expected} lacks a {view} frame ref")
            if not (path / refs[view]).is_file():
                raise SchemaError(f"record t={t_expected}: missing frame file {refs[view]}")
        for key in ("proprio", "action"):
            if len(rec.get(key, ())) != 14:
                raise SchemaError(f"record t={t_expected}: {key} must have 14 values")
        if rec.get("prompt_flag") != ("prompted_ref" in rec):
            raise SchemaError(f"record t={t_expected}: prompt_flag disagrees with prompted_ref")
        if "prompted_ref" in rec and not (path / rec["prompted_ref"]).is_file():
            raise SchemaError(f"record t={t_expected}: missing prompted file")
        records.append(rec)
    if not records:
        raise EmptyEpisode()
    if manifest.get("record_count") != len(records):
        raise SchemaError(
            f"manifest says {manifest.get('record_count')} records, found {len(records)}"
        )
    if manifest.get("kind") not in EPISODE_KINDS:
        raise SchemaError(f"manifest kind {manifest.get('kind')!r} is invalid")
    return Episode(path=path, manifest=manifest, records=tuple(records))


def _generate_episode(out_dir, task_id: str, kind: str, base_seed: int, trial_index: int, *, frame_scale: int) -> dict:
    # Imported here so the store stays usable without the runtime stack.
    from .grammar import parse_plan
    from .orchestrator import ExperimentConfig, run_experiment
    from .simlab.fixtures import get_fixture
    from .simlab.rubric import fail_category, top_category

    fixture = get_fixture(task_id)
    # outcome script per plan step: retry episodes fail once, then succeed
    steps = parse_plan(fixture.plan_text).steps
    forced: list[str] = []
    for step in steps:
        if kind == "retry":
            forced.append(fail_category(step.verb))
        forced.append(top_category(step.verb))
    config = ExperimentConfig(
        task_id=task_id,
        seed=base_seed,
        inner_second_attempt_prob=1.0 if kind == "retry" else 0.0,
        forced_categories=tuple(forced),
    )
    writer = EpisodeWriter(out_dir, frame_scale=frame_scale)
    try:
        log = run_experiment(config, trial_index=trial_index, recorder=recorder_for(writer))
    except Exception:
        writer.abort()
        raise
    if not log.succeeded:
        writer.abort()
        raise SchemaError(
            f"scripted {kind} episode unexpectedly ended {log.final_status}"
        )
    return writer.finalize(task_id, kind, trial_index=trial_index, seed=base_seed)


def generate_training_mix(
    out_root,
    n_success: int,
    n_retry: int,
    *,
    task_id: str = "grasp_rod",
    base_seed: int = 7,
    frame_scale: int = 4,
) -> dict:
    """Write a dataset of scripted episodes and a recounted dataset manifest.

    Success episodes run a clean outcome script; retry episodes force one
    failed attempt (with a guaranteed immediate second attempt) before the
    success, so their tick streams are roughly twice as long. After writing,
    every episode is re-read and re-counted independently; the manifest's
    counts come from that pass, not from the loop that did the writing.
    """
    root = Path(out_root)
    try:
        root.mkdir(parents=True, exist_ok=True)
        if any(root.iterdir()):
            raise DirNotEmpty(root)
    except OSError as exc:
        raise Io(exc) from exc
    plan = [("success", i) for i in range(n_success)]
    plan += [("retry", n_success + i) for i in range(n_retry)]
    episodes = []
    for kind, trial_index in plan:
        name = f"ep_{trial_index:05d}_{kind}"
        _generate_episode(
            root / name, task_id, kind, base_seed, trial_index, frame_scale=frame_scale
        )
        episodes.append({"dir": name, "kind": kind, "trial_index": trial_index})

    # Independent verification pass: trust only what is actually on disk.
    counts = {"success": 0, "retry": 0}
    for entry in episodes:
        episode = read_episode(root / entry["dir"])
        counts[episode.manifest["kind"]] += 1
    if counts != {"success": n_success, "retry": n_retry}:
        raise SchemaError(
            f"dataset recount {counts} does not match requested mix "
            f"({n_success} success, {n_retry} retry)"
        )
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "task_id": task_id,
        "base_seed": base_seed,
        "frame_scale": frame_scale,
        "counts": counts,
        "episodes": episodes,
    }
    try:
        with open(root / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise Io(exc) from exc
    return manifest
