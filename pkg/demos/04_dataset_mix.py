"""
Scripted training episodes
==========================

Policy training data is written one episode per directory: a steps.jsonl of
20 Hz ticks, content-deduplicated PPM frames, and a manifest. A "retry"
episode forces one failed attempt before the success, so its tick stream is
twice as long as a clean one. Datasets are a counted mix of the two kinds.
"""
import json
import shutil
import tempfile
from pathlib import Path

from labloop.episodes import generate_training_mix, read_episode

root = Path(tempfile.mkdtemp()) / "mini_mix"
manifest = generate_training_mix(
    root, 4, 2, task_id="grasp_rod", base_seed=11, frame_scale=4
)
print(f"wrote {root}")
print(f"counts: {manifest['counts']}")

print("\nepisodes:")
for entry in manifest["episodes"]:
    episode = read_episode(root / entry["dir"])
    m = episode.manifest
    print(
        f"  {entry['dir']:<22} ticks={m['record_count']:<3} "
        f"unique frames={m['frame_count']}"
    )

success = read_episode(root / "ep_00000_success")
retry = read_episode(root / "ep_00004_retry")
ratio = retry.manifest["record_count"] / success.manifest["record_count"]
print(f"\nretry/success tick ratio: {ratio:.1f}")

record = success.records[0]
print("\nfirst record of the first episode:")
print(f"  t={record['t']} time_ms={record['time_ms']}")
print(f"  instruction: {record['instruction']!r}")
print(f"  views: {json.dumps(record['view_refs'], indent=None)}")
frame = success.load_frame(record["view_refs"]["front"])
print(f"  frame size at scale 4: {frame.width}x{frame.height}")

shutil.rmtree(root.parent)
print("\ncleaned up")
