"""
Parse a plan, compute visual marks, draw them
=============================================

The plan language has seven verbs. Each line resolves against the scene's
containers, and the prompter turns the resolved step into box/point marks
drawn onto the front camera view.
"""
from pathlib import Path

from labloop.gateway.mock import compute_marks, guideline_text
from labloop.grammar import format_primitive, parse_plan
from labloop.marks import render_marks
from labloop.simlab.fixtures import init_scene
from labloop.simlab.render import render_views

plan = parse_plan(
    """
1. Transfer NaOH solid from beaker with NaOH solid to beaker with water
2. Grasp glass rod
3. Stir NaOH solution
"""
)
print("parsed steps:")
for i, step in enumerate(plan.steps, start=1):
    print(f"  {i}. {format_primitive(step)}")

# the acid-base bench has the containers these slots refer to
scene = init_scene("acid_base", seed=7)
print("\ncontainers on the bench:")
for cid, container in scene.containers.items():
    print(f"  {cid}: {container.name}")

# marks for the transfer step: source box + scoop point, dest box + drop point
step = plan.steps[0]
marks = compute_marks(scene, step)
print(f"\nmarks for step 1 ({step.verb.value}):")
for mark in marks:
    print(f"  {mark.kind:<5} {mark.coordinates}  role={mark.role}")

guide = guideline_text(step)
print(f"\nsafety guideline: {guide}")

# draw them on the front view and save a PPM next to this script
front = render_views(scene)["front"]
annotated = render_marks(front, marks)
out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)
out_path = out_dir / "annotated_front.ppm"
out_path.write_bytes(annotated.to_ppm())
print(f"\nwrote {out_path} ({annotated.width}x{annotated.height})")
