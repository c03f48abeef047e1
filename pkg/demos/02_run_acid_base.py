"""
One neutralization, end to end
==============================

Runs the acid-base task through both loops: the planner's five steps, the
tick-level policy on each primitive, the monitor's verify/retry, and the
until-condition that keeps pouring acid until the indicator goes colorless.
0.05 mol of dissolved NaOH at 0.02 mol per pour needs exactly three pours.
"""
from labloop.orchestrator import ExperimentConfig, replay_experiment, run_experiment

config = ExperimentConfig(task_id="acid_base", seed=7)
log = run_experiment(config)

print("plan:")
for line in log.plan_text.splitlines():
    print(f"  {line}")

print("\nexecution:")
for trace in log.traces:
    attempts = len(trace.attempts)
    note = f"{attempts} attempt(s)"
    if trace.condition_checks:
        checks = "".join("Y" if c else "n" for c in trace.condition_checks)
        note += f", {trace.until_repetitions} repetition(s), condition checks {checks}"
    print(f"  step {trace.step_index + 1} [{trace.verb:<8}] {trace.final_status}: {note}")

print(f"\nfinal status: {log.final_status}")

beaker = log.final_scene.containers["beaker_water"]
print(f"\n{beaker.name} afterwards:")
for substance in beaker.contents:
    print(f"  {substance.species:<16} {substance.phase:<8} {substance.amount:.3f}")
print(f"  indicator reads: {beaker.flags.indicator_color}")

# the log carries everything needed to rerun it bit for bit
identical, diffs, _ = replay_experiment(log.to_json_dict())
print(f"\nreplay identical: {identical}")
