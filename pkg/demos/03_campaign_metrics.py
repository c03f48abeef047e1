"""
Retry amplification and stepwise scoring
========================================

Two experiments in one script. First: give the grasp policy a 0.8 success
probability per attempt and watch the outer verify/retry loop lift the
success rate toward 1 - 0.2^(retries+1). Second: run a small acid-base
campaign and print the per-step SR/CR table with cascade semantics.
"""
from labloop.grammar import PrimitiveVerb
from labloop.metrics import run_campaign
from labloop.orchestrator import ExperimentConfig
from labloop.simlab.rubric import success_failure

N = 500
print(f"grasp at p=0.8 per attempt, {N} trials per row:")
print(f"  {'retries':<8} {'measured SR':<12} closed form")
for retries in (0, 1, 2):
    config = ExperimentConfig(
        task_id="grasp_rod",
        seed=42,
        lite_views=True,  # blank frames; the mocks never look at pixels
        policy_done_ticks=1,
        inner_second_attempt_prob=0.0,
        max_outer_retries=retries,
        distributions={PrimitiveVerb.GRASP: success_failure(PrimitiveVerb.GRASP, 0.8)},
    )
    result = run_campaign(config, N)
    expected = 1.0 - 0.2 ** (retries + 1)
    print(f"  {retries:<8} {result.sr:<12.4f} {expected:.4f}")

print("\nacid-base, 40 trials, every verb at p=0.9 per attempt:")
config = ExperimentConfig(
    task_id="acid_base",
    seed=31,
    lite_views=True,
    policy_done_ticks=1,
    inner_second_attempt_prob=0.0,
    max_outer_retries=2,
    distributions={v: success_failure(v, 0.9) for v in PrimitiveVerb},
)
result = run_campaign(config, 40)
print()
print(result.report.to_table())
