"""Scoring and campaign aggregation.

Two summary statistics run through everything here:

* success rate (SR): fraction of binary successes;
* compliance rate (CR): mean rubric score over quarter-point grades
  {0, 0.25, 0.5, 0.75, 1}.

Stepwise evaluation treats a task as a chain of steps with cascade
semantics: step k is *reached* by a trial only when steps 1..k-1 all
succeeded, SR(k) counts trials whose first k steps all succeeded, and CR(k)
averages scores over reaching trials only (no trial reaches, no number — an
unreached step never contributes a zero). SR(k) is non-increasing in k by
construction.

Campaigns run one experiment per trial index on independent RNG substreams,
so results are reproducible for a given (config, n_trials) no matter how
many workers executed them.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .orchestrator import ExperimentConfig, ExperimentLog, run_experiment
from .simlab.fixtures import get_fixture

ALLOWED_SCORES = (0.0, 0.25, 0.5, 0.75, 1.0)


class MetricsError(ValueError):
    pass


class EmptyTrials(MetricsError):
    def __init__(self):
        super().__init__("no trials to aggregate")


class InvalidScore(MetricsError):
    def __init__(self, value):
        super().__init__(
            f"score {value!r} is not one of the rubric grades {ALLOWED_SCORES}"
        )
        self.value = value


class ChainMismatch(MetricsError):
    def __init__(self, got: int, expected: int):
        super().__init__(f"trial has {got} step results but the chain has {expected} steps")
        self.got = got
        self.expected = expected


def success_rate(flags: Iterable[bool]) -> float:
    flags = list(flags)
    if not flags:
        raise EmptyTrials()
    return sum(1 for f in flags if f) / len(flags)


def compliance_rate(scores: Iterable[float]) -> float:
    scores = list(scores)
    if not scores:
        raise EmptyTrials()
    for s in scores:
        if s not in ALLOWED_SCORES:
            raise InvalidScore(s)
    return sum(scores) / len(scores)


@dataclass(frozen=True)
class StepResult:
    success: bool
    score: float

    def __post_init__(self):
        if self.score not in ALLOWED_SCORES:
            raise InvalidScore(self.score)


@dataclass(frozen=True)
class TrialRecord:
    """Per-step outcomes of one trial, in chain order.

    May be shorter than the chain: a trial that failed at step j never
    executed the later steps. It is never longer.
    """

    steps: tuple[StepResult, ...]
    final_success: bool

    def reached(self, k: int) -> bool:
        """1-based step k is reached iff every earlier step succeeded."""
        if k < 1:
            raise MetricsError("step numbers are 1-based")
        return all(s.success for s in self.steps[: k - 1]) and len(self.steps) >= k - 1

    def result_at(self, k: int) -> StepResult:
        """Result for 1-based step k; a reached-but-unexecuted step counts
        as a zero-score failure (the trial aborted before acting)."""
        if k - 1 < len(self.steps):
            return self.steps[k - 1]
        return StepResult(False, 0.0)

    @classmethod
    def from_log(cls, log, *, success_after_retry_counts: bool | None = None) -> "TrialRecord":
        """Build a record from an ExperimentLog or its JSON dict."""
        doc = log.to_json_dict() if isinstance(log, ExperimentLog) else log
        if success_after_retry_counts is None:
            success_after_retry_counts = doc["config"].get("success_after_retry_counts", True)
        steps = []
        for trace in doc["traces"]:
            attempts = trace["attempts"]
            succeeded = trace["final_status"] == "succeeded"
            if not success_after_retry_counts:
                # strict grading: any monitor N or any inner second attempt
                # anywhere in the step disqualifies it
                clean = attempts and all(a["verdict"] for a in attempts) and not any(
                    a["second_attempt"] for a in attempts
                )
                succeeded = succeeded and bool(clean)
            score = attempts[-1]["score"] if attempts else 0.0
            steps.append(StepResult(bool(succeeded), float(score)))
        return cls(tuple(steps), doc["final_status"] == "succeeded")


@dataclass(frozen=True)
class StepReport:
    step_no: int
    label: str
    reached: int
    sr: float
    cr: float | None

    def to_json_dict(self) -> dict:
        return {
            "step_no": self.step_no,
            "label": self.label,
            "reached": self.reached,
            "sr": self.sr,
            "cr": self.cr,
        }


@dataclass(frozen=True)
class TaskReport:
    task_id: str
    chain: tuple[str, ...]
    n_trials: int
    rows: tuple[StepReport, ...]

    @property
    def overall_sr(self) -> float:
        return self.rows[-1].sr if self.rows else 0.0

    def to_json_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "chain": list(self.chain),
            "n_trials": self.n_trials,
            "rows": [r.to_json_dict() for r in self.rows],
            "overall_sr": self.overall_sr,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    def to_table(self) -> str:
        """Aligned TSV-style text table, one row per chain step."""
        header = ("step", "label", "reached", "SR", "CR")
        body = []
        for r in self.rows:
            cr = "-" if r.cr is None else f"{r.cr:.4f}"
            body.append((str(r.step_no), r.label, str(r.reached), f"{r.sr:.4f}", cr))
        widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
        lines = []
        for row in [header, *body]:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        lines.append(f"overall SR over {self.n_trials} trials: {self.overall_sr:.4f}")
        return "\n".join(lines)


def stepwise_evaluate(
    records: Sequence[TrialRecord],
    chain: Sequence[str],
    *,
    task_id: str = "",
) -> TaskReport:
    if not records:
        raise EmptyTrials()
    chain = tuple(chain)
    for rec in records:
        if len(rec.steps) > len(chain):
            raise ChainMismatch(len(rec.steps), len(chain))
    n = len(records)
    rows = []
    for k in range(1, len(chain) + 1):
        reaching = [rec for rec in records if rec.reached(k)]
        successes = sum(
            1 for rec in records if all(rec.result_at(j).success for j in range(1, k + 1))
        )
        cr = None
        if reaching:
            cr = sum(rec.result_at(k).score for rec in reaching) / len(reaching)
        rows.append(
            StepReport(
                step_no=k,
                label=chain[k - 1],
                reached=len(reaching),
                sr=successes / n,
                cr=cr,
            )
        )
    return TaskReport(task_id=task_id, chain=chain, n_trials=n, rows=tuple(rows))


@dataclass
class CampaignResult:
    config: ExperimentConfig
    n_trials: int
    records: list[TrialRecord] = field(default_factory=list)
    statuses: list[str] = field(default_factory=list)
    errors: list[tuple[int, str]] = field(default_factory=list)
    report: TaskReport | None = None
    logs: list[dict] = field(default_factory=list)

    @property
    def trial_successes(self) -> list[bool]:
        return [r.final_success for r in self.records]

    @property
    def sr(self) -> float:
        return success_rate(self.trial_successes)

    def to_json_dict(self) -> dict:
        return {
            "config": self.config.to_json_dict(),
            "n_trials": self.n_trials,
            "statuses": list(self.statuses),
            "errors": [[i, msg] for i, msg in self.errors],
            "report": self.report.to_json_dict() if self.report else None,
            "sr": self.sr,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


def _run_trial(config_doc: Mapping, trial_index: int) -> dict:
    config = ExperimentConfig.from_json_dict(config_doc)
    try:
        log = run_experiment(config, trial_index=trial_index)
        return {"trial_index": trial_index, "log": log.to_json_dict()}
    except Exception as exc:  # recorded, never fatal to the campaign
        return {"trial_index": trial_index, "error": f"{type(exc).__name__}: {exc}"}


def run_campaign(
    config: ExperimentConfig,
    n_trials: int,
    *,
    jobs: int = 1,
    keep_logs: bool = False,
    success_after_retry_counts: bool | None = None,
) -> CampaignResult:
    """Run n_trials independent experiments and aggregate a stepwise report.

    Trials are keyed by trial index (RNG substream), so splitting the work
    over several processes cannot change any number; results are merged back
    in trial order. Per-trial exceptions are recorded as errors (the trial
    counts as a failure) rather than aborting the sweep.
    """
    if n_trials < 1:
        raise EmptyTrials()
    if success_after_retry_counts is None:
        success_after_retry_counts = config.success_after_retry_counts
    config_doc = config.to_json_dict()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(
                pool.map(_run_trial, [config_doc] * n_trials, range(n_trials), chunksize=16)
            )
    else:
        outcomes = [_run_trial(config_doc, i) for i in range(n_trials)]
    outcomes.sort(key=lambda o: o["trial_index"])

    result = CampaignResult(config=config, n_trials=n_trials)
    for out in outcomes:
        if "error" in out:
            result.errors.append((out["trial_index"], out["error"]))
            result.statuses.append("error")
            result.records.append(TrialRecord((), False))
            continue
        doc = out["log"]
        result.statuses.append(doc["final_status"])
        result.records.append(
            TrialRecord.from_log(doc, success_after_retry_counts=success_after_retry_counts)
        )
        if keep_logs:
            result.logs.append(doc)
    chain = get_fixture(config.task_id).chain
    result.report = stepwise_evaluate(result.records, chain, task_id=config.task_id)
    return result


def report_from_logs(
    log_docs: Sequence[Mapping],
    *,
    chain: Sequence[str] | None = None,
    success_after_retry_counts: bool | None = None,
) -> TaskReport:
    """Aggregate saved experiment logs (JSON dicts) into a stepwise report."""
    if not log_docs:
        raise EmptyTrials()
    task_id = log_docs[0]["config"]["task_id"]
    for doc in log_docs:
        if doc["config"]["task_id"] != task_id:
            raise MetricsError("logs mix different tasks; evaluate them separately")
    if chain is None:
        chain = get_fixture(task_id).chain
    records = [
        TrialRecord.from_log(doc, success_after_retry_counts=success_after_retry_counts)
        for doc in log_docs
    ]
    return stepwise_evaluate(records, chain, task_id=task_id)
