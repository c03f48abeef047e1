import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labloop.metrics import (
    ALLOWED_SCORES,
    ChainMismatch,
    EmptyTrials,
    InvalidScore,
    MetricsError,
    StepResult,
    TaskReport,
    TrialRecord,
    compliance_rate,
    report_from_logs,
    run_campaign,
    stepwise_evaluate,
    success_rate,
)
from labloop.orchestrator import ExperimentConfig, run_experiment
from labloop.simlab.rubric import success_failure
from labloop.grammar import PrimitiveVerb


def _config(**kw) -> ExperimentConfig:
    base = dict(
        task_id="grasp_rod",
        seed=7,
        lite_views=True,
        policy_done_ticks=2,
        inner_second_attempt_prob=0.0,
    )
    base.update(kw)
    return ExperimentConfig(**base)


# --- flat rates -------------------------------------------------------------------


def test_success_rate_is_fraction_of_true():
    assert success_rate([True, False, True, True]) == 0.75
    assert success_rate([False]) == 0.0


def test_success_rate_rejects_empty():
    with pytest.raises(EmptyTrials):
        success_rate([])


def test_compliance_rate_quarter_grade_mean():
    # 1 zero, 3 halves, 16 ones -> 17.5 / 20
    scores = [0.0] + [0.5] * 3 + [1.0] * 16
    assert compliance_rate(scores) == 0.875


def test_compliance_rate_rejects_off_grade_scores():
    with pytest.raises(InvalidScore) as info:
        compliance_rate([1.0, 0.3])
    assert info.value.value == 0.3
    with pytest.raises(EmptyTrials):
        compliance_rate([])


def test_step_result_validates_score():
    with pytest.raises(InvalidScore):
        StepResult(True, 0.9)
    assert StepResult(True, 0.75).score == 0.75


# --- trial records ----------------------------------------------------------------


def _rec(*pairs, final=None):
    steps = tuple(StepResult(s, q) for s, q in pairs)
    if final is None:
        final = bool(steps) and all(s.success for s in steps)
    return TrialRecord(steps, final)


def test_reached_requires_all_earlier_successes():
    rec = _rec((True, 1.0), (False, 0.25))
    assert rec.reached(1) is True
    assert rec.reached(2) is True
    assert rec.reached(3) is False  # step 2 failed
    empty = TrialRecord((), False)
    assert empty.reached(1) is True
    assert empty.reached(2) is False


def test_reached_rejects_zero_or_negative():
    with pytest.raises(MetricsError):
        _rec((True, 1.0)).reached(0)


def test_result_at_past_end_is_zero_failure():
    rec = _rec((True, 1.0))
    beyond = rec.result_at(2)
    assert beyond.success is False
    assert beyond.score == 0.0
    assert rec.result_at(1).score == 1.0


# --- stepwise cascade -------------------------------------------------------------


def test_stepwise_cascade_hand_computed():
    records = [
        _rec((True, 1.0), (True, 0.75), (True, 1.0)),
        _rec((True, 1.0), (False, 0.25)),
        _rec((False, 0.0)),
        _rec((True, 0.5), (True, 1.0), (False, 0.25)),
    ]
    report = stepwise_evaluate(records, ("weigh", "dissolve", "observe"), task_id="demo")
    assert report.n_trials == 4
    assert [r.reached for r in report.rows] == [4, 3, 2]
    assert [r.sr for r in report.rows] == [0.75, 0.5, 0.25]
    assert report.rows[0].cr == pytest.approx(0.625)
    assert report.rows[1].cr == pytest.approx(2.0 / 3.0)
    assert report.rows[2].cr == pytest.approx(0.625)
    assert report.overall_sr == 0.25
    assert [r.label for r in report.rows] == ["weigh", "dissolve", "observe"]


def test_unreached_step_reports_no_cr():
    records = [_rec((False, 0.0)), _rec((False, 0.25))]
    report = stepwise_evaluate(records, ("first", "second"))
    assert report.rows[0].reached == 2
    assert report.rows[1].reached == 0
    assert report.rows[1].cr is None
    assert report.rows[1].sr == 0.0
    table = report.to_table()
    lines = table.splitlines()
    assert lines[0].split() == ["step", "label", "reached", "SR", "CR"]
    assert lines[2].split()[-1] == "-"
    assert lines[-1] == "overall SR over 2 trials: 0.0000"


def test_stepwise_rejects_records_longer_than_chain():
    with pytest.raises(ChainMismatch) as info:
        stepwise_evaluate([_rec((True, 1.0), (True, 1.0))], ("only",))
    assert (info.value.got, info.value.expected) == (2, 1)


def test_stepwise_rejects_empty():
    with pytest.raises(EmptyTrials):
        stepwise_evaluate([], ("a",))


def test_report_json_round_trip_sorted():
    report = stepwise_evaluate([_rec((True, 1.0))], ("only",), task_id="t")
    doc = json.loads(report.to_json())
    assert list(doc) == sorted(doc)
    assert doc["overall_sr"] == 1.0
    assert doc["rows"][0]["label"] == "only"


@settings(max_examples=120, deadline=None)
@given(
    st.lists(
        st.lists(
            st.tuples(st.booleans(), st.sampled_from(ALLOWED_SCORES)),
            max_size=4,
        ),
        min_size=1,
        max_size=25,
    )
)
def test_sr_and_reached_never_increase_along_the_chain(raw):
    records = [_rec(*pairs) for pairs in raw]
    report = stepwise_evaluate(records, ("a", "b", "c", "d"))
    srs = [r.sr for r in report.rows]
    reached = [r.reached for r in report.rows]
    assert all(x >= y for x, y in zip(srs, srs[1:]))
    assert all(x >= y for x, y in zip(reached, reached[1:]))
    for row in report.rows:
        assert (row.cr is None) == (row.reached == 0)
        if row.cr is not None:
            assert 0.0 <= row.cr <= 1.0


# --- building records from logs ---------------------------------------------------


def _log_doc(attempt_sets, final_status="succeeded", strict_flag=True):
    traces = []
    for attempts in attempt_sets:
        traces.append(
            {
                "final_status": "succeeded" if attempts and attempts[-1]["verdict"] else "retry_exhausted",
                "attempts": attempts,
            }
        )
    return {
        "config": {"task_id": "acid_base", "success_after_retry_counts": strict_flag},
        "traces": traces,
        "final_status": final_status,
    }


def _attempt(verdict, score=1.0, second=False):
    return {"verdict": verdict, "score": score, "second_attempt": second}


def test_from_log_relaxed_counts_retried_steps():
    doc = _log_doc([[_attempt(False, 0.0), _attempt(True, 1.0)]])
    rec = TrialRecord.from_log(doc)
    assert rec.steps[0].success is True
    assert rec.steps[0].score == 1.0  # last attempt's score
    assert rec.final_success is True


def test_from_log_strict_disqualifies_retries_and_second_attempts():
    retried = _log_doc([[_attempt(False, 0.0), _attempt(True, 1.0)]])
    assert TrialRecord.from_log(retried, success_after_retry_counts=False).steps[0].success is False

    second = _log_doc([[_attempt(True, 1.0, second=True)]])
    assert TrialRecord.from_log(second, success_after_retry_counts=False).steps[0].success is False

    clean = _log_doc([[_attempt(True, 1.0)]])
    assert TrialRecord.from_log(clean, success_after_retry_counts=False).steps[0].success is True


def test_from_log_strictness_defaults_to_config_flag():
    doc = _log_doc([[_attempt(False, 0.0), _attempt(True, 1.0)]], strict_flag=False)
    rec = TrialRecord.from_log(doc)  # picks up strict mode from the stored config
    assert rec.steps[0].success is False


def test_from_log_accepts_live_experiment_log():
    log = run_experiment(_config())
    rec = TrialRecord.from_log(log)
    assert rec.final_success is True
    assert len(rec.steps) == len(log.traces)
    assert rec.steps[0].success is True


def test_from_log_empty_attempts_scores_zero():
    doc = _log_doc([[]], final_status="timeout")
    rec = TrialRecord.from_log(doc)
    assert rec.steps[0] == StepResult(False, 0.0)
    assert rec.final_success is False


# --- campaigns --------------------------------------------------------------------


def test_campaign_matches_manual_trial_loop():
    config = _config(
        distributions={PrimitiveVerb.GRASP: success_failure(PrimitiveVerb.GRASP, 0.5)},
        max_outer_retries=0,
    )
    result = run_campaign(config, 6)
    manual = [run_experiment(config, trial_index=i).final_status for i in range(6)]
    assert result.statuses == manual
    assert result.n_trials == 6
    assert result.sr == sum(1 for s in manual if s == "succeeded") / 6
    assert result.report.task_id == "grasp_rod"
    assert result.report.n_trials == 6


def test_campaign_is_worker_count_invariant():
    config = _config(
        distributions={PrimitiveVerb.GRASP: success_failure(PrimitiveVerb.GRASP, 0.5)},
        max_outer_retries=1,
    )
    serial = run_campaign(config, 8, jobs=1)
    parallel = run_campaign(config, 8, jobs=2)
    assert serial.to_json() == parallel.to_json()


def test_campaign_records_per_trial_errors(monkeypatch):
    import labloop.metrics as metrics_mod

    real = run_experiment

    def flaky(config, *args, **kwargs):
        if kwargs.get("trial_index") == 1:
            raise RuntimeError("boom")
        return real(config, *args, **kwargs)

    monkeypatch.setattr(metrics_mod, "run_experiment", flaky)
    result = run_campaign(_config(), 3)
    assert result.statuses == ["succeeded", "error", "succeeded"]
    assert result.errors == [(1, "RuntimeError: boom")]
    assert result.records[1] == TrialRecord((), False)
    assert result.sr == pytest.approx(2.0 / 3.0)


def test_campaign_rejects_zero_trials():
    with pytest.raises(EmptyTrials):
        run_campaign(_config(), 0)


def test_campaign_keep_logs_retains_documents():
    result = run_campaign(_config(), 2, keep_logs=True)
    assert len(result.logs) == 2
    assert all(doc["config"]["task_id"] == "grasp_rod" for doc in result.logs)
    doc = json.loads(result.to_json())
    assert list(doc) == sorted(doc)
    assert doc["report"]["overall_sr"] == result.report.overall_sr


# --- offline aggregation ----------------------------------------------------------


def test_report_from_logs_matches_campaign():
    config = _config(
        distributions={PrimitiveVerb.GRASP: success_failure(PrimitiveVerb.GRASP, 0.5)},
        max_outer_retries=0,
    )
    docs = [run_experiment(config, trial_index=i).to_json_dict() for i in range(5)]
    offline = report_from_logs(docs)
    live = run_campaign(config, 5).report
    assert offline.to_json() == live.to_json()


def test_report_from_logs_rejects_mixed_tasks():
    a = run_experiment(_config()).to_json_dict()
    b = run_experiment(_config(task_id="stir_solution")).to_json_dict()
    with pytest.raises(MetricsError, match="mix"):
        report_from_logs([a, b])
    with pytest.raises(EmptyTrials):
        report_from_logs([])


def test_empty_chain_report_has_zero_overall_sr():
    report = TaskReport(task_id="x", chain=(), n_trials=3, rows=())
    assert report.overall_sr == 0.0
