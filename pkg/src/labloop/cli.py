"""Command-line front end.

Exit codes, everywhere:
    0  the command did its job
    1  a runtime failure while doing it
    2  the input could not be parsed (plans, configs, marks, images, tasks)
    3  replay divergence: the rerun did not reproduce the stored log
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .episodes import (
    EpisodeError,
    EpisodeWriter,
    TRAINING_MIXES,
    generate_training_mix,
    read_episode,
    recorder_for,
)
from .gateway.httpserver import serve
from .gateway.mock import MockGateway
from .grammar import PlanError, format_primitive, parse_plan
from .marks import MarkParseError, parse_marks, render_marks, validate_marks
from .metrics import MetricsError, report_from_logs, run_campaign
from .orchestrator import ExperimentConfig, replay_experiment, run_experiment
from .raster import PpmError, RasterImage
from .simlab.fixtures import REGISTRY, UnknownTask

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INPUT = 2
EXIT_DIVERGED = 3

INPUT_ERRORS = (
    PlanError,
    MarkParseError,
    PpmError,
    UnknownTask,
    json.JSONDecodeError,
    FileNotFoundError,
    IsADirectoryError,
    MetricsError,
)


class InputProblem(Exception):
    pass


def _fail(message: str, code: int) -> int:
    print(f"labloop: {message}", file=sys.stderr)
    return code


def _add_config_flags(sub, *, seed_matters: bool = True):
    sub.add_argument("--task", help="task id (see `labloop run --list-tasks`)")
    if seed_matters:
        sub.add_argument("--seed", type=int, help="base RNG seed (required)")
    sub.add_argument("--config", help="JSON file of experiment settings; flags win")
    sub.add_argument("--retries", type=int, help="outer verify-retry budget per step")
    sub.add_argument("--until-cap", type=int, dest="until_cap", help="max until repetitions")
    sub.add_argument("--budget", type=int, help="inner-loop tick budget per step")
    sub.add_argument(
        "--second-attempt-prob",
        type=float,
        dest="second_attempt_prob",
        help="probability of an immediate second inner attempt after a failure",
    )
    sub.add_argument(
        "--no-prompt",
        dest="prompt",
        action="store_const",
        const=False,
        help="disable visual prompting",
    )
    sub.add_argument(
        "--lite",
        action="store_const",
        const=True,
        help="skip scene rendering (blank camera frames); much faster",
    )
    sub.add_argument(
        "--policy-done-ticks",
        type=int,
        dest="policy_done_ticks",
        help="ticks the scripted policy runs before reporting done",
    )


def _build_config(args) -> ExperimentConfig:
    doc = {}
    if getattr(args, "config", None):
        loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(loaded, dict):
            raise InputProblem("config file must hold a JSON object")
        doc.update(loaded)
    overlay = {
        "task_id": getattr(args, "task", None),
        "seed": getattr(args, "seed", None),
        "max_outer_retries": getattr(args, "retries", None),
        "max_until_repetitions": getattr(args, "until_cap", None),
        "inner_tick_budget": getattr(args, "budget", None),
        "inner_second_attempt_prob": getattr(args, "second_attempt_prob", None),
        "prompt_enabled": getattr(args, "prompt", None),
        "lite_views": getattr(args, "lite", None),
        "policy_done_ticks": getattr(args, "policy_done_ticks", None),
    }
    doc.update({k: v for k, v in overlay.items() if v is not None})
    if not doc.get("task_id"):
        raise InputProblem("a task is required (--task or config file)")
    if doc.get("seed") is None:
        raise InputProblem("a seed is required (--seed or config file)")
    return ExperimentConfig.from_json_dict(doc)


def _write_or_print(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cmd_run(args) -> int:
    if args.list_tasks:
        for task_id in sorted(REGISTRY):
            print(f"{task_id}\t{REGISTRY[task_id].title}")
        return EXIT_OK
    config = _build_config(args)
    recorder = None
    writer = None
    if args.record:
        writer = EpisodeWriter(args.record)
        recorder = recorder_for(writer)
    log = run_experiment(config, trial_index=args.trial, recorder=recorder)
    if writer is not None:
        retried = any(
            a["second_attempt"] or not a["verdict"]
            for t in log.to_json_dict()["traces"]
            for a in t["attempts"]
        )
        writer.finalize(config.task_id, "retry" if retried and log.succeeded else "success")
    doc = log.to_json_dict()
    if args.out:
        Path(args.out).write_text(log.to_json() + "\n", encoding="utf-8")
    elif args.json:
        print(log.to_json())
    steps_done = sum(1 for t in doc["traces"] if t["final_status"] == "succeeded")
    print(
        f"task={config.task_id} trial={args.trial} status={doc['final_status']} "
        f"steps={steps_done}/{len(doc['traces'])} wall_ms={doc['wall_ms']}",
        file=sys.stderr if args.json and not args.out else sys.stdout,
    )
    return EXIT_OK


def _cmd_campaign(args) -> int:
    config = _build_config(args)
    result = run_campaign(
        config,
        args.trials,
        jobs=args.jobs,
        success_after_retry_counts=False if args.strict_success else None,
    )
    if args.table:
        print(result.report.to_table())
    payload = result.to_json()
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    elif not args.table:
        print(payload)
    if result.errors:
        print(f"{len(result.errors)} trial(s) errored", file=sys.stderr)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    paths: list[Path] = []
    for raw in args.logs:
        p = Path(raw)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.json")))
        else:
            paths.append(p)
    if not paths:
        raise InputProblem("no log files found")
    docs = [json.loads(p.read_text(encoding="utf-8")) for p in paths]
    report = report_from_logs(
        docs, success_after_retry_counts=False if args.strict_success else None
    )
    print(report.to_table() if args.table else report.to_json())
    return EXIT_OK


def _cmd_parse_plan(args) -> int:
    if args.file:
        text = Path(args.file).read_text(encoding="utf-8")
    elif args.text is not None:
        text = args.text
    else:
        text = sys.stdin.read()
    plan = parse_plan(text)  # PlanError -> exit 2
    if args.json:
        print(plan.to_json())
    else:
        for i, step in enumerate(plan.steps, start=1):
            print(f"{i}. {format_primitive(step)}")
    return EXIT_OK


def _cmd_annotate(args) -> int:
    image = RasterImage.from_ppm(Path(args.image).read_bytes())
    marks = parse_marks(Path(args.marks).read_text(encoding="utf-8"))
    validate_marks(marks, image.width, image.height)
    out = render_marks(image, marks)
    Path(args.out).write_bytes(out.to_ppm())
    print(f"wrote {args.out} ({len(marks)} mark(s))")
    return EXIT_OK


def _cmd_serve_mock(args) -> int:
    gateway = MockGateway(policy_done_ticks=args.policy_done_ticks)
    server = serve(gateway, host=args.host, port=args.port)
    host, port = server.server_address[:2]
    print(f"mock gateway listening on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("shutting down")
    finally:
        server.server_close()
    return EXIT_OK


def _cmd_gen_dataset(args) -> int:
    if args.mix:
        n_success, n_retry = TRAINING_MIXES[args.mix]
    else:
        if args.success is None or args.retry is None:
            raise InputProblem("give --mix, or both --success and --retry")
        n_success, n_retry = args.success, args.retry
    manifest = generate_training_mix(
        args.out,
        n_success,
        n_retry,
        task_id=args.task or "grasp_rod",
        base_seed=args.seed,
        frame_scale=args.frame_scale,
    )
    print(
        f"wrote {manifest['counts']['success']} success + "
        f"{manifest['counts']['retry']} retry episode(s) to {args.out}"
    )
    return EXIT_OK


def _cmd_replay(args) -> int:
    doc = json.loads(Path(args.log).read_text(encoding="utf-8"))
    identical, diffs, _fresh = replay_experiment(doc)
    if identical:
        print("replay matches the stored log")
        return EXIT_OK
    print(f"replay diverged in: {', '.join(diffs)}", file=sys.stderr)
    return EXIT_DIVERGED


def _cmd_inspect_episode(args) -> int:
    episode = read_episode(args.dir)
    m = episode.manifest
    print(
        f"task={m['task_id']} kind={m['kind']} records={m['record_count']} "
        f"frames={m['frame_count']}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labloop",
        description="Simulated wet-lab benchmark: plan, execute, verify, score.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment end to end")
    _add_config_flags(p)
    p.add_argument("--trial", type=int, default=0, help="trial index (RNG substream)")
    p.add_argument("--out", help="write the experiment log JSON here")
    p.add_argument("--json", action="store_true", help="print the full log JSON to stdout")
    p.add_argument("--record", help="record policy ticks into this episode directory")
    p.add_argument("--list-tasks", action="store_true", help="list task ids and exit")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("campaign", help="run many trials and report SR/CR per step")
    _add_config_flags(p)
    p.add_argument("--trials", type=int, required=True, help="number of trials")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", help="write the campaign report JSON here")
    p.add_argument("--table", action="store_true", help="print an aligned text table")
    p.add_argument(
        "--strict-success",
        action="store_true",
        help="grade steps by first-attempt success (retries don't count)",
    )
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("evaluate", help="aggregate saved experiment logs")
    p.add_argument("--logs", nargs="+", required=True, help="log files or directories")
    p.add_argument("--table", action="store_true", help="print an aligned text table")
    p.add_argument("--strict-success", action="store_true")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("parse-plan", help="parse plan text into canonical steps")
    p.add_argument("--file", help="read the plan from this file")
    p.add_argument("--text", help="plan text on the command line")
    p.add_argument("--json", action="store_true", help="print the parsed plan as JSON")
    p.set_defaults(func=_cmd_parse_plan)

    p = sub.add_parser("annotate", help="draw visual marks onto a PPM image")
    p.add_argument("--image", required=True, help="input image (binary PPM)")
    p.add_argument("--marks", required=True, help="marks JSON file")
    p.add_argument("--out", required=True, help="output image path")
    p.set_defaults(func=_cmd_annotate)

    p = sub.add_parser("serve-mock", help="serve the mock gateway over HTTP")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8089)
    p.add_argument("--policy-done-ticks", type=int, dest="policy_done_ticks", default=20)
    p.set_defaults(func=_cmd_serve_mock)

    p = sub.add_parser("gen-dataset", help="write a scripted training-episode mix")
    p.add_argument("--out", required=True, help="dataset directory (must be empty)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--task", help="task id (default grasp_rod)")
    p.add_argument("--mix", choices=sorted(TRAINING_MIXES), help="named mix preset")
    p.add_argument("--success", type=int, help="success episode count")
    p.add_argument("--retry", type=int, help="retry episode count")
    p.add_argument("--frame-scale", type=int, dest="frame_scale", default=4,
                   help="frame downscale divisor (1 = full resolution)")
    p.set_defaults(func=_cmd_gen_dataset)

    p = sub.add_parser("replay", help="re-run a stored log and compare")
    p.add_argument("--log", required=True, help="experiment log JSON")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("inspect-episode", help="validate and summarize one episode")
    p.add_argument("--dir", required=True)
    p.set_defaults(func=_cmd_inspect_episode)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputProblem as exc:
        return _fail(str(exc), EXIT_INPUT)
    except INPUT_ERRORS as exc:
        return _fail(f"{type(exc).__name__}: {exc}", EXIT_INPUT)
    except EpisodeError as exc:
        return _fail(f"{type(exc).__name__}: {exc}", EXIT_RUNTIME)
    except Exception as exc:  # anything else is a runtime failure
        return _fail(f"{type(exc).__name__}: {exc}", EXIT_RUNTIME)


if __name__ == "__main__":
    sys.exit(main())
