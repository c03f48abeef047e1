"""Command line for the bridge: serve it, or check it against fixtures.

Exit codes follow the gateway convention: 0 success, 1 a run that completed
but failed (conformance mismatches, server crash), 2 unusable input (bad
config, missing fixtures).
"""
from __future__ import annotations

import argparse
import json
import sys

from .backend import FixtureMissing
from .config import ConfigError, load_config
from .conformance import run_conformance
from .server import serve


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labbridge",
        description="Bridge a chat VLM backend onto the lab gateway protocol.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve_p = sub.add_parser("serve", help="run the HTTP bridge")
    serve_p.add_argument("--config", help="JSON config file")
    serve_p.add_argument("--fixtures", help="answer from this fixture directory instead of a backend")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=0, help="0 picks a free port")
    serve_p.add_argument("--verbose", action="store_true", help="log requests to stderr")

    conf_p = sub.add_parser("conformance", help="replay fixtures and compare envelopes")
    conf_p.add_argument("--config", help="JSON config file")
    conf_p.add_argument("--fixtures", help="fixture directory (default: the packaged set)")
    conf_p.add_argument("--json", action="store_true", help="print the full report as JSON")
    return parser


def _cmd_serve(args) -> int:
    config = load_config(args.config)
    if args.fixtures is None and not config.backend_url:
        print("serve needs either --fixtures or a backend_url in the config", file=sys.stderr)
        return 2
    server = serve(config, host=args.host, port=args.port, fixture_dir=args.fixtures,
                   verbose=args.verbose)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _cmd_conformance(args) -> int:
    config = load_config(args.config)
    report = run_conformance(args.fixtures, config=config)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for fixture in report["fixtures"]:
            state = "ok" if fixture["ok"] else "MISMATCH"
            print(f"{fixture['name']:<28} {fixture['endpoint']:<14} {state}")
        verdict = "pass" if report["passed"] else "fail"
        print(
            f"{verdict}: {len(report['fixtures'])} fixtures over "
            f"{len(report['endpoints'])} endpoints"
            f" ({len(report['normalization_failures'])} normalization failures reported)"
        )
    return 0 if report["passed"] else 1


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "serve":
            return _cmd_serve(args)
        return _cmd_conformance(args)
    except (ConfigError, FixtureMissing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
