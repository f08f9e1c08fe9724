"""Thin command-line client for the experiment service.

By default the CLI runs against an in-process instance of the FastAPI app
(no server needed, batch semantics preserved); --server URL targets a
running instance instead.  Result CSVs land in --out; exit codes are
0 success, 1 config error, 2 numeric failure, 3 validation-threshold
failure.

The PVT_THREADS environment variable caps Monte Carlo worker parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .experiments import COMMANDS, EXIT_CONFIG


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pvtnet",
        description="Energy-efficiency evaluation of Poisson-Voronoi cellular networks.")
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH", help="flat key = value config file")
    src.add_argument("--profile", metavar="NAME", help="packaged parameter profile")
    ap.add_argument("--out", metavar="DIR", default=".", help="output directory for CSVs")
    ap.add_argument("--seed", type=int, metavar="N")
    ap.add_argument("--trials", type=int, metavar="N", help="MC trials per sweep point")
    ap.add_argument("--ratios", metavar="A:B:STEP", help="ratio sweep, a:b:step or comma list")
    ap.add_argument("--server", metavar="URL",
                    help="run against a remote service instead of in-process")
    ap.add_argument("--json", action="store_true", dest="as_json",
                    help="print the full response summary as JSON")
    return ap


def _post(args) -> dict:
    payload = {
        "profile": args.profile,
        "config": Path(args.config).read_text() if args.config else None,
        "ratios": args.ratios,
        "trials": args.trials,
        "seed": args.seed,
    }
    url_path = f"/v1/experiments/{args.command}"
    if args.server:
        import httpx

        resp = httpx.post(args.server.rstrip("/") + url_path, json=payload, timeout=None)
    else:
        from fastapi.testclient import TestClient

        from .service import app

        with TestClient(app) as client:
            resp = client.post(url_path, json=payload)
    if resp.status_code != 200:
        detail = resp.json().get("detail", resp.text) if resp.content else resp.text
        raise SystemExit_WithCode(f"request failed ({resp.status_code}): {detail}",
                                  EXIT_CONFIG if resp.status_code in (400, 422) else 2)
    return resp.json()


class SystemExit_WithCode(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.config and not os.path.exists(args.config):
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        body = _post(args)
    except SystemExit_WithCode as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for item in body["files"]:
        (out_dir / item["name"]).write_text(item["content"])
    for line in body["log"]:
        print(line, file=sys.stderr)
    if args.as_json:
        print(json.dumps({k: body[k] for k in ("command", "exit_code",
                                               "config_digest", "summary")}, indent=2))
    else:
        print(f"{body['command']}: exit={body['exit_code']} "
              f"digest={body['config_digest']} files={len(body['files'])} -> {out_dir}")
        for key, val in body["summary"].items():
            print(f"  {key}: {val}")
    return int(body["exit_code"])


if __name__ == "__main__":
    sys.exit(main())
