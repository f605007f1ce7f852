"""Thin command-line client for the experiment service.

Subcommands ``validate``, ``synth``, ``run``, and ``curve`` build a request,
send it to the service (in-process by default, ``--server URL`` for a
remote instance), and write the returned artifacts; ``serve`` starts the
HTTP service.  Exit codes: 0 success/pass, 2 eavesdropping detected,
1 configuration error (no report file is written in that case).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from importlib import resources
from pathlib import Path

import httpx
import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EAVESDROP = 2

SEED_ENV = "SEMIQNET_SEED"
WORKERS_ENV = "SEMIQNET_WORKERS"


def _load_network_document(ref: str) -> dict:
    """Resolve a path or a bundled fixture name (fig2, fig5, fig6)."""
    path = Path(ref)
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    fixture = resources.files("semiqnet") / "fixtures" / f"{ref}.json"
    if fixture.is_file():
        return json.loads(fixture.read_text(encoding="utf-8"))
    raise FileNotFoundError(f"network spec {ref!r}: no such file or bundled fixture")


def _post(server: str | None, route: str, payload: dict) -> httpx.Response:
    async def go() -> httpx.Response:
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=None) as client:
                return await client.post(route, json=payload)
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://semiqnet.local", timeout=None
        ) as client:
            return await client.post(route, json=payload)

    return asyncio.run(go())


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_CONFIG


def _check(response: httpx.Response) -> dict | None:
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        print(f"error: {detail}", file=sys.stderr)
        return None
    return response.json()


def _resolve_seed(args: argparse.Namespace) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        return int(env)
    return None


def _parse_grid(text: str) -> list[float]:
    if ":" in text:
        start, stop, count = text.split(":")
        return [float(v) for v in np.linspace(float(start), float(stop), int(count))]
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        doc = _load_network_document(args.network)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    body = _check(_post(args.server, "/validate", {"network": doc}))
    if body is None:
        return EXIT_CONFIG
    for v in body["violations"]:
        print(f"violation: {v}")
    for w in body["warnings"]:
        print(f"warning: {w}")
    if body["ok"]:
        dims = " ".join(f"{k}={v}" for k, v in sorted(body["participant_dimensions"].items()))
        print(f"ok (subsystem dimensions: {dims})")
        return EXIT_OK
    return EXIT_CONFIG


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        doc = _load_network_document(args.network)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    body = _check(_post(args.server, "/synth", {"network": doc, "protocol": args.protocol}))
    if body is None:
        return EXIT_CONFIG
    lines = list(body["amplitudes"])
    lines.append(f"schmidt vector: ({','.join(str(r) for r in body['schmidt'])})")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    if seed is None:
        return _fail(f"--seed is required (or set {SEED_ENV})")
    payload: dict = {
        "protocol": args.protocol,
        "rounds": args.rounds,
        "seed": seed,
        "attack": args.attack,
        "tolerance": args.tolerance,
        "analyses": args.analyses.split(","),
        "workers": int(os.environ.get(WORKERS_ENV, "1")),
    }
    if args.decoy_rate is not None:
        payload["decoy_rate"] = args.decoy_rate
    if args.protocol != "sqkd07":
        if not args.network:
            return _fail("--network is required for multiparty protocols")
        try:
            payload["network"] = _load_network_document(args.network)
        except (OSError, ValueError) as exc:
            return _fail(str(exc))
        payload["network_label"] = args.network
    if args.attack_unitaries:
        try:
            payload["attack_unitaries"] = json.loads(
                Path(args.attack_unitaries).read_text(encoding="utf-8")
            )
        except (OSError, ValueError) as exc:
            return _fail(str(exc))

    body = _check(_post(args.server, "/run", payload))
    if body is None:
        return EXIT_CONFIG
    out = Path(args.out)
    out.write_text(body["report"], encoding="utf-8")
    out.with_suffix(out.suffix + ".meta.json").write_text(
        json.dumps({"generated_utc": body["generated_utc"]}, indent=2) + "\n",
        encoding="utf-8",
    )
    print(f"verdict: {body['verdict']}  report: {out}")
    return EXIT_OK if body["verdict"] == "pass" else EXIT_EAVESDROP


def cmd_curve(args: argparse.Namespace) -> int:
    try:
        doc = _load_network_document(args.network)
        grid = _parse_grid(args.grid)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    payload = {
        "protocol": args.protocol,
        "network": doc,
        "targets": args.targets.split(","),
        "legs": args.legs,
        "phi_scale": args.phi_scale,
        "grid": grid,
        "rounds": args.rounds,
        "seed": _resolve_seed(args) or 0,
        "layer": args.layer,
    }
    body = _check(_post(args.server, "/curve", payload))
    if body is None:
        return EXIT_CONFIG
    if args.out:
        Path(args.out).write_text(body["csv"], encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(body["csv"], end="")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semiqnet",
        description="Layered semi-quantum key distribution and secret sharing simulator",
    )
    parser.add_argument("--server", default=None, help="remote service URL (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network spec document")
    p.add_argument("--network", required=True, help="path or bundled fixture (fig2/fig5/fig6)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="print a resource state and its Schmidt vector")
    p.add_argument("--network", required=True)
    p.add_argument("--protocol", required=True, choices=["lsqkd", "lsqss", "ilskss"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="run a protocol session and write a report")
    p.add_argument("--protocol", required=True, choices=["lsqkd", "lsqss", "ilskss", "sqkd07"])
    p.add_argument("--network", default=None)
    p.add_argument("--rounds", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--attack", default=None, help="kind:targets[:legs][:params]")
    p.add_argument("--attack-unitaries", default=None, help="JSON file with explicit matrices")
    p.add_argument("--decoy-rate", type=float, default=None)
    p.add_argument("--tolerance", type=float, default=0.0)
    p.add_argument("--analyses", default="detection,rates")
    p.add_argument("--out", default="report.txt")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("curve", help="detection/information tradeoff across an attack family")
    p.add_argument("--protocol", required=True, choices=["lsqkd", "lsqss", "ilskss"])
    p.add_argument("--network", required=True)
    p.add_argument("--targets", required=True, help="comma-separated CP ids")
    p.add_argument("--legs", default="fb")
    p.add_argument("--phi-scale", type=float, default=1.0)
    p.add_argument("--grid", required=True, help="start:stop:count or comma list")
    p.add_argument("--rounds", type=int, default=0, help="sampled rounds per point (0 = exact only)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--layer", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
