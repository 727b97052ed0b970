"""Command-line client for the tangentcalc service.

Every verb is a thin HTTP call: against an in-process instance of the
service by default, or against a remote one via --server.  Exit codes:
0 on success / all checks passing, 1 on failures or evaluation errors,
2 on usage errors (argparse).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx


def _wrap_last(source: str, template: str) -> str:
    """Apply an operator to the final expression of a document."""
    trimmed = source.rstrip()
    if trimmed.endswith(";"):
        trimmed = trimmed[:-1]
    head, sep, last = trimmed.rpartition(";")
    wrapped = template.format(last.strip())
    return f"{head}; {wrapped}" if sep else wrapped


def _with_dimension(source: str, m) -> str:
    if m is None:
        return source
    return f"m={m}; {source}"


async def _call(server: str | None, method: str, path: str, payload=None):
    if server:
        async with httpx.AsyncClient(base_url=server, timeout=None) as client:
            resp = await client.request(method, path, json=payload)
            return resp.status_code, resp.json()
    from .service import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(
        transport=transport, base_url="http://tangentcalc.local", timeout=None
    ) as client:
        resp = await client.request(method, path, json=payload)
        return resp.status_code, resp.json()


def _request(server, method, path, payload=None):
    return asyncio.run(_call(server, method, path, payload))


def _print_error(body) -> None:
    detail = body.get("detail", body) if isinstance(body, dict) else body
    if isinstance(detail, dict):
        msg = detail.get("message", str(detail))
        if detail.get("line") is not None:
            msg += f" (line {detail['line']}, column {detail.get('column')})"
        print(f"error: {detail.get('type', 'Error')}: {msg}", file=sys.stderr)
    else:
        print(f"error: {detail}", file=sys.stderr)


def _eval_command(args, source: str) -> int:
    payload = {"source": source, "format": args.format}
    status, body = _request(args.server, "POST", "/eval", payload)
    if status != 200:
        _print_error(body)
        return 1
    result = body["result"]
    if args.format == "json":
        print(json.dumps(result, indent=2))
    else:
        print(result)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tangentcalc",
        description="Exact exterior calculus on tangent charts: evaluate "
        "DSL expressions, apply lifts and derivations, verify the identity "
        "suite, and check chart transitions.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service (default: run in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_eval_like(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("source", help="DSL document or expression")
        p.add_argument("--m", type=int, default=None, help="prepend m=<int>")
        p.add_argument(
            "--format", choices=["text", "latex", "json"], default="text"
        )
        return p

    add_eval_like("eval", "parse, normalize and render an expression")
    add_eval_like("d", "exterior derivative of the final expression")
    add_eval_like("db", "almost-tangent derivative d_B of the final expression")
    lift = add_eval_like("lift", "lift the final (base) expression to TM")
    lift.add_argument(
        "--kind",
        choices=["complete", "vertical", "pull"],
        default="complete",
    )
    lie = add_eval_like("lie", "Lie derivative of the final expression")
    lie.add_argument(
        "--field",
        required=True,
        help="field or endomorphism expression (e.g. 'xi', 'B', 'v1*ddx1')",
    )

    verify = sub.add_parser("verify", help="run the identity verification suite")
    verify.add_argument("--m", default="1,2,3", help="comma-separated chart dimensions")
    verify.add_argument("--cases", type=int, default=25)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--filter", default=None, help="substring filter on identity ids")
    verify.add_argument(
        "--numeric",
        action="store_true",
        help="also re-check every identity with central differences",
    )
    verify.add_argument("--format", choices=["text", "json"], default="text")

    tc = sub.add_parser("transition-check", help="validate a chart transition")
    tc.add_argument("--m", type=int, required=True)
    tc.add_argument(
        "--forward",
        action="append",
        required=True,
        help="component of the forward map (repeat m times)",
    )
    tc.add_argument(
        "--inverse",
        action="append",
        required=True,
        help="component of the exact inverse map (repeat m times)",
    )
    tc.add_argument("--seed", type=int, default=0)
    tc.add_argument("--cases", type=int, default=5)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    if args.command == "verify":
        payload = {
            "m_values": [int(x) for x in str(args.m).split(",") if x.strip()],
            "cases": args.cases,
            "seed": args.seed,
            "filter": args.filter,
            "numeric": args.numeric,
        }
        status, body = _request(args.server, "POST", "/verify", payload)
        if status != 200:
            _print_error(body)
            return 1
        if args.format == "json":
            print(json.dumps(body["report"], indent=2))
        else:
            print(body["text"])
        return 0 if body["ok"] else 1

    if args.command == "transition-check":
        payload = {
            "m": args.m,
            "forward": args.forward,
            "inverse": args.inverse,
            "seed": args.seed,
            "cases": args.cases,
        }
        status, body = _request(args.server, "POST", "/transition-check", payload)
        if status != 200:
            _print_error(body)
            return 1
        print(f"coherence identity: {'PASS' if body['consistent'] else 'FAIL'}")
        for kind, ok in body["naturality"].items():
            print(f"naturality[{kind}]: {'PASS' if ok else 'FAIL'}")
        print(
            "volume factor = squared Jacobian determinant: "
            f"{'PASS' if body['volume_factor_is_squared_jacobian'] else 'FAIL'}"
        )
        return 0 if body["ok"] else 1

    source = _with_dimension(args.source, args.m)
    if args.command == "d":
        source = _wrap_last(source, "d({})")
    elif args.command == "db":
        source = _wrap_last(source, "db({})")
    elif args.command == "lift":
        op = {"complete": "clift", "vertical": "vlift", "pull": "pull"}[args.kind]
        source = _wrap_last(source, op + "({})")
    elif args.command == "lie":
        source = _wrap_last(source, "lie(" + args.field + ", {})")
    return _eval_command(args, source)


if __name__ == "__main__":
    sys.exit(main())
