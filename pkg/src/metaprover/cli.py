"""Command line face: batch proof scripts, a terminal REPL, the Pelletier
benchmark, and the session service.

Exit codes: 0 all proofs complete, 1 a command failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .session import Limits, Session, SessionError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="metaprover")
    sub = p.add_subparsers(dest="command")

    def add_limits(sp):
        sp.add_argument("--theory", default="NJ")
        sp.add_argument("--unify-depth", type=int, default=48)
        sp.add_argument("--search-depth", type=int, default=400)
        sp.add_argument("--budget-nodes", type=int, default=50_000)
        sp.add_argument("--timeout-ms", type=int, default=10_000)

    runp = sub.add_parser("run", help="run a proof script")
    runp.add_argument("script")
    runp.add_argument("--report", help="write per-theorem statistics here")
    add_limits(runp)

    replp = sub.add_parser("repl", help="interactive proof loop")
    add_limits(replp)

    pelp = sub.add_parser("pelletier", help="run the Pelletier benchmark")
    pelp.add_argument("--select", help="problem numbers, e.g. 1,2,5-10")
    pelp.add_argument("--report", help="write the report here")
    pelp.add_argument("--theory", default="LK")
    pelp.add_argument("--budget-nodes", type=int, default=50_000)
    pelp.add_argument("--timeout-ms", type=int, default=10_000)

    servep = sub.add_parser("serve", help="serve proof sessions over JSON")
    servep.add_argument("--listen", default="127.0.0.1:7467")
    servep.add_argument("--http", type=int, default=None,
                        help="also serve the protocol and UI over HTTP")
    return p


def limits_from(args) -> Limits:
    return Limits(unify_depth=args.unify_depth,
                  search_depth=args.search_depth,
                  budget_nodes=args.budget_nodes,
                  timeout_ms=args.timeout_ms)


def cmd_run(args) -> int:
    try:
        with open(args.script) as fh:
            lines = fh.readlines()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    sess = Session(args.theory, limits_from(args))
    failed = False
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("--"):
            continue
        try:
            msg = sess.command(line)
            if msg:
                print(f"> {stripped}")
                print(msg)
        except SessionError as e:
            print(f"> {stripped}")
            print(f"{args.script}:{lineno}: {e.kind}: {e.message}",
                  file=sys.stderr)
            print(sess.render_state(), file=sys.stderr)
            failed = True
            break
    if sess.state is not None and not failed:
        print("warning: script ended with an open goal", file=sys.stderr)
        failed = True
    if args.report:
        _write_report(args.report, sess)
    return 1 if failed else 0


def _write_report(path: str, sess: Session):
    import json
    lines = [f"{s['problem']:<16} {s['status']:<8} nodes={s['nodes']:<8} "
             f"millis={s['millis']}" for s in sess.stats]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(path + ".json", "w") as fh:
        json.dump(sess.stats, fh, indent=0)
        fh.write("\n")


def cmd_repl(args) -> int:
    sess = Session(args.theory, limits_from(args))
    print(f"metaprover repl — theory {args.theory}; "
          "commands: theory goal by back undo print rules qed quit")
    while True:
        try:
            line = input("> ")
        except EOFError:
            print()
            return 0
        if line.strip() in ("quit", "exit"):
            return 0
        try:
            msg = sess.command(line)
            if msg:
                print(msg)
        except SessionError as e:
            print(f"{e.kind}: {e.message}")
    return 0


def _parse_selection(text):
    if not text:
        return None
    out = []
    for chunk in text.split(","):
        if "-" in chunk:
            a, b = chunk.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(chunk))
    return out


def cmd_pelletier(args) -> int:
    from .logics import get_theory
    from .prover import pelletier_run
    thy = get_theory(args.theory)
    rep = pelletier_run(thy, selection=_parse_selection(args.select),
                        budget_nodes=args.budget_nodes,
                        timeout_ms=args.timeout_ms)
    print(rep.render_text())
    if args.report:
        rep.write(args.report)
    return 0


def cmd_serve(args) -> int:
    from .server import serve
    host, _, port = args.listen.rpartition(":")
    serve(host or "127.0.0.1", int(port), http_port=args.http)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "repl":
        return cmd_repl(args)
    if args.command == "pelletier":
        return cmd_pelletier(args)
    if args.command == "serve":
        return cmd_serve(args)
    parser.print_help()
    return 2


if __name__ == "__main__":
    sys.exit(main())
