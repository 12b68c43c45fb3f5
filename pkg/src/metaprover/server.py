"""Proof-session service: line-delimited JSON over a local socket.

One session per connection. Requests:
    {"cmd":"new_session","theory":T}
    {"cmd":"goal","text":S}
    {"cmd":"apply","tactic":NAME,"args":{...},"subgoal":I}
    {"cmd":"back"}  {"cmd":"undo"}  {"cmd":"rules"}  {"cmd":"state"}
Responses:
    {"ok":true,"state":{"goalText":...,"subgoals":[{"params":...,
        "assumptions":...,"goal":...}],"history_len":N}, ...}
    {"ok":false,"error":{"kind":...,"message":...,"position":...}}
Every request gets exactly one response; protocol errors never kill the
session. The optional HTTP bridge serves the same request objects over POST
/api (one request per call) plus the static browser UI, for clients that
cannot open raw sockets.
"""

from __future__ import annotations

import json
import os
import socket
import socketserver
import threading
from typing import Optional

from .session import Limits, Session, SessionError


def handle_request(sess_box: dict, req: dict) -> dict:
    """Dispatch one protocol request against the boxed session."""
    try:
        cmd = req.get("cmd")
        if cmd == "new_session":
            theory = req.get("theory", "NJ")
            sess_box["session"] = Session(theory)
            return ok_state(sess_box["session"])
        sess: Optional[Session] = sess_box.get("session")
        if sess is None:
            sess = sess_box["session"] = Session("NJ")
        if cmd == "goal":
            sess.cmd_goal(req.get("text", ""))
            return ok_state(sess)
        if cmd == "apply":
            text = _tactic_text(req)
            sess.cmd_by(text)
            return ok_state(sess)
        if cmd == "back":
            sess.cmd_back()
            return ok_state(sess)
        if cmd == "undo":
            sess.cmd_undo()
            return ok_state(sess)
        if cmd == "rules":
            out = ok_state(sess)
            out["rules"] = sess.rule_names()
            return out
        if cmd == "state":
            return ok_state(sess)
        if cmd == "qed":
            msg = sess.cmd_qed(req.get("name"))
            out = ok_state(sess)
            out["message"] = msg
            return out
        return err("UnknownCommand", f"unknown cmd {cmd!r}")
    except SessionError as e:
        return err(e.kind, e.message, e.position)
    except Exception as e:  # protocol totality: never crash the session
        return err(type(e).__name__, str(e))


def _tactic_text(req: dict) -> str:
    name = req.get("tactic", "")
    args = req.get("args", {}) or {}
    i = req.get("subgoal", 1)
    parts = [name]
    for r in args.get("rules", []):
        parts.append(r)
    for n in args.get("names", []):
        parts.append(n)
    if "text" in args:
        parts.append(f'"{args["text"]}"')
    if name not in ("auto",):
        parts.append(str(i))
    return "(" + " ".join(parts) + ")"


def ok_state(sess: Session) -> dict:
    return {"ok": True, "state": sess.state_summary()}


def err(kind: str, message: str, position=None) -> dict:
    return {"ok": False,
            "error": {"kind": kind, "message": message, "position": position}}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        box: dict = {}
        for raw in self.rfile:
            line = raw.decode("utf-8", "replace").strip()
            if not line:
                continue
            try:
                req = json.loads(line)
                resp = handle_request(box, req)
            except json.JSONDecodeError as e:
                resp = err("BadJSON", str(e))
            self.wfile.write((json.dumps(resp) + "\n").encode())
            self.wfile.flush()


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


def serve(host: str = "127.0.0.1", port: int = 7467,
          http_port: Optional[int] = None, background: bool = False):
    """Run the session service; sessions are per-connection and concurrent."""
    srv = _Server((host, port), _Handler)
    if http_port is not None:
        threading.Thread(target=_serve_http, args=(host, http_port),
                         daemon=True).start()
    if background:
        threading.Thread(target=srv.serve_forever, daemon=True).start()
        return srv
    print(f"metaprover serving on {host}:{port}"
          + (f" (http {http_port})" if http_port else ""))
    try:
        srv.serve_forever()
    except KeyboardInterrupt:
        pass
    return srv


# --------------------------------------------------------- http bridge

def _serve_http(host: str, port: int):
    from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

    static_dir = os.environ.get(
        "METAPROVER_UI",
        os.path.join(os.path.dirname(__file__), "..", "..", "frontend",
                     "dist"))
    sessions: dict[str, dict] = {}
    lock = threading.Lock()

    class H(BaseHTTPRequestHandler):
        def log_message(self, *a):
            pass

        def do_POST(self):
            if self.path != "/api":
                self.send_error(404)
                return
            n = int(self.headers.get("Content-Length", 0))
            body = self.rfile.read(n)
            sid = self.headers.get("X-Session", "default")
            try:
                req = json.loads(body)
                with lock:
                    box = sessions.setdefault(sid, {})
                resp = handle_request(box, req)
            except json.JSONDecodeError as e:
                resp = err("BadJSON", str(e))
            data = json.dumps(resp).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            path = self.path.split("?")[0]
            if path == "/":
                path = "/index.html"
            full = os.path.normpath(os.path.join(static_dir, path.lstrip("/")))
            if not full.startswith(os.path.normpath(static_dir)) \
                    or not os.path.isfile(full):
                self.send_error(404)
                return
            ctype = ("text/html" if full.endswith(".html")
                     else "text/javascript" if full.endswith(".js")
                     else "text/css" if full.endswith(".css")
                     else "application/octet-stream")
            with open(full, "rb") as fh:
                data = fh.read()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

    ThreadingHTTPServer((host, port), H).serve_forever()
