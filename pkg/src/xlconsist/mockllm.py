"""Canned-answer chat-completions endpoint for tests and smoke runs.

Serves the wire format the collection client speaks, answering the last
user message from a question -> answer map (defaults to the bundled
fixture answers). Unknown questions get a stable hash-derived reply so
runs stay deterministic.

    python -m xlconsist.mockllm --port 8089
    python -m xlconsist.mockllm --answers my_answers.json
"""

from __future__ import annotations

import argparse
import hashlib
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path


def fallback_answer(question: str) -> str:
    digest = hashlib.sha256(question.encode("utf-8")).hexdigest()
    return f"unknown-{digest[:8]}"


class MockLLMServer:
    """In-process server; tracks in-flight request high-water mark."""

    def __init__(self, answers: dict[str, str], port: int = 0, latency: float = 0.0):
        self.answers = dict(answers)
        self.latency = latency
        self.request_count = 0
        self.max_in_flight = 0
        self._in_flight = 0
        self._stats_lock = threading.Lock()
        self._server = ThreadingHTTPServer(("127.0.0.1", port), self._make_handler())
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self._server.server_address[1]}/v1/chat/completions"

    def start(self) -> "MockLLMServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    def _make_handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                with server._stats_lock:
                    server.request_count += 1
                    server._in_flight += 1
                    server.max_in_flight = max(server.max_in_flight, server._in_flight)
                try:
                    if server.latency:
                        time.sleep(server.latency)
                    length = int(self.headers.get("Content-Length", 0))
                    payload = json.loads(self.rfile.read(length))
                    question = ""
                    for message in reversed(payload.get("messages", [])):
                        if message.get("role") == "user":
                            question = message.get("content", "")
                            break
                    content = server.answers.get(question) or fallback_answer(question)
                    body = json.dumps(
                        {"choices": [{"message": {"role": "assistant", "content": content}}]},
                        ensure_ascii=False,
                    ).encode("utf-8")
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                finally:
                    with server._stats_lock:
                        server._in_flight -= 1

            def do_GET(self):
                self.send_response(200)
                self.end_headers()
                self.wfile.write(b"ok")

            def log_message(self, *args):
                pass

        return Handler


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--port", type=int, default=8089)
    parser.add_argument("--answers", type=Path, default=None,
                        help="JSON file mapping question text to answer")
    parser.add_argument("--latency", type=float, default=0.0)
    args = parser.parse_args(argv)

    if args.answers:
        answers = json.loads(args.answers.read_text(encoding="utf-8"))
    else:
        from .fixtures import bundled_answers_path

        answers = json.loads(bundled_answers_path().read_text(encoding="utf-8"))

    server = MockLLMServer(answers, port=args.port, latency=args.latency)
    print(f"mock chat endpoint on {server.url} ({len(answers)} canned answers)")
    try:
        server.start()._thread.join()
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()
