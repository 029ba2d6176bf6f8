"""Clause embeddings: TPTP-to-expression rewriting, the HTTP client with
its in-process cache, and a deterministic stub service for tests.

Clauses are quantifier-free, so a clause rewrites cleanly into a boolean
expression in a conventional infix dialect: ``|`` becomes ``or``, ``~``
becomes ``not``, ``=`` becomes ``==``. Variables are lowercased behind a
``v_`` prefix so they cannot collide with the dialect's keywords. The
stub service validates submissions against the dialect's expression
grammar and answers with a hash-derived vector, so the whole HTTP path
can be exercised on loopback with no model involved.
"""

from __future__ import annotations

import ast
import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

import requests

from .clauses import parse_clause
from .terms import Literal, Term, Variable

DEFAULT_DIMENSION = 256
URL_ENV_VAR = "GIVENCLAUSE_EMBEDDING_URL"


class EmbeddingServiceError(RuntimeError):
    pass


class EmbeddingProtocolError(EmbeddingServiceError):
    pass


# --- TPTP -> expression rewriting ------------------------------------------


def _expr_term(term: Term) -> str:
    if isinstance(term, Variable):
        return f"v_{term.name.lower()}"
    if not term.args:
        return term.symbol
    return f"{term.symbol}({', '.join(_expr_term(a) for a in term.args)})"


def _expr_literal(literal: Literal) -> str:
    atom = literal.atom
    if atom.is_equality:
        left, right = atom.args
        op = "!=" if literal.negated else "=="
        return f"{_expr_term(left)} {op} {_expr_term(right)}"
    body = atom.predicate
    if atom.args:
        body += f"({', '.join(_expr_term(a) for a in atom.args)})"
    return f"not {body}" if literal.negated else body


def tptp_to_expr(literals: str) -> str:
    """Rewrite a TPTP clause into a boolean expression.

    The empty clause becomes the dialect's ``False`` literal. Output is
    always parseable by a standard expression grammar; the stub service
    enforces that on every request.
    """
    parsed = parse_clause(literals)
    if not parsed:
        return "False"
    return " or ".join(_expr_literal(lit) for lit in parsed)


# --- deterministic stub vectors ---------------------------------------------


def stub_vector(expression: str, dimension: int = DEFAULT_DIMENSION) -> list[float]:
    """Hash-expanded embedding: entry i derives from sha256(expr, i).

    Pure function of the text, entries in [-1, 1], stable across runs and
    platforms.
    """
    out = []
    for i in range(dimension):
        digest = hashlib.sha256(f"{expression}\x00{i}".encode("utf-8")).digest()
        value = int.from_bytes(digest[:8], "big")
        out.append(value / 2**64 * 2.0 - 1.0)
    return out


# --- latency accounting ------------------------------------------------------


@dataclass
class LatencyStats:
    count: int = 0
    mean: float = 0.0
    max: float = 0.0
    hits: int = 0
    misses: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def record(self, seconds: float, hit: bool) -> None:
        with self._lock:
            self.count += 1
            self.mean += (seconds - self.mean) / self.count
            self.max = max(self.max, seconds)
            if hit:
                self.hits += 1
            else:
                self.misses += 1

    @property
    def hit_ratio(self) -> float:
        return self.hits / self.count if self.count else 0.0


# --- the client --------------------------------------------------------------


class EmbeddingClient:
    """POSTs expressions to the embedding service, caching by expression.

    The cache guarantees at most one network fetch per expression even
    under concurrent callers: duplicate in-flight requests wait on the
    first one's result.
    """

    def __init__(
        self,
        url: Optional[str] = None,
        dimension: int = DEFAULT_DIMENSION,
        cache: bool = True,
        retries: int = 3,
        backoff: float = 0.05,
        timeout: float = 10.0,
        session: Optional[requests.Session] = None,
    ):
        self.url = url or os.environ.get(URL_ENV_VAR)
        if not self.url:
            raise EmbeddingServiceError(
                f"no embedding service URL configured (set {URL_ENV_VAR})"
            )
        self.dimension = dimension
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout
        self.stats = LatencyStats()
        self._session = session or requests.Session()
        self._cache: Optional[dict[str, list[float]]] = {} if cache else None
        self._lock = threading.Lock()
        self._in_flight: dict[str, threading.Event] = {}

    def embed(self, expression: str) -> list[float]:
        started = time.perf_counter()
        if self._cache is not None:
            while True:
                with self._lock:
                    if expression in self._cache:
                        vector = self._cache[expression]
                        self.stats.record(time.perf_counter() - started, hit=True)
                        return vector
                    waiter = self._in_flight.get(expression)
                    if waiter is None:
                        self._in_flight[expression] = threading.Event()
                        break
                waiter.wait()
            try:
                vector = self._fetch(expression)
                with self._lock:
                    self._cache[expression] = vector
            finally:
                with self._lock:
                    event = self._in_flight.pop(expression, None)
                if event is not None:
                    event.set()
        else:
            vector = self._fetch(expression)
        self.stats.record(time.perf_counter() - started, hit=False)
        return vector

    def _fetch(self, expression: str) -> list[float]:
        delay = self.backoff
        failure: Optional[Exception] = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(delay)
                delay *= 2
            try:
                response = self._session.post(
                    self.url, json={"expression": expression}, timeout=self.timeout
                )
            except requests.RequestException as exc:
                failure = exc
                continue
            if response.status_code != 200:
                raise EmbeddingProtocolError(
                    f"service answered {response.status_code}: {response.text[:200]}"
                )
            payload = response.json()
            vector = payload.get("vector")
            if not isinstance(vector, list) or len(vector) != self.dimension:
                actual = len(vector) if isinstance(vector, list) else type(vector)
                raise EmbeddingProtocolError(
                    f"expected a vector of length {self.dimension}, got {actual}"
                )
            return [float(v) for v in vector]
        raise EmbeddingServiceError(
            f"embedding request failed after {self.retries} retries: {failure}"
        )

    def embed_clause(self, literals: str) -> list[float]:
        return self.embed(tptp_to_expr(literals))


# --- the stub service ---------------------------------------------------------


class _StubHandler(BaseHTTPRequestHandler):
    dimension = DEFAULT_DIMENSION

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length)
        try:
            payload = json.loads(raw)
            expression = payload["expression"]
        except (ValueError, KeyError):
            self._reply(400, {"error": "body must be JSON with an 'expression' field"})
            return
        try:
            ast.parse(expression, mode="eval")
        except SyntaxError as exc:
            self._reply(400, {"error": f"expression does not parse: {exc}"})
            return
        self._reply(200, {"vector": stub_vector(expression, self.dimension)})

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, format, *args):
        pass


class StubEmbeddingServer:
    """Loopback HTTP service answering with deterministic stub vectors."""

    def __init__(self, port: int = 0, dimension: int = DEFAULT_DIMENSION):
        handler = type("Handler", (_StubHandler,), {"dimension": dimension})
        self._server = ThreadingHTTPServer(("127.0.0.1", port), handler)
        self._thread: Optional[threading.Thread] = None

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.port}/embeddings"

    def start(self) -> "StubEmbeddingServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc_info):
        self.stop()
