"""TCP relay between a client-style prover and the environment.

Some provers act as TCP *clients*: they push observation requests to a
server and block until it answers with an action. The relay accepts one
such long-running connection, parks incoming requests on a thread-safe
queue for the environment to consume, and writes queued responses back to
the live connection, preserving FIFO order in both directions.

The wire format is one JSON record per line with explicit ``kind``,
``tag`` and ``payload`` fields. It lives behind :class:`RelayCodec` so a
real prover's schema can be swapped in without touching the queue
machinery.
"""

from __future__ import annotations

import json
import logging
import queue
import socket
import threading
from dataclasses import dataclass
from typing import Callable, Optional

from .backend import (
    BackendStartupError,
    ProverStatus,
    SelectResult,
)
from .clauses import Clause

log = logging.getLogger(__name__)


class RelayError(RuntimeError):
    pass


class RelayTimeout(RelayError):
    pass


class RelayDisconnected(RelayError):
    pass


class TagMismatchError(RelayError):
    pass


@dataclass
class RelayMessage:
    kind: str  # "request" | "response"
    tag: int
    payload: dict


class RelayCodec:
    """Newline-delimited JSON records; one message per line."""

    def encode(self, message: RelayMessage) -> bytes:
        record = {"kind": message.kind, "tag": message.tag, "payload": message.payload}
        return (json.dumps(record, sort_keys=True) + "\n").encode("utf-8")

    def decode(self, line: bytes) -> RelayMessage:
        try:
            record = json.loads(line.decode("utf-8"))
            return RelayMessage(
                kind=record["kind"], tag=int(record["tag"]), payload=record["payload"]
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise RelayError(f"undecodable relay record: {line[:200]!r}") from exc


_DISCONNECT = object()


class RelayServer:
    """One prover connection at a time; reconnection starts fresh.

    The reader thread feeds the request queue; the writer thread drains
    the response queue into the socket. The queues are the only state
    shared with the environment task.
    """

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 0,
        codec: Optional[RelayCodec] = None,
        accept_timeout: float = 30.0,
    ):
        self.codec = codec or RelayCodec()
        self.accept_timeout = accept_timeout
        self._listener = socket.create_server((host, port))
        self._listener.settimeout(accept_timeout)
        self._requests: "queue.Queue" = queue.Queue()
        self._responses: "queue.Queue[RelayMessage]" = queue.Queue()
        self._conn: Optional[socket.socket] = None
        self._conn_lock = threading.Lock()
        self._reader: Optional[threading.Thread] = None
        self._writer: Optional[threading.Thread] = None
        self._last_request_tag = 0
        self._unanswered: set[int] = set()
        self._closed = False

    @property
    def address(self) -> tuple[str, int]:
        return self._listener.getsockname()[:2]

    @property
    def port(self) -> int:
        return self.address[1]

    def accept(self) -> None:
        """Block until a prover connects, then serve its traffic."""
        try:
            conn, peer = self._listener.accept()
        except socket.timeout:
            raise RelayTimeout(
                f"no prover connected within {self.accept_timeout:.0f}s"
            ) from None
        log.info("relay: prover connected from %s", peer)
        self._attach(conn)

    def _attach(self, conn: socket.socket) -> None:
        with self._conn_lock:
            if self._conn is not None:
                try:
                    self._conn.close()
                except OSError:
                    pass
            self._conn = conn
            self._last_request_tag = 0
            self._unanswered = set()
            # fresh queues per connection: a dying reader's sentinel must
            # never poison the next episode
            requests: "queue.Queue" = queue.Queue()
            responses: "queue.Queue" = queue.Queue()
            self._requests = requests
            self._responses = responses
        self._reader = threading.Thread(
            target=self._read_loop, args=(conn, requests, responses), daemon=True
        )
        self._writer = threading.Thread(
            target=self._write_loop, args=(conn, responses), daemon=True
        )
        self._reader.start()
        self._writer.start()

    def _read_loop(self, conn, requests, responses) -> None:
        buffer = b""
        try:
            while True:
                chunk = conn.recv(65536)
                if not chunk:
                    break
                buffer += chunk
                while b"\n" in buffer:
                    line, buffer = buffer.split(b"\n", 1)
                    if not line.strip():
                        continue
                    message = self.codec.decode(line)
                    if message.kind != "request":
                        raise RelayError(f"expected a request, got {message.kind!r}")
                    if message.tag <= self._last_request_tag:
                        raise RelayError(
                            f"request tags must increase: got {message.tag} "
                            f"after {self._last_request_tag}"
                        )
                    self._last_request_tag = message.tag
                    self._unanswered.add(message.tag)
                    requests.put(message)
        except (OSError, RelayError) as exc:
            if not self._closed:
                log.warning("relay reader stopped: %s", exc)
        finally:
            requests.put(_DISCONNECT)
            responses.put(None)  # unblock the writer

    def _write_loop(self, conn, responses) -> None:
        while True:
            message = responses.get()
            if message is None:
                return
            try:
                conn.sendall(self.codec.encode(message))
            except OSError as exc:
                if not self._closed:
                    log.warning("relay writer stopped: %s", exc)
                return

    def next_request(self, timeout: Optional[float] = None) -> RelayMessage:
        try:
            item = self._requests.get(timeout=timeout)
        except queue.Empty:
            raise RelayTimeout(f"no prover request within {timeout}s") from None
        if item is _DISCONNECT:
            raise RelayDisconnected("prover connection closed")
        return item

    def post_response(self, message: RelayMessage) -> None:
        if message.kind != "response":
            raise RelayError(f"can only post responses, got {message.kind!r}")
        if message.tag not in self._unanswered:
            raise TagMismatchError(
                f"response tag {message.tag} does not match an open request"
            )
        self._unanswered.discard(message.tag)
        self._responses.put(message)

    def close(self) -> None:
        self._closed = True
        self._responses.put(None)
        with self._conn_lock:
            if self._conn is not None:
                try:
                    self._conn.shutdown(socket.SHUT_RDWR)
                except OSError:
                    pass
                self._conn.close()
                self._conn = None
        self._listener.close()


def serialize_clause(clause: Clause) -> dict:
    return {
        "literals": clause.literals,
        "label": clause.label,
        "role": clause.role,
        "inference_rule": clause.inference_rule,
        "inference_parents": list(clause.inference_parents),
    }


def deserialize_clause(record: dict) -> Clause:
    return Clause.from_text(
        record["literals"],
        label=record["label"],
        role=record.get("role", "plain"),
        inference_rule=record.get("inference_rule", "input"),
        inference_parents=tuple(record.get("inference_parents", ())),
    )


_STATUSES = {
    "running": ProverStatus.RUNNING,
    "refutation": ProverStatus.REFUTATION,
    "saturated": ProverStatus.SATURATED,
}


class RelayBackend:
    """Backend over the relay: the prover initiates; we answer.

    ``client_launcher`` (when given) is invoked with the problem clauses
    at every start, e.g. to spin up the bundled embedded-prover client;
    leave it None when an external prover connects on its own.
    """

    def __init__(
        self,
        server: RelayServer,
        client_launcher: Optional[Callable[[list[Clause]], None]] = None,
        request_timeout: float = 30.0,
        owns_server: bool = False,
    ):
        self.server = server
        self.client_launcher = client_launcher
        self.request_timeout = request_timeout
        self.owns_server = owns_server
        self._pending_tag: Optional[int] = None

    def start(self, problem: list[Clause]) -> list[Clause]:
        if self.client_launcher is not None:
            self.client_launcher(list(problem))
        self.server.accept()
        try:
            request = self.server.next_request(timeout=self.request_timeout)
        except (RelayTimeout, RelayDisconnected) as exc:
            raise BackendStartupError(f"relay backend got no initial request: {exc}")
        self._pending_tag = request.tag
        return [deserialize_clause(r) for r in request.payload.get("clauses", [])]

    def select(self, label: str) -> SelectResult:
        if self._pending_tag is None:
            raise BackendStartupError("select() before start()")
        self.server.post_response(
            RelayMessage(kind="response", tag=self._pending_tag, payload={"given": label})
        )
        try:
            request = self.server.next_request(timeout=self.request_timeout)
        except RelayDisconnected:
            log.warning("prover disconnected mid-episode; reporting saturation")
            self._pending_tag = None
            return SelectResult(status=ProverStatus.SATURATED)
        self._pending_tag = request.tag
        payload = request.payload
        status = _STATUSES.get(payload.get("status", "running"))
        if status is None:
            raise RelayError(f"unknown prover status {payload.get('status')!r}")
        return SelectResult(
            new_clauses=[deserialize_clause(r) for r in payload.get("clauses", [])],
            eliminated_labels=list(payload.get("eliminated", [])),
            status=status,
        )

    def close(self) -> None:
        if self.owns_server:
            self.server.close()


def run_embedded_client(
    problem: list[Clause],
    host: str,
    port: int,
    codec: Optional[RelayCodec] = None,
) -> None:
    """The relay test double: an embedded prover speaking the client side
    of the protocol over a real socket."""
    from .prover import EmbeddedProver

    codec = codec or RelayCodec()
    conn = socket.create_connection((host, port), timeout=30.0)
    reader = conn.makefile("rb")
    try:
        prover = EmbeddedProver()
        initial = prover.start(problem)
        tag = 1
        conn.sendall(
            codec.encode(
                RelayMessage(
                    kind="request",
                    tag=tag,
                    payload={
                        "clauses": [serialize_clause(c) for c in initial],
                        "status": "running",
                    },
                )
            )
        )
        while True:
            line = reader.readline()
            if not line:
                return
            response = codec.decode(line)
            result = prover.select(response.payload["given"])
            tag += 1
            conn.sendall(
                codec.encode(
                    RelayMessage(
                        kind="request",
                        tag=tag,
                        payload={
                            "clauses": [serialize_clause(c) for c in result.new_clauses],
                            "status": result.status.value,
                        },
                    )
                )
            )
            if result.status is not ProverStatus.RUNNING:
                return
    finally:
        reader.close()
        conn.close()


def launch_embedded_client_thread(host: str, port: int) -> Callable[[list[Clause]], None]:
    """client_launcher wiring for RelayBackend: one daemon thread per episode."""

    def launch(problem: list[Clause]) -> None:
        thread = threading.Thread(
            target=run_embedded_client, args=(problem, host, port), daemon=True
        )
        thread.start()

    return launch
