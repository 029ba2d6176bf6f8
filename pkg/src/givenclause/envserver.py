"""Newline-delimited JSON command server around one environment.

This is the process boundary external bindings talk to: one JSON record
per line in, one per line out. Commands mirror the environment surface
(make, set_task, reset, step, render, close); replies carry either a
``result`` or a structured ``error`` record. A malformed command is
answered and the server keeps serving; using the environment after
``close`` is fatal.

Observations are serialized with every clause verbose-rendered (a full
``cnf(...).`` line re-parseable on the other side) and the action mask as
a plain number array.
"""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path
from typing import IO, Optional

from .clauses import render_clause
from .env import (
    EnvConfig,
    EpisodeFinishedError,
    InvalidActionError,
    Observation,
    SaturationEnv,
    StepOutcome,
)
from .tptp import ProblemFileError

FATAL_EXIT_CODE = 2


def serialize_observation(observation: Observation) -> dict:
    return {
        "real_obs": [
            render_clause(clause, verbose=True) for clause in observation.real_obs
        ],
        "action_mask": [float(v) for v in observation.action_mask],
    }


def serialize_outcome(outcome: StepOutcome) -> dict:
    return {
        "observation": serialize_observation(outcome.observation),
        "reward": outcome.reward,
        "terminated": outcome.terminated,
        "truncated": outcome.truncated,
        "info": outcome.info,
    }


def _ok(result) -> dict:
    return {"ok": True, "result": result}


def _err(kind: str, message: str) -> dict:
    return {"ok": False, "error": {"type": kind, "message": message}}


class EnvCommandServer:
    """One environment per server; dispatches one command at a time."""

    def __init__(self, config: Optional[EnvConfig] = None):
        self._config = config
        self._env: Optional[SaturationEnv] = None
        self._closed = False
        self.fatal = False

    def _ensure_env(self) -> SaturationEnv:
        if self._env is None:
            self._env = SaturationEnv(self._config or EnvConfig())
        return self._env

    def handle(self, line: str) -> dict:
        try:
            command = json.loads(line)
        except ValueError as exc:
            return _err("bad_command", f"not a JSON record: {exc}")
        if not isinstance(command, dict) or "cmd" not in command:
            return _err("bad_command", "record must be an object with a 'cmd' field")
        cmd = command["cmd"]
        if self._closed and cmd != "close":
            self.fatal = True
            return _err("fatal", f"command {cmd!r} after close")
        try:
            if cmd == "make":
                raw = dict(command.get("config") or {})
                known = {"max_clauses", "problem_path", "verbose_render", "backend"}
                unknown = set(raw) - known
                if unknown:
                    return _err("bad_command", f"unknown config fields: {sorted(unknown)}")
                backend = raw.pop("backend", None)
                if backend is not None and backend != "embedded":
                    return _err(
                        "bad_command",
                        "only the embedded backend is selectable per command; "
                        "configure external backends at server launch",
                    )
                # unspecified fields inherit the launch-time configuration;
                # external backend factories arrive via the launch flags
                base = self._config
                if base is not None:
                    raw.setdefault("max_clauses", base.max_clauses)
                    raw.setdefault("problem_path", base.problem_path)
                    raw.setdefault("verbose_render", base.verbose_render)
                    if backend is None:
                        raw["backend"] = base.backend
                self._config = EnvConfig(**raw)
                self._env = SaturationEnv(self._config)
                # basename only: replies stay byte-stable across machines
                return _ok(
                    {
                        "max_clauses": self._config.max_clauses,
                        "problem": Path(self._env.task_path).name,
                    }
                )
            if cmd == "set_task":
                if "path" not in command:
                    return _err("bad_command", "set_task needs a 'path'")
                self._ensure_env().set_task(command["path"])
                return _ok(None)
            if cmd == "reset":
                observation, info = self._ensure_env().reset(seed=command.get("seed"))
                return _ok(
                    {"observation": serialize_observation(observation), "info": info}
                )
            if cmd == "step":
                if "action" not in command:
                    return _err("bad_command", "step needs an 'action'")
                outcome = self._ensure_env().step(int(command["action"]))
                return _ok(serialize_outcome(outcome))
            if cmd == "render":
                text = self._ensure_env().render(mode=command.get("mode", "ansi"))
                return _ok({"text": text})
            if cmd == "close":
                if self._env is not None:
                    self._env.close()
                self._closed = True
                return _ok(None)
            return _err("bad_command", f"unknown command {cmd!r}")
        except InvalidActionError as exc:
            return _err("invalid_action", str(exc))
        except EpisodeFinishedError as exc:
            return _err("episode_finished", str(exc))
        except ProblemFileError as exc:
            return _err("task_error", str(exc))
        except (ValueError, TypeError) as exc:
            return _err("value_error", str(exc))
        except RuntimeError as exc:
            return _err("not_ready", str(exc))


def serve_streams(in_stream: IO[str], out_stream: IO[str],
                  config: Optional[EnvConfig] = None) -> int:
    """Serve commands from a line stream; returns the process exit code."""
    server = EnvCommandServer(config)
    for line in in_stream:
        if not line.strip():
            continue
        reply = server.handle(line)
        out_stream.write(json.dumps(reply, sort_keys=True) + "\n")
        out_stream.flush()
        if server.fatal:
            return FATAL_EXIT_CODE
    return 0


def serve_stdio(config: Optional[EnvConfig] = None) -> int:
    return serve_streams(sys.stdin, sys.stdout, config)


def serve_socket(port: int, host: str = "127.0.0.1",
                 config: Optional[EnvConfig] = None) -> int:
    """Bind, accept a single client, serve its command stream."""
    with socket.create_server((host, port)) as listener:
        print(
            json.dumps({"listening": listener.getsockname()[1]}),
            flush=True,
        )
        conn, _ = listener.accept()
        with conn:
            reader = conn.makefile("r", encoding="utf-8")
            writer = conn.makefile("w", encoding="utf-8")
            return serve_streams(reader, writer, config)
