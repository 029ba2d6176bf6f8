"""Child-process transport to the environment server.

The binding never links against the environment in-process: it spawns the
``givenclause serve-env`` command and exchanges one JSON record per line
over the child's pipes, strictly sequentially. If the server dies, the
next call raises with whatever diagnostics the child left on stderr.
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
import tempfile
from typing import Optional


class BindingError(RuntimeError):
    pass


class ServerCrashError(BindingError):
    """The env-server process went away; carries its stderr tail."""


class InvalidActionError(ValueError):
    """Masked or out-of-range action, surfaced as a native exception."""


class EpisodeFinishedError(RuntimeError):
    pass


class TaskError(ValueError):
    pass


_ERROR_TYPES = {
    "invalid_action": InvalidActionError,
    "episode_finished": EpisodeFinishedError,
    "task_error": TaskError,
    "value_error": ValueError,
    "not_ready": EpisodeFinishedError,
}


def default_server_command() -> list[str]:
    """The env-server executable, preferring the installed console script."""
    binary = shutil.which("givenclause")
    if binary:
        return [binary, "serve-env"]
    return [sys.executable, "-m", "givenclause", "serve-env"]


class EnvServerProcess:
    """One child env-server; commands are issued one at a time."""

    def __init__(self, command: Optional[list[str]] = None,
                 extra_args: Optional[list[str]] = None):
        full = list(command or default_server_command())
        if extra_args:
            full += list(extra_args)
        self._stderr_file = tempfile.TemporaryFile(mode="w+", encoding="utf-8")
        try:
            self._proc = subprocess.Popen(
                full,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=self._stderr_file,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ServerCrashError(f"cannot launch env-server {full!r}: {exc}") from exc
        self.command = full

    def _diagnostics(self) -> str:
        try:
            self._stderr_file.seek(0)
            tail = self._stderr_file.read()[-2000:]
        except (OSError, ValueError):
            tail = ""
        return tail.strip() or "(no server diagnostics)"

    def call(self, **command):
        if self._proc.poll() is not None:
            raise ServerCrashError(
                f"env-server exited with code {self._proc.returncode}: "
                f"{self._diagnostics()}"
            )
        try:
            self._proc.stdin.write(json.dumps(command) + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise ServerCrashError(
                f"env-server connection lost: {exc}; {self._diagnostics()}"
            ) from exc
        if not line:
            raise ServerCrashError(
                f"env-server closed its stream: {self._diagnostics()}"
            )
        reply = json.loads(line)
        if reply.get("ok"):
            return reply.get("result")
        error = reply.get("error") or {}
        kind = error.get("type", "unknown")
        message = error.get("message", "env-server error")
        if kind == "fatal":
            raise ServerCrashError(f"env-server fatal error: {message}")
        raise _ERROR_TYPES.get(kind, BindingError)(message)

    def close(self) -> None:
        """Close the transport and reap the child."""
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.terminate()
                try:
                    self._proc.wait(timeout=5)
                except subprocess.TimeoutExpired:
                    self._proc.kill()
                    self._proc.wait()
        self._stderr_file.close()

    @property
    def alive(self) -> bool:
        return self._proc.poll() is None
