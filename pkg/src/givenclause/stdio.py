"""Interactive-stdio prover adapter.

Drives a child prover that pauses its saturation loop at a prompt, reads
the chosen given-clause label from standard input, and writes newly
inferred clauses to standard output. Output lines are classified by a
configurable pattern set, because different provers (and versions) print
different grammars; the defaults match the bundled test double and the
golden transcripts pin them.
"""

from __future__ import annotations

import logging
import queue
import re
import subprocess
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Optional

from .backend import (
    BackendStartupError,
    ProtocolDesyncError,
    ProverStatus,
    SelectResult,
)
from .clauses import Clause, ClauseSyntaxError, render_clause
from .tptp import parse_cnf_line

log = logging.getLogger(__name__)

LINE_CLASSES = (
    "new_clause",
    "given_clause_prompt",
    "refutation_found",
    "saturation",
    "ignorable",
)


@dataclass
class LinePatterns:
    """Ordered line classification; first matching class wins."""

    new_clause: str = r"^cnf\(.*\)\.$"
    given_clause_prompt: str = r"^% select a given clause:$"
    refutation_found: str = r"^% SZS status Unsatisfiable\b.*$"
    saturation: str = r"^% SZS status (?:Satisfiable|CounterSatisfiable|GaveUp)\b.*$"
    ignorable: str = r"^(?:%.*|\s*)$"

    def classify(self, line: str) -> str:
        for name in LINE_CLASSES:
            if re.match(getattr(self, name), line):
                return name
        raise ProtocolDesyncError(f"unclassifiable prover output line: {line!r}")


@dataclass
class StdioAdapterConfig:
    executable_path: str
    argument_template: tuple[str, ...] = ("{problem}",)
    line_patterns: LinePatterns = field(default_factory=LinePatterns)
    read_timeout: float = 10.0
    line_budget: int = 10_000


class StdioTimeoutError(ProtocolDesyncError):
    pass


class _LineReader:
    """Reads child stdout on a thread so waits can be bounded."""

    def __init__(self, stream: IO[str]):
        self._queue: "queue.Queue[Optional[str]]" = queue.Queue()
        self._thread = threading.Thread(target=self._pump, args=(stream,), daemon=True)
        self._thread.start()

    def _pump(self, stream: IO[str]) -> None:
        try:
            for line in stream:
                self._queue.put(line.rstrip("\n"))
        except ValueError:
            pass  # stream closed under the reader
        finally:
            self._queue.put(None)

    def next_line(self, timeout: float) -> Optional[str]:
        """A line, or None at end of stream; raises on timeout."""
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            raise StdioTimeoutError(
                f"prover produced no output for {timeout:.1f}s"
            ) from None


class StdioProverAdapter:
    """Backend implementation over an interactive child prover.

    start() writes the problem to a temporary TPTP file, launches the
    child on it and consumes output up to the first given-clause prompt;
    select() writes one label and reads until the next prompt or a
    terminal status line.
    """

    def __init__(self, config: StdioAdapterConfig):
        self.config = config
        self._child: Optional[subprocess.Popen] = None
        self._reader: Optional[_LineReader] = None
        self._problem_file: Optional[Path] = None

    def start(self, problem: list[Clause]) -> list[Clause]:
        self.close()
        fd = tempfile.NamedTemporaryFile(
            "w", suffix=".p", prefix="givenclause_", delete=False
        )
        with fd:
            for clause in problem:
                fd.write(render_clause(clause, verbose=True) + "\n")
        self._problem_file = Path(fd.name)
        command = [self.config.executable_path] + [
            arg.format(problem=str(self._problem_file))
            for arg in self.config.argument_template
        ]
        try:
            self._child = subprocess.Popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise BackendStartupError(
                f"cannot launch prover {self.config.executable_path!r}: {exc}"
            ) from exc
        self._reader = _LineReader(self._child.stdout)
        initial, status = self._read_until_prompt()
        if status is not None:
            # the prover finished before asking for any selection; the
            # clauses (possibly including $false) still form the state
            log.warning("prover finished during startup with status %s", status)
        return initial

    def select(self, label: str) -> SelectResult:
        if self._child is None:
            raise BackendStartupError("select() before start()")
        try:
            self._child.stdin.write(label + "\n")
            self._child.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            log.warning("prover stdin closed during select: %s", exc)
            return SelectResult(status=ProverStatus.SATURATED)
        clauses, status = self._read_until_prompt()
        if status is None:
            return SelectResult(new_clauses=clauses, status=ProverStatus.RUNNING)
        return SelectResult(new_clauses=clauses, status=status)

    def _read_until_prompt(self) -> tuple[list[Clause], Optional[ProverStatus]]:
        patterns = self.config.line_patterns
        clauses: list[Clause] = []
        for _ in range(self.config.line_budget):
            line = self._reader.next_line(self.config.read_timeout)
            if line is None:
                log.warning("prover closed its output stream mid-protocol")
                return clauses, ProverStatus.SATURATED
            kind = patterns.classify(line)
            if kind == "new_clause":
                try:
                    clauses.append(parse_cnf_line(line))
                except ClauseSyntaxError as exc:
                    raise ProtocolDesyncError(
                        f"clause line does not parse: {line!r} ({exc})"
                    ) from exc
            elif kind == "given_clause_prompt":
                return clauses, None
            elif kind == "refutation_found":
                return clauses, ProverStatus.REFUTATION
            elif kind == "saturation":
                return clauses, ProverStatus.SATURATED
        raise ProtocolDesyncError(
            f"no prompt within {self.config.line_budget} output lines"
        )

    def close(self) -> None:
        if self._child is not None:
            try:
                self._child.stdin.close()
            except OSError:
                pass
            self._child.terminate()
            try:
                self._child.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._child.kill()
                self._child.wait(timeout=5)
            self._child = None
            self._reader = None
        if self._problem_file is not None:
            self._problem_file.unlink(missing_ok=True)
            self._problem_file = None
