"""A stand-in interactive prover for exercising the stdio adapter.

Live mode wraps the embedded prover in the stdio line protocol, so a full
episode can run end-to-end against a real child process. Replay mode
plays back a transcript file instead: output lines verbatim, and lines
starting with ``>>> `` marking the points where the child reads one line
of input. Failure scenarios simulate misbehaving provers.

Run as ``python -m givenclause.stdio_double PROBLEM.p`` or with
``--replay TRANSCRIPT``.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .backend import ProverStatus
from .clauses import render_clause
from .prover import EmbeddedProver
from .tptp import read_problem

PROMPT = "% select a given clause:"
UNSAT = "% SZS status Unsatisfiable"
SAT = "% SZS status Satisfiable"
READ_MARK = ">>> "


def _say(line: str) -> None:
    print(line, flush=True)


def run_live(problem_path: str, scenario: str = "normal") -> int:
    prover = EmbeddedProver()
    initial = prover.start(read_problem(problem_path))
    _say(f"% problem {Path(problem_path).name}: {len(initial)} input clauses")
    for clause in initial:
        _say(render_clause(clause, verbose=True))
    if scenario == "desync":
        _say("!!! unintelligible prover chatter")
        return 1
    selections = 0
    while True:
        _say(PROMPT)
        label = sys.stdin.readline()
        if not label:
            return 0  # environment went away
        selections += 1
        if scenario == "close-stream" and selections > 1:
            return 0  # simulate a crashing prover: silent exit
        if scenario == "slow" and selections > 1:
            time.sleep(2.0)
        result = prover.select(label.strip())
        for clause in result.new_clauses:
            _say(render_clause(clause, verbose=True))
        if result.status is ProverStatus.REFUTATION:
            _say(UNSAT)
            return 0
        if result.status is ProverStatus.SATURATED:
            _say(SAT)
            return 0


def run_replay(transcript_path: str) -> int:
    with open(transcript_path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if line.startswith(READ_MARK):
                if not sys.stdin.readline():
                    return 0
            else:
                _say(line)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("problem", nargs="?", help="TPTP problem file (live mode)")
    parser.add_argument("--replay", help="transcript file to play back")
    parser.add_argument(
        "--scenario",
        choices=("normal", "close-stream", "desync", "slow"),
        default="normal",
    )
    args = parser.parse_args(argv)
    if args.replay:
        return run_replay(args.replay)
    if not args.problem:
        parser.error("a problem file is required outside replay mode")
    return run_live(args.problem, scenario=args.scenario)


if __name__ == "__main__":
    sys.exit(main())
