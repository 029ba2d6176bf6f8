"""Embedded reference saturation prover.

A small given-clause loop over binary resolution and factoring with
tautology and variant elimination. It exists so the whole environment
stack can run and be tested without any external prover binary; it makes
no attempt at performance parity with real provers.

Clause generation order within a step is fixed: resolvents against
processed clauses in processing order (literal pairs in textual order),
then resolvents against a renamed copy of the given clause itself, then
factors of the given clause. Episodes are therefore fully deterministic
for a given action sequence.
"""

from __future__ import annotations

from dataclasses import replace

from .backend import ProverStatus, SelectResult, UnknownClauseError
from .clauses import Clause, canonical_literals, is_tautology
from .inference import (
    clause_variable_names,
    factors,
    rename_apart,
    resolvents,
    self_resolvents,
)


class EmbeddedProver:
    """Deterministic in-process backend implementing the Backend protocol."""

    def __init__(self):
        self._clauses: dict[str, Clause] = {}
        self._order: list[str] = []
        self._processed: list[str] = []
        self._unprocessed: set[str] = set()
        self._seen: set[tuple] = set()
        self._next_label = 0
        self._has_empty = False

    def start(self, problem: list[Clause]) -> list[Clause]:
        self.__init__()
        initial = []
        for clause in problem:
            relabeled = replace(clause, label=str(self._next_label))
            self._next_label += 1
            self._admit(relabeled)
            initial.append(relabeled)
        return initial

    def _admit(self, clause: Clause) -> None:
        self._clauses[clause.label] = clause
        self._order.append(clause.label)
        self._unprocessed.add(clause.label)
        self._seen.add(canonical_literals(clause.parsed_literals))
        if clause.is_empty:
            self._has_empty = True

    def select(self, label: str) -> SelectResult:
        if label not in self._clauses:
            raise UnknownClauseError(f"no clause labelled {label!r}")
        if label not in self._unprocessed:
            raise UnknownClauseError(f"clause {label!r} was already processed")
        given = self._clauses[label]
        given_vars = clause_variable_names(given)

        candidates: list[Clause] = []
        for partner_label in self._processed:
            partner = self._clauses[partner_label]
            partner_apart = Clause.from_parsed(
                rename_apart(partner.parsed_literals, given_vars),
                label=partner.label,
                role=partner.role,
                inference_rule=partner.inference_rule,
                inference_parents=partner.inference_parents,
                birth_step=partner.birth_step,
            )
            candidates.extend(resolvents(given, partner_apart))
        candidates.extend(self_resolvents(given))
        candidates.extend(factors(given))

        self._unprocessed.remove(label)
        self._processed.append(label)

        new_clauses = []
        for candidate in candidates:
            if is_tautology(candidate):
                continue
            key = canonical_literals(candidate.parsed_literals)
            if key in self._seen:
                continue
            accepted = replace(candidate, label=str(self._next_label))
            self._next_label += 1
            self._admit(accepted)
            new_clauses.append(accepted)

        if self._has_empty:
            status = ProverStatus.REFUTATION
        elif not self._unprocessed:
            status = ProverStatus.SATURATED
        else:
            status = ProverStatus.RUNNING
        return SelectResult(new_clauses=new_clauses, eliminated_labels=[], status=status)

    def close(self) -> None:
        pass
