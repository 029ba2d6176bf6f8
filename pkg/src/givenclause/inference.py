"""Binary resolution and factoring.

Derived clauses come out with canonically renamed variables (X0, X1, ...
in first-occurrence order) so that episode traces are reproducible no
matter how the inputs were renamed apart. Exact duplicate literals are
merged, keeping the first occurrence.
"""

from __future__ import annotations

from .clauses import Clause, canonical_literals
from .terms import Literal, literal_variables, rename_literal
from .unification import apply_to_literal, unify_atoms


def _dedupe(literals: list[Literal]) -> tuple[Literal, ...]:
    seen = set()
    kept = []
    for lit in literals:
        if lit not in seen:
            seen.add(lit)
            kept.append(lit)
    return tuple(kept)


def rename_apart(
    literals: tuple[Literal, ...], avoid: set[str]
) -> tuple[Literal, ...]:
    """Rename every variable to a fresh name outside ``avoid``."""
    mapping: dict[str, str] = {}
    counter = 0
    for lit in literals:
        for name in literal_variables(lit):
            if name not in mapping:
                fresh = f"Y{counter}"
                counter += 1
                while fresh in avoid:
                    fresh = f"Y{counter}"
                    counter += 1
                mapping[name] = fresh
    return tuple(rename_literal(lit, mapping) for lit in literals)


def clause_variable_names(clause: Clause) -> set[str]:
    names: set[str] = set()
    for lit in clause.parsed_literals:
        names.update(literal_variables(lit))
    return names


def resolvents(given: Clause, partner: Clause) -> list[Clause]:
    """All binary resolvents of two clauses already renamed apart.

    One resolvent per unifiable complementary literal pair, in
    (given-literal, partner-literal) order.
    """
    out = []
    for i, lit_g in enumerate(given.parsed_literals):
        for j, lit_p in enumerate(partner.parsed_literals):
            if lit_g.negated == lit_p.negated:
                continue
            mgu = unify_atoms(lit_g.atom, lit_p.atom)
            if mgu is None:
                continue
            rest = [
                apply_to_literal(mgu, lit)
                for k, lit in enumerate(given.parsed_literals)
                if k != i
            ]
            rest += [
                apply_to_literal(mgu, lit)
                for k, lit in enumerate(partner.parsed_literals)
                if k != j
            ]
            out.append(
                Clause.from_parsed(
                    canonical_literals(_dedupe(rest)),
                    label="",
                    role="plain",
                    inference_rule="resolution",
                    inference_parents=(given.label, partner.label),
                )
            )
    return out


def factors(clause: Clause) -> list[Clause]:
    """All binary factors of a clause.

    One factor per unifiable same-polarity literal pair (i < j); the pair
    merges under the mgu, so the j-th literal is dropped.
    """
    out = []
    lits = clause.parsed_literals
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            if lits[i].negated != lits[j].negated:
                continue
            mgu = unify_atoms(lits[i].atom, lits[j].atom)
            if mgu is None:
                continue
            merged = [
                apply_to_literal(mgu, lit)
                for k, lit in enumerate(lits)
                if k != j
            ]
            out.append(
                Clause.from_parsed(
                    canonical_literals(_dedupe(merged)),
                    label="",
                    role="plain",
                    inference_rule="factoring",
                    inference_parents=(clause.label,),
                )
            )
    return out


def self_resolvents(given: Clause) -> list[Clause]:
    """Resolvents of a clause against a renamed-apart copy of itself."""
    avoid = clause_variable_names(given)
    copy = Clause.from_parsed(
        rename_apart(given.parsed_literals, avoid),
        label=given.label,
        role=given.role,
        inference_rule=given.inference_rule,
        inference_parents=given.inference_parents,
        birth_step=given.birth_step,
    )
    return resolvents(given, copy)
