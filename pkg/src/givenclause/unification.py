"""Robinson unification with occurs check.

Substitutions are plain dicts from variable name to term, kept fully
resolved: no binding's image mentions a bound variable, so applying a
substitution twice equals applying it once.
"""

from __future__ import annotations

from typing import Optional

from .terms import Atom, Function, Literal, Term, Variable

Substitution = dict[str, Term]


def apply_to_term(subst: Substitution, term: Term) -> Term:
    if isinstance(term, Variable):
        return subst.get(term.name, term)
    if not term.args:
        return term
    return Function(term.symbol, tuple(apply_to_term(subst, a) for a in term.args))


def apply_to_atom(subst: Substitution, atom: Atom) -> Atom:
    return Atom(atom.predicate, tuple(apply_to_term(subst, a) for a in atom.args))


def apply_to_literal(subst: Substitution, literal: Literal) -> Literal:
    return Literal(literal.negated, apply_to_atom(subst, literal.atom))


def occurs_in(name: str, term: Term) -> bool:
    if isinstance(term, Variable):
        return term.name == name
    return any(occurs_in(name, a) for a in term.args)


def _bind(subst: Substitution, name: str, term: Term) -> bool:
    """Extend ``subst`` with name -> term; False on occurs-check failure."""
    if isinstance(term, Variable) and term.name == name:
        return True
    if occurs_in(name, term):
        return False
    binding = {name: term}
    for key in subst:
        subst[key] = apply_to_term(binding, subst[key])
    subst[name] = term
    return True


def unify(s: Term, t: Term) -> Optional[Substitution]:
    """Most general unifier of two terms, or None when none exists.

    Callers that do not intend shared variables must rename apart first.
    """
    subst: Substitution = {}
    stack = [(s, t)]
    while stack:
        left, right = stack.pop()
        left = apply_to_term(subst, left)
        right = apply_to_term(subst, right)
        if isinstance(left, Variable):
            if not _bind(subst, left.name, right):
                return None
        elif isinstance(right, Variable):
            if not _bind(subst, right.name, left):
                return None
        else:
            if left.symbol != right.symbol or len(left.args) != len(right.args):
                return None
            stack.extend(zip(left.args, right.args))
    return subst


def unify_atoms(a: Atom, b: Atom) -> Optional[Substitution]:
    if a.predicate != b.predicate or len(a.args) != len(b.args):
        return None
    return unify(Function(a.predicate, a.args), Function(b.predicate, b.args))
