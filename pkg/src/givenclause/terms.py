"""First-order terms, atoms and literals in the shape TPTP CNF uses them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

EQUALITY = "="


@dataclass(frozen=True)
class Variable:
    """A first-order variable. TPTP variables start with an uppercase letter."""

    name: str

    def __post_init__(self):
        if not self.name or not self.name[0].isupper():
            raise ValueError(f"variable name must start uppercase: {self.name!r}")


@dataclass(frozen=True)
class Function:
    """A function application; constants are 0-ary functions."""

    symbol: str
    args: tuple["Term", ...] = ()


Term = Union[Variable, Function]


@dataclass(frozen=True)
class Atom:
    """A predicate applied to terms. Equality is the predicate ``=`` with two args."""

    predicate: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if self.predicate == EQUALITY and len(self.args) != 2:
            raise ValueError("equality atom needs exactly two argument terms")

    @property
    def is_equality(self) -> bool:
        return self.predicate == EQUALITY


@dataclass(frozen=True)
class Literal:
    negated: bool
    atom: Atom

    def complement(self) -> "Literal":
        return Literal(not self.negated, self.atom)


def term_variables(term: Term) -> Iterator[str]:
    """Yield variable names in ``term`` in left-to-right occurrence order."""
    if isinstance(term, Variable):
        yield term.name
    else:
        for arg in term.args:
            yield from term_variables(arg)


def literal_variables(literal: Literal) -> Iterator[str]:
    for arg in literal.atom.args:
        yield from term_variables(arg)


def term_symbol_count(term: Term) -> int:
    """Occurrences of function, constant and variable symbols in ``term``."""
    if isinstance(term, Variable):
        return 1
    return 1 + sum(term_symbol_count(a) for a in term.args)


def rename_term(term: Term, mapping: dict[str, str]) -> Term:
    if isinstance(term, Variable):
        return Variable(mapping.get(term.name, term.name))
    return Function(term.symbol, tuple(rename_term(a, mapping) for a in term.args))


def rename_literal(literal: Literal, mapping: dict[str, str]) -> Literal:
    atom = Atom(
        literal.atom.predicate,
        tuple(rename_term(a, mapping) for a in literal.atom.args),
    )
    return Literal(literal.negated, atom)


def render_term(term: Term) -> str:
    if isinstance(term, Variable):
        return term.name
    if not term.args:
        return term.symbol
    return f"{term.symbol}({','.join(render_term(a) for a in term.args)})"


def render_literal(literal: Literal) -> str:
    atom = literal.atom
    if atom.is_equality:
        left, right = atom.args
        op = "!=" if literal.negated else "="
        return f"{render_term(left)} {op} {render_term(right)}"
    body = atom.predicate
    if atom.args:
        body += f"({','.join(render_term(a) for a in atom.args)})"
    return ("~" + body) if literal.negated else body
