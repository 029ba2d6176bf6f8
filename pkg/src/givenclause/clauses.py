"""Clause records and TPTP CNF literal parsing/printing.

The proof state exchanged with provers is clause text in TPTP CNF syntax,
e.g. ``member(X0,bb) | ~member(X0,b)``. This module owns the round-trip
between that text and a structured form, plus the clause-level predicates
the rest of the toolkit needs (weight, tautology and variant checks).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .terms import (
    EQUALITY,
    Atom,
    Function,
    Literal,
    Term,
    Variable,
    literal_variables,
    render_literal,
    rename_literal,
)

# Rules whose clauses enter the proof state at birth step zero. The negated
# conjecture is introduced with the input problem, not derived.
INPUT_RULES = frozenset({"axiom", "input", "assumption", "negated_conjecture"})

FALSE = "$false"


class ClauseSyntaxError(ValueError):
    """Malformed TPTP CNF text; ``position`` is a character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnbalancedParentheses(ClauseSyntaxError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<neq>!=)
  | (?P<dollar>\$[a-z][a-zA-Z0-9_]*)
  | (?P<lword>[a-z][a-zA-Z0-9_]*)
  | (?P<uword>[A-Z][a-zA-Z0-9_]*)
  | (?P<int>\d+)
  | (?P<punct>[(),|~=.\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ClauseSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        if kind != "ws":
            value = match.group()
            tokens.append(Token(value if kind == "punct" else kind, value, pos))
        pos = match.end()
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[Token], length: int):
        self.tokens = tokens
        self.length = length
        self.index = 0

    def peek(self) -> Optional[Token]:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ClauseSyntaxError("unexpected end of input", self.length)
        self.index += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            pos = tok.pos if tok else self.length
            found = repr(tok.text) if tok else "end of input"
            if kind == ")":
                raise UnbalancedParentheses(f"expected ')', found {found}", pos)
            raise ClauseSyntaxError(f"expected {kind!r}, found {found}", pos)
        self.index += 1
        return tok


def _check_paren_balance(text: str) -> None:
    depth = 0
    for offset, char in enumerate(text):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
            if depth < 0:
                raise UnbalancedParentheses("unmatched ')'", offset)
    if depth > 0:
        raise UnbalancedParentheses("unclosed '('", len(text))


def _parse_term(stream: _TokenStream) -> Term:
    tok = stream.next()
    if tok.kind == "uword":
        return Variable(tok.text)
    if tok.kind in ("lword", "int"):
        args: tuple[Term, ...] = ()
        nxt = stream.peek()
        if nxt is not None and nxt.kind == "(":
            stream.next()
            parsed = [_parse_term(stream)]
            while stream.peek() is not None and stream.peek().kind == ",":
                stream.next()
                parsed.append(_parse_term(stream))
            stream.expect(")")
            args = tuple(parsed)
        return Function(tok.text, args)
    raise ClauseSyntaxError(f"expected a term, found {tok.text!r}", tok.pos)


def _parse_atom(stream: _TokenStream) -> tuple[Atom, bool]:
    """Parse one atom; returns (atom, negated_by_inequality)."""
    first = stream.peek()
    if first is None:
        raise ClauseSyntaxError("expected an atom", stream.length)
    term = _parse_term(stream)
    nxt = stream.peek()
    if nxt is not None and nxt.kind in ("=", "neq"):
        stream.next()
        right = _parse_term(stream)
        return Atom(EQUALITY, (term, right)), nxt.kind == "neq"
    if isinstance(term, Variable):
        raise ClauseSyntaxError(
            f"variable {term.name!r} cannot stand alone as an atom", first.pos
        )
    return Atom(term.symbol, term.args), False


def _parse_literal(stream: _TokenStream) -> Optional[Literal]:
    tok = stream.peek()
    if tok is None:
        raise ClauseSyntaxError("expected a literal", stream.length)
    if tok.kind == "dollar":
        if tok.text != FALSE:
            raise ClauseSyntaxError(f"unsupported defined atom {tok.text!r}", tok.pos)
        stream.next()
        return None
    if tok.kind == "~":
        stream.next()
        nxt = stream.peek()
        if nxt is not None and nxt.kind == "(":
            stream.next()
            atom, neq = _parse_atom(stream)
            stream.expect(")")
        else:
            atom, neq = _parse_atom(stream)
            if atom.is_equality and not neq:
                raise ClauseSyntaxError(
                    "negated equality must be written with != or ~( ... )", tok.pos
                )
        return Literal(not neq, atom)
    atom, neq = _parse_atom(stream)
    return Literal(neq, atom)


def _parse_disjunction(stream: _TokenStream) -> tuple[Literal, ...]:
    literals = []
    lit = _parse_literal(stream)
    if lit is not None:
        literals.append(lit)
    while stream.peek() is not None and stream.peek().kind == "|":
        stream.next()
        lit = _parse_literal(stream)
        if lit is not None:
            literals.append(lit)
    return tuple(literals)


def parse_clause(text: str) -> tuple[Literal, ...]:
    """Parse a TPTP CNF disjunction into literals, in textual order.

    ``$false`` yields the empty tuple. Raises :class:`ClauseSyntaxError`
    with a position on malformed input; unbalanced parentheses raise the
    :class:`UnbalancedParentheses` subclass.
    """
    _check_paren_balance(text)
    tokens = tokenize(text)
    stream = _TokenStream(tokens, len(text))
    first = stream.peek()
    if first is None:
        raise ClauseSyntaxError("empty clause text", 0)
    if first.kind == "(":
        # Outer parentheses wrap the whole disjunction, nothing else.
        stream.next()
        literals = _parse_disjunction(stream)
        stream.expect(")")
    else:
        literals = _parse_disjunction(stream)
    trailing = stream.peek()
    if trailing is not None:
        if trailing.kind == ")":
            raise UnbalancedParentheses("unmatched ')'", trailing.pos)
        raise ClauseSyntaxError(f"unexpected {trailing.text!r}", trailing.pos)
    return literals


def render_literals(literals: Iterable[Literal]) -> str:
    parts = [render_literal(lit) for lit in literals]
    return " | ".join(parts) if parts else FALSE


@dataclass(frozen=True)
class Clause:
    """One clause of the proof state.

    ``literals`` is the TPTP text; ``parsed_literals`` its structured form.
    ``label`` is the prover-assigned identifier (opaque text: some provers
    number clauses, others use alphanumeric labels such as ``c_54``).
    ``birth_step`` is the environment step at which the clause appeared;
    the environment stamps it when the clause enters the proof state.
    """

    literals: str
    parsed_literals: tuple[Literal, ...]
    label: str
    role: str = "plain"
    inference_rule: str = "input"
    inference_parents: tuple[str, ...] = ()
    birth_step: int = 0

    def __post_init__(self):
        if self.birth_step < 0:
            raise ValueError("birth_step must be non-negative")
        if self.inference_rule in ("axiom", "input") and self.inference_parents:
            raise ValueError(
                f"{self.inference_rule!r} clause cannot have inference parents"
            )

    @classmethod
    def from_text(
        cls,
        literals: str,
        label: str,
        role: str = "plain",
        inference_rule: str = "input",
        inference_parents: tuple[str, ...] = (),
        birth_step: int = 0,
    ) -> "Clause":
        return cls(
            literals=literals.strip(),
            parsed_literals=parse_clause(literals),
            label=label,
            role=role,
            inference_rule=inference_rule,
            inference_parents=tuple(inference_parents),
            birth_step=birth_step,
        )

    @classmethod
    def from_parsed(
        cls,
        parsed: tuple[Literal, ...],
        label: str,
        role: str = "plain",
        inference_rule: str = "input",
        inference_parents: tuple[str, ...] = (),
        birth_step: int = 0,
    ) -> "Clause":
        return cls(
            literals=render_literals(parsed),
            parsed_literals=tuple(parsed),
            label=label,
            role=role,
            inference_rule=inference_rule,
            inference_parents=tuple(inference_parents),
            birth_step=birth_step,
        )

    @property
    def is_empty(self) -> bool:
        return not self.parsed_literals

    def with_birth_step(self, step: int) -> "Clause":
        return replace(self, birth_step=step)

    def same_structure(self, other: "Clause") -> bool:
        """Equality on everything the clause text can carry (not birth_step)."""
        return (
            self.parsed_literals == other.parsed_literals
            and self.label == other.label
            and self.role == other.role
            and self.inference_rule == other.inference_rule
            and self.inference_parents == other.inference_parents
        )


def render_clause(clause: Clause, verbose: bool = False) -> str:
    """Render a clause back to TPTP text.

    The terse form is the literal disjunction only. The verbose form is a
    full ``cnf(label, role, literals).`` statement, with an
    ``inference(rule, [], [parents])`` annotation when the clause has
    parents. Both re-parse to an equal clause.
    """
    body = render_literals(clause.parsed_literals)
    if not verbose:
        return body
    if clause.inference_parents:
        parents = ", ".join(clause.inference_parents)
        annotation = f", inference({clause.inference_rule}, [], [{parents}])"
    else:
        annotation = ""
    return f"cnf({clause.label}, {clause.role}, {body}{annotation})."


def clause_weight(clause: Clause) -> int:
    """Total symbol-occurrence count over all literals.

    Counts predicate, function, constant and variable occurrences; the
    empty clause weighs 0. Equality counts as a predicate occurrence.
    """
    total = 0
    for lit in clause.parsed_literals:
        total += 1  # the predicate itself
        total += sum(_term_size(arg) for arg in lit.atom.args)
    return total


def _term_size(term: Term) -> int:
    if isinstance(term, Variable):
        return 1
    return 1 + sum(_term_size(a) for a in term.args)


def is_tautology(clause: Clause) -> bool:
    """True iff some literal's exact syntactic negation is also present."""
    seen = set()
    for lit in clause.parsed_literals:
        if (not lit.negated, lit.atom) in seen:
            return True
        seen.add((lit.negated, lit.atom))
    return False


def canonical_literals(literals: tuple[Literal, ...]) -> tuple[Literal, ...]:
    """Rename variables to X0, X1, ... in first-occurrence order."""
    mapping: dict[str, str] = {}
    for lit in literals:
        for name in literal_variables(lit):
            if name not in mapping:
                mapping[name] = f"X{len(mapping)}"
    return tuple(rename_literal(lit, mapping) for lit in literals)


def is_variant(a: Clause, b: Clause) -> bool:
    """True iff the clauses are equal modulo a renaming of variables.

    Literal order is significant; variants are detected by comparing
    canonical renamings, which is exact for ordered literal sequences.
    """
    return canonical_literals(a.parsed_literals) == canonical_literals(
        b.parsed_literals
    )
