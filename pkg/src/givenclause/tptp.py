"""Reading TPTP problem files (CNF statements only).

Accepts ``cnf(name, role, formula).`` statements, ``%`` comments and
``include('...')`` directives resolved against a configurable axiom root.
FOF/TFF statements are out of scope: a file containing them is rejected.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Optional

from .clauses import (
    Clause,
    ClauseSyntaxError,
    _parse_disjunction,
    _TokenStream,
    tokenize,
)

# A negated_conjecture enters the state as itself; other named roles map
# onto the generic 'input' rule.
_ROLE_RULES = {"axiom": "axiom", "negated_conjecture": "negated_conjecture",
               "assumption": "assumption"}


class ProblemFileError(ValueError):
    """A TPTP problem file could not be read or parsed."""


_QUOTED_RE = re.compile(r"'([^']*)'")
_COMMENT_RE = re.compile(r"%[^\n]*")


def _strip_comments(text: str) -> str:
    return _COMMENT_RE.sub("", text)


def _rule_for_role(role: str) -> str:
    return _ROLE_RULES.get(role, "input")


def _skip_balanced(stream: _TokenStream) -> None:
    """Consume tokens up to, not including, the ')' that closes depth 0."""
    depth = 0
    while True:
        tok = stream.peek()
        if tok is None:
            raise ClauseSyntaxError("unterminated annotation", stream.length)
        if tok.kind == "(" or tok.kind == "[":
            depth += 1
        elif tok.kind == ")":
            if depth == 0:
                return
            depth -= 1
        elif tok.kind == "]":
            depth -= 1
        stream.next()


def _parse_label_token(stream: _TokenStream) -> str:
    tok = stream.next()
    if tok.kind not in ("lword", "uword", "int"):
        raise ClauseSyntaxError(f"expected a label, found {tok.text!r}", tok.pos)
    return tok.text


def _parse_inference(stream: _TokenStream) -> tuple[str, tuple[str, ...]]:
    stream.expect("(")
    rule_tok = stream.next()
    if rule_tok.kind != "lword":
        raise ClauseSyntaxError(
            f"expected an inference rule name, found {rule_tok.text!r}", rule_tok.pos
        )
    stream.expect(",")
    stream.expect("[")
    _skip_info_list(stream)
    stream.expect("]")
    stream.expect(",")
    stream.expect("[")
    parents: list[str] = []
    if stream.peek() is not None and stream.peek().kind != "]":
        parents.append(_parse_label_token(stream))
        while stream.peek() is not None and stream.peek().kind == ",":
            stream.next()
            parents.append(_parse_label_token(stream))
    stream.expect("]")
    stream.expect(")")
    return rule_tok.text, tuple(parents)


def _skip_info_list(stream: _TokenStream) -> None:
    depth = 0
    while True:
        tok = stream.peek()
        if tok is None:
            raise ClauseSyntaxError("unterminated info list", stream.length)
        if tok.kind in ("(", "["):
            depth += 1
        elif tok.kind == "]":
            if depth == 0:
                return
            depth -= 1
        elif tok.kind == ")":
            depth -= 1
        stream.next()


def _parse_cnf_statement(stream: _TokenStream, birth_step: int = 0) -> Clause:
    """Parse from the '(' after the ``cnf`` keyword through the final ')'."""
    stream.expect("(")
    label = _parse_label_token(stream)
    stream.expect(",")
    role_tok = stream.next()
    if role_tok.kind != "lword":
        raise ClauseSyntaxError(f"expected a role, found {role_tok.text!r}", role_tok.pos)
    role = role_tok.text
    stream.expect(",")
    nxt = stream.peek()
    if nxt is not None and nxt.kind == "(":
        stream.next()
        literals = _parse_disjunction(stream)
        stream.expect(")")
    else:
        literals = _parse_disjunction(stream)
    rule = _rule_for_role(role)
    parents: tuple[str, ...] = ()
    if stream.peek() is not None and stream.peek().kind == ",":
        stream.next()
        ann = stream.peek()
        if ann is not None and ann.kind == "lword" and ann.text == "inference":
            stream.next()
            rule, parents = _parse_inference(stream)
            if stream.peek() is not None and stream.peek().kind == ",":
                stream.next()
                _skip_balanced(stream)
        else:
            _skip_balanced(stream)
    stream.expect(")")
    return Clause.from_parsed(
        literals,
        label=label,
        role=role,
        inference_rule=rule,
        inference_parents=parents,
        birth_step=birth_step,
    )


def parse_cnf_line(text: str, birth_step: int = 0) -> Clause:
    """Parse one ``cnf(label, role, formula[, annotation]).`` statement."""
    tokens = tokenize(_strip_comments(text))
    stream = _TokenStream(tokens, len(text))
    head = stream.next()
    if head.kind != "lword" or head.text != "cnf":
        raise ClauseSyntaxError(f"expected 'cnf', found {head.text!r}", head.pos)
    clause = _parse_cnf_statement(stream, birth_step=birth_step)
    stream.expect(".")
    if stream.peek() is not None:
        raise ClauseSyntaxError(f"unexpected {stream.peek().text!r}", stream.peek().pos)
    return clause


def read_problem(path: str | Path, axiom_root: Optional[str | Path] = None) -> list[Clause]:
    """Read every clause of a TPTP CNF problem file, includes resolved.

    ``include(...)`` paths are resolved against ``axiom_root`` when given,
    otherwise against the directory of the including file.
    """
    path = Path(path)
    if not path.is_file():
        raise ProblemFileError(f"problem file not found: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    return _parse_problem_text(text, path, axiom_root)


def _parse_problem_text(
    text: str, path: Path, axiom_root: Optional[str | Path]
) -> list[Clause]:
    stripped = _strip_comments(text)
    # include('...') carries a quoted path our clause tokenizer does not
    # know about; pull those directives out before tokenizing.
    clauses: list[Clause] = []
    for statement in _split_statements(stripped, path):
        match = re.match(r"\s*include\s*\(\s*'([^']*)'\s*\)\s*\.\s*$", statement)
        if match is not None:
            base = Path(axiom_root) if axiom_root is not None else path.parent
            included = base / match.group(1)
            if not included.is_file():
                raise ProblemFileError(
                    f"{path}: included file not found: {included}"
                )
            clauses.extend(read_problem(included, axiom_root))
            continue
        try:
            clauses.append(parse_cnf_line(statement))
        except ClauseSyntaxError as exc:
            if re.match(r"\s*(fof|tff|thf|tcf)\b", statement):
                raise ProblemFileError(
                    f"{path}: only cnf(...) statements are supported"
                ) from exc
            raise ProblemFileError(f"{path}: {exc}") from exc
    if not clauses:
        raise ProblemFileError(f"{path}: no cnf(...) statements found")
    return clauses


def _split_statements(text: str, path: Path) -> list[str]:
    """Split file text into '.'-terminated top-level statements."""
    statements = []
    depth = 0
    start = 0
    for offset, char in enumerate(text):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
            if depth < 0:
                raise ProblemFileError(f"{path}: unmatched ')' at offset {offset}")
        elif char == "." and depth == 0:
            statement = text[start : offset + 1].strip()
            if statement:
                statements.append(statement)
            start = offset + 1
    if text[start:].strip():
        raise ProblemFileError(f"{path}: trailing text without '.' terminator")
    if depth != 0:
        raise ProblemFileError(f"{path}: unclosed '('")
    return statements
