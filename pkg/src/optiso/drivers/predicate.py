"""Boolean bug predicates over option atoms.

Grammar::

    expr   := term ("OR" term)*
    term   := factor ("AND" factor)*
    factor := "NOT" factor | "(" expr ")" | atom
    atom   := "opt(" NAME ")" | "level_at_least(" LABEL ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError

_TOKEN = re.compile(
    r"\s*(?:(?P<kw>AND|OR|NOT)\b|(?P<paren>[()])|(?P<atom>(?:opt|level_at_least)\(\s*[^()\s]+\s*\)))"
)


@dataclass(frozen=True)
class Opt:
    name: str

    def evaluate(self, enabled, ordinal, ordinals):
        return self.name in enabled

    def __str__(self):
        return f"opt({self.name})"


@dataclass(frozen=True)
class LevelAtLeast:
    label: str

    def evaluate(self, enabled, ordinal, ordinals):
        return ordinal >= ordinals[self.label]

    def __str__(self):
        return f"level_at_least({self.label})"


@dataclass(frozen=True)
class Not:
    operand: object

    def evaluate(self, enabled, ordinal, ordinals):
        return not self.operand.evaluate(enabled, ordinal, ordinals)

    def __str__(self):
        return f"NOT {_wrap(self.operand)}"


@dataclass(frozen=True)
class And:
    operands: tuple

    def evaluate(self, enabled, ordinal, ordinals):
        return all(o.evaluate(enabled, ordinal, ordinals) for o in self.operands)

    def __str__(self):
        return " AND ".join(_wrap(o) for o in self.operands)


@dataclass(frozen=True)
class Or:
    operands: tuple

    def evaluate(self, enabled, ordinal, ordinals):
        return any(o.evaluate(enabled, ordinal, ordinals) for o in self.operands)

    def __str__(self):
        return " OR ".join(_wrap(o) for o in self.operands)


def _wrap(node):
    return f"({node})" if isinstance(node, (And, Or)) else str(node)


def _tokenize(text):
    pos, tokens = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected input at column {pos + 1}: {text[pos:pos + 20]!r}",
                             field="bug_predicate")
        tokens.append(m.group("kw") or m.group("paren") or m.group("atom").replace(" ", ""))
        pos = m.end()
    return tokens


def parse_predicate(text: str):
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = peek()
        if tok is None:
            raise ParseError("unexpected end of predicate", field="bug_predicate")
        pos += 1
        return tok

    def expr():
        items = [term()]
        while peek() == "OR":
            take()
            items.append(term())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def term():
        items = [factor()]
        while peek() == "AND":
            take()
            items.append(factor())
        return items[0] if len(items) == 1 else And(tuple(items))

    def factor():
        tok = take()
        if tok == "NOT":
            return Not(factor())
        if tok == "(":
            node = expr()
            if take() != ")":
                raise ParseError("missing closing parenthesis", field="bug_predicate")
            return node
        if tok.startswith("opt("):
            return Opt(tok[4:-1])
        if tok.startswith("level_at_least("):
            return LevelAtLeast(tok[len("level_at_least("):-1])
        raise ParseError(f"unexpected token {tok!r}", field="bug_predicate")

    if not tokens:
        raise ParseError("empty predicate", field="bug_predicate")
    node = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing tokens: {' '.join(tokens[pos:])}", field="bug_predicate")
    return node


def atoms(node):
    """All Opt and LevelAtLeast leaves of a predicate tree."""
    if isinstance(node, (Opt, LevelAtLeast)):
        yield node
    elif isinstance(node, Not):
        yield from atoms(node.operand)
    else:
        for o in node.operands:
            yield from atoms(o)
