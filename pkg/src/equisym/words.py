"""Parser and evaluator for words in named group generators.

Grammar (whitespace optional between juxtaposed terms):

    WORD      := TERM+
    TERM      := ATOM ('^' SIGNED_INT)?
    ATOM      := GENERATOR | '(' WORD ')' | '[' WORD ',' WORD ']'
    GENERATOR := one of the supplied names (case-sensitive, maximal munch)

Juxtaposition is the product read left to right; [x, y] denotes the
commutator x^-1 y^-1 x y.  Evaluation is generic over any object exposing
``mul``, ``inv``, ``power`` and ``identity`` (see groups.ConcreteGroup).
"""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(ValueError):
    """Raised on malformed word text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnboundGenerator(KeyError):
    """A word referenced a generator with no binding."""


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Grp:
    word: "Word"


@dataclass(frozen=True)
class Comm:
    left: "Word"
    right: "Word"


@dataclass(frozen=True)
class Term:
    atom: object  # Gen | Grp | Comm
    exp: int = 1


@dataclass(frozen=True)
class Word:
    terms: tuple[Term, ...]


def _lex_generator(text: str, pos: int, names: tuple[str, ...]) -> str | None:
    for name in sorted(names, key=len, reverse=True):
        if text.startswith(name, pos):
            return name
    return None


class _Parser:
    def __init__(self, text: str, names: tuple[str, ...]):
        self.text = text
        self.names = names
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse_word(self, stoppers: str = "") -> Word:
        terms = []
        while True:
            self.skip_ws()
            ch = self.peek()
            if ch == "" or ch in stoppers:
                break
            terms.append(self.parse_term())
        if not terms:
            raise ParseError("empty word", self.pos)
        return Word(tuple(terms))

    def parse_term(self) -> Term:
        atom = self.parse_atom()
        self.skip_ws()
        exp = 1
        if self.peek() == "^":
            self.pos += 1
            exp = self.parse_int()
        return Term(atom, exp)

    def parse_atom(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            word = self.parse_word(stoppers=")")
            if self.peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return Grp(word)
        if ch == "[":
            self.pos += 1
            left = self.parse_word(stoppers=",")
            if self.peek() != ",":
                raise ParseError("expected ',' in commutator", self.pos)
            self.pos += 1
            right = self.parse_word(stoppers="]")
            if self.peek() != "]":
                raise ParseError("expected ']'", self.pos)
            self.pos += 1
            return Comm(left, right)
        name = _lex_generator(self.text, self.pos, self.names)
        if name is None:
            raise ParseError(f"unknown symbol {ch!r}", self.pos)
        self.pos += len(name)
        return Gen(name)

    def parse_int(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.peek() in "+-":
            self.pos += 1
        if not self.peek().isdigit():
            raise ParseError("expected integer exponent", self.pos)
        while self.peek().isdigit():
            self.pos += 1
        return int(self.text[start : self.pos])


def parse_word(text: str, names: tuple[str, ...]) -> Word:
    """Parse ``text`` over the generator name set; raises ParseError."""
    parser = _Parser(text, tuple(names))
    word = parser.parse_word()
    parser.skip_ws()
    if parser.pos != len(text):
        raise ParseError("trailing input", parser.pos)
    return word


def serialize(word: Word) -> str:
    return " ".join(_serialize_term(t) for t in word.terms)


def _serialize_term(term: Term) -> str:
    atom = term.atom
    if isinstance(atom, Gen):
        base = atom.name
    elif isinstance(atom, Grp):
        base = "(" + serialize(atom.word) + ")"
    elif isinstance(atom, Comm):
        base = "[" + serialize(atom.left) + ", " + serialize(atom.right) + "]"
    else:  # pragma: no cover
        raise TypeError(f"bad atom {atom!r}")
    return base if term.exp == 1 else f"{base}^{term.exp}"


def evaluate(word: Word, bindings: dict, group):
    """Evaluate a parsed word; ``bindings`` maps generator names to elements."""
    result = group.identity
    for term in word.terms:
        atom = term.atom
        if isinstance(atom, Gen):
            try:
                value = bindings[atom.name]
            except KeyError:
                raise UnboundGenerator(atom.name) from None
        elif isinstance(atom, Grp):
            value = evaluate(atom.word, bindings, group)
        elif isinstance(atom, Comm):
            x = evaluate(atom.left, bindings, group)
            y = evaluate(atom.right, bindings, group)
            value = group.mul(group.mul(group.inv(x), group.inv(y)), group.mul(x, y))
        else:  # pragma: no cover
            raise TypeError(f"bad atom {atom!r}")
        result = group.mul(result, group.power(value, term.exp))
    return result


def evaluate_text(text: str, group, bindings: dict | None = None):
    """Parse and evaluate in one go; defaults to the group's own generators."""
    if bindings is None:
        bindings = group.generators()
    return evaluate(parse_word(text, tuple(bindings)), bindings, group)
