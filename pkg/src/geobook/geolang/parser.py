"""Lexer and recursive-descent parser for the geometry language.

Surface syntax (full EBNF in docs/grammar.ebnf):

    A := point();
    incident(D, circumcircle(triangle(A, B, C))) <=>
        collinear(foot(D, line(A, B)), foot(D, line(B, C)), foot(D, line(A, C)));
    intersection(l :: Line, m :: Line) ::=
        [P :: Point where incident(P, l) /\\ incident(P, m)];

Connective precedence, loosest first: ``<=>``, ``=>``, ``\\/``, ``/\\``,
``!``; ``=>`` associates to the right, the rest to the left.  ``#``
starts a comment running to end of line.  ``parse`` never raises
anything but :class:`GeoSyntaxError` for any input string.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    And,
    App,
    Atom,
    Declaration,
    DefinitionDecl,
    Formula,
    GeoProgram,
    Iff,
    Implies,
    Loc,
    Not,
    Or,
    SORT_BY_NAME,
    Sort,
    Term,
    Var,
)
from .errors import GeoSyntaxError


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_PUNCT = [
    # longest first
    ("::=", "DEFINE"),
    ("<=>", "IFF"),
    ("::", "DCOLON"),
    (":=", "ASSIGN"),
    ("=>", "IMPLIES"),
    ("/\\", "AND"),
    ("\\/", "OR"),
    ("(", "LPAREN"),
    (")", "RPAREN"),
    ("[", "LBRACKET"),
    ("]", "RBRACKET"),
    (",", "COMMA"),
    (";", "SEMI"),
    ("!", "NOT"),
]

_KEYWORDS = {"where"}


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isalpha():
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "WHERE" if text in _KEYWORDS else "IDENT"
            tokens.append(Token(kind, text, line, col))
            col += j - i
            i = j
            continue
        for lit, kind in _PUNCT:
            if source.startswith(lit, i):
                tokens.append(Token(kind, lit, line, col))
                i += len(lit)
                col += len(lit)
                break
        else:
            raise GeoSyntaxError(line, col, {"token"}, repr(ch))
    tokens.append(Token("EOF", "", line, col))
    return tokens


_SHOW = {
    "IDENT": "identifier",
    "LPAREN": "'('",
    "RPAREN": "')'",
    "LBRACKET": "'['",
    "RBRACKET": "']'",
    "COMMA": "','",
    "SEMI": "';'",
    "ASSIGN": "':='",
    "DEFINE": "'::='",
    "DCOLON": "'::'",
    "IFF": "'<=>'",
    "IMPLIES": "'=>'",
    "AND": "'/\\'",
    "OR": "'\\/'",
    "NOT": "'!'",
    "WHERE": "'where'",
    "EOF": "end of input",
}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail({_SHOW[kind]})
        return self.advance()

    def fail(self, expected: set[str]):
        tok = self.peek()
        found = _SHOW.get(tok.kind, repr(tok.text)) if tok.kind != "IDENT" else repr(tok.text)
        raise GeoSyntaxError(tok.line, tok.col, expected, found)

    # program := item* EOF ; item := (declaration | definition | formula) ';'
    def program(self) -> GeoProgram:
        items: list = []
        while self.peek().kind != "EOF":
            items.append(self.item())
            self.expect("SEMI")
        return GeoProgram(items)

    def item(self):
        if self.peek().kind == "IDENT":
            nxt = self.peek(1).kind
            if nxt == "ASSIGN":
                return self.declaration()
            if nxt == "LPAREN" and self._looks_like_definition():
                return self.definition()
        return self.formula()

    def _looks_like_definition(self) -> bool:
        # after "ident (" scan to the matching ")" and look for "::="
        depth = 0
        k = 1
        while True:
            tok = self.peek(k)
            if tok.kind == "EOF":
                return False
            if tok.kind == "LPAREN":
                depth += 1
            elif tok.kind == "RPAREN":
                depth -= 1
                if depth == 0:
                    return self.peek(k + 1).kind == "DEFINE"
            elif tok.kind in ("SEMI", "DEFINE") and depth <= 1:
                return tok.kind == "DEFINE"
            k += 1

    def declaration(self) -> Declaration:
        name = self.expect("IDENT")
        self.expect("ASSIGN")
        ctor = self.term()
        return Declaration(name.text, ctor, Loc(name.line, name.col))

    def definition(self) -> DefinitionDecl:
        sym = self.expect("IDENT")
        self.expect("LPAREN")
        params: list[tuple[str, Sort]] = []
        if self.peek().kind != "RPAREN":
            params.append(self.param())
            while self.peek().kind == "COMMA":
                self.advance()
                params.append(self.param())
        self.expect("RPAREN")
        self.expect("DEFINE")
        self.expect("LBRACKET")
        rname = self.expect("IDENT")
        self.expect("DCOLON")
        rsort = self.sort()
        self.expect("WHERE")
        body = self.formula()
        self.expect("RBRACKET")
        return DefinitionDecl(
            sym.text, params, (rname.text, rsort), body, Loc(sym.line, sym.col)
        )

    def param(self) -> tuple[str, Sort]:
        name = self.expect("IDENT")
        self.expect("DCOLON")
        return name.text, self.sort()

    def sort(self) -> Sort:
        tok = self.expect("IDENT")
        if tok.text not in SORT_BY_NAME:
            raise GeoSyntaxError(
                tok.line, tok.col, set(SORT_BY_NAME), repr(tok.text)
            )
        return SORT_BY_NAME[tok.text]

    # precedence: iff < implies < or < and < not
    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        lhs = self.implies()
        while self.peek().kind == "IFF":
            op = self.advance()
            rhs = self.implies()
            lhs = Iff(lhs, rhs, Loc(op.line, op.col))
        return lhs

    def implies(self) -> Formula:
        lhs = self.disjunction()
        if self.peek().kind == "IMPLIES":
            op = self.advance()
            rhs = self.implies()  # right-associative
            return Implies(lhs, rhs, Loc(op.line, op.col))
        return lhs

    def disjunction(self) -> Formula:
        lhs = self.conjunction()
        while self.peek().kind == "OR":
            op = self.advance()
            rhs = self.conjunction()
            lhs = Or(lhs, rhs, Loc(op.line, op.col))
        return lhs

    def conjunction(self) -> Formula:
        lhs = self.unary()
        while self.peek().kind == "AND":
            op = self.advance()
            rhs = self.unary()
            lhs = And(lhs, rhs, Loc(op.line, op.col))
        return lhs

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "NOT":
            self.advance()
            return Not(self.unary(), Loc(tok.line, tok.col))
        if tok.kind == "LPAREN":
            self.advance()
            inner = self.formula()
            self.expect("RPAREN")
            return inner
        if tok.kind == "IDENT":
            return self.atom()
        self.fail({"'!'", "'('", "predicate"})
        raise AssertionError("unreachable")

    def atom(self) -> Atom:
        head = self.expect("IDENT")
        self.expect("LPAREN")
        args = self.arguments()
        self.expect("RPAREN")
        return Atom(head.text, args, Loc(head.line, head.col))

    def arguments(self) -> list[Term]:
        args: list[Term] = []
        if self.peek().kind != "RPAREN":
            args.append(self.term())
            while self.peek().kind == "COMMA":
                self.advance()
                args.append(self.term())
        return args

    def term(self) -> Term:
        tok = self.expect("IDENT")
        if self.peek().kind == "LPAREN":
            self.advance()
            args = self.arguments()
            self.expect("RPAREN")
            return App(tok.text, args, Loc(tok.line, tok.col))
        return Var(tok.text, Loc(tok.line, tok.col))


def parse(source: str) -> GeoProgram:
    """Parse a program; total over arbitrary input strings.

    Raises :class:`GeoSyntaxError` with line, column, and expected-token
    set on malformed input; never raises anything else.
    """
    if not isinstance(source, str):
        raise TypeError("parse expects a str")
    tokens = tokenize(source)
    return _Parser(tokens).program()
