"""Parser and formatter for the annotated-disjunction program syntax.

Grammar (informal)::

    program   := (clause | directive)*
    directive := 'evidence' '(' literal ')' '.' | 'query' '(' atom ')' '.'
    clause    := ['map_query'] head (';' head)* [':-' body] '.'
    head      := atom [':' number]        (omitted prob = 1.0, single head only)
    body      := literal (',' literal)*
    literal   := ['\\+'] ( atom | '(' atom ')' )
    atom      := ident [ '(' term (',' term)* ')' ]
    term      := ident | integer | variable

Comments run from ``%`` to end of line.  Constants are lowercase identifiers
or integers; variables start uppercase or with an underscore.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    AnnotatedClause,
    Atom,
    Literal,
    Program,
    Var,
    implicit_null,
)

_TOKEN_RE = re.compile(
    r"""
      (?P<WS>\s+)
    | (?P<COMMENT>%[^\n]*)
    | (?P<NUMBER>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
    | (?P<IDENT>[a-z][A-Za-z0-9_]*)
    | (?P<VAR>[A-Z_][A-Za-z0-9_]*)
    | (?P<NECK>:-)
    | (?P<NOT>\\\+)
    | (?P<PUNCT>[():;,.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class SourceSpan:
    filename: str
    line: int
    col: int

    def __str__(self):
        return "%s:%d:%d" % (self.filename, self.line, self.col)


class ParseError(Exception):
    def __init__(self, message, span=None):
        super().__init__(message if span is None else "%s: %s" % (span, message))
        self.span = span
        self.reason = message


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _tokenize(text, filename):
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(filename, line, pos - line_start + 1)
            raise ParseError("unexpected character %r" % text[pos], span)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("WS", "COMMENT"):
            span = SourceSpan(filename, line, pos - line_start + 1)
            tokens.append(_Token(kind, tok, span))
        line += tok.count("\n")
        if "\n" in tok:
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", SourceSpan(filename, line, pos - line_start + 1)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead=0):
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind, text=None):
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise ParseError("expected %r, found %r" % (want, tok.text or "end of input"), tok.span)
        return tok

    def at_punct(self, text):
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.text == text

    # ---- grammar ----

    def parse_term(self):
        tok = self.next()
        if tok.kind == "IDENT":
            return tok.text
        if tok.kind == "VAR":
            if tok.text.startswith("_"):
                raise ParseError("anonymous variables are not supported", tok.span)
            return Var(tok.text)
        if tok.kind == "NUMBER":
            if "." in tok.text or "e" in tok.text or "E" in tok.text:
                raise ParseError("float constants are not terms", tok.span)
            return int(tok.text)
        raise ParseError("expected a term, found %r" % tok.text, tok.span)

    def parse_atom(self):
        tok = self.expect("IDENT")
        args = []
        if self.at_punct("("):
            self.next()
            args.append(self.parse_term())
            while self.at_punct(","):
                self.next()
                args.append(self.parse_term())
            self.expect("PUNCT", ")")
        return Atom(tok.text, tuple(args))

    def parse_literal(self):
        if self.peek().kind == "NOT":
            self.next()
            if self.at_punct("("):
                self.next()
                atom = self.parse_atom()
                self.expect("PUNCT", ")")
            else:
                atom = self.parse_atom()
            return Literal(atom, True)
        return Literal(self.parse_atom(), False)

    def parse_number(self):
        tok = self.expect("NUMBER")
        return float(tok.text), tok.span

    def parse_head(self):
        atom = self.parse_atom()
        if self.at_punct(":"):
            self.next()
            prob, span = self.parse_number()
            if not (0.0 <= prob <= 1.0):
                raise ParseError("head probability %r outside [0,1]" % prob, span)
            return atom, prob, True
        return atom, 1.0, False


def parse_program(text, filename="<string>"):
    """Parse source text into a Program.  Raises ParseError on bad syntax."""
    tokens = _tokenize(text, filename)
    p = _Parser(tokens)
    clauses = []
    evidence = []
    queries = []
    warnings = []
    while p.peek().kind != "EOF":
        start = p.peek()
        if start.kind == "IDENT" and start.text in ("evidence", "query") and p.peek(1).text == "(":
            p.next()
            p.expect("PUNCT", "(")
            if start.text == "evidence":
                lit = p.parse_literal()
                if lit in evidence:
                    warnings.append("%s: duplicate evidence directive %s" % (start.span, lit))
                else:
                    evidence.append(lit)
            else:
                atom = p.parse_atom()
                if atom in queries:
                    warnings.append("%s: duplicate query directive %s" % (start.span, atom))
                else:
                    queries.append(atom)
            p.expect("PUNCT", ")")
            p.expect("PUNCT", ".")
            continue
        is_query = False
        if start.kind == "IDENT" and start.text == "map_query" and p.peek(1).kind == "IDENT":
            p.next()
            is_query = True
        heads = []
        annotated = []
        atom, prob, has_ann = p.parse_head()
        heads.append((atom, prob))
        annotated.append(has_ann)
        while p.at_punct(";"):
            p.next()
            atom, prob, has_ann = p.parse_head()
            heads.append((atom, prob))
            annotated.append(has_ann)
        if len(heads) > 1 and not all(annotated):
            raise ParseError(
                "every head of a disjunction needs a probability annotation",
                start.span,
            )
        body = []
        if p.peek().kind == "NECK":
            p.next()
            body.append(p.parse_literal())
            while p.at_punct(","):
                p.next()
                body.append(p.parse_literal())
        p.expect("PUNCT", ".")
        kept = tuple((a, pr) for a, pr in heads if pr != 0.0)
        if len(kept) < len(heads):
            warnings.append("%s: dropped %d zero-probability head(s)" % (start.span, len(heads) - len(kept)))
        if not kept:
            raise ParseError("clause has no head with positive probability", start.span)
        implicit_null(kept)  # raises on sum > 1
        clauses.append(
            AnnotatedClause(
                clause_id=len(clauses),
                heads=kept,
                body=tuple(body),
                is_query=is_query,
            )
        )
    return Program(
        clauses=tuple(clauses),
        evidence=tuple(evidence),
        queries=tuple(queries),
        warnings=tuple(warnings),
    )


def parse_atom(text, filename="<atom>"):
    """Parse a single atom, e.g. a CLI --query argument."""
    tokens = _tokenize(text, filename)
    p = _Parser(tokens)
    atom = p.parse_atom()
    p.expect("EOF")
    return atom


def parse_literal(text, filename="<literal>"):
    """Parse a single possibly negated atom, e.g. a CLI --evidence argument."""
    tokens = _tokenize(text, filename)
    p = _Parser(tokens)
    lit = p.parse_literal()
    p.expect("EOF")
    return lit


def format_program(program):
    """Canonical text form; parse(format(p)) is structurally identical to p."""
    lines = []
    for cl in program.clauses:
        heads = "; ".join("%s:%r" % (a, p) for a, p in cl.heads)
        if len(cl.heads) == 1 and cl.heads[0][1] == 1.0 and not cl.has_null:
            heads = str(cl.heads[0][0])
        prefix = "map_query " if cl.is_query else ""
        if cl.body:
            body = ", ".join(str(lit) for lit in cl.body)
            lines.append("%s%s :- %s." % (prefix, heads, body))
        else:
            lines.append("%s%s." % (prefix, heads))
    for lit in program.evidence:
        lines.append("evidence(%s)." % str(lit).replace("\\+ ", "\\+"))
    for a in program.queries:
        lines.append("query(%s)." % a)
    return "\n".join(lines) + ("\n" if lines else "")
