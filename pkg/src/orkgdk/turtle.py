"""Turtle parsing and deterministic serialization.

The accepted syntax is the Turtle subset the toolkit itself emits plus the
usual hand-authoring conveniences: ``@prefix`` directives, prefixed names,
``<...>`` IRIs, the ``a`` keyword, ``;`` and ``,`` abbreviations, quoted
literals with ``^^`` datatypes or ``@lang`` tags, bare integers/decimals and
booleans, and ``#`` comments.

Blank-node syntax (``[...]``, ``_:``, ``(...)``) is rejected outright: every
node in this system is a named IRI. Unknown prefixes are errors; the built-in
prefix map is pre-declared, so files may use res:/pred:/class:/... without
repeating the directives.
"""

from __future__ import annotations

from . import namespaces as ns
from .rdf import Graph, Iri, Literal, Term, Triple


class TurtleParseError(ValueError):
    """Syntax error with line/column position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class UnknownPrefixError(TurtleParseError):
    def __init__(self, prefix: str, line: int, col: int):
        super().__init__(f"unknown prefix {prefix!r}", line, col)
        self.prefix = prefix


class BlankNodeError(TurtleParseError):
    """Blank-node syntax is banned: every node must be a named IRI."""

    def __init__(self, token: str, line: int, col: int):
        super().__init__(
            f"blank-node syntax {token!r} is not supported: "
            "every node in this store is a named IRI (no-blank-node policy)",
            line,
            col,
        )


_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}

_LOCAL_CHARS = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-")
_PREFIX_CHARS = _LOCAL_CHARS


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> TurtleParseError:
        return TurtleParseError(message, self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text):
                if self.text[self.pos] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.pos += 1

    def peek(self, k: int = 0) -> str:
        i = self.pos + k
        return self.text[i] if i < len(self.text) else ""

    def skip_ws(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance()
            elif c == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            else:
                return

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def next_token(self) -> tuple[str, object, int, int]:
        """Returns (kind, value, line, col)."""
        self.skip_ws()
        line, col = self.line, self.col
        c = self.peek()
        if c == "":
            return ("eof", None, line, col)
        if c in "[](":
            raise BlankNodeError(c, line, col)
        if c == "_" and self.peek(1) == ":":
            raise BlankNodeError("_:", line, col)
        if c == "<":
            return ("iri", self._lex_iriref(), line, col)
        if c == '"' or c == "'":
            return ("string", self._lex_string(c), line, col)
        if c == "@":
            return self._lex_at(line, col)
        if c == "^" and self.peek(1) == "^":
            self._advance(2)
            return ("dcaret", "^^", line, col)
        if c in ".;,":
            # A dot can also start a number like .5 but we do not accept that
            # form; Turtle requires a leading digit anyway in our subset.
            self._advance()
            return ({".": "dot", ";": "semi", ",": "comma"}[c], c, line, col)
        if c.isdigit() or (c in "+-" and self.peek(1).isdigit()):
            return ("number", self._lex_number(), line, col)
        if c.isalpha() or c == ":" or c == "_":
            return self._lex_name(line, col)
        raise self.error(f"unexpected character {c!r}")

    def _lex_iriref(self) -> str:
        self._advance()  # <
        out = []
        while True:
            c = self.peek()
            if c == "":
                raise self.error("unterminated IRI")
            if c == "\n":
                raise self.error("newline inside IRI")
            if c == ">":
                self._advance()
                return "".join(out)
            out.append(c)
            self._advance()

    def _lex_string(self, quote: str) -> str:
        self._advance()  # opening quote
        out = []
        while True:
            c = self.peek()
            if c == "":
                raise self.error("unterminated string")
            if c == "\n":
                raise self.error("newline inside string (use \\n)")
            if c == quote:
                self._advance()
                return "".join(out)
            if c == "\\":
                self._advance()
                e = self.peek()
                if e in _ESCAPES:
                    out.append(_ESCAPES[e])
                    self._advance()
                elif e == "u" or e == "U":
                    width = 4 if e == "u" else 8
                    self._advance()
                    hexpart = self.text[self.pos : self.pos + width]
                    if len(hexpart) != width:
                        raise self.error("truncated \\u escape")
                    try:
                        out.append(chr(int(hexpart, 16)))
                    except ValueError:
                        raise self.error(f"bad \\u escape {hexpart!r}") from None
                    self._advance(width)
                else:
                    raise self.error(f"unknown escape \\{e}")
            else:
                out.append(c)
                self._advance()

    def _lex_at(self, line: int, col: int) -> tuple[str, object, int, int]:
        self._advance()  # @
        word = []
        while self.peek().isalpha() or self.peek() == "-":
            word.append(self.peek())
            self._advance()
        name = "".join(word)
        if name == "prefix":
            return ("prefix_kw", name, line, col)
        if name == "base":
            raise TurtleParseError("@base is not supported", line, col)
        if not name:
            raise TurtleParseError("dangling '@'", line, col)
        return ("langtag", name, line, col)

    def _lex_number(self) -> tuple[str, str]:
        start = self.pos
        if self.peek() in "+-":
            self._advance()
        while self.peek().isdigit():
            self._advance()
        kind = "integer"
        if self.peek() == "." and self.peek(1).isdigit():
            kind = "decimal"
            self._advance()
            while self.peek().isdigit():
                self._advance()
        if self.peek() in "eE":
            kind = "double"
            self._advance()
            if self.peek() in "+-":
                self._advance()
            if not self.peek().isdigit():
                raise self.error("malformed exponent")
            while self.peek().isdigit():
                self._advance()
        return (kind, self.text[start : self.pos])

    def _lex_name(self, line: int, col: int) -> tuple[str, object, int, int]:
        # prefixed name, 'a', or boolean keyword
        start = self.pos
        while self.peek() in _PREFIX_CHARS:
            self._advance()
        prefix = self.text[start : self.pos]
        if self.peek() != ":":
            if prefix == "a":
                return ("a", "a", line, col)
            if prefix in ("true", "false"):
                return ("boolean", prefix, line, col)
            raise TurtleParseError(f"expected ':' after {prefix!r}", line, col)
        self._advance()  # :
        local_start = self.pos
        while True:
            c = self.peek()
            if c in _LOCAL_CHARS:
                self._advance()
            elif c == "." and self.peek(1) in _LOCAL_CHARS:
                # dots are allowed inside a local name but a trailing dot
                # terminates the statement instead
                self._advance()
            else:
                break
        local = self.text[local_start : self.pos]
        return ("pname", (prefix, local), line, col)


class _Parser:
    def __init__(self, text: str):
        self.lexer = _Lexer(text)
        self.graph = Graph()
        self.prefixes: dict[str, str] = dict(ns.BUILTIN_PREFIXES)
        self.tok: tuple[str, object, int, int] = ("bof", None, 0, 0)
        self._next()

    def _next(self) -> None:
        self.tok = self.lexer.next_token()

    def _expect(self, kind: str) -> object:
        if self.tok[0] != kind:
            raise TurtleParseError(
                f"expected {kind}, found {self.tok[0]} {self.tok[1]!r}",
                self.tok[2],
                self.tok[3],
            )
        value = self.tok[1]
        self._next()
        return value

    def parse(self) -> Graph:
        while self.tok[0] != "eof":
            if self.tok[0] == "prefix_kw":
                self._next()
                self._parse_prefix()
            else:
                self._parse_statement()
        self.graph.refresh_published_state()
        return self.graph

    def _parse_prefix(self) -> None:
        if self.tok[0] != "pname" or self.tok[1][1] != "":  # type: ignore[index]
            raise TurtleParseError(
                "expected 'prefix:' in @prefix directive", self.tok[2], self.tok[3]
            )
        prefix = self.tok[1][0]  # type: ignore[index]
        self._next()
        base = self._expect("iri")
        self._expect("dot")
        self.prefixes[prefix] = str(base)
        self.graph.bind(prefix, str(base))

    def _resolve(self, prefix: str, local: str, line: int, col: int) -> Iri:
        if prefix not in self.prefixes:
            raise UnknownPrefixError(prefix, line, col)
        try:
            return Iri(self.prefixes[prefix] + local)
        except ValueError as exc:
            raise TurtleParseError(str(exc), line, col) from None

    def _parse_iri(self) -> Iri:
        kind, value, line, col = self.tok
        if kind == "iri":
            self._next()
            try:
                return Iri(str(value))
            except ValueError as exc:
                raise TurtleParseError(str(exc), line, col) from None
        if kind == "pname":
            prefix, local = value  # type: ignore[misc]
            self._next()
            return self._resolve(prefix, local, line, col)
        raise TurtleParseError(f"expected an IRI, found {kind}", line, col)

    def _parse_statement(self) -> None:
        subject = self._parse_iri()
        self._parse_predicate_object_list(subject)
        self._expect("dot")

    def _parse_predicate_object_list(self, subject: Iri) -> None:
        while True:
            predicate = self._parse_verb()
            self._parse_object_list(subject, predicate)
            if self.tok[0] == "semi":
                self._next()
                if self.tok[0] in ("dot", "eof"):  # tolerate trailing ';'
                    return
                continue
            return

    def _parse_verb(self) -> Iri:
        if self.tok[0] == "a":
            self._next()
            return Iri(ns.RDF + "type")
        return self._parse_iri()

    def _parse_object_list(self, subject: Iri, predicate: Iri) -> None:
        while True:
            obj = self._parse_object()
            self.graph.insert(Triple(subject, predicate, obj))
            if self.tok[0] == "comma":
                self._next()
                continue
            return

    def _parse_object(self) -> Term:
        kind, value, line, col = self.tok
        if kind in ("iri", "pname"):
            return self._parse_iri()
        if kind == "string":
            self._next()
            return self._parse_literal_rest(str(value))
        if kind == "number":
            num_kind, lexical = value  # type: ignore[misc]
            self._next()
            datatype = {
                "integer": ns.XSD_INTEGER,
                "decimal": ns.XSD_DECIMAL,
                "double": ns.XSD_DOUBLE,
            }[num_kind]
            return Literal(str(lexical), datatype)
        if kind == "boolean":
            self._next()
            return Literal(str(value), ns.XSD_BOOLEAN)
        raise TurtleParseError(f"expected an object term, found {kind}", line, col)

    def _parse_literal_rest(self, lexical: str) -> Literal:
        if self.tok[0] == "langtag":
            tag = str(self.tok[1])
            self._next()
            return Literal(lexical, language=tag)
        if self.tok[0] == "dcaret":
            self._next()
            datatype = self._parse_iri()
            if datatype.iri == ns.RDF_LANG_STRING:
                raise TurtleParseError(
                    "rdf:langString literals need a language tag, not ^^",
                    self.tok[2],
                    self.tok[3],
                )
            return Literal(lexical, datatype.iri)
        return Literal(lexical)


def parse_turtle(text: str) -> Graph:
    """Parse Turtle text into a fresh graph."""
    return _Parser(text).parse()


# -- serialization ---------------------------------------------------------


def _escape(value: str) -> str:
    out = []
    for c in value:
        if c == "\\":
            out.append("\\\\")
        elif c == '"':
            out.append('\\"')
        elif c == "\n":
            out.append("\\n")
        elif c == "\r":
            out.append("\\r")
        elif c == "\t":
            out.append("\\t")
        elif ord(c) < 0x20:
            out.append(f"\\u{ord(c):04X}")
        else:
            out.append(c)
    return "".join(out)


def _pname_or_iriref(iri: str, namespaces: dict[str, str]) -> str:
    best: tuple[str, str] | None = None
    for prefix, base in namespaces.items():
        if iri.startswith(base) and len(iri) > len(base):
            if best is None or len(base) > len(best[1]):
                best = (prefix, base)
    if best is not None:
        local = iri[len(best[1]) :]
        if _is_valid_local(local):
            return f"{best[0]}:{local}"
    return f"<{iri}>"


def _is_valid_local(local: str) -> bool:
    if not local or local.endswith("."):
        return False
    return all(c in _LOCAL_CHARS or c == "." for c in local)


def term_to_turtle(term: Term, namespaces: dict[str, str]) -> str:
    if isinstance(term, Iri):
        return _pname_or_iriref(term.iri, namespaces)
    if term.language is not None:
        return f'"{_escape(term.lexical)}"@{term.language}'
    if term.datatype == ns.XSD_STRING:
        return f'"{_escape(term.lexical)}"'
    return f'"{_escape(term.lexical)}"^^{_pname_or_iriref(term.datatype, namespaces)}'


def serialize_turtle(graph: Graph) -> str:
    """Deterministic Turtle: prefixes, then subject blocks, all sorted."""
    table = graph.namespaces
    lines = [f"@prefix {p}: <{table[p]}> ." for p in sorted(table)]
    by_subject: dict[Iri, dict[Iri, list[Term]]] = {}
    for t in graph:
        by_subject.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)

    for subject in sorted(by_subject, key=Iri.sort_key):
        lines.append("")
        stext = _pname_or_iriref(subject.iri, table)
        preds = sorted(by_subject[subject], key=Iri.sort_key)
        for i, predicate in enumerate(preds):
            ptext = "a" if predicate == Iri(ns.RDF + "type") else _pname_or_iriref(
                predicate.iri, table
            )
            objects = sorted(by_subject[subject][predicate], key=lambda o: o.sort_key())
            otext = ", ".join(term_to_turtle(o, table) for o in objects)
            head = stext if i == 0 else "   "
            tail = " ;" if i < len(preds) - 1 else " ."
            lines.append(f"{head} {ptext} {otext}{tail}")
    return "\n".join(lines) + "\n"
