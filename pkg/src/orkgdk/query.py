"""A small SELECT query engine over the in-memory graph.

Grammar (keywords case-insensitive, prefixes resolved against the built-in
prefix map, no PREFIX declarations):

    SELECT [DISTINCT] projection+
    WHERE { pattern ('.' pattern)* FILTER(...)* }
    [GROUP BY ?var+]

    projection := ?var
                | '(' GROUP_CONCAT(?var ; separator='...') AS ?alias ')'
                | GROUP_CONCAT(?var ; separator='...')          # column agg1
    pattern    := term path term (';' path term (',' term)*)*   # 'a' = rdf:type
    path       := iri ('/' iri)*                                # sequence paths
    FILTER     := FILTER( ?var op value (OR|'||' ?var op value)* )
    op         := = | > | >= | < | <=

Evaluation is a nested-loop join over ``Graph.match`` with bag semantics;
sequence paths expand to fresh intermediate variables; filters run before
grouping; GROUP_CONCAT joins the group's values sorted lexicographically;
rows come out sorted, so results are deterministic. Comparisons between
numeric literals are by numeric value, not lexical form.

Constructs outside the subset (OPTIONAL, UNION, ORDER BY, ...) raise
:class:`UnsupportedConstructError` naming the construct.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from . import namespaces as ns
from .rdf import Graph, Iri, Literal, Term


class QueryError(ValueError):
    pass


class QuerySyntaxError(QueryError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class UnsupportedConstructError(QuerySyntaxError):
    def __init__(self, construct: str, line: int, col: int):
        super().__init__(f"unsupported construct: {construct}", line, col)
        self.construct = construct


_UNSUPPORTED = {
    "OPTIONAL", "UNION", "ORDER", "LIMIT", "OFFSET", "HAVING", "VALUES",
    "BIND", "MINUS", "SERVICE", "ASK", "CONSTRUCT", "DESCRIBE", "PREFIX",
    "BASE", "INSERT", "DELETE", "EXISTS", "GRAPH",
}


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class Aggregate:
    function: str  # only GROUP_CONCAT
    var: Var
    separator: str
    alias: str | None = None


@dataclass(frozen=True)
class TriplePattern:
    subject: Term | Var
    path: tuple[str, ...]  # one or more predicate IRIs
    object: Term | Var

    def variables(self) -> set[str]:
        out = set()
        if isinstance(self.subject, Var):
            out.add(self.subject.name)
        if isinstance(self.object, Var):
            out.add(self.object.name)
        return out


@dataclass(frozen=True)
class Comparison:
    var: Var
    op: str  # = > >= < <=
    value: Term


@dataclass(frozen=True)
class FilterExpr:
    disjuncts: tuple[Comparison, ...]


@dataclass
class QueryAst:
    distinct: bool
    projection: list[Var | Aggregate]
    patterns: list[TriplePattern]
    filters: list[FilterExpr]
    group_by: list[Var]
    # how many subject statements the WHERE block had (parser metadata)
    pattern_group_count: int | None = None

    @property
    def columns(self) -> list[str]:
        out = []
        for item in self.projection:
            if isinstance(item, Var):
                out.append(item.name)
            else:
                out.append(item.alias or "")
        return out

    def has_aggregates(self) -> bool:
        return any(isinstance(p, Aggregate) for p in self.projection)


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple[Term, ...]]

    def display_rows(self) -> list[list[str]]:
        return [[_term_text(cell) for cell in row] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(self.columns)
        writer.writerows(self.display_rows())
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {"columns": list(self.columns), "rows": self.display_rows()}


def _term_text(term: Term) -> str:
    return term.iri if isinstance(term, Iri) else term.lexical


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<iriref><[^<>\s]*>)
      | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
      | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
      | (?P<number>[+-]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
      | (?P<pname>[A-Za-z][A-Za-z0-9_\-]*:(?:[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?)
      | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<op>\^\^|\|\||>=|<=|[=><(){};,./*])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "'": "'", "\\": "\\"}


@dataclass
class _Token:
    kind: str
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    line = 1
    col = 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup or ""
        value = m.group(0)
        if kind != "ws":
            tokens.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


def _unquote(raw: str) -> str:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


# -- parser ------------------------------------------------------------------


class _QueryParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self._auto_alias = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        t = self.tok
        self.i += 1
        return t

    def _error(self, message: str) -> QuerySyntaxError:
        return QuerySyntaxError(message, self.tok.line, self.tok.col)

    def _keyword(self) -> str | None:
        if self.tok.kind == "word":
            return self.tok.value.upper()
        return None

    def _check_unsupported(self) -> None:
        kw = self._keyword()
        if kw in _UNSUPPORTED:
            raise UnsupportedConstructError(kw, self.tok.line, self.tok.col)

    def _expect_word(self, word: str) -> None:
        if self._keyword() != word:
            raise self._error(f"expected {word}")
        self._advance()

    def _expect_op(self, op: str) -> None:
        if not (self.tok.kind == "op" and self.tok.value == op):
            raise self._error(f"expected {op!r}")
        self._advance()

    def parse(self) -> QueryAst:
        self._check_unsupported()
        self._expect_word("SELECT")
        distinct = False
        if self._keyword() == "DISTINCT":
            distinct = True
            self._advance()
        projection = self._parse_projection()
        self._check_unsupported()
        self._expect_word("WHERE")
        self._expect_op("{")
        patterns, filters, group_count = self._parse_group()
        group_by = self._parse_group_by()
        self._check_unsupported()
        if self.tok.kind != "eof":
            raise self._error(f"trailing input {self.tok.value!r}")
        ast = QueryAst(distinct, projection, patterns, filters, group_by, group_count)
        self._validate(ast)
        return ast

    def _parse_projection(self) -> list[Var | Aggregate]:
        items: list[Var | Aggregate] = []
        while True:
            self._check_unsupported()
            if self.tok.kind == "var":
                items.append(Var(self._advance().value[1:]))
            elif self.tok.kind == "op" and self.tok.value == "(":
                self._advance()
                agg = self._parse_aggregate()
                alias = None
                if self._keyword() == "AS":
                    self._advance()
                    if self.tok.kind != "var":
                        raise self._error("expected a variable after AS")
                    alias = self._advance().value[1:]
                self._expect_op(")")
                items.append(Aggregate(agg.function, agg.var, agg.separator, alias))
            elif self._keyword() == "GROUP_CONCAT":
                items.append(self._parse_aggregate())
            else:
                break
        if not items:
            raise self._error("expected at least one projected variable or aggregate")
        # deterministic names for unaliased aggregates: agg1, agg2, ...
        named: list[Var | Aggregate] = []
        for item in items:
            if isinstance(item, Aggregate) and item.alias is None:
                self._auto_alias += 1
                item = Aggregate(item.function, item.var, item.separator, f"agg{self._auto_alias}")
            named.append(item)
        return named

    def _parse_aggregate(self) -> Aggregate:
        self._expect_word("GROUP_CONCAT")
        self._expect_op("(")
        if self.tok.kind != "var":
            raise self._error("expected a variable in GROUP_CONCAT")
        var = Var(self._advance().value[1:])
        separator = " "
        if self.tok.kind == "op" and self.tok.value == ";":
            self._advance()
            if self._keyword() != "SEPARATOR":
                raise self._error("expected separator=")
            self._advance()
            self._expect_op("=")
            if self.tok.kind != "string":
                raise self._error("expected a quoted separator string")
            separator = _unquote(self._advance().value)
        self._expect_op(")")
        return Aggregate("GROUP_CONCAT", var, separator, None)

    def _parse_group(self) -> tuple[list[TriplePattern], list[FilterExpr], int]:
        patterns: list[TriplePattern] = []
        filters: list[FilterExpr] = []
        blocks = 0
        while True:
            if self.tok.kind == "op" and self.tok.value == "}":
                self._advance()
                return patterns, filters, blocks
            if self.tok.kind == "eof":
                raise self._error("unterminated group: expected '}'")
            self._check_unsupported()
            if self._keyword() == "FILTER":
                self._advance()
                filters.append(self._parse_filter())
                if self.tok.kind == "op" and self.tok.value == ".":
                    self._advance()
                continue
            patterns.extend(self._parse_triples_block())
            blocks += 1

    def _parse_triples_block(self) -> list[TriplePattern]:
        out: list[TriplePattern] = []
        subject = self._parse_term(allow_literal=False)
        while True:
            path = self._parse_path()
            while True:
                obj = self._parse_term(allow_literal=True)
                out.append(TriplePattern(subject, path, obj))
                if self.tok.kind == "op" and self.tok.value == ",":
                    self._advance()
                    continue
                break
            if self.tok.kind == "op" and self.tok.value == ";":
                self._advance()
                continue
            break
        if self.tok.kind == "op" and self.tok.value == ".":
            self._advance()
        return out

    def _parse_path(self) -> tuple[str, ...]:
        segments = [self._parse_predicate_segment()]
        while self.tok.kind == "op" and self.tok.value == "/":
            self._advance()
            segments.append(self._parse_predicate_segment())
        return tuple(segments)

    def _parse_predicate_segment(self) -> str:
        if self.tok.kind == "word" and self.tok.value == "a":
            self._advance()
            return ns.RDF + "type"
        if self.tok.kind in ("op",) and self.tok.value in ("*", "+", "^", "|"):
            raise UnsupportedConstructError(
                f"property-path operator {self.tok.value!r}", self.tok.line, self.tok.col
            )
        return self._parse_iri().iri

    def _parse_iri(self) -> Iri:
        self._check_unsupported()
        if self.tok.kind == "iriref":
            raw = self._advance().value[1:-1]
            return Iri(raw)
        if self.tok.kind == "pname":
            tok = self._advance()
            prefix, local = tok.value.split(":", 1)
            if prefix not in ns.BUILTIN_PREFIXES:
                raise QuerySyntaxError(f"unknown prefix {prefix!r}", tok.line, tok.col)
            return Iri(ns.BUILTIN_PREFIXES[prefix] + local)
        raise self._error(f"expected an IRI, found {self.tok.value!r}")

    def _parse_term(self, allow_literal: bool) -> Term | Var:
        self._check_unsupported()
        if self.tok.kind == "var":
            return Var(self._advance().value[1:])
        if self.tok.kind in ("iriref", "pname"):
            return self._parse_iri()
        if allow_literal and self.tok.kind == "string":
            return self._parse_literal()
        if allow_literal and self.tok.kind == "number":
            return self._number_literal(self._advance().value)
        raise self._error(f"expected a term, found {self.tok.value!r}")

    def _parse_literal(self) -> Literal:
        lexical = _unquote(self._advance().value)
        if self.tok.kind == "op" and self.tok.value == "^^":
            self._advance()
            datatype = self._parse_iri()
            return Literal(lexical, datatype.iri)
        return Literal(lexical)

    @staticmethod
    def _number_literal(raw: str) -> Literal:
        if re.fullmatch(r"[+-]?\d+", raw):
            return Literal(raw, ns.XSD_INTEGER)
        if "e" in raw or "E" in raw:
            return Literal(raw, ns.XSD_DOUBLE)
        return Literal(raw, ns.XSD_DECIMAL)

    def _parse_filter(self) -> FilterExpr:
        self._expect_op("(")
        disjuncts = [self._parse_comparison()]
        while True:
            if self._keyword() == "OR":
                self._advance()
            elif self.tok.kind == "op" and self.tok.value == "||":
                self._advance()
            else:
                break
            disjuncts.append(self._parse_comparison())
        self._expect_op(")")
        return FilterExpr(tuple(disjuncts))

    def _parse_comparison(self) -> Comparison:
        if self.tok.kind != "var":
            raise self._error("expected a variable in FILTER")
        var = Var(self._advance().value[1:])
        if self.tok.kind != "op" or self.tok.value not in ("=", ">", ">=", "<", "<="):
            raise self._error("expected one of = > >= < <=")
        op = self._advance().value
        if self.tok.kind == "string":
            value: Term = self._parse_literal()
        elif self.tok.kind == "number":
            value = self._number_literal(self._advance().value)
        elif self.tok.kind in ("iriref", "pname"):
            value = self._parse_iri()
        else:
            raise self._error("expected a literal or IRI on the right of a comparison")
        return Comparison(var, op, value)

    def _parse_group_by(self) -> list[Var]:
        if self._keyword() != "GROUP":
            return []
        self._advance()
        self._expect_word("BY")
        out = []
        while self.tok.kind == "var":
            out.append(Var(self._advance().value[1:]))
        if not out:
            raise self._error("expected at least one variable after GROUP BY")
        return out

    def _validate(self, ast: QueryAst) -> None:
        pattern_vars = set()
        for p in ast.patterns:
            pattern_vars |= p.variables()
        for v in ast.group_by:
            if v.name not in pattern_vars:
                raise QueryError(f"GROUP BY variable ?{v.name} does not appear in the patterns")
        for f in ast.filters:
            for c in f.disjuncts:
                if c.var.name not in pattern_vars:
                    raise QueryError(f"FILTER variable ?{c.var.name} does not appear in the patterns")
        group_names = {v.name for v in ast.group_by}
        if ast.has_aggregates():
            for item in ast.projection:
                if isinstance(item, Var) and item.name not in group_names:
                    raise QueryError(
                        f"projected variable ?{item.name} must appear in GROUP BY when aggregating"
                    )
                if isinstance(item, Aggregate) and item.var.name not in pattern_vars:
                    raise QueryError(
                        f"aggregate variable ?{item.var.name} does not appear in the patterns"
                    )
        else:
            if ast.group_by:
                for item in ast.projection:
                    if isinstance(item, Var) and item.name not in group_names:
                        raise QueryError(
                            f"projected variable ?{item.name} must appear in GROUP BY"
                        )
            for item in ast.projection:
                if isinstance(item, Var) and item.name not in pattern_vars:
                    raise QueryError(f"projected variable ?{item.name} does not appear in the patterns")


def parse_query(text: str) -> QueryAst:
    """Parse query text into an AST (built-in prefixes are implicit)."""
    return _QueryParser(text).parse()


# -- evaluation ----------------------------------------------------------------


def expand_paths(patterns: list[TriplePattern]) -> list[TriplePattern]:
    """Rewrite sequence paths into chains over fresh intermediate variables."""
    used = set()
    for p in patterns:
        used |= p.variables()
    out: list[TriplePattern] = []
    counter = 0
    for p in patterns:
        if len(p.path) == 1:
            out.append(p)
            continue
        prev: Term | Var = p.subject
        for segment in p.path[:-1]:
            while f"__path{counter}" in used:
                counter += 1
            mid = Var(f"__path{counter}")
            used.add(mid.name)
            out.append(TriplePattern(prev, (segment,), mid))
            prev = mid
        out.append(TriplePattern(prev, (p.path[-1],), p.object))
    return out


def _resolve(term: Term | Var, binding: dict[str, Term]) -> Term | None:
    if isinstance(term, Var):
        return binding.get(term.name)
    return term


def _numeric(term: Term) -> Decimal | None:
    if isinstance(term, Literal) and term.datatype in ns.NUMERIC_DATATYPES:
        try:
            return Decimal(term.lexical)
        except InvalidOperation:
            return None
    return None


def compare_terms(bound: Term, op: str, value: Term) -> bool:
    """Numeric literals compare by value; everything else by term equality."""
    left = _numeric(bound)
    right = _numeric(value)
    if left is not None and right is not None:
        return {
            "=": left == right,
            ">": left > right,
            ">=": left >= right,
            "<": left < right,
            "<=": left <= right,
        }[op]
    if op == "=":
        return bound == value
    return False


def _solutions(graph: Graph, patterns: list[TriplePattern]) -> list[dict[str, Term]]:
    solutions: list[dict[str, Term]] = [{}]
    for pattern in patterns:
        predicate = Iri(pattern.path[0])
        extended: list[dict[str, Term]] = []
        for binding in solutions:
            s = _resolve(pattern.subject, binding)
            o = _resolve(pattern.object, binding)
            s_arg = s if isinstance(s, Iri) else None
            if s is not None and not isinstance(s, Iri):
                continue  # a literal can never be a subject
            for triple in graph.match(s_arg, predicate, o):
                new = dict(binding)
                if isinstance(pattern.subject, Var):
                    new[pattern.subject.name] = triple.subject
                if isinstance(pattern.object, Var):
                    # the subject may have just bound the same variable
                    already = new.get(pattern.object.name)
                    if already is not None and already != triple.object:
                        continue
                    new[pattern.object.name] = triple.object
                extended.append(new)
        solutions = extended
        if not solutions:
            break
    return solutions


def _satisfies(binding: dict[str, Term], filters: list[FilterExpr]) -> bool:
    for f in filters:
        ok = False
        for c in f.disjuncts:
            bound = binding.get(c.var.name)
            if bound is not None and compare_terms(bound, c.op, c.value):
                ok = True
                break
        if not ok:
            return False
    return True


def evaluate(graph: Graph, ast: QueryAst) -> ResultTable:
    """Evaluate a parsed query against a graph snapshot."""
    patterns = expand_paths(ast.patterns)
    solutions = [b for b in _solutions(graph, patterns) if _satisfies(b, ast.filters)]

    rows: list[tuple[Term, ...]]
    if ast.has_aggregates() or ast.group_by:
        groups: dict[tuple[str, ...], list[dict[str, Term]]] = {}
        keyed: dict[tuple[str, ...], dict[str, Term]] = {}
        for binding in solutions:
            key = tuple(binding[v.name].sort_key() for v in ast.group_by)
            groups.setdefault(key, []).append(binding)
            keyed.setdefault(key, binding)
        if not ast.group_by and not groups:
            groups[()] = []  # implicit single group over zero solutions
            keyed[()] = {}
        rows = []
        for key, members in groups.items():
            representative = keyed[key]
            row: list[Term] = []
            for item in ast.projection:
                if isinstance(item, Var):
                    row.append(representative[item.name])
                else:
                    values = sorted(
                        _term_text(m[item.var.name]) for m in members if item.var.name in m
                    )
                    row.append(Literal(item.separator.join(values)))
            rows.append(tuple(row))
    else:
        rows = [
            tuple(binding[item.name] for item in ast.projection)  # type: ignore[union-attr]
            for binding in solutions
        ]

    if ast.distinct:
        rows = list(dict.fromkeys(rows))
    rows.sort(key=lambda row: tuple(cell.sort_key() for cell in row))
    return ResultTable(columns=ast.columns, rows=rows)


def run_query(graph: Graph, text: str) -> ResultTable:
    return evaluate(graph, parse_query(text))


# -- explain -------------------------------------------------------------------


def _pattern_text(p: TriplePattern) -> str:
    def fmt(term: Term | Var) -> str:
        if isinstance(term, Var):
            return f"?{term.name}"
        if isinstance(term, Iri):
            return ns.to_prefixed(term.iri)
        return f'"{term.lexical}"'

    path = "/".join(ns.to_prefixed(seg) for seg in p.path)
    return f"{fmt(p.subject)} {path} {fmt(p.object)}"


def explain(ast: QueryAst) -> str:
    """A stable, human-readable account of how the query will run."""
    expanded = expand_paths(ast.patterns)
    lines = [f"patterns after path expansion ({len(expanded)}):"]
    for i, p in enumerate(expanded, 1):
        lines.append(f"  {i}. match {_pattern_text(p)}")
    for f in ast.filters:
        parts = " OR ".join(
            f"?{c.var.name} {c.op} {_term_text(c.value) if isinstance(c.value, Literal) else c.value.iri}"
            for c in f.disjuncts
        )
        lines.append(f"then filter: {parts}")
    if ast.group_by:
        lines.append("then group by: " + " ".join(str(v) for v in ast.group_by))
    projected = []
    for item in ast.projection:
        if isinstance(item, Var):
            projected.append(str(item))
        else:
            projected.append(
                f"GROUP_CONCAT({item.var}; separator={item.separator!r}) AS ?{item.alias}"
            )
    lines.append("project: " + ", ".join(projected))
    if ast.distinct:
        lines.append("distinct rows")
    return "\n".join(lines)
