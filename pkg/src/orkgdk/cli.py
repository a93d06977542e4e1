"""Command-line entry point.

Subcommands: ingest, validate, query, compare, export, serve. The store is a
Turtle file (default ./store.ttl) loaded at start and rewritten atomically on
mutation. Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import sys
from pathlib import Path

from . import comparison as cmp
from . import ingest
from . import query as q
from . import templates as tpl
from .rdf import ImmutablePublishedError, TermError
from .store import GraphStore, apply_document, resolve_resource, resolve_template_id
from .turtle import TurtleParseError, serialize_turtle

OUTPUT_FORMATS = ("json", "csv", "html", "ttl", "table")

_DOMAIN_ERRORS = (
    ingest.IngestError,
    ingest.NotFoundError,
    ingest.AlreadyPublishedError,
    ImmutablePublishedError,
    cmp.NotFoundError,
    cmp.TypeViolationError,
    q.QueryError,
    tpl.TemplateRegistryError,
    tpl.TemplateStructureError,
    TurtleParseError,
    TermError,
    FileNotFoundError,
    ValueError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odk",
        description="Structured research-dataset descriptions: ingest, validate, query, compare.",
    )
    parser.add_argument("--store", default="./store.ttl", help="Turtle store file (default ./store.ttl)")
    parser.add_argument("--format", default="csv", choices=OUTPUT_FORMATS, help="output format")
    parser.add_argument("--quiet", action="store_true", help="suppress informational output")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="ingest a JSON document of paper records")
    p_ingest.add_argument("file", help="ingestion JSON file")
    p_ingest.add_argument("--created-by", default="orkgdk-cli")
    p_ingest.add_argument("--no-dedupe", action="store_true", help="mint fresh resources even for known papers")

    p_validate = sub.add_parser("validate", help="validate a resource against a template")
    p_validate.add_argument("resource")
    p_validate.add_argument("--template", required=True, help="template id (local name or IRI)")

    p_query = sub.add_parser("query", help="run a query file ('-' reads stdin)")
    p_query.add_argument("file")

    p_compare = sub.add_parser("compare", help="build and export a comparison table")
    p_compare.add_argument("root")
    p_compare.add_argument(
        "--filter",
        action="append",
        default=[],
        metavar="CLAUSE",
        help="hide=<property> | years=<lo>-<hi> | <property><op><value> with op in = > >= < <=",
    )

    p_export = sub.add_parser("export", help="write the whole store as Turtle")
    p_export.add_argument("--ttl", required=True, metavar="OUT", help="output path ('-' for stdout)")

    p_serve = sub.add_parser("serve", help="run the HTTP service (ODK_BIND)")
    p_serve.add_argument("--bind", default=None, help="host:port (overrides ODK_BIND)")
    return parser


def _parse_filter_clauses(raw: list[str]) -> cmp.FilterSpec:
    hide: set[str] = set()
    require: list[cmp.RequireClause] = []
    years: tuple[int, int] | None = None
    for clause in raw:
        if clause.startswith("hide="):
            hide.add(clause[len("hide="):])
            continue
        if clause.startswith("years="):
            lo, _, hi = clause[len("years="):].partition("-")
            try:
                years = (int(lo), int(hi))
            except ValueError:
                raise ValueError(f"bad year range {clause!r}, expected years=<lo>-<hi>") from None
            continue
        for op in (">=", "<=", ">", "<", "="):
            if op in clause:
                prop_name, _, value = clause.partition(op)
                require.append(cmp.RequireClause(prop_name.strip(), op, value.strip()))
                break
        else:
            raise ValueError(f"bad filter clause {clause!r}")
    return cmp.FilterSpec(hide_properties=frozenset(hide), require=tuple(require), year_range=years)


def _emit(data: bytes) -> None:
    sys.stdout.buffer.write(data)
    sys.stdout.buffer.flush()


def _result_table_text(table: q.ResultTable) -> str:
    rows = [table.columns] + table.display_rows()
    widths = [max(len(r[i]) for r in rows) for i in range(len(table.columns))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _cmd_ingest(args: argparse.Namespace, store: GraphStore) -> int:
    text = Path(args.file).read_text("utf-8")
    document = ingest.load_ingest_document(text)
    stamp = dt.datetime.now(dt.timezone.utc).replace(microsecond=0).isoformat()
    provenance = ingest.Provenance(created_at=stamp, created_by=args.created_by)
    results = store.mutate(
        lambda graph: apply_document(graph, document, provenance, dedupe=not args.no_dedupe)
    )
    if not args.quiet:
        for r in results:
            contributions = ", ".join(c.iri for c in r.contributions)
            print(f"{r.paper.iri} -> {contributions}")
        print(f"store now holds {len(store.graph)} triples")
    return 0


def _cmd_validate(args: argparse.Namespace, store: GraphStore) -> int:
    graph = store.graph
    registry = tpl.builtin_templates()
    by_id = tpl.registry_map(registry)
    template_id = resolve_template_id(args.template)
    if template_id not in by_id:
        raise tpl.TemplateRegistryError(f"unknown template {template_id}")
    report = tpl.validate(graph, resolve_resource(args.resource), by_id[template_id], registry)
    if report.conforms:
        print("conforms")
        return 0
    for v in report.violations:
        print(f"{v.code} {v.node} {v.property}: {v.message}")
    return 1


def _cmd_query(args: argparse.Namespace, store: GraphStore) -> int:
    text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text("utf-8")
    table = q.run_query(store.graph, text)
    if args.format == "json":
        import json

        _emit((json.dumps(table.to_json_dict(), indent=2) + "\n").encode("utf-8"))
    elif args.format == "table":
        _emit(_result_table_text(table).encode("utf-8"))
    elif args.format == "csv":
        _emit(table.to_csv().encode("utf-8"))
    else:
        raise ValueError(f"query output supports json/csv/table, not {args.format!r}")
    return 0


def _cmd_compare(args: argparse.Namespace, store: GraphStore) -> int:
    graph = store.graph
    table = cmp.build_comparison(graph, resolve_resource(args.root))
    spec = _parse_filter_clauses(args.filter)
    if not spec.is_empty():
        table = filtered = cmp.filter_table(table, spec)
        if filtered.warnings and not args.quiet:
            for warning in filtered.warnings:
                print(f"warning: {warning}", file=sys.stderr)
    fmt = "csv" if args.format == "table" else args.format
    _emit(cmp.export_table(table, fmt, graph=graph))
    return 0


def _cmd_export(args: argparse.Namespace, store: GraphStore) -> int:
    text = serialize_turtle(store.graph)
    if args.ttl == "-":
        _emit(text.encode("utf-8"))
    else:
        Path(args.ttl).write_text(text, "utf-8")
        if not args.quiet:
            print(f"wrote {args.ttl}")
    return 0


def _cmd_serve(args: argparse.Namespace, store: GraphStore) -> int:
    from .service import serve

    serve(store, args.bind)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "validate": _cmd_validate,
    "query": _cmd_query,
    "compare": _cmd_compare,
    "export": _cmd_export,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        store = GraphStore.open(args.store)
        return _COMMANDS[args.command](args, store)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
