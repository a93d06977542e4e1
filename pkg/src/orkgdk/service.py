"""HTTP/REST access to the store: resources, queries, templates, comparisons.

Every endpoint is a thin pass-through to the corresponding library call, so
payloads are byte-equal to what the library produces. Reads run against the
store's current snapshot; writes go through the store's exclusive-writer
contract. Error bodies always carry {status, code, message}.

Configuration: ODK_BIND (default 127.0.0.1:8080) and ODK_CORS_ORIGIN.
"""

from __future__ import annotations

import datetime as dt
import json
import os

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import comparison as cmp
from . import ingest
from . import namespaces as ns
from . import query as q
from . import templates as tpl
from .rdf import Graph, ImmutablePublishedError, Iri, Literal, TermError
from .store import GraphStore, apply_document, resolve_resource, resolve_template_id

DEFAULT_BIND = "127.0.0.1:8080"

_FORMAT_MEDIA = {
    "json": "application/json",
    "csv": "text/csv; charset=utf-8",
    "html": "text/html; charset=utf-8",
    "ttl": "text/turtle; charset=utf-8",
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _term_json(term, namespaces) -> dict:
    if isinstance(term, Literal):
        return {
            "kind": "literal",
            "value": term.lexical,
            "datatype": term.datatype,
            "language": term.language,
        }
    return {"kind": "iri", "value": term.iri, "short": ns.to_prefixed(term.iri, namespaces)}


def _now_provenance(created_by: str) -> ingest.Provenance:
    stamp = dt.datetime.now(dt.timezone.utc).replace(microsecond=0).isoformat()
    return ingest.Provenance(created_at=stamp, created_by=created_by)


def create_app(store: GraphStore) -> FastAPI:
    app = FastAPI(title="orkgdk", version="0.1.0")

    origin = os.environ.get("ODK_CORS_ORIGIN")
    if origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def api_error_handler(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"status": exc.status, "code": exc.code, "message": exc.message},
        )

    def _api_error(exc: Exception) -> ApiError:
        if isinstance(exc, (cmp.NotFoundError, ingest.NotFoundError)):
            return ApiError(404, "NotFound", str(exc))
        if isinstance(exc, ingest.AlreadyPublishedError):
            return ApiError(409, "AlreadyPublished", str(exc))
        if isinstance(exc, ImmutablePublishedError):
            return ApiError(409, "ImmutablePublished", str(exc))
        if isinstance(exc, q.UnsupportedConstructError):
            return ApiError(400, "UnsupportedConstruct", str(exc))
        if isinstance(exc, q.QueryError):
            return ApiError(400, "QuerySyntax", str(exc))
        if isinstance(exc, ingest.IngestError):
            return ApiError(400, "IngestError", str(exc))
        if isinstance(exc, cmp.TypeViolationError):
            return ApiError(400, "TypeViolation", str(exc))
        if isinstance(exc, tpl.TemplateRegistryError):
            return ApiError(400, "TemplateRegistry", str(exc))
        if isinstance(exc, (TermError, tpl.TemplateStructureError, ValueError)):
            return ApiError(400, "BadRequest", str(exc))
        raise exc

    async def _body(request: Request) -> dict:
        try:
            data = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as exc:
            raise ApiError(400, "BadRequest", f"invalid JSON body: {exc}")
        if not isinstance(data, dict):
            raise ApiError(400, "BadRequest", "expected a JSON object body")
        return data

    @app.get("/api/resources/{identifier}/metadata")
    def resource_metadata(identifier: str):
        graph = store.graph
        node = resolve_resource(identifier)
        meta = ingest.published_metadata(graph, node)
        if meta is None:
            raise ApiError(404, "NotPublished", f"{node.iri} has not been published")
        return meta

    @app.get("/api/resources/{identifier}")
    def resource(identifier: str):
        graph = store.graph
        node = resolve_resource(identifier)
        statements = graph.match(node, None, None)
        if not statements and not graph.match(None, None, node):
            raise ApiError(404, "NotFound", f"{node.iri} is not in the store")
        label = graph.value(node, Iri(ns.RDFS + "label"))
        types = [
            t.object.iri
            for t in graph.match(node, Iri(ns.RDF + "type"), None)
            if isinstance(t.object, Iri)
        ]
        return {
            "id": node.iri,
            "label": label.lexical if isinstance(label, Literal) else None,
            "types": types,
            "statements": [
                {
                    "predicate": t.predicate.iri,
                    "object": _term_json(t.object, graph.namespaces),
                }
                for t in statements
            ],
        }

    @app.post("/api/query")
    async def run_query(request: Request):
        data = await _body(request)
        text = data.get("query")
        if not isinstance(text, str):
            raise ApiError(400, "BadRequest", 'body must carry a "query" string')
        graph = store.graph
        try:
            table = q.run_query(graph, text)
        except Exception as exc:  # noqa: BLE001 - mapped to ApiError
            raise _api_error(exc)
        return table.to_json_dict()

    @app.get("/api/templates")
    def templates():
        return {"templates": [tpl.template_to_dict(t) for t in _registry(store.graph)]}

    @app.post("/api/validate")
    async def validate(request: Request):
        data = await _body(request)
        graph = store.graph
        registry = _registry(graph)
        template_id = resolve_template_id(str(data.get("template", "")))
        by_id = tpl.registry_map(registry)
        if template_id not in by_id:
            raise ApiError(404, "NotFound", f"unknown template {template_id}")
        root = resolve_resource(str(data.get("resource", "")))
        try:
            report = tpl.validate(graph, root, by_id[template_id], registry)
        except Exception as exc:  # noqa: BLE001
            raise _api_error(exc)
        return report.to_dict()

    @app.post("/api/ingest")
    async def ingest_endpoint(request: Request):
        data = await _body(request)
        try:
            document = ingest.load_ingest_document(json.dumps(data))
            provenance = _now_provenance(str(data.get("created_by", "orkgdk-service")))
            results = store.mutate(
                lambda graph: apply_document(graph, document, provenance)
            )
        except Exception as exc:  # noqa: BLE001
            raise _api_error(exc)
        return {
            "papers": [
                {"paper": r.paper.iri, "contributions": [c.iri for c in r.contributions]}
                for r in results
            ]
        }

    @app.get("/api/comparisons/{identifier}/timeline")
    def comparison_timeline(identifier: str):
        graph = store.graph
        try:
            table = cmp.build_comparison(graph, resolve_resource(identifier))
        except Exception as exc:  # noqa: BLE001
            raise _api_error(exc)
        return {
            "timeline": [
                {"year": "unknown" if year is None else year, "contributions": members}
                for year, members in cmp.timeline(table)
            ]
        }

    @app.post("/api/comparisons/{identifier}/publish")
    async def publish_comparison(request: Request, identifier: str):
        data = await _body(request)
        root = resolve_resource(identifier)
        provenance = _now_provenance(str(data.get("created_by", "orkgdk-service")))
        try:
            store.mutate(lambda graph: ingest.publish(graph, root, provenance))
        except Exception as exc:  # noqa: BLE001
            raise _api_error(exc)
        meta = ingest.published_metadata(store.graph, root)
        assert meta is not None
        return meta

    @app.get("/api/comparisons/{identifier}")
    def comparison(identifier: str, format: str = "json"):
        if format not in _FORMAT_MEDIA:
            raise ApiError(400, "BadRequest", f"unknown format {format!r}")
        graph = store.graph
        try:
            table = cmp.build_comparison(graph, resolve_resource(identifier))
            payload = cmp.export_table(table, format, graph=graph)
        except Exception as exc:  # noqa: BLE001
            raise _api_error(exc)
        return Response(content=payload, media_type=_FORMAT_MEDIA[format])

    return app


def _registry(graph: Graph) -> list[tpl.Template]:
    """Built-in templates plus any template described in the store."""
    registry = {t.id: t for t in tpl.builtin_templates()}
    for t in graph.match(None, Iri(ns.RDF + "type"), Iri(ns.CLASS + "Template")):
        try:
            parsed = tpl.graph_to_template(graph, t.subject)
        except tpl.TemplateStructureError:
            continue
        registry[parsed.id] = parsed
    return list(registry.values())


def serve(store: GraphStore, bind_address: str | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    bind = bind_address or os.environ.get("ODK_BIND", DEFAULT_BIND)
    host, _, port = bind.partition(":")
    app = create_app(store)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080), log_level="warning")
