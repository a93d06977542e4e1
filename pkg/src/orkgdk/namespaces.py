"""Namespace tables, datatype IRIs and other shared vocabulary constants.

Everything in here is a plain string; term objects live in :mod:`orkgdk.rdf`.
"""

from __future__ import annotations

RES = "https://orkg.org/resource/"
PRED = "https://orkg.org/property/"
CLASS = "https://orkg.org/class/"
ORKGT = "https://orkg.org/template/"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
SCHEMA = "https://schema.org/"
QUDT = "https://qudt.org/schema/qudt/"
OWL = "http://www.w3.org/2002/07/owl#"

# Prefix map every graph starts with. The owl: entry is ours (the toolkit
# emits owl:sameAs links); the rest are the fixed platform prefixes.
BUILTIN_PREFIXES: dict[str, str] = {
    "res": RES,
    "pred": PRED,
    "class": CLASS,
    "orkgt": ORKGT,
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
    "schema": SCHEMA,
    "qudt": QUDT,
    "owl": OWL,
}

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_FLOAT = XSD + "float"
XSD_BOOLEAN = XSD + "boolean"
XSD_ANY_URI = XSD + "anyURI"
XSD_DATE = XSD + "date"
XSD_DATE_TIME = XSD + "dateTime"

RDF_LANG_STRING = RDF + "langString"

NUMERIC_DATATYPES = frozenset({XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE, XSD_FLOAT})

# License stamped on every published artifact.
CC_BY_SA = "https://creativecommons.org/licenses/by-sa/2.0/"

# Local persistent identifiers minted by the default registrar.
DOI_PREFIX = "10.0000/orkgdk."


def local_name(iri: str) -> str:
    """Best-effort local name of an IRI (after the last '/' or '#')."""
    for sep in ("#", "/"):
        if sep in iri:
            tail = iri.rsplit(sep, 1)[1]
            if tail:
                return tail
    return iri


def to_prefixed(iri: str, namespaces: dict[str, str] | None = None) -> str:
    """Render an IRI as prefix:local when a known namespace applies."""
    table = namespaces if namespaces is not None else BUILTIN_PREFIXES
    best: tuple[str, str] | None = None
    for prefix, base in table.items():
        if iri.startswith(base) and len(iri) > len(base):
            if best is None or len(base) > len(best[1]):
                best = (prefix, base)
    if best is None:
        return f"<{iri}>"
    return f"{best[0]}:{iri[len(best[1]):]}"
