"""Canonical JSON documents for systems, chains, normal forms and reports.

One schema, versioned with "format": 1.  All numbers that are not plain
counters are strings holding exact canonical scalar/polynomial/jet text
forms; no floats anywhere.  Serialization is deterministic (sorted keys),
so identical inputs give byte-identical artifacts.
"""

import json

from .errors import InvalidFieldDescriptorError, ParseError
from .field import FieldDescriptor, render_scalar
from .jets import ORDER_INF
from .matrix import Matrix
from .poly import FieldPolynomial
from .rationals import QQ
from .systems import (
    SystemJet,
    TransformChain,
    TransformStep,
    constant_step,
    monomial_step,
    polynomial_step,
    ramification_step,
)
from .text import (
    parse_jet,
    parse_polynomial,
    parse_scalar,
    render_jet,
    render_polynomial,
)

FORMAT_VERSION = 1


def dumps(document):
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno)
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    if doc.get("format") != FORMAT_VERSION:
        raise ParseError(f"unsupported format {doc.get('format')!r}")
    return doc


# -- field descriptors ---------------------------------------------------------


def field_to_json(field):
    out = {"kind": field.kind}
    if field.d is not None:
        out["d"] = str(field.d)
        out["embedding_sign"] = field.embedding_sign
    return out


def field_from_json(doc):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InvalidFieldDescriptorError("field descriptor must carry a kind")
    kind = doc["kind"]
    d = doc.get("d")
    if d is not None:
        try:
            d = QQ(d)
        except (ValueError, ZeroDivisionError):
            raise InvalidFieldDescriptorError(f"invalid radicand {doc.get('d')!r}")
    sign = doc.get("embedding_sign", 1)
    return FieldDescriptor(kind, d, sign)


# -- systems ---------------------------------------------------------------------


def system_to_json(system, metadata=None):
    doc = {
        "format": FORMAT_VERSION,
        "kind": "system",
        "field": field_to_json(system.field),
        "n": system.n,
        "entries": [
            [render_jet(jet, with_order=False) for jet in row]
            for row in system.entries
        ],
    }
    if system.order != ORDER_INF:
        doc["truncation_order"] = int(system.order)
    if metadata:
        doc["metadata"] = metadata
    return doc


def system_from_json(doc):
    for key in ("field", "n", "entries"):
        if key not in doc:
            raise ParseError(f"system document lacks {key!r}")
    field = field_from_json(doc["field"])
    n = doc["n"]
    entries_txt = doc["entries"]
    if not isinstance(n, int) or n < 1:
        raise ParseError("n must be a positive integer")
    if len(entries_txt) != n or any(len(row) != n for row in entries_txt):
        raise ParseError("entries must form an n x n grid")
    order = doc.get("truncation_order")
    if order is not None and not isinstance(order, int):
        raise ParseError("truncation_order must be an integer")
    default = None if order is None else order
    rows = []
    for i, row in enumerate(entries_txt):
        out = []
        for j, text in enumerate(row):
            try:
                jet = parse_jet(text, field, default_order=default)
            except ParseError as exc:
                raise ParseError(
                    f"entry ({i},{j}): {exc}", column=exc.column
                )
            if order is not None and jet.order > order:
                jet = jet.restrict(order)
            out.append(jet)
        rows.append(out)
    return SystemJet(field, rows, ORDER_INF if order is None else order)


def parse_system(data):
    """Parse a system document from bytes or text."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return system_from_json(loads(data))


# -- chains ------------------------------------------------------------------------


def step_to_json(step):
    if step.kind == "ramification":
        return {"kind": step.kind, "r": step.payload}
    if step.kind == "diagonal-monomial":
        return {"kind": step.kind, "exponents": list(step.payload)}
    if step.kind == "constant-regular":
        return {
            "kind": step.kind,
            "matrix": [
                [render_scalar(c) for c in row] for row in step.payload.rows
            ],
        }
    return {
        "kind": step.kind,
        "matrix": [
            [render_polynomial(p) for p in row] for row in step.payload.rows
        ],
    }


def step_from_json(doc, field):
    kind = doc.get("kind")
    if kind == "ramification":
        return ramification_step(doc["r"])
    if kind == "diagonal-monomial":
        return monomial_step(doc["exponents"])
    if kind == "constant-regular":
        rows = [
            [parse_scalar(text, field) for text in row] for row in doc["matrix"]
        ]
        return constant_step(Matrix(rows))
    if kind == "regular-polynomial":
        rows = [
            [parse_polynomial(text, field) for text in row] for row in doc["matrix"]
        ]
        return polynomial_step(Matrix(rows))
    raise ParseError(f"unknown step kind {kind!r}")


def chain_to_json(chain, field):
    return {
        "format": FORMAT_VERSION,
        "kind": "chain",
        "field": field_to_json(field),
        "steps": [step_to_json(s) for s in chain],
    }


def chain_from_json(doc):
    if doc.get("kind") != "chain":
        raise ParseError("not a chain document")
    field = field_from_json(doc["field"])
    return TransformChain(
        [step_from_json(s, field) for s in doc.get("steps", [])]
    ), field


def parse_chain(data):
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return chain_from_json(loads(data))


# -- normal forms --------------------------------------------------------------------


def normal_form_to_json(nf, mode):
    doc = {
        "format": FORMAT_VERSION,
        "kind": "normal-form",
        "mode": mode,
        "field": field_to_json(nf.field),
        "rank": nf.rank,
        "degree": nf.degree,
        "ramification": nf.ramification,
        "residual_matrix": [
            [render_scalar(c) for c in row] for row in nf.residual_matrix.rows
        ]
        if mode == "trs"
        else None,
        "system": system_to_json(nf.reduced_system),
    }
    if mode == "trs":
        doc["exponential_part"] = [render_polynomial(p) for p in nf.exponential_part]
        doc["block_structure"] = [list(b) for b in nf.block_structure]
    else:
        doc.pop("residual_matrix")
        doc["n1"] = nf.n1
        doc["n2"] = nf.n2
        doc["real_exponentials"] = [
            render_polynomial(p) for p in nf.real_exponentials
        ]
        doc["complex_exponentials"] = [
            render_polynomial(p) for p in nf.complex_exponentials
        ]
        doc["c1"] = (
            [[render_scalar(c) for c in row] for row in nf.c1.rows]
            if nf.c1 is not None and nf.c1.nrows
            else []
        )
        doc["c2"] = (
            [[render_scalar(c) for c in row] for row in nf.c2.rows]
            if nf.c2 is not None and nf.c2.nrows
            else []
        )
    if doc.get("residual_matrix") is None:
        doc.pop("residual_matrix", None)
    return doc


def report_to_json(report):
    return {"format": FORMAT_VERSION, "kind": "report", **report.as_dict()}
