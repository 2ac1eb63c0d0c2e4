"""Strict reader and canonical writer for ``.biotrace`` files (JSON Lines).

Line 1 is the header object, every further line one record tagged by ``ev``.
Field order on output is fixed per tag; see FORMAT.md.
"""
from __future__ import annotations

import json
from typing import Any, Optional

from .model import (
    CLASS,
    NU,
    PHENOMENON,
    PLACEMENTS,
    PREPROCESSED,
    QUALITY_RESULTS,
    SAMPLE,
    STRUCTURE,
    TEMPLATE,
    ClassDecl,
    EntityId,
    ExtractEvent,
    PhenomenonDecl,
    PreprocessEvent,
    QualityEvent,
    RecognizeEvent,
    SampleEvent,
    StructureDecl,
    Trace,
)

FORMAT_VERSION = "1"
EXTENSION = ".biotrace"

HEADER_FIELDS = ("format_version", "mu", "mu_placement")

# tag -> (required fields, optional fields), both in canonical order
RECORD_FIELDS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "structure": (("name",), ()),
    "phenomenon": (("name", "is_person", "is_enrolled", "structures"), ()),
    "class": (("name",), ("bound",)),
    "sample": (("name", "sources"), ()),
    "preprocess": (("name", "sample"), ()),
    "extract": (("name", "inputs"), ()),
    "quality": (("template", "result"), ()),
    "recognize": (("batch", "template", "claimed", "output"), ()),
}
# claimed is optional on recognize records; listed as required above only for ordering
_OPTIONAL = {("recognize", "claimed"), ("class", "bound")}

PARSE_CODES = ("PARSE_SYNTAX", "PARSE_UNKNOWN_TAG", "PARSE_DUP_ID", "PARSE_FORWARD_REF", "PARSE_BAD_HEADER")


class ParseError(ValueError):
    def __init__(self, code: str, line: int, message: str, field: Optional[str] = None):
        self.code = code
        self.line = line
        self.field = field
        self.detail = message
        where = f"line {line}"
        if field:
            where += f", field {field!r}"
        super().__init__(f"{where}: {code}: {message}")


def _fields(tag: str) -> tuple[str, ...]:
    required, optional = RECORD_FIELDS[tag]
    return required + optional


class _Reader:
    def __init__(self) -> None:
        self.declared: set[EntityId] = set()
        self.produced: set[EntityId] = set()
        self.line = 0

    def fail(self, code: str, message: str, field: Optional[str] = None):
        raise ParseError(code, self.line, message, field)

    def text(self, obj: dict, key: str) -> str:
        value = obj[key]
        if not isinstance(value, str) or not value:
            self.fail("PARSE_SYNTAX", "expected non-empty string", key)
        return value

    def flag(self, obj: dict, key: str) -> bool:
        value = obj[key]
        if not isinstance(value, bool):
            self.fail("PARSE_SYNTAX", "expected true or false", key)
        return value

    def names(self, obj: dict, key: str) -> list[str]:
        value = obj[key]
        if not isinstance(value, list) or not all(isinstance(v, str) and v for v in value):
            self.fail("PARSE_SYNTAX", "expected a list of non-empty strings", key)
        return value

    def declare(self, ident: EntityId) -> None:
        if ident.kind == CLASS and ident.name == NU:
            self.fail("PARSE_DUP_ID", f"{NU} is reserved for the unrecognized class", "name")
        if ident in self.declared:
            self.fail("PARSE_DUP_ID", f"{ident} is already declared", "name")
        self.declared.add(ident)

    def ref(self, ident: EntityId, key: str, pool: set) -> EntityId:
        if ident not in pool:
            self.fail("PARSE_FORWARD_REF", f"{ident} is referenced before it is declared or produced", key)
        return ident

    def record(self, obj: Any):
        if not isinstance(obj, dict):
            self.fail("PARSE_SYNTAX", "record must be a JSON object")
        if "ev" not in obj:
            self.fail("PARSE_SYNTAX", "record has no 'ev' tag", "ev")
        tag = obj["ev"]
        if not isinstance(tag, str) or tag not in RECORD_FIELDS:
            self.fail("PARSE_UNKNOWN_TAG", f"unknown record tag {tag!r}", "ev")
        allowed = set(_fields(tag)) | {"ev"}
        for key in obj:
            if key not in allowed:
                self.fail("PARSE_SYNTAX", f"unknown field for {tag} record", key)
        for key in _fields(tag):
            if key not in obj and (tag, key) not in _OPTIONAL:
                self.fail("PARSE_SYNTAX", f"missing field for {tag} record", key)
        return getattr(self, f"_{tag}")(obj)

    def _structure(self, obj):
        ident = EntityId(STRUCTURE, self.text(obj, "name"))
        self.declare(ident)
        return StructureDecl(ident)

    def _phenomenon(self, obj):
        ident = EntityId(PHENOMENON, self.text(obj, "name"))
        is_person = self.flag(obj, "is_person")
        is_enrolled = self.flag(obj, "is_enrolled")
        structures = [
            self.ref(EntityId(STRUCTURE, n), "structures", self.declared) for n in self.names(obj, "structures")
        ]
        self.declare(ident)
        return PhenomenonDecl(ident, is_person, is_enrolled, tuple(structures))

    def _class(self, obj):
        ident = EntityId(CLASS, self.text(obj, "name"))
        bound = None
        if obj.get("bound") is not None:
            bound = self.ref(EntityId(PHENOMENON, self.text(obj, "bound")), "bound", self.declared)
        self.declare(ident)
        return ClassDecl(ident, bound)

    def _sample(self, obj):
        ident = EntityId(SAMPLE, self.text(obj, "name"))
        sources = [self.ref(EntityId(STRUCTURE, n), "sources", self.declared) for n in self.names(obj, "sources")]
        self.produced.add(ident)
        return SampleEvent(ident, tuple(sources))

    def _preprocess(self, obj):
        ident = EntityId(PREPROCESSED, self.text(obj, "name"))
        source = self.ref(EntityId(SAMPLE, self.text(obj, "sample")), "sample", self.produced)
        self.produced.add(ident)
        return PreprocessEvent(ident, source)

    def _extract(self, obj):
        ident = EntityId(TEMPLATE, self.text(obj, "name"))
        inputs = [self.ref(EntityId(PREPROCESSED, n), "inputs", self.produced) for n in self.names(obj, "inputs")]
        self.produced.add(ident)
        return ExtractEvent(ident, tuple(inputs))

    def _quality(self, obj):
        ident = self.ref(EntityId(TEMPLATE, self.text(obj, "template")), "template", self.produced)
        result = obj["result"]
        if result not in QUALITY_RESULTS:
            self.fail("PARSE_SYNTAX", f"result must be one of {', '.join(QUALITY_RESULTS)}", "result")
        return QualityEvent(ident, result)

    def _recognize(self, obj):
        batch = self.text(obj, "batch")
        ident = self.ref(EntityId(TEMPLATE, self.text(obj, "template")), "template", self.produced)
        claimed = None
        if "claimed" in obj:
            claimed = self.ref(EntityId(PHENOMENON, self.text(obj, "claimed")), "claimed", self.declared)
        output = None
        if obj["output"] is not None:
            name = self.text(obj, "output")
            if name == NU:
                self.fail("PARSE_SYNTAX", f"write the unrecognized class as null, not {NU!r}", "output")
            output = self.ref(EntityId(CLASS, name), "output", self.declared)
        return RecognizeEvent(batch, ident, output, claimed)


def _header(obj: Any) -> tuple[int, str]:
    def bad(message: str, field: Optional[str] = None):
        raise ParseError("PARSE_BAD_HEADER", 1, message, field)

    if not isinstance(obj, dict):
        bad("header must be a JSON object")
    for key in obj:
        if key not in HEADER_FIELDS:
            bad("unknown header field", key)
    for key in HEADER_FIELDS:
        if key not in obj:
            bad("missing header field", key)
    if obj["format_version"] != FORMAT_VERSION:
        bad(f"unsupported format version {obj['format_version']!r}", "format_version")
    mu = obj["mu"]
    if isinstance(mu, bool) or not isinstance(mu, int) or mu < 1:
        bad("mu must be a positive integer", "mu")
    if obj["mu_placement"] not in PLACEMENTS:
        bad(f"mu_placement must be one of {', '.join(PLACEMENTS)}", "mu_placement")
    return mu, obj["mu_placement"]


def parse_trace(text) -> Trace:
    """Parse a ``.biotrace`` document (``str`` or UTF-8 ``bytes``)."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("PARSE_SYNTAX", text[: exc.start].count(b"\n") + 1, "input is not valid UTF-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("PARSE_BAD_HEADER", 1, "empty document; a header line is required")
    header = _loads(lines[0], 1, "PARSE_BAD_HEADER")
    mu, placement = _header(header)

    reader = _Reader()
    declarations = []
    events = []
    for number, line in enumerate(lines[1:], start=2):
        reader.line = number
        obj = _loads(line, number, "PARSE_SYNTAX")
        rec = reader.record(obj)
        if isinstance(rec, (StructureDecl, PhenomenonDecl, ClassDecl)):
            declarations.append(rec)
        else:
            events.append(rec)
    return Trace(tuple(declarations), tuple(events), mu, placement)


class _DuplicateKey(ValueError):
    pass


def _no_duplicates(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise _DuplicateKey(key)
        obj[key] = value
    return obj


def _loads(line: str, number: int, code: str):
    try:
        return json.loads(line, object_pairs_hook=_no_duplicates)
    except _DuplicateKey as exc:
        raise ParseError(code, number, "field appears twice", str(exc))
    except json.JSONDecodeError as exc:
        raise ParseError(code, number, f"not valid JSON ({exc.msg})")


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def record_of(rec) -> dict:
    """The canonical JSON object for one declaration or event (ordered keys)."""
    if isinstance(rec, StructureDecl):
        return {"ev": "structure", "name": rec.id.name}
    if isinstance(rec, PhenomenonDecl):
        return {"ev": "phenomenon", "name": rec.id.name, "is_person": rec.is_person,
                "is_enrolled": rec.is_enrolled, "structures": [s.name for s in rec.structures]}
    if isinstance(rec, ClassDecl):
        obj = {"ev": "class", "name": rec.id.name}
        if rec.bound_phenomenon is not None:
            obj["bound"] = rec.bound_phenomenon.name
        return obj
    if isinstance(rec, SampleEvent):
        return {"ev": "sample", "name": rec.product.name, "sources": [s.name for s in rec.sources]}
    if isinstance(rec, PreprocessEvent):
        return {"ev": "preprocess", "name": rec.product.name, "sample": rec.sample.name}
    if isinstance(rec, ExtractEvent):
        return {"ev": "extract", "name": rec.product.name, "inputs": [s.name for s in rec.inputs]}
    if isinstance(rec, QualityEvent):
        return {"ev": "quality", "template": rec.template.name, "result": rec.result}
    if isinstance(rec, RecognizeEvent):
        obj = {"ev": "recognize", "batch": rec.batch, "template": rec.template.name}
        if rec.claimed is not None:
            obj["claimed"] = rec.claimed.name
        obj["output"] = rec.output.name if rec.output is not None else None
        return obj
    raise TypeError(f"not a trace record: {rec!r}")


def serialize_trace(trace: Trace) -> str:
    lines = [_dump({"format_version": FORMAT_VERSION, "mu": trace.mu, "mu_placement": trace.mu_placement})]
    lines.extend(_dump(record_of(r)) for r in trace.records())
    return "\n".join(lines) + "\n"


def read_trace(path) -> Trace:
    with open(path, "rb") as fh:
        return parse_trace(fh.read())


def write_trace(trace: Trace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_trace(trace))
