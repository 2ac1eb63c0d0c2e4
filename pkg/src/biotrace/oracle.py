"""Brute-force re-derivation of every mapping property.

Nothing here is shared with :mod:`biotrace.checks`: no indices, no derived-set
helpers. Each rule is evaluated by scanning the raw record lists directly,
pair by pair, so the two implementations can be compared as a differential
check. Quadratic on purpose; keep inputs small.
"""
from __future__ import annotations

from .checks import ValidationReport, Violation
from .codes import severity
from .model import NU, Trace


def _tag(record) -> str:
    return type(record).__name__


def _produced_at(events, ident) -> list[int]:
    """Positions of events whose product is ``ident``."""
    hits = []
    for j in range(len(events)):
        ev = events[j]
        if _tag(ev) in ("SampleEvent", "PreprocessEvent", "ExtractEvent") and ev.product == ident:
            hits.append(j)
    return hits


def _exists_before(events, ident, producer_tag: str, limit: int) -> bool:
    for j in range(limit):
        ev = events[j]
        if _tag(ev) == producer_tag and ev.product == ident:
            return True
    return False


def _declared(decls, ident, tag: str) -> bool:
    for d in decls:
        if _tag(d) == tag and d.id == ident:
            return True
    return False


def _in_t_q(events, t) -> bool:
    extracted = False
    passed = False
    for ev in events:
        if _tag(ev) == "ExtractEvent" and ev.product == t:
            extracted = True
        if _tag(ev) == "QualityEvent" and ev.template == t and ev.result == "passed":
            passed = True
    return extracted and passed


def _count_cardinalities(trace: Trace) -> dict[str, int]:
    decls, events = trace.declarations, trace.events

    def distinct(items):
        out = []
        for x in items:
            if x not in out:
                out.append(x)
        return len(out)

    return {
        "B_p": distinct([d.id for d in decls if _tag(d) == "PhenomenonDecl"]),
        "B_e": distinct([d.id for d in decls if _tag(d) == "PhenomenonDecl" and d.is_enrolled]),
        "S_m": distinct([e.product for e in events if _tag(e) == "SampleEvent"]),
        "S_p": distinct([e.product for e in events if _tag(e) == "PreprocessEvent"]),
        "T": distinct([e.product for e in events if _tag(e) == "ExtractEvent"]),
        "T_q": distinct([e.template for e in events
                         if _tag(e) == "QualityEvent" and _in_t_q(events, e.template)]),
        "C": distinct([d.id for d in decls if _tag(d) == "ClassDecl" and d.id.name != NU]),
    }


def brute_force_validate(trace: Trace) -> ValidationReport:
    decls, events = trace.declarations, trace.events
    found: dict[tuple, Violation] = {}

    def emit(code: str, mapping: str, subject, message: str) -> None:
        found.setdefault((code, subject), Violation(code, mapping, subject, message, severity(code)))

    # declarations: duplicates, reserved name, references among declarations
    for i in range(len(decls)):
        d = decls[i]
        for j in range(i):
            if decls[j].id == d.id:
                emit("STRUCT_DUPLICATE_ID", "structural", d.id, "duplicate declaration")
        if _tag(d) == "ClassDecl" and d.id.name == NU:
            emit("STRUCT_DUPLICATE_ID", "structural", d.id, "reserved class declared")
        refs = []
        if _tag(d) == "PhenomenonDecl":
            refs = list(d.structures)
        elif _tag(d) == "ClassDecl" and d.bound_phenomenon is not None:
            refs = [d.bound_phenomenon]
        for r in refs:
            if not any(decls[j].id == r for j in range(i)):
                emit("STRUCT_DANGLING_REF", "structural", d.id, "forward or missing reference")

    # S
    want_s = trace.mu if trace.mu_placement == "sampling" else 1
    for e in events:
        if _tag(e) != "SampleEvent":
            continue
        if len(e.sources) != want_s:
            emit("S_BAD_ARITY", "S", e.product, "bad sample arity")
        for st in e.sources:
            owned = False
            for d in decls:
                if _tag(d) == "PhenomenonDecl" and st in d.structures:
                    owned = True
            if not _declared(decls, st, "StructureDecl") or not owned:
                emit("STRUCT_DANGLING_REF", "S", e.product, "unresolved source")

    # P
    for i in range(len(events)):
        e = events[i]
        if _tag(e) == "PreprocessEvent" and not _exists_before(events, e.sample, "SampleEvent", i):
            emit("STRUCT_DANGLING_REF", "P", e.product, "input not produced before")
        if _tag(e) == "SampleEvent":
            count = 0
            for f in events:
                if _tag(f) == "PreprocessEvent" and f.sample == e.product:
                    count += 1
            if count == 0:
                emit("P_NOT_TOTAL", "P", e.product, "never preprocessed")
            elif count > 1:
                emit("P_NOT_FUNCTION", "P", e.product, "preprocessed more than once")
        if _tag(e) == "ExtractEvent":
            for sp in e.inputs:
                if not _produced_at(events, sp):
                    emit("ORPHAN_ENTITY", "P", sp, "never produced")

    # F
    want_f = trace.mu if trace.mu_placement == "extraction" else 1
    for i in range(len(events)):
        e = events[i]
        if _tag(e) == "ExtractEvent":
            if len(e.inputs) != want_f:
                emit("F_BAD_ARITY", "F", e.product, "bad extraction arity")
            for sp in e.inputs:
                if not _exists_before(events, sp, "PreprocessEvent", i):
                    emit("STRUCT_DANGLING_REF", "F", e.product, "input not produced before")
        if _tag(e) == "PreprocessEvent":
            count = 0
            for f in events:
                if _tag(f) == "ExtractEvent" and e.product in f.inputs:
                    count += 1
            if count == 0:
                emit("F_NOT_TOTAL", "F", e.product, "never extracted")
            elif count > 1:
                emit("F_NOT_FUNCTION", "F", e.product, "extracted more than once")
        if _tag(e) in ("QualityEvent", "RecognizeEvent"):
            if not _produced_at(events, e.template):
                emit("ORPHAN_ENTITY", "F", e.template, "never produced")

    # Q
    for i in range(len(events)):
        e = events[i]
        if _tag(e) != "QualityEvent":
            continue
        if not _exists_before(events, e.template, "ExtractEvent", i):
            emit("STRUCT_DANGLING_REF", "Q", e.template, "template not produced before")
        for j in range(len(events)):
            f = events[j]
            if j != i and _tag(f) == "QualityEvent" and f.template == e.template:
                emit("Q_NOT_PARTIAL_FUNCTION", "Q", e.template, "judged more than once")

    # R
    for i in range(len(events)):
        e = events[i]
        if _tag(e) != "RecognizeEvent":
            continue
        t = e.template
        if not _exists_before(events, t, "ExtractEvent", i):
            emit("STRUCT_DANGLING_REF", "R", t, "template not produced before")
        if e.output is not None and not _declared(decls, e.output, "ClassDecl"):
            emit("STRUCT_DANGLING_REF", "R", t, "undeclared output class")
        for j in range(len(events)):
            f = events[j]
            if (j != i and _tag(f) == "RecognizeEvent" and f.batch == e.batch
                    and f.template == t and f.claimed == e.claimed):
                emit("R_NOT_PARTIAL", "R", t, "recognized twice in one batch")
        if not _in_t_q(events, t):
            emit("R_INPUT_NOT_QUALIFIED", "R", t, "not quality-passed")
        if e.claimed is not None:
            if not _declared(decls, e.claimed, "PhenomenonDecl"):
                emit("R_CLAIMED_UNKNOWN", "R", t, "claimed phenomenon unknown")
            elif e.output is not None:
                bound_ok = False
                for d in decls:
                    if _tag(d) == "ClassDecl" and d.id == e.output and d.bound_phenomenon == e.claimed:
                        bound_ok = True
                if not bound_ok:
                    emit("R_VERIFY_CLASS_MISMATCH", "R", t, "output not bound to claimed")

    return ValidationReport(list(found.values()), _count_cardinalities(trace))
