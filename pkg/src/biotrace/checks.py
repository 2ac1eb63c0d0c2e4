"""Property checkers for the five pipeline mappings and the whole-trace validator.

Each checker is a pure function of a trace returning a list of violations.
Totality and functionality are counted over the whole trace; references must
resolve to something declared or produced earlier in trace order.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .codes import ERROR, WARNING, severity
from .model import (
    ClassDecl,
    EntityId,
    ExtractEvent,
    NU,
    PhenomenonDecl,
    PreprocessEvent,
    QualityEvent,
    RecognizeEvent,
    SampleEvent,
    StructureDecl,
    Trace,
    all_cardinalities,
    set_of,
)


@dataclass(frozen=True)
class Violation:
    code: str
    mapping: str
    subject: EntityId
    message: str
    severity: str = ERROR
    position: Optional[int] = None  # index into declarations + events

    def key(self) -> tuple[str, EntityId]:
        return (self.code, self.subject)


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    checked_counts: dict[str, int] = field(default_factory=dict)

    @property
    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == ERROR]

    @property
    def warnings(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def keys(self) -> set[tuple[str, EntityId]]:
        return {v.key() for v in self.violations}

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def _v(code: str, mapping: str, subject: EntityId, message: str, position: Optional[int]) -> Violation:
    return Violation(code, mapping, subject, message, severity(code), position)


class _Index:
    """Lookup tables shared by the checkers. Built once per validation."""

    def __init__(self, trace: Trace):
        self.trace = trace
        self.offset = len(trace.declarations)
        self.structures = {d.id for d in trace.declarations if isinstance(d, StructureDecl)}
        self.phenomena = {d.id for d in trace.declarations if isinstance(d, PhenomenonDecl)}
        self.owned = {
            st for d in trace.declarations if isinstance(d, PhenomenonDecl) for st in d.structures
        }
        self.classes = {d.id for d in trace.declarations if isinstance(d, ClassDecl)}
        self.bound_pairs = {
            (d.id, d.bound_phenomenon) for d in trace.declarations if isinstance(d, ClassDecl)
        }
        # first event position producing each entity
        self.first_made: dict[EntityId, int] = {}
        for i, e in enumerate(trace.events):
            if isinstance(e, (SampleEvent, PreprocessEvent, ExtractEvent)):
                self.first_made.setdefault(e.product, i)
        self.t_q = set_of(trace, "T_q")

    def pos(self, event_index: int) -> int:
        return self.offset + event_index

    def made_before(self, ident: EntityId, event_index: int) -> bool:
        first = self.first_made.get(ident)
        return first is not None and first < event_index


def check_structure(trace: Trace, index: Optional[_Index] = None) -> list[Violation]:
    """Declaration-level checks: duplicate ids and references between declarations."""
    out: list[Violation] = []
    seen: set[EntityId] = set()
    for pos, d in enumerate(trace.declarations):
        if d.id in seen:
            out.append(_v("STRUCT_DUPLICATE_ID", "structural", d.id,
                          f"{d.id} is declared more than once", pos))
        elif isinstance(d, ClassDecl) and d.id.name == NU:
            out.append(_v("STRUCT_DUPLICATE_ID", "structural", d.id,
                          f"{NU} is reserved for the unrecognized class and cannot be declared", pos))
        if isinstance(d, PhenomenonDecl):
            for st in d.structures:
                if st not in seen:
                    out.append(_v("STRUCT_DANGLING_REF", "structural", d.id,
                                  f"{d.id} lists {st}, which is not declared before it", pos))
        elif isinstance(d, ClassDecl) and d.bound_phenomenon is not None:
            if d.bound_phenomenon not in seen:
                out.append(_v("STRUCT_DANGLING_REF", "structural", d.id,
                              f"{d.id} is bound to {d.bound_phenomenon}, which is not declared before it",
                              pos))
        seen.add(d.id)
    return out


def check_sampling(trace: Trace, index: Optional[_Index] = None) -> list[Violation]:
    """S: each sample has the expected source arity and every source structure
    belongs to a declared phenomenon. Unsampled phenomena and shared samples are legal."""
    ix = index or _Index(trace)
    arity = trace.sample_arity
    out: list[Violation] = []
    for i, e in enumerate(trace.events):
        if not isinstance(e, SampleEvent):
            continue
        pos = ix.pos(i)
        if len(e.sources) != arity:
            out.append(_v("S_BAD_ARITY", "S", e.product,
                          f"{e.product} has {len(e.sources)} source(s), expected {arity}", pos))
        for st in e.sources:
            if st not in ix.structures:
                out.append(_v("STRUCT_DANGLING_REF", "S", e.product,
                              f"{e.product} is sampled from undeclared {st}", pos))
            elif st not in ix.owned:
                out.append(_v("STRUCT_DANGLING_REF", "S", e.product,
                              f"{e.product} is sampled from {st}, which belongs to no phenomenon", pos))
    return out


def check_preprocessing(trace: Trace, index: Optional[_Index] = None) -> list[Violation]:
    """P: total and single-valued on S_m; shared images are accepted."""
    ix = index or _Index(trace)
    out: list[Violation] = []
    uses: Counter[EntityId] = Counter()
    produced: set[EntityId] = set()
    for i, e in enumerate(trace.events):
        if isinstance(e, PreprocessEvent):
            uses[e.sample] += 1
            produced.add(e.product)
            if not ix.made_before(e.sample, i):
                out.append(_v("STRUCT_DANGLING_REF", "P", e.product,
                              f"{e.product} is derived from {e.sample}, which is not produced before it",
                              ix.pos(i)))
    for sm, first in ix.first_made.items():
        if sm.kind != "sample":
            continue
        n = uses[sm]
        if n == 0:
            out.append(_v("P_NOT_TOTAL", "P", sm, f"{sm} is never preprocessed", ix.pos(first)))
        elif n > 1:
            out.append(_v("P_NOT_FUNCTION", "P", sm, f"{sm} is preprocessed {n} times", ix.pos(first)))
    reported: set[EntityId] = set()
    for i, e in enumerate(trace.events):
        if isinstance(e, ExtractEvent):
            for sp in e.inputs:
                if sp not in produced and sp not in reported:
                    reported.add(sp)
                    out.append(_v("ORPHAN_ENTITY", "P", sp,
                                  f"{sp} is referenced by {e.product} but never produced", ix.pos(i)))
    return out


def check_extraction(trace: Trace, index: Optional[_Index] = None) -> list[Violation]:
    """F: total and single-valued on S_p with the declared input arity."""
    ix = index or _Index(trace)
    arity = trace.extract_arity
    out: list[Violation] = []
    uses: Counter[EntityId] = Counter()
    produced: set[EntityId] = set()
    for i, e in enumerate(trace.events):
        if not isinstance(e, ExtractEvent):
            continue
        pos = ix.pos(i)
        produced.add(e.product)
        for sp in set(e.inputs):
            uses[sp] += 1
        if len(e.inputs) != arity:
            out.append(_v("F_BAD_ARITY", "F", e.product,
                          f"{e.product} is extracted from {len(e.inputs)} input(s), expected {arity}", pos))
        if any(not ix.made_before(sp, i) for sp in e.inputs):
            out.append(_v("STRUCT_DANGLING_REF", "F", e.product,
                          f"{e.product} uses an input that is not produced before it", pos))
    for sp, first in ix.first_made.items():
        if sp.kind != "preprocessed":
            continue
        n = uses[sp]
        if n == 0:
            out.append(_v("F_NOT_TOTAL", "F", sp, f"{sp} is never used for extraction", ix.pos(first)))
        elif n > 1:
            out.append(_v("F_NOT_FUNCTION", "F", sp, f"{sp} feeds {n} extractions", ix.pos(first)))
    reported: set[EntityId] = set()
    for i, e in enumerate(trace.events):
        if isinstance(e, (QualityEvent, RecognizeEvent)):
            t = e.template
            if t not in produced and t not in reported:
                reported.add(t)
                out.append(_v("ORPHAN_ENTITY", "F", t, f"{t} is referenced but never extracted", ix.pos(i)))
    return out


def check_quality(trace: Trace, index: Optional[_Index] = None) -> list[Violation]:
    """Q: at most one verdict per template. Untested templates are legal."""
    ix = index or _Index(trace)
    out: list[Violation] = []
    verdicts: Counter[EntityId] = Counter()
    second: dict[EntityId, int] = {}
    for i, e in enumerate(trace.events):
        if not isinstance(e, QualityEvent):
            continue
        verdicts[e.template] += 1
        if verdicts[e.template] == 2:
            second[e.template] = i
        if not ix.made_before(e.template, i):
            out.append(_v("STRUCT_DANGLING_REF", "Q", e.template,
                          f"quality verdict on {e.template} before it is extracted", ix.pos(i)))
    for t, i in second.items():
        out.append(_v("Q_NOT_PARTIAL_FUNCTION", "Q", t,
                      f"{t} has {verdicts[t]} quality verdicts", ix.pos(i)))
    return out


def check_recognition(trace: Trace, index: Optional[_Index] = None) -> list[Violation]:
    """R: partial per batch, defined on T_q, and verification outputs agree with bindings."""
    ix = index or _Index(trace)
    out: list[Violation] = []
    seen: defaultdict[str, set] = defaultdict(set)
    for i, e in enumerate(trace.events):
        if not isinstance(e, RecognizeEvent):
            continue
        pos = ix.pos(i)
        t = e.template
        if not ix.made_before(t, i):
            out.append(_v("STRUCT_DANGLING_REF", "R", t,
                          f"{t} is recognized before it is extracted", pos))
        if e.output is not None and e.output not in ix.classes:
            out.append(_v("STRUCT_DANGLING_REF", "R", t,
                          f"{t} is mapped to undeclared {e.output}", pos))
        if e.key in seen[e.batch]:
            what = t if e.claimed is None else f"({t}, {e.claimed})"
            out.append(_v("R_NOT_PARTIAL", "R", t,
                          f"{what} is recognized more than once in batch {e.batch!r}", pos))
        seen[e.batch].add(e.key)
        if t not in ix.t_q:
            out.append(_v("R_INPUT_NOT_QUALIFIED", "R", t,
                          f"{t} is recognized without having passed quality control", pos))
        if e.claimed is not None:
            if e.claimed not in ix.phenomena:
                out.append(_v("R_CLAIMED_UNKNOWN", "R", t,
                              f"{t} claims unknown {e.claimed}", pos))
            elif e.output is not None and (e.output, e.claimed) not in ix.bound_pairs:
                out.append(_v("R_VERIFY_CLASS_MISMATCH", "R", t,
                              f"{t} claims {e.claimed} but is mapped to {e.output}, "
                              f"which is not bound to it", pos))
    return out


CHECKERS = (
    ("structural", check_structure),
    ("S", check_sampling),
    ("P", check_preprocessing),
    ("F", check_extraction),
    ("Q", check_quality),
    ("R", check_recognition),
)


def sort_violations(violations: list[Violation]) -> list[Violation]:
    return sorted(
        violations,
        key=lambda v: (v.position if v.position is not None else -1, v.code, v.subject),
    )


def validate_trace(trace: Trace) -> ValidationReport:
    """Run every checker and collect all findings; nothing is raised."""
    ix = _Index(trace)
    found: list[Violation] = []
    for _, checker in CHECKERS:
        found.extend(checker(trace, ix))
    return ValidationReport(sort_violations(found), all_cardinalities(trace))
