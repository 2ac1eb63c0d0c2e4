"""Instance conformance against the fixed class model.

Phenomenon ⊒ Person, Phenomenon ⊒ Enrolled phenomenon ⊒ Enrolled person,
Person ⊒ Enrolled person; Structure 1 -- 0..* Phenomenon; Sample 1..* Structure;
Preprocessed sample 1 Sample; Extracted structure 1..* Preprocessed sample
(status: untested | failed | passed); Extracted structure 0..* -- 0..* Class.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .checks import Violation
from .codes import severity
from .model import (
    ClassDecl,
    EntityId,
    ExtractEvent,
    PhenomenonDecl,
    PreprocessEvent,
    QualityEvent,
    SampleEvent,
    StructureDecl,
    Trace,
    UsageError,
    set_of,
)

UNTESTED = "untested"
FAILED = "failed"
PASSED = "passed"
STATUS_VALUES = (UNTESTED, FAILED, PASSED)

BROADER = "broader"
NARROWER = "narrower"
MIXED = "mixed"


@dataclass
class ConformanceReport:
    violations: list[Violation] = field(default_factory=list)
    perspective: str = NARROWER

    @property
    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "error"]

    @property
    def ok(self) -> bool:
        return not self.errors


def _v(code: str, subject: EntityId, message: str, position: int) -> Violation:
    return Violation(code, "ontology", subject, message, severity(code), position)


def perspective(trace: Trace) -> str:
    flags = [d.is_person for d in trace.phenomenon_decls()]
    if all(flags):
        return NARROWER
    if not any(flags):
        return BROADER
    return MIXED


def derive_status(trace: Trace, template: EntityId) -> str:
    """Status attribute of an extracted structure: passed iff it is in T_q."""
    if template not in set_of(trace, "T"):
        raise UsageError(f"{template} is not an extracted structure of this trace")
    results = [e.result for e in trace.events if isinstance(e, QualityEvent) and e.template == template]
    if not results:
        return UNTESTED
    return PASSED if PASSED in results else FAILED


def check_conformance(trace: Trace) -> ConformanceReport:
    out: list[Violation] = []
    offset = len(trace.declarations)

    # subsumption: flags of a repeated phenomenon must agree
    flags: dict[EntityId, tuple[bool, bool]] = {}
    for pos, d in enumerate(trace.declarations):
        if isinstance(d, PhenomenonDecl):
            prev = flags.setdefault(d.id, (d.is_person, d.is_enrolled))
            if prev != (d.is_person, d.is_enrolled):
                out.append(_v("ONT_SUBSUMPTION_BROKEN", d.id,
                              f"{d.id} is declared both as {_flag_text(prev)} and as "
                              f"{_flag_text((d.is_person, d.is_enrolled))}", pos))
    enrolled = {p for p, (_, e) in flags.items() if e}
    for pos, d in enumerate(trace.declarations):
        if isinstance(d, ClassDecl) and d.bound_phenomenon is not None:
            if d.bound_phenomenon not in enrolled:
                out.append(_v("ONT_SUBSUMPTION_BROKEN", d.id,
                              f"{d.id} corresponds to {d.bound_phenomenon}, which is not an "
                              f"enrolled phenomenon", pos))

    # Structure is part of exactly one Phenomenon
    owners: dict[EntityId, set[EntityId]] = defaultdict(set)
    for d in trace.phenomenon_decls():
        for st in d.structures:
            owners[st].add(d.id)
    for pos, d in enumerate(trace.declarations):
        if isinstance(d, StructureDecl):
            n = len(owners.get(d.id, ()))
            if n != 1:
                out.append(_v("ONT_STRUCTURE_MULTI_OWNER", d.id,
                              f"{d.id} is part of {n} phenomena, expected exactly one", pos))

    derived_from: dict[EntityId, set[EntityId]] = defaultdict(set)
    first_pre: dict[EntityId, int] = {}
    verdicts: dict[EntityId, set[str]] = defaultdict(set)
    first_verdict: dict[EntityId, int] = {}
    for i, e in enumerate(trace.events):
        pos = offset + i
        if isinstance(e, SampleEvent):
            if not e.sources:
                out.append(_v("ONT_SAMPLE_NO_SOURCE", e.product,
                              f"{e.product} is made on behalf of no structure", pos))
            elif len(e.sources) != trace.sample_arity:
                out.append(_v("ONT_SAMPLE_BAD_ARITY", e.product,
                              f"{e.product} is made on behalf of {len(e.sources)} structures, "
                              f"expected {trace.sample_arity}", pos))
        elif isinstance(e, PreprocessEvent):
            derived_from[e.product].add(e.sample)
            first_pre.setdefault(e.product, pos)
        elif isinstance(e, ExtractEvent):
            if not e.inputs:
                out.append(_v("ONT_TEMPLATE_NO_INPUT", e.product,
                              f"{e.product} is extracted from no preprocessed sample", pos))
            elif len(e.inputs) != trace.extract_arity:
                out.append(_v("ONT_TEMPLATE_BAD_ARITY", e.product,
                              f"{e.product} is extracted from {len(e.inputs)} preprocessed samples, "
                              f"expected {trace.extract_arity}", pos))
        elif isinstance(e, QualityEvent):
            verdicts[e.template].add(e.result)
            first_verdict.setdefault(e.template, pos)

    for sp, samples in derived_from.items():
        if len(samples) > 1:
            out.append(_v("ONT_PREPROC_MULTI_SAMPLE", sp,
                          f"{sp} is derived from {len(samples)} distinct samples", first_pre[sp]))
    for t, results in verdicts.items():
        if len(results) > 1:
            out.append(_v("ONT_STATUS_INCONSISTENT", t,
                          f"{t} has conflicting quality verdicts {sorted(results)}", first_verdict[t]))

    out.sort(key=lambda v: (v.position, v.code, v.subject))
    return ConformanceReport(out, perspective(trace))


def _flag_text(flags: tuple[bool, bool]) -> str:
    person, enrolled = flags
    if person:
        return "an enrolled person" if enrolled else "a person"
    return "an enrolled phenomenon" if enrolled else "a phenomenon"
