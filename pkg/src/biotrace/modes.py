"""Infer system kind and operating phase of one recognition batch.

Kind follows from the shape of the batch inputs (bare templates or
template/claim tuples) and from whether the classes correspond one-to-one to
the enrolled phenomena. Phase follows from the input count Υ against the
number of classes and the number of quality-passed inputs.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Optional

from .model import (
    ClassDecl,
    RecognizeEvent,
    Trace,
    UsageError,
    cardinality,
    equivalent_to_enrolled,
    ordered_set,
    tuple_inputs,
)

VERIFICATION = "verification"
IDENTIFICATION = "identification"
CLASSIFICATION = "classification"
UNKNOWN = "unknown"

NORMAL = "normal"
TRAINING = "training"
ENROLLMENT = "enrollment"
AMBIGUOUS = "ambiguous"

KINDS = (VERIFICATION, IDENTIFICATION, CLASSIFICATION)
PHASES = (NORMAL, TRAINING, ENROLLMENT)

DENOTATIONS = {
    (VERIFICATION, NORMAL): "1 : 1, C ≃ B_e",
    (CLASSIFICATION, NORMAL): "1 : n, c(C) = n",
    (IDENTIFICATION, NORMAL): "1 : n′, c(B_e) = n′",
    (VERIFICATION, TRAINING): "m : 1, c(T_q⁺) = m",
    (CLASSIFICATION, TRAINING): "m : n, c(T_q) = m, c(C) = n",
    (IDENTIFICATION, TRAINING): "m : n′, c(T_q) = m, c(B_e) = n′",
    (VERIFICATION, ENROLLMENT): "n′ · k : 1, c(T_q)/k = c(B_e) = n′",
    (CLASSIFICATION, ENROLLMENT): "n · k : n, c(T_q)/k = c(C) = n",
    (IDENTIFICATION, ENROLLMENT): "n′ · k : n′, c(T_q)/k = c(B_e) = n′",
}


@dataclass
class ModeReport:
    batch: str
    kind: str
    phase: str
    upsilon: int
    omega: int
    m: int
    n: int
    n_prime: int
    k_sizes: list[int] = field(default_factory=list)
    c_equiv_be: bool = False
    candidates: list[str] = field(default_factory=list)
    k_interval: tuple[int, int] = (1, 1)

    @property
    def denotation(self) -> Optional[str]:
        return DENOTATIONS.get((self.kind, self.phase))

    @property
    def ratio(self) -> Optional[str]:
        """The Υ : Ω part of the denotation, e.g. ``n′ · k : n′``."""
        d = self.denotation
        return d.split(",")[0] if d else None

    def to_record(self) -> dict:
        record = asdict(self)
        record["k_interval"] = list(self.k_interval)
        record["denotation"] = self.denotation
        return record

    def to_json(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False, sort_keys=True)

    def to_text(self) -> str:
        lines = [
            f"batch {self.batch!r}: {self.kind} system, {self.phase} phase",
            f"  denotation: {self.denotation or '-'}",
            f"  Υ : Ω = {self.upsilon} : {self.omega}",
            f"  m = {self.m}, n = c(C) = {self.n}, n′ = c(B_e) = {self.n_prime}",
            f"  C ≃ B_e: {'yes' if self.c_equiv_be else 'no'}",
        ]
        if self.k_sizes:
            lines.append(f"  k per class: {self.k_sizes}")
        if self.candidates:
            lines.append(f"  candidate phases: {', '.join(self.candidates)}")
        return "\n".join(lines)


def _batch_events(trace: Trace, batch: str) -> list[RecognizeEvent]:
    events = trace.recognize_events(batch)
    if not events:
        known = trace.batches()
        raise UsageError(
            f"no recognition batch labelled {batch!r}"
            + (f"; known batches: {', '.join(known)}" if known else "; the trace has none")
        )
    return events


def _assignment(events: list[RecognizeEvent]) -> dict:
    """Distinct recognition inputs mapped to their (first) output."""
    out: dict = {}
    for e in events:
        out.setdefault(e.key, e.output)
    return out


def _kind(events: list[RecognizeEvent], equiv: bool) -> str:
    tuples = sum(e.is_tuple for e in events)
    if tuples == len(events):
        return VERIFICATION if equiv else UNKNOWN
    if tuples:
        return UNKNOWN
    return IDENTIFICATION if equiv else CLASSIFICATION


def classify_kind(trace: Trace, batch: str) -> str:
    return _kind(_batch_events(trace, batch), equivalent_to_enrolled(trace))


def _enrollment_groups(assignment: dict, classes: list, k_min: int, k_max: int) -> Optional[list[int]]:
    outputs = list(assignment.values())
    if not classes or any(o is None for o in outputs):
        return None
    sizes = Counter(outputs)
    if set(sizes) != set(classes):
        return None
    groups = [sizes[c] for c in classes]
    if any(not (k_min <= k <= k_max) for k in groups):
        return None
    return groups


def infer_phase(trace: Trace, batch: str, k_interval: Optional[tuple[int, int]] = None) -> ModeReport:
    """Phase of ``batch`` with the cardinalities behind it (kind left to the caller)."""
    events = _batch_events(trace, batch)
    assignment = _assignment(events)
    upsilon = len(assignment)
    classes = ordered_set(trace, "C")
    all_tuples = all(e.is_tuple for e in events)
    m = len(tuple_inputs(trace)) if all_tuples else cardinality(trace, "T_q")
    k_min, k_max = k_interval if k_interval is not None else (1, upsilon)
    if k_min < 1 or k_max < k_min:
        raise UsageError(f"k interval must satisfy 1 <= min <= max, got <{k_min}, {k_max}>")

    groups = _enrollment_groups(assignment, classes, k_min, k_max)
    candidates: list[str] = []
    if upsilon == 1:
        phase = NORMAL
    else:
        if groups is not None:
            candidates.append(ENROLLMENT)
        if upsilon == m:
            candidates.append(TRAINING)
        if len(candidates) == 2:
            phase = AMBIGUOUS
        elif candidates:
            phase = candidates[0]
        else:
            phase = UNKNOWN

    return ModeReport(
        batch=batch,
        kind=UNKNOWN,
        phase=phase,
        upsilon=upsilon,
        omega=len(classes),
        m=m,
        n=len(classes),
        n_prime=cardinality(trace, "B_e"),
        k_sizes=groups if groups is not None and phase in (ENROLLMENT, AMBIGUOUS) else [],
        c_equiv_be=equivalent_to_enrolled(trace),
        candidates=candidates if phase == AMBIGUOUS else [],
        k_interval=(k_min, k_max),
    )


def classify_mode(trace: Trace, batch: str, k_interval: Optional[tuple[int, int]] = None) -> ModeReport:
    report = infer_phase(trace, batch, k_interval)
    report.kind = _kind(_batch_events(trace, batch), report.c_equiv_be)
    return report


def classify_all(trace: Trace, k_interval: Optional[tuple[int, int]] = None) -> list[ModeReport]:
    return [classify_mode(trace, b, k_interval) for b in trace.batches()]


# -- rewrites used to state the special-case relationship -------------------


def erase_bindings(trace: Trace) -> Trace:
    """Same trace with every class unbound."""
    decls = tuple(
        ClassDecl(d.id) if isinstance(d, ClassDecl) else d for d in trace.declarations
    )
    return trace.replace(declarations=decls)


def strip_claims(trace: Trace) -> Trace:
    """Same trace with every recognition input reduced to a bare template."""
    events = tuple(
        RecognizeEvent(e.batch, e.template, e.output) if isinstance(e, RecognizeEvent) else e
        for e in trace.events
    )
    return trace.replace(events=events)
