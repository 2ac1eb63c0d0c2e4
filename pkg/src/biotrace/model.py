"""Core model: entity identifiers, declarations, mapping events and traces.

A trace is an immutable value. Declarations (structures, phenomena, classes)
precede the ordered list of mapping events; every derived set is computed from
the trace on demand.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

PHENOMENON = "phenomenon"
STRUCTURE = "structure"
SAMPLE = "sample"
PREPROCESSED = "preprocessed"
TEMPLATE = "template"
CLASS = "class"

KINDS = (PHENOMENON, STRUCTURE, SAMPLE, PREPROCESSED, TEMPLATE, CLASS)

# name of the unrecognized class; it lives outside C and is never declared
NU = "ν"

PLACEMENTS = ("sampling", "extraction")
QUALITY_RESULTS = ("passed", "failed")

SET_NAMES = ("B_p", "B_e", "S_m", "S_p", "T", "T_q", "C")


class UsageError(ValueError):
    """Raised when an operation is called with arguments it cannot act on."""


@dataclass(frozen=True, order=True)
class EntityId:
    kind: str
    name: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown entity kind {self.kind!r}")
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("entity name must be non-empty text")

    def __str__(self) -> str:
        return f"{self.kind}:{self.name}"


def _expect_kind(ident: EntityId, kind: str, what: str) -> None:
    if not isinstance(ident, EntityId) or ident.kind != kind:
        raise ValueError(f"{what} must be an EntityId of kind {kind!r}, got {ident!r}")


def phenomenon(name: str) -> EntityId:
    return EntityId(PHENOMENON, name)


def structure(name: str) -> EntityId:
    return EntityId(STRUCTURE, name)


def sample(name: str) -> EntityId:
    return EntityId(SAMPLE, name)


def preprocessed(name: str) -> EntityId:
    return EntityId(PREPROCESSED, name)


def template(name: str) -> EntityId:
    return EntityId(TEMPLATE, name)


def klass(name: str) -> EntityId:
    return EntityId(CLASS, name)


# -- declarations ------------------------------------------------------------


@dataclass(frozen=True)
class StructureDecl:
    id: EntityId

    def __post_init__(self) -> None:
        _expect_kind(self.id, STRUCTURE, "structure id")


@dataclass(frozen=True)
class PhenomenonDecl:
    id: EntityId
    is_person: bool = True
    is_enrolled: bool = False
    structures: tuple[EntityId, ...] = ()

    def __post_init__(self) -> None:
        _expect_kind(self.id, PHENOMENON, "phenomenon id")
        object.__setattr__(self, "structures", tuple(self.structures))
        for st in self.structures:
            _expect_kind(st, STRUCTURE, "phenomenon structure")


@dataclass(frozen=True)
class ClassDecl:
    id: EntityId
    bound_phenomenon: Optional[EntityId] = None

    def __post_init__(self) -> None:
        _expect_kind(self.id, CLASS, "class id")
        if self.bound_phenomenon is not None:
            _expect_kind(self.bound_phenomenon, PHENOMENON, "class binding")


Declaration = Union[StructureDecl, PhenomenonDecl, ClassDecl]


# -- mapping events ----------------------------------------------------------


@dataclass(frozen=True)
class SampleEvent:
    """S: one sample produced from a tuple of structures."""

    product: EntityId
    sources: tuple[EntityId, ...]

    variant = "sample"
    mapping = "S"

    def __post_init__(self) -> None:
        _expect_kind(self.product, SAMPLE, "sample product")
        object.__setattr__(self, "sources", tuple(self.sources))
        for st in self.sources:
            _expect_kind(st, STRUCTURE, "sample source")

    @property
    def subject(self) -> EntityId:
        return self.product

    def references(self) -> tuple[EntityId, ...]:
        return self.sources


@dataclass(frozen=True)
class PreprocessEvent:
    """P: one preprocessed sample derived from one sample."""

    product: EntityId
    sample: EntityId

    variant = "preprocess"
    mapping = "P"

    def __post_init__(self) -> None:
        _expect_kind(self.product, PREPROCESSED, "preprocess product")
        _expect_kind(self.sample, SAMPLE, "preprocess input")

    @property
    def subject(self) -> EntityId:
        return self.product

    def references(self) -> tuple[EntityId, ...]:
        return (self.sample,)


@dataclass(frozen=True)
class ExtractEvent:
    """F: one template extracted from a tuple of preprocessed samples."""

    product: EntityId
    inputs: tuple[EntityId, ...]

    variant = "extract"
    mapping = "F"

    def __post_init__(self) -> None:
        _expect_kind(self.product, TEMPLATE, "extract product")
        object.__setattr__(self, "inputs", tuple(self.inputs))
        for sp in self.inputs:
            _expect_kind(sp, PREPROCESSED, "extract input")

    @property
    def subject(self) -> EntityId:
        return self.product

    def references(self) -> tuple[EntityId, ...]:
        return self.inputs


@dataclass(frozen=True)
class QualityEvent:
    """Q: the quality verdict on one template."""

    template: EntityId
    result: str

    variant = "quality"
    mapping = "Q"

    def __post_init__(self) -> None:
        _expect_kind(self.template, TEMPLATE, "quality subject")
        if self.result not in QUALITY_RESULTS:
            raise ValueError(f"quality result must be one of {QUALITY_RESULTS}, got {self.result!r}")

    @property
    def subject(self) -> EntityId:
        return self.template

    def references(self) -> tuple[EntityId, ...]:
        return (self.template,)


@dataclass(frozen=True)
class RecognizeEvent:
    """R: one template (optionally paired with a claimed phenomenon) mapped to a class.

    ``output=None`` is the unrecognized class.
    """

    batch: str
    template: EntityId
    output: Optional[EntityId] = None
    claimed: Optional[EntityId] = None

    variant = "recognize"
    mapping = "R"

    def __post_init__(self) -> None:
        if not isinstance(self.batch, str) or not self.batch:
            raise ValueError("batch label must be non-empty text")
        _expect_kind(self.template, TEMPLATE, "recognize input")
        if self.claimed is not None:
            _expect_kind(self.claimed, PHENOMENON, "claimed identity")
        if self.output is not None:
            _expect_kind(self.output, CLASS, "recognize output")
            if self.output.name == NU:
                raise ValueError("the unrecognized class is written as output=None")

    @property
    def subject(self) -> EntityId:
        return self.template

    @property
    def is_tuple(self) -> bool:
        return self.claimed is not None

    @property
    def key(self) -> tuple[EntityId, Optional[EntityId]]:
        """The recognition input: a bare template or a (template, claimed) tuple."""
        return (self.template, self.claimed)

    def references(self) -> tuple[EntityId, ...]:
        refs = [self.template]
        if self.claimed is not None:
            refs.append(self.claimed)
        if self.output is not None:
            refs.append(self.output)
        return tuple(refs)


MappingEvent = Union[SampleEvent, PreprocessEvent, ExtractEvent, QualityEvent, RecognizeEvent]

PRODUCERS = {SAMPLE: SampleEvent, PREPROCESSED: PreprocessEvent, TEMPLATE: ExtractEvent}


@dataclass(frozen=True)
class Trace:
    declarations: tuple[Declaration, ...] = ()
    events: tuple[MappingEvent, ...] = ()
    mu: int = 1
    mu_placement: str = "sampling"

    def __post_init__(self) -> None:
        object.__setattr__(self, "declarations", tuple(self.declarations))
        object.__setattr__(self, "events", tuple(self.events))
        if isinstance(self.mu, bool) or not isinstance(self.mu, int) or self.mu < 1:
            raise ValueError(f"mu must be a positive integer, got {self.mu!r}")
        if self.mu_placement not in PLACEMENTS:
            raise ValueError(f"mu_placement must be one of {PLACEMENTS}, got {self.mu_placement!r}")

    @property
    def sample_arity(self) -> int:
        return self.mu if self.mu_placement == "sampling" else 1

    @property
    def extract_arity(self) -> int:
        return self.mu if self.mu_placement == "extraction" else 1

    def records(self) -> Iterator[Union[Declaration, MappingEvent]]:
        yield from self.declarations
        yield from self.events

    def replace(self, **changes) -> "Trace":
        fields = dict(
            declarations=self.declarations,
            events=self.events,
            mu=self.mu,
            mu_placement=self.mu_placement,
        )
        fields.update(changes)
        return Trace(**fields)

    # convenience views, in declaration order
    def structure_decls(self) -> list[StructureDecl]:
        return [d for d in self.declarations if isinstance(d, StructureDecl)]

    def phenomenon_decls(self) -> list[PhenomenonDecl]:
        return [d for d in self.declarations if isinstance(d, PhenomenonDecl)]

    def class_decls(self) -> list[ClassDecl]:
        return [d for d in self.declarations if isinstance(d, ClassDecl)]

    def recognize_events(self, batch: Optional[str] = None) -> list[RecognizeEvent]:
        return [
            e for e in self.events
            if isinstance(e, RecognizeEvent) and (batch is None or e.batch == batch)
        ]

    def batches(self) -> list[str]:
        """Batch labels in order of first appearance."""
        return list(dict.fromkeys(e.batch for e in self.recognize_events()))


# -- derived sets ------------------------------------------------------------


def _ordered(items: Iterable[EntityId]) -> list[EntityId]:
    return list(dict.fromkeys(items))


def _members(trace: Trace, which: str) -> list[EntityId]:
    if which == "B_p":
        return _ordered(d.id for d in trace.phenomenon_decls())
    if which == "B_e":
        return _ordered(d.id for d in trace.phenomenon_decls() if d.is_enrolled)
    if which == "C":
        return _ordered(d.id for d in trace.class_decls() if d.id.name != NU)
    if which == "S_m":
        return _ordered(e.product for e in trace.events if isinstance(e, SampleEvent))
    if which == "S_p":
        return _ordered(e.product for e in trace.events if isinstance(e, PreprocessEvent))
    if which == "T":
        return _ordered(e.product for e in trace.events if isinstance(e, ExtractEvent))
    if which == "T_q":
        produced = set(_members(trace, "T"))
        passed = (
            e.template for e in trace.events
            if isinstance(e, QualityEvent) and e.result == "passed"
        )
        return _ordered(t for t in passed if t in produced)
    raise UsageError(f"unknown set name {which!r}; expected one of {', '.join(SET_NAMES)}")


def set_of(trace: Trace, which: str) -> frozenset[EntityId]:
    """Membership of one of the seven model sets at the end of ``trace``."""
    return frozenset(_members(trace, which))


def ordered_set(trace: Trace, which: str) -> list[EntityId]:
    """Like :func:`set_of` but in order of first appearance."""
    return _members(trace, which)


def cardinality(trace: Trace, which: str) -> int:
    return len(_members(trace, which))


def all_cardinalities(trace: Trace) -> dict[str, int]:
    return {name: cardinality(trace, name) for name in SET_NAMES}


def tuple_inputs(trace: Trace) -> frozenset[tuple[EntityId, EntityId]]:
    """Observed T_q⁺: distinct (template, claimed) pairs presented for recognition
    with the template quality-passed and the claimed identity a declared phenomenon."""
    tq = set_of(trace, "T_q")
    bp = set_of(trace, "B_p")
    return frozenset(
        (e.template, e.claimed) for e in trace.recognize_events()
        if e.claimed is not None and e.template in tq and e.claimed in bp
    )


def class_bindings(trace: Trace) -> dict[EntityId, Optional[EntityId]]:
    """Class id to bound phenomenon (first declaration wins)."""
    bindings: dict[EntityId, Optional[EntityId]] = {}
    for d in trace.class_decls():
        bindings.setdefault(d.id, d.bound_phenomenon)
    return bindings


def equivalent_to_enrolled(trace: Trace) -> bool:
    """True when the class bindings form a bijection between C and B_e."""
    classes = ordered_set(trace, "C")
    enrolled = set_of(trace, "B_e")
    bindings = class_bindings(trace)
    targets = [bindings.get(c) for c in classes]
    if any(t is None or t not in enrolled for t in targets):
        return False
    return len(set(targets)) == len(targets) and set(targets) == enrolled


def provenance(trace: Trace, entity: EntityId) -> frozenset[EntityId]:
    """Phenomena reachable from ``entity`` backwards through the mapping events."""
    producers: dict[EntityId, list[tuple[EntityId, ...]]] = {}
    for e in trace.events:
        if isinstance(e, (SampleEvent, PreprocessEvent, ExtractEvent)):
            producers.setdefault(e.product, []).append(e.references())
    owners: dict[EntityId, set[EntityId]] = {}
    for d in trace.phenomenon_decls():
        for st in d.structures:
            owners.setdefault(st, set()).add(d.id)

    found: set[EntityId] = set()
    seen: set[EntityId] = set()
    stack = [entity]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if node.kind == STRUCTURE:
            found |= owners.get(node, set())
            continue
        for refs in producers.get(node, ()):
            stack.extend(refs)
    return frozenset(found)
