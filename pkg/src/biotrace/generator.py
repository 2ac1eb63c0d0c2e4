"""Deterministic synthetic traces: mode-targeted, random-valid, and mutated.

Randomness comes from :class:`random.Random` seeded with an integer, and only
its ``random()`` method is used. Python guarantees both the seeding algorithm
and ``random()`` stay fixed across versions, so a (config, seed) pair yields
the same trace everywhere.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .model import (
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
    UsageError,
    klass,
    phenomenon,
    preprocessed,
    sample,
    structure,
    template,
)
from .modes import CLASSIFICATION, ENROLLMENT, IDENTIFICATION, KINDS, NORMAL, PHASES, TRAINING, VERIFICATION

RANDOM_VALID = "random-valid"
TARGETS = tuple((k, p) for p in PHASES for k in KINDS)

MAIN_BATCH = "main"
PROBE_BATCH = "probe"


@dataclass
class GenConfig:
    seed: int = 0
    target: object = (CLASSIFICATION, NORMAL)  # (kind, phase) or "random-valid"
    phenomena: int = 6
    classes: int = 4
    samples_per_phenomenon: int = 2  # random-valid only
    k: int = 2
    k_range: Optional[tuple[int, int]] = None  # overrides k with a per-class draw
    m: int = 6  # training batch size
    extras: int = 2  # failed/untested templates outside recognition
    mu: int = 1
    mu_placement: str = "sampling"
    persons: bool = True
    batches: int = 3  # random-valid only

    @property
    def k_interval(self) -> tuple[int, int]:
        return self.k_range if self.k_range is not None else (self.k, self.k)


def parse_target(text: str):
    if text == RANDOM_VALID:
        return RANDOM_VALID
    kind, sep, phase = text.partition(":")
    if not sep or kind not in KINDS or phase not in PHASES:
        raise UsageError(f"target must be <kind>:<phase> or {RANDOM_VALID}, got {text!r}")
    return (kind, phase)


def _check_config(cfg: GenConfig) -> None:
    problems = []
    for name in ("phenomena", "classes", "samples_per_phenomenon", "k", "m", "mu", "batches"):
        if getattr(cfg, name) < 1:
            problems.append(f"{name} must be positive (got {getattr(cfg, name)})")
    if cfg.extras < 0:
        problems.append(f"extras must be >= 0 (got {cfg.extras})")
    if cfg.mu_placement not in ("sampling", "extraction"):
        problems.append(f"mu_placement must be sampling or extraction (got {cfg.mu_placement!r})")
    if cfg.k_range is not None:
        lo, hi = cfg.k_range
        if lo < 1 or hi < lo:
            problems.append(f"k_range must satisfy 1 <= min <= max (got <{lo}, {hi}>)")
    if cfg.target != RANDOM_VALID:
        if cfg.target not in TARGETS:
            problems.append(f"unknown target {cfg.target!r}")
        else:
            kind, phase = cfg.target
            if kind in (VERIFICATION, IDENTIFICATION) and cfg.phenomena < cfg.classes:
                problems.append(
                    f"{kind} needs one enrolled phenomenon per class: phenomena={cfg.phenomena} < classes={cfg.classes}"
                )
            if phase == TRAINING and cfg.m < 2:
                problems.append(f"training needs m >= 2 inputs (got m={cfg.m}); m=1 is normal use")
    if problems:
        raise UsageError("infeasible generator config: " + "; ".join(problems))


def _uniform_int(rng: random.Random, lo: int, hi: int) -> int:
    """Integer in [lo, hi] from a single random() draw."""
    return lo + min(int(rng.random() * (hi - lo + 1)), hi - lo)


def _pick(rng: random.Random, items):
    return items[_uniform_int(rng, 0, len(items) - 1)]


def _shuffle(rng: random.Random, items: list) -> None:
    for i in range(len(items) - 1, 0, -1):
        j = _uniform_int(rng, 0, i)
        items[i], items[j] = items[j], items[i]


class _Builder:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.decls: list = []
        self.events: list = []
        self.structures: dict[EntityId, list[EntityId]] = {}
        self.counters = {"st": 0, "sm": 0, "sp": 0, "t": 0}

    def next(self, prefix: str) -> str:
        self.counters[prefix] += 1
        return f"{prefix}{self.counters[prefix]}"

    def add_phenomena(self, enrolled: set[int]) -> list[EntityId]:
        per = self.cfg.mu if self.cfg.mu > 1 else 1
        out = []
        for i in range(self.cfg.phenomena):
            sts = [structure(self.next("st")) for _ in range(per)]
            self.decls.extend(StructureDecl(s) for s in sts)
            ph = phenomenon(f"ph{i + 1}")
            self.decls.append(PhenomenonDecl(ph, self.cfg.persons, i in enrolled, tuple(sts)))
            self.structures[ph] = sts
            out.append(ph)
        return out

    def add_classes(self, bindings: list[Optional[EntityId]]) -> list[EntityId]:
        out = []
        for j, bound in enumerate(bindings):
            c = klass(f"c{j + 1}")
            self.decls.append(ClassDecl(c, bound))
            out.append(c)
        return out

    def capture(self, owner: EntityId, status: Optional[str]) -> EntityId:
        """Sample, preprocess and extract one template from ``owner``."""
        sts = self.structures[owner]
        if self.cfg.mu > 1 and self.cfg.mu_placement == "extraction":
            groups = [[s] for s in sts]
        elif self.cfg.mu > 1:
            groups = [sts]
        else:
            groups = [sts[:1]]
        sps = []
        for sources in groups:
            sm = sample(self.next("sm"))
            self.events.append(SampleEvent(sm, tuple(sources)))
            sp = preprocessed(self.next("sp"))
            self.events.append(PreprocessEvent(sp, sm))
            sps.append(sp)
        t = template(self.next("t"))
        self.events.append(ExtractEvent(t, tuple(sps)))
        if status is not None:
            self.events.append(QualityEvent(t, status))
        return t

    def trace(self) -> Trace:
        return Trace(tuple(self.decls), tuple(self.events), self.cfg.mu, self.cfg.mu_placement)


def generate_trace(cfg: GenConfig) -> Trace:
    """Build a trace that validates cleanly; mode targets put the target batch under ``main``."""
    _check_config(cfg)
    rng = random.Random(cfg.seed)
    if cfg.target == RANDOM_VALID:
        return _random_valid(cfg, rng)
    return _targeted(cfg, rng)


def _targeted(cfg: GenConfig, rng: random.Random) -> Trace:
    kind, phase = cfg.target
    b = _Builder(cfg)
    n = cfg.classes
    bound_kind = kind in (VERIFICATION, IDENTIFICATION)
    phenomena = b.add_phenomena(set(range(n)) if bound_kind else set())
    classes = b.add_classes([phenomena[j] if bound_kind else None for j in range(n)])
    owner_of_class = {classes[j]: phenomena[j] for j in range(n)} if bound_kind else {}

    # plan: list of (owner, claimed, output)
    plan: list[tuple[EntityId, Optional[EntityId], Optional[EntityId]]] = []
    probe = None

    def item(c: Optional[EntityId]):
        if bound_kind:
            owner = owner_of_class[c] if c is not None else phenomena[0]
        else:
            owner = _pick(rng, phenomena)
        return (owner, owner if kind == VERIFICATION else None, c)

    if phase == NORMAL:
        plan.append(item(_pick(rng, classes)))
    elif phase == TRAINING:
        # outputs never cover every class (or include ν), so the batch cannot look like enrollment
        usable = classes[:-1] if n > 1 else classes
        for i in range(cfg.m):
            c = usable[i % len(usable)]
            if n == 1 and i == cfg.m - 1:
                owner, claimed, _ = item(c)
                plan.append((owner, claimed, None))
            else:
                plan.append(item(c))
    else:
        lo, hi = cfg.k_interval
        for c in classes:
            for _ in range(_uniform_int(rng, lo, hi)):
                plan.append(item(c))
        # one later probe keeps c(T_q) above Υ so training cannot also match
        probe = item(_pick(rng, classes))

    main = []
    for owner, claimed, output in plan:
        t = b.capture(owner, "passed")
        main.append(RecognizeEvent(MAIN_BATCH, t, output, claimed))
    for _ in range(cfg.extras):
        b.capture(_pick(rng, phenomena), _pick(rng, ["failed", None]))
    _shuffle(rng, main)
    b.events.extend(main)
    if probe is not None:
        owner, claimed, output = probe
        t = b.capture(owner, "passed")
        b.events.append(RecognizeEvent(PROBE_BATCH, t, output, claimed))
    return b.trace()


def _random_valid(cfg: GenConfig, rng: random.Random) -> Trace:
    b = _Builder(cfg)
    enrolled = {i for i in range(cfg.phenomena) if rng.random() < 0.5}
    phenomena = b.add_phenomena(enrolled)
    free = [phenomena[i] for i in sorted(enrolled)]
    bindings = []
    for _ in range(cfg.classes):
        if free and rng.random() < 0.6:
            bindings.append(free.pop(_uniform_int(rng, 0, len(free) - 1)))
        else:
            bindings.append(None)
    classes = b.add_classes(bindings)
    class_of = {ph: c for c, ph in zip(classes, bindings) if ph is not None}
    labels = [f"b{i + 1}" for i in range(cfg.batches)]

    recognitions = []
    for ph in phenomena:
        for _ in range(cfg.samples_per_phenomenon):
            status = _pick(rng, ["passed", "passed", "failed", None])
            t = b.capture(ph, status)
            if status != "passed":
                continue
            for label in labels:
                if rng.random() >= 0.4:
                    continue
                if rng.random() < 0.3:
                    claimed = _pick(rng, phenomena)
                    output = class_of.get(claimed) if rng.random() < 0.8 else None
                else:
                    claimed = None
                    output = _pick(rng, classes) if rng.random() < 0.85 else None
                recognitions.append(RecognizeEvent(label, t, output, claimed))
    b.events.extend(recognitions)
    return b.trace()


# -- mutations ---------------------------------------------------------------

MUTATIONS = {
    "drop-preprocess": "P_NOT_TOTAL",
    "duplicate-quality": "Q_NOT_PARTIAL_FUNCTION",
    "double-recognize": "R_NOT_PARTIAL",
    "dangle-structure": "STRUCT_DANGLING_REF",
    "cross-claim": "R_VERIFY_CLASS_MISMATCH",
}


def _prune(decls, events) -> list:
    """Drop events whose references are no longer produced earlier in the trace."""
    declared = {d.id for d in decls}
    produced: set[EntityId] = set()
    kept = []
    for e in events:
        refs = e.references()
        if all(r in declared or r in produced for r in refs):
            kept.append(e)
            if isinstance(e, (SampleEvent, PreprocessEvent, ExtractEvent)):
                produced.add(e.product)
    return kept


def mutate_trace(trace: Trace, mutation: str, seed: int) -> Trace:
    """Apply one named defect. The result still parses after serialization."""
    if mutation not in MUTATIONS:
        raise UsageError(f"unknown mutation {mutation!r}; expected one of {', '.join(MUTATIONS)}")
    rng = random.Random(seed)
    events = list(trace.events)
    decls = list(trace.declarations)

    def choose(candidates, what):
        if not candidates:
            raise UsageError(f"mutation {mutation!r} is not applicable: the trace has no {what}")
        return _pick(rng, candidates)

    if mutation == "drop-preprocess":
        i = choose([i for i, e in enumerate(events) if isinstance(e, PreprocessEvent)], "preprocess events")
        del events[i]
        events = _prune(decls, events)
    elif mutation == "duplicate-quality":
        i = choose([i for i, e in enumerate(events) if isinstance(e, QualityEvent)], "quality events")
        events.insert(i + 1, events[i])
    elif mutation == "double-recognize":
        i = choose([i for i, e in enumerate(events) if isinstance(e, RecognizeEvent)], "recognize events")
        events.insert(i + 1, events[i])
    elif mutation == "dangle-structure":
        sampled = {st for e in events if isinstance(e, SampleEvent) for st in e.sources}
        owners = [
            (i, st) for i, d in enumerate(decls) if isinstance(d, PhenomenonDecl)
            for st in d.structures if st in sampled
        ]
        i, st = choose(owners, "sampled structures owned by a phenomenon")
        d = decls[i]
        decls[i] = PhenomenonDecl(d.id, d.is_person, d.is_enrolled, tuple(s for s in d.structures if s != st))
        # the structure may be listed by a second owner; detach it everywhere
        for j, other in enumerate(decls):
            if isinstance(other, PhenomenonDecl) and st in other.structures:
                decls[j] = PhenomenonDecl(other.id, other.is_person, other.is_enrolled,
                                          tuple(s for s in other.structures if s != st))
    elif mutation == "cross-claim":
        phenomena = list(dict.fromkeys(d.id for d in decls if isinstance(d, PhenomenonDecl)))
        classes = [d for d in decls if isinstance(d, ClassDecl)]
        pairs = [
            (ph, c.id) for ph in phenomena for c in classes
            if not any(x.id == c.id and x.bound_phenomenon == ph for x in classes)
        ]
        i = choose([i for i, e in enumerate(events) if isinstance(e, RecognizeEvent)], "recognize events")
        ph, c = choose(pairs, "phenomenon/class pair outside the bindings")
        e = events[i]
        events[i] = RecognizeEvent(e.batch, e.template, c, ph)
    return trace.replace(declarations=tuple(decls), events=tuple(events))
