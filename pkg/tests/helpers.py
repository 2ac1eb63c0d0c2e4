"""Small hand-built traces and a random trace builder that ignores validity."""
from __future__ import annotations

import random

from biotrace.model import (
    ClassDecl,
    ExtractEvent,
    PhenomenonDecl,
    PreprocessEvent,
    QualityEvent,
    RecognizeEvent,
    SampleEvent,
    StructureDecl,
    Trace,
    klass,
    phenomenon,
    preprocessed,
    sample,
    structure,
    template,
)

ph1, ph2, ph3 = phenomenon("ph1"), phenomenon("ph2"), phenomenon("ph3")
st1, st2, st3 = structure("st1"), structure("st2"), structure("st3")
sm1, sm2, sm3 = sample("sm1"), sample("sm2"), sample("sm3")
sp1, sp2, sp3 = preprocessed("sp1"), preprocessed("sp2"), preprocessed("sp3")
t1, t2, t3 = template("t1"), template("t2"), template("t3")
c1, c2, c3, c4 = klass("c1"), klass("c2"), klass("c3"), klass("c4")


def chain(result="passed", output=c1, claimed=None, bound=None, is_person=True, enrolled=True) -> Trace:
    """ph1 -> st1 -> sm1 -> sp1 -> t1 (quality) -> recognized in batch b1."""
    decls = [
        StructureDecl(st1),
        PhenomenonDecl(ph1, is_person, enrolled, (st1,)),
        ClassDecl(c1, bound),
    ]
    events = [SampleEvent(sm1, (st1,)), PreprocessEvent(sp1, sm1), ExtractEvent(t1, (sp1,))]
    if result is not None:
        events.append(QualityEvent(t1, result))
    events.append(RecognizeEvent("b1", t1, output, claimed))
    return Trace(tuple(decls), tuple(events))


def add_events(trace: Trace, *events) -> Trace:
    return trace.replace(events=trace.events + tuple(events))


def chaos_trace(rng: random.Random, max_entities: int = 50) -> Trace:
    """Arbitrary (mostly invalid) trace over small name pools so references collide."""
    pool = max(2, max_entities // 10)

    def name(prefix):
        return f"{prefix}{rng.randint(1, pool)}"

    decls = []
    for _ in range(rng.randint(0, pool * 2)):
        r = rng.random()
        if r < 0.35:
            decls.append(StructureDecl(structure(name("st"))))
        elif r < 0.7:
            sts = tuple(structure(name("st")) for _ in range(rng.randint(0, 2)))
            decls.append(PhenomenonDecl(phenomenon(name("ph")), rng.random() < 0.5, rng.random() < 0.6, sts))
        else:
            bound = phenomenon(name("ph")) if rng.random() < 0.6 else None
            cname = "ν" if rng.random() < 0.03 else name("c")
            decls.append(ClassDecl(klass(cname), bound))
    events = []
    for _ in range(rng.randint(0, pool * 4)):
        r = rng.random()
        if r < 0.2:
            events.append(SampleEvent(sample(name("sm")),
                                      tuple(structure(name("st")) for _ in range(rng.randint(0, 3)))))
        elif r < 0.4:
            events.append(PreprocessEvent(preprocessed(name("sp")), sample(name("sm"))))
        elif r < 0.6:
            events.append(ExtractEvent(template(name("t")),
                                       tuple(preprocessed(name("sp")) for _ in range(rng.randint(0, 3)))))
        elif r < 0.75:
            events.append(QualityEvent(template(name("t")), rng.choice(["passed", "failed"])))
        else:
            claimed = phenomenon(name("ph")) if rng.random() < 0.4 else None
            output = klass(name("c")) if rng.random() < 0.8 else None
            events.append(RecognizeEvent(rng.choice(["b1", "b2"]), template(name("t")), output, claimed))
    mu = rng.randint(1, 3)
    return Trace(tuple(decls), tuple(events), mu, rng.choice(["sampling", "extraction"]))


def entity_count(trace: Trace) -> int:
    ids = set()
    for d in trace.declarations:
        ids.add(d.id)
        ids.update(getattr(d, "structures", ()))
        if getattr(d, "bound_phenomenon", None) is not None:
            ids.add(d.bound_phenomenon)
    for e in trace.events:
        ids.add(e.subject)
        ids.update(e.references())
    return len(ids)
