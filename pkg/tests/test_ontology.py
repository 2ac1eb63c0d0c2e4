import dataclasses

import pytest
from hypothesis import given, strategies as st

from biotrace.checks import validate_trace
from biotrace.generator import TARGETS, GenConfig, generate_trace
from biotrace.model import (
    ClassDecl,
    ExtractEvent,
    PhenomenonDecl,
    PreprocessEvent,
    QualityEvent,
    SampleEvent,
    StructureDecl,
    Trace,
    UsageError,
    klass,
    preprocessed,
    set_of,
    template,
)
from biotrace.ontology import (
    BROADER,
    MIXED,
    NARROWER,
    check_conformance,
    derive_status,
)

from helpers import add_events, c1, chain, ph1, ph2, sm1, sm2, sp1, sp2, st1, st2, t1


def codes(report):
    return {(v.code, v.subject) for v in report.violations}


def broaden(trace: Trace) -> Trace:
    decls = tuple(
        dataclasses.replace(d, is_person=False) if isinstance(d, PhenomenonDecl) else d
        for d in trace.declarations
    )
    return trace.replace(declarations=decls)


class TestConformance:
    def test_minimal_chain(self):
        report = check_conformance(chain())
        assert report.violations == [] and report.perspective == NARROWER
        assert check_conformance(chain(is_person=False)).perspective == BROADER

    def test_structure_with_two_owners(self):
        decls = (StructureDecl(st1), PhenomenonDecl(ph1, True, False, (st1,)),
                 PhenomenonDecl(ph2, True, False, (st1,)))
        assert codes(check_conformance(Trace(decls))) == {("ONT_STRUCTURE_MULTI_OWNER", st1)}

    def test_structure_without_owner(self):
        assert codes(check_conformance(Trace((StructureDecl(st1),)))) == {("ONT_STRUCTURE_MULTI_OWNER", st1)}

    def test_mixed_perspective(self):
        decls = (StructureDecl(st1), StructureDecl(st2), PhenomenonDecl(ph1, True, False, (st1,)),
                 PhenomenonDecl(ph2, False, False, (st2,)))
        assert check_conformance(Trace(decls)).perspective == MIXED

    def test_sample_without_source(self):
        trace = Trace((), (SampleEvent(sm1, ()),))
        assert ("ONT_SAMPLE_NO_SOURCE", sm1) in codes(check_conformance(trace))

    def test_multi_structure_sample_outside_multimodal_sampling(self):
        decls = (StructureDecl(st1), StructureDecl(st2), PhenomenonDecl(ph1, True, False, (st1, st2)))
        trace = Trace(decls, (SampleEvent(sm1, (st1, st2)),), mu=2, mu_placement="extraction")
        assert codes(check_conformance(trace)) == {("ONT_SAMPLE_BAD_ARITY", sm1)}
        assert check_conformance(trace.replace(mu_placement="sampling")).violations == []

    def test_preprocessed_from_two_samples_is_a_warning(self):
        decls = (StructureDecl(st1), PhenomenonDecl(ph1, True, False, (st1,)))
        events = (SampleEvent(sm1, (st1,)), SampleEvent(sm2, (st1,)),
                  PreprocessEvent(sp1, sm1), PreprocessEvent(sp1, sm2))
        report = check_conformance(Trace(decls, events))
        assert codes(report) == {("ONT_PREPROC_MULTI_SAMPLE", sp1)}
        assert report.ok

    def test_template_without_input(self):
        trace = Trace((), (ExtractEvent(t1, ()),))
        assert codes(check_conformance(trace)) == {("ONT_TEMPLATE_NO_INPUT", t1)}

    def test_conflicting_verdicts(self):
        trace = add_events(chain(), QualityEvent(t1, "failed"))
        assert ("ONT_STATUS_INCONSISTENT", t1) in codes(check_conformance(trace))

    def test_binding_to_unenrolled_phenomenon(self):
        trace = chain(bound=ph1, enrolled=False)
        assert codes(check_conformance(trace)) == {("ONT_SUBSUMPTION_BROKEN", c1)}

    def test_conflicting_flags(self):
        decls = (PhenomenonDecl(ph1, True, True), PhenomenonDecl(ph1, False, True))
        assert codes(check_conformance(Trace(decls))) == {("ONT_SUBSUMPTION_BROKEN", ph1)}

    def test_class_association_is_unconstrained(self):
        trace = chain()
        events = trace.events + tuple(
            dataclasses.replace(trace.events[-1], batch=f"b{i}") for i in range(2, 5))
        decls = trace.declarations + (ClassDecl(klass("c2")),)
        assert check_conformance(Trace(decls, events)).violations == []


class TestArityAgreement:
    @pytest.mark.parametrize("mu, placement, n_inputs", [
        (1, "sampling", 0), (1, "sampling", 2), (2, "extraction", 1), (2, "extraction", 3),
        (2, "extraction", 2), (1, "sampling", 1), (3, "sampling", 2),
    ])
    def test_bad_arity_findings_agree(self, mu, placement, n_inputs):
        sps = [preprocessed(f"sp{i}") for i in range(n_inputs)]
        decls = (StructureDecl(st1), PhenomenonDecl(ph1, True, False, (st1,)))
        events = [SampleEvent(sm1, (st1,) * (mu if placement == "sampling" else 1))]
        events += [PreprocessEvent(sp, sm1) for sp in sps]
        events.append(ExtractEvent(t1, tuple(sps)))
        trace = Trace(decls, tuple(events), mu, placement)
        mapping_side = ("F_BAD_ARITY", t1) in validate_trace(trace).keys()
        ontology_side = bool({("ONT_TEMPLATE_NO_INPUT", t1), ("ONT_TEMPLATE_BAD_ARITY", t1)}
                             & codes(check_conformance(trace)))
        assert mapping_side == ontology_side


class TestStatus:
    def test_untested(self):
        assert derive_status(chain(result=None), t1) == "untested"

    def test_passed_and_failed(self):
        assert derive_status(chain(), t1) == "passed"
        assert derive_status(chain(result="failed"), t1) == "failed"

    def test_unknown_template(self):
        with pytest.raises(UsageError):
            derive_status(chain(), template("t9"))

    @pytest.mark.parametrize("target", list(TARGETS) + ["random-valid"], ids=str)
    def test_passed_iff_in_t_q(self, target):
        for seed in range(4):
            trace = generate_trace(GenConfig(target=target, seed=seed))
            t_q = set_of(trace, "T_q")
            for t in set_of(trace, "T"):
                assert (derive_status(trace, t) == "passed") == (t in t_q)


@given(st.sampled_from(list(TARGETS) + ["random-valid"]), st.integers(0, 10**6))
def test_broadening_never_adds_violations(target, seed):
    trace = generate_trace(GenConfig(target=target, seed=seed, persons=True))
    narrow = check_conformance(trace)
    assert narrow.perspective == NARROWER and narrow.violations == []
    broad = check_conformance(broaden(trace))
    assert broad.perspective == BROADER and broad.violations == []
