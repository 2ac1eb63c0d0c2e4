"""Exit criteria. Each test records one PASS/FAIL line, printed in the terminal summary."""
import dataclasses
import random
import time

import pytest

from biotrace.checks import validate_trace
from biotrace.generator import MUTATIONS, TARGETS, GenConfig, generate_trace, mutate_trace
from biotrace.model import PhenomenonDecl, set_of
from biotrace.modes import classify_mode, erase_bindings, strip_claims
from biotrace.ontology import check_conformance, derive_status
from biotrace.oracle import brute_force_validate
from biotrace.traceio import parse_trace, serialize_trace

from conftest import ACCEPTANCE_LINES
from helpers import chaos_trace, entity_count


def record(name: str, passed: int, total: int, extra: str = "") -> None:
    status = "PASS" if passed == total else "FAIL"
    line = f"[{status}] {name}: {passed}/{total}"
    if extra:
        line += f" ({extra})"
    ACCEPTANCE_LINES.append(line)
    print(line)


GOLDEN = {
    ("verification", "normal"): "1 : 1, C ≃ B_e",
    ("classification", "normal"): "1 : n, c(C) = n",
    ("identification", "normal"): "1 : n′, c(B_e) = n′",
    ("verification", "training"): "m : 1, c(T_q⁺) = m",
    ("classification", "training"): "m : n, c(T_q) = m, c(C) = n",
    ("identification", "training"): "m : n′, c(T_q) = m, c(B_e) = n′",
    ("verification", "enrollment"): "n′ · k : 1, c(T_q)/k = c(B_e) = n′",
    ("classification", "enrollment"): "n · k : n, c(T_q)/k = c(C) = n",
    ("identification", "enrollment"): "n′ · k : n′, c(T_q)/k = c(B_e) = n′",
}


def test_1_nine_mode_golden_suite():
    start = time.perf_counter()
    hits = 0
    misses = []
    for target, denotation in GOLDEN.items():
        report = classify_mode(generate_trace(GenConfig(target=target, seed=1)), "main")
        if (report.kind, report.phase) == target and report.denotation == denotation:
            hits += 1
        else:
            misses.append((target, report.kind, report.phase, report.denotation))
    elapsed = time.perf_counter() - start
    record("1 nine-mode golden suite", hits, 9, f"{elapsed:.3f} s")
    assert not misses, misses
    assert hits == 9
    assert elapsed < 1.0


def _special_case_configs(kind: str, count: int):
    phases = ("normal", "training", "enrollment")
    for i in range(count):
        classes = 1 + i % 6
        yield GenConfig(
            target=(kind, phases[i % 3]),
            seed=1000 + i,
            classes=classes,
            phenomena=classes + i % 3,
            k=1 + i % 4,
            m=2 + i % 7,
            extras=i % 3,
            mu=1 + i % 2,
            mu_placement=("sampling", "extraction")[(i // 2) % 2],
        )


def test_2_special_case_theorem():
    n = 210
    ident_ok = 0
    for cfg in _special_case_configs("identification", n):
        trace = generate_trace(cfg)
        before = classify_mode(trace, "main")
        after = classify_mode(erase_bindings(trace), "main")
        if (before.kind == "identification" and after.kind == "classification"
                and (before.phase, before.upsilon, before.omega) == (after.phase, after.upsilon, after.omega)):
            ident_ok += 1
    verif_ok = 0
    for cfg in _special_case_configs("verification", n):
        trace = generate_trace(cfg)
        before = classify_mode(trace, "main")
        after = classify_mode(erase_bindings(strip_claims(trace)), "main")
        if before.kind == "verification" and after.kind == "classification" and before.phase == after.phase:
            verif_ok += 1
    record("2 special-case theorem (identification)", ident_ok, n)
    record("2 special-case theorem (verification)", verif_ok, n)
    assert ident_ok == n and verif_ok == n


def _differential_corpus(count: int):
    rng = random.Random(20240601)
    mutations = sorted(MUTATIONS)
    for i in range(count):
        flavour = i % 3
        if flavour == 2:
            yield "chaos", chaos_trace(rng, 50)
            continue
        target = TARGETS[i % 9] if i % 10 or flavour == 1 else "random-valid"
        cfg = GenConfig(
            target=target, seed=i, phenomena=2 + i % 2, classes=1 + i % 2, samples_per_phenomenon=1 + i % 2,
            k=1 + i % 2, m=2 + i % 2, extras=i % 2, mu=1 + i % 2,
            mu_placement=("sampling", "extraction")[i % 4 // 2], batches=2,
        )
        trace = generate_trace(cfg)
        if flavour == 1:
            yield "mutated", mutate_trace(trace, mutations[i % 5], i)
        else:
            yield "valid", trace


def test_3_differential_oracle():
    total = agree = 0
    flavours = {}
    too_big = []
    for flavour, trace in _differential_corpus(1050):
        total += 1
        flavours[flavour] = flavours.get(flavour, 0) + 1
        if entity_count(trace) > 50:
            too_big.append(entity_count(trace))
        if validate_trace(trace).keys() == brute_force_validate(trace).keys():
            agree += 1
    record("3 differential oracle", agree, total, ", ".join(f"{k}={v}" for k, v in sorted(flavours.items())))
    assert not too_big, too_big
    assert total >= 1000 and agree == total


def test_4_mutation_detection():
    hits = total = 0
    missed = []
    for target in TARGETS:
        for seed in range(10):
            trace = generate_trace(GenConfig(target=target, seed=seed))
            for mutation, code in MUTATIONS.items():
                total += 1
                mutated = mutate_trace(trace, mutation, seed)
                if code in validate_trace(mutated).codes():
                    hits += 1
                else:
                    missed.append((target, seed, mutation))
    record("4 mutation detection", hits, total)
    assert total == 450 and hits == 450, missed[:5]


def _corpus():
    for target in list(TARGETS) + ["random-valid"]:
        for seed in range(5):
            for mu, placement in ((1, "sampling"), (2, "sampling"), (3, "extraction")):
                trace = generate_trace(GenConfig(target=target, seed=seed, mu=mu, mu_placement=placement))
                yield trace
                if target != "random-valid":
                    yield mutate_trace(trace, sorted(MUTATIONS)[seed], seed)


def test_5_round_trip():
    ok = total = 0
    for trace in _corpus():
        total += 1
        text = serialize_trace(trace)
        if parse_trace(text) == trace and serialize_trace(parse_trace(text)) == text and serialize_trace(trace) == text:
            ok += 1
    record("5 round-trip and idempotence", ok, total)
    assert ok == total


def test_6_ontology_consistency():
    ok = total = 0
    for trace in _corpus():
        t_q = set_of(trace, "T_q")
        for t in set_of(trace, "T"):
            total += 1
            ok += (derive_status(trace, t) == "passed") == (t in t_q)
        before = {v.key() for v in check_conformance(trace).violations}
        broad = trace.replace(declarations=tuple(
            dataclasses.replace(d, is_person=False) if isinstance(d, PhenomenonDecl) else d
            for d in trace.declarations))
        after = {v.key() for v in check_conformance(broad).violations}
        total += 1
        ok += after <= before
    record("6 ontology consistency", ok, total)
    assert ok == total


def test_7_scale():
    cfg = GenConfig(target="random-valid", phenomena=4600, samples_per_phenomenon=5, classes=150, seed=7)
    trace = generate_trace(cfg)
    start = time.perf_counter()
    report = validate_trace(trace)
    elapsed = time.perf_counter() - start
    captures = cfg.phenomena * cfg.samples_per_phenomenon
    expected = {"B_p": cfg.phenomena, "S_m": captures, "S_p": captures, "T": captures, "C": cfg.classes}
    counts_ok = all(report.checked_counts[k] == v for k, v in expected.items())
    passed = len(trace.events) >= 100_000 and elapsed < 5.0 and counts_ok and report.violations == []
    record("7 scale check", int(passed), 1, f"{len(trace.events)} events in {elapsed:.2f} s")
    assert len(trace.events) >= 100_000
    assert counts_ok, report.checked_counts
    assert report.violations == []
    assert elapsed < 5.0
