"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``)."""

from __future__ import annotations

import itertools
import time
from contextlib import contextmanager
from random import Random

from semannot.annotation import AnnotationStore, PRKind, SRKind
from semannot.blocks import Selector, apply_rules, delimit_sb, validate_sbr
from semannot.cli import main
from semannot.model import explicate_relations, type_elements
from semannot.reason import detect_inconsistency, suggest

from .oracles import bfs_reachable, nested_loop_derive, random_digraph, sbr_conditions
from .test_kstore import graph_from_edges
from .test_reason import load_expected_table


@contextmanager
def criterion(name: str):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    elapsed = time.perf_counter() - started
    print(f"ACCEPTANCE {name}: PASS ({elapsed:.2f}s)")


def test_table1_exactness():
    with criterion("table-1 exactness (125/125, <1s)"):
        started = time.perf_counter()
        expected = load_expected_table()
        assert len(expected) == 125
        mismatches = [
            key for key, verdict in expected.items() if detect_inconsistency(*key) is not verdict
        ]
        assert mismatches == []
        assert time.perf_counter() - started < 1.0


def test_table1_symmetry():
    with criterion("table-1 symmetry under inverse (125/125)"):
        violations = [
            (a, b, pr)
            for a, b, pr in itertools.product(SRKind, SRKind, PRKind)
            if detect_inconsistency(a, b, pr) is not detect_inconsistency(b, a, pr.inverse())
        ]
        assert violations == []


def test_sb_matches_bfs_oracle_on_1000_random_digraphs():
    with criterion("semantic-block delimitation vs BFS oracle (1000 digraphs, <30s)"):
        started = time.perf_counter()
        rng = Random(0xB10C)
        checked = 0
        for _ in range(1000):
            nodes, edges = random_digraph(rng, max_nodes=20, max_edges=60)
            g = graph_from_edges(edges, extra_nodes=nodes)
            main_concept = rng.choice(nodes)
            mode = rng.randrange(3)
            if mode == 0:
                selector, preds, depth = Selector.everything(), None, None
            elif mode == 1:
                preds = set(rng.sample(["p0", "p1", "p2", "p3"], rng.randint(1, 4)))
                selector, depth = Selector.whitelist(preds), None
            else:
                depth = rng.randint(0, 8)
                selector, preds = Selector.depth_bounded(depth), None
            block = delimit_sb(g, main_concept, selector)
            assert block.entities == bfs_reachable(edges, main_concept, preds, depth)
            block.validate()
            checked += 1
        assert checked == 1000
        assert time.perf_counter() - started < 30.0


def test_sbr_exhaustive_against_direct_conditions():
    with criterion("substitution-block conditions vs direct evaluation (>=500 seeded cases)"):
        rng = Random(551)
        cases = 0
        while cases < 500:
            n = rng.randint(2, 5)
            nodes = [f"v{i}" for i in range(n)]
            m = rng.randint(0, 8)
            edges = list(
                {(rng.choice(nodes), "p", rng.choice(nodes)) for _ in range(m)}
            )
            g = graph_from_edges(edges, extra_nodes=nodes)
            left, right = rng.choice(nodes), rng.choice(nodes)
            interior = {node for node in nodes if rng.random() < 0.4}
            chosen = [e for e in edges if rng.random() < 0.6]
            rels = [r for r in g.relations if r.as_triple() in set(chosen)]
            strict = validate_sbr(g, left, right, interior, rels, mode="strict")
            symmetric = validate_sbr(g, left, right, interior, rels, mode="symmetric")
            for mode, result in (("strict", strict), ("symmetric", symmetric)):
                expected_ok, expected_cond = sbr_conditions(left, right, interior, chosen, mode)
                assert result.ok == expected_ok
                if not expected_ok:
                    assert result.condition == expected_cond
            if strict.ok:
                assert symmetric.ok
            cases += 1
        assert cases >= 500


def test_rule_engine_matches_nested_loop_enumerator(project):
    with criterion("rule engine vs nested-loop oracle + idempotence"):
        rg = explicate_relations(project.model)
        types = type_elements(project.model, project.meta_model)
        derived = apply_rules(rg, types, project.rules)
        facts = rg.facts() | {(e, "rdf:type", t) for e, t in types}
        expected = nested_loop_derive(
            facts, [(r.name, list(r.antecedents), r.consequent) for r in project.rules]
        )
        assert {(r.source, r.predicate, r.target, r.rule) for r in derived} == expected
        second = apply_rules(rg.with_derived(derived, project.rules.names), types, project.rules)
        assert set(second) == set(derived)  # re-application adds nothing


def test_case_study_regression(project, perturbed_project):
    with criterion("case-study regression (clean fixture, perturbed e2, <5s)"):
        started = time.perf_counter()
        clean = project.run()
        assert len(project.store) == 11
        assert clean.inconsistent_findings() == ()
        assert clean.conflicts == ()

        perturbed = perturbed_project.run()
        bad = perturbed.inconsistent_findings()
        assert len(bad) >= 1
        assert {f.element for f in bad} == {"e2"}
        assert any(c.suspects == ("e2", "e9") for c in perturbed.conflicts)
        assert time.perf_counter() - started < 5.0


def test_suggestion_gate_and_nesting_suppression(project):
    with criterion("suggestion gate (randomized stores) + nesting suppression"):
        rng = Random(4242)
        rg = explicate_relations(project.model)
        types = type_elements(project.model, project.meta_model)
        rg = rg.with_derived(apply_rules(rg, types, project.rules), project.rules.names)
        originals = list(project.store.annotations)
        gated = {SRKind.EQUIVALENT, SRKind.OVERLAPPING, SRKind.DISJOINT}

        for _ in range(100):
            store = project.store.copy()
            for a in originals:
                store.remove(a.id)
            kinds = {}
            for a in rng.sample(originals, rng.randint(0, len(originals))):
                kinds[a.id] = rng.choice(list(SRKind))
            for a in originals:
                if a.id in kinds:
                    store.annotate(a.element, a.domain, kinds[a.id], a.provenance, annotation_id=a.id)
            generalizing = {
                a.element for a in store.annotations if a.sr not in gated
            }
            for proposal in suggest(store, rg, project.knowledge):
                assert proposal.provenance.source_element in generalizing

        # Constructed containment: an enclosing block on e2 suppresses its twin.
        keep = [a for a in originals if a.element != "e2"]
        nested_store = AnnotationStore(
            project.model, project.knowledge, keep, project.store.associations
        )
        containing = project.store.get("sa9").domain
        from semannot.annotation import Provenance

        nested_store.annotate("e2", containing, SRKind.LESS_GENERAL, Provenance.initial())
        for proposal in suggest(nested_store, rg, project.knowledge):
            assert proposal.element != "e2"
        # Suppression postcondition: no surviving proposal nests with any
        # existing block on its element (equal blocks count as nested).
        for proposal in suggest(project.store, rg, project.knowledge):
            for existing in project.store.by_element(proposal.element):
                assert not proposal.domain.entities <= existing.domain.entities
                assert not existing.domain.entities <= proposal.domain.entities


def test_check_is_byte_deterministic(case_dir, tmp_path):
    with criterion("annot check determinism (byte-identical reports)"):
        for config_name in ("project.json", "project_perturbed.json"):
            out1 = tmp_path / f"1-{config_name}.out"
            out2 = tmp_path / f"2-{config_name}.out"
            config = str(case_dir / config_name)
            first = main(["check", "--config", config, "--out", str(out1)])
            second = main(["check", "--config", config, "--out", str(out2)])
            assert first == second
            assert out1.read_bytes() == out2.read_bytes()
