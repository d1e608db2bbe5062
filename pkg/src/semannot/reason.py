"""Reasoning over semantic annotations: domain-semantics comparison,
inferred-annotation suggestion, inconsistency detection, conflict
identification between annotated elements, and the batch pipeline."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum

from .annotation import (
    AnnotationStore,
    DomainSemantics,
    PRKind,
    Provenance,
    ProvenanceKind,
    SemanticAnnotation,
    SRKind,
    SUGGESTING_KINDS,
    natural_key,
)
from .blocks import RuleSet, Selector, apply_rules, delimit_sb
from .errors import AnnotError, UnknownEntityError
from .kstore import KnowledgeStore
from .model import Model, RelationGraph, explicate_relations, type_elements


class Verdict(Enum):
    CONSISTENT = "consistent"
    POSSIBLY_CONSISTENT = "possiblyConsistent"
    INCONSISTENT = "inconsistent"


_EQ = PRKind.EQUIVALENT
_MG = PRKind.MORE_GENERAL
_LG = PRKind.LESS_GENERAL
_OV = PRKind.OVERLAPPING
_DJ = PRKind.DISJOINT
_ALL = frozenset(PRKind)
_NONE: frozenset[PRKind] = frozenset()

# The inconsistency-detection grid, keyed (sr of the first annotation,
# sr of the second annotation); each cell lists the block-comparison kinds
# that make the pair consistent and the ones that leave it possibly
# consistent — anything else is an inconsistency. Written out row by row
# (second annotation fixed per row).
_TABLE1: dict[tuple[SRKind, SRKind], tuple[frozenset[PRKind], frozenset[PRKind]]] = {
    # second annotation: equivalent
    (SRKind.EQUIVALENT, SRKind.EQUIVALENT): (frozenset({_EQ}), _NONE),
    (SRKind.MORE_GENERAL, SRKind.EQUIVALENT): (frozenset({_LG}), _NONE),
    (SRKind.LESS_GENERAL, SRKind.EQUIVALENT): (frozenset({_MG}), _NONE),
    (SRKind.OVERLAPPING, SRKind.EQUIVALENT): (frozenset({_OV}), _NONE),
    (SRKind.DISJOINT, SRKind.EQUIVALENT): (frozenset({_DJ}), _NONE),
    # second annotation: more general
    (SRKind.EQUIVALENT, SRKind.MORE_GENERAL): (frozenset({_MG}), _NONE),
    (SRKind.MORE_GENERAL, SRKind.MORE_GENERAL): (_NONE, _ALL),
    (SRKind.LESS_GENERAL, SRKind.MORE_GENERAL): (frozenset({_MG}), _NONE),
    (SRKind.OVERLAPPING, SRKind.MORE_GENERAL): (_NONE, frozenset({_MG, _OV, _DJ})),
    (SRKind.DISJOINT, SRKind.MORE_GENERAL): (frozenset({_DJ}), _NONE),
    # second annotation: less general
    (SRKind.EQUIVALENT, SRKind.LESS_GENERAL): (frozenset({_LG}), _NONE),
    (SRKind.MORE_GENERAL, SRKind.LESS_GENERAL): (frozenset({_LG}), _NONE),
    (SRKind.LESS_GENERAL, SRKind.LESS_GENERAL): (_NONE, frozenset({_EQ, _LG, _MG, _OV})),
    (SRKind.OVERLAPPING, SRKind.LESS_GENERAL): (_NONE, frozenset({_LG, _OV})),
    (SRKind.DISJOINT, SRKind.LESS_GENERAL): (_NONE, frozenset({_LG, _OV, _DJ})),
    # second annotation: overlapping
    (SRKind.EQUIVALENT, SRKind.OVERLAPPING): (frozenset({_OV}), _NONE),
    (SRKind.MORE_GENERAL, SRKind.OVERLAPPING): (_NONE, frozenset({_LG, _OV, _DJ})),
    (SRKind.LESS_GENERAL, SRKind.OVERLAPPING): (_NONE, frozenset({_MG, _OV})),
    (SRKind.OVERLAPPING, SRKind.OVERLAPPING): (_NONE, _ALL),
    (SRKind.DISJOINT, SRKind.OVERLAPPING): (_NONE, frozenset({_LG, _OV, _DJ})),
    # second annotation: disjoint
    (SRKind.EQUIVALENT, SRKind.DISJOINT): (frozenset({_DJ}), _NONE),
    (SRKind.MORE_GENERAL, SRKind.DISJOINT): (frozenset({_DJ}), _NONE),
    (SRKind.LESS_GENERAL, SRKind.DISJOINT): (_NONE, frozenset({_MG, _OV, _DJ})),
    (SRKind.OVERLAPPING, SRKind.DISJOINT): (_NONE, frozenset({_MG, _OV, _DJ})),
    (SRKind.DISJOINT, SRKind.DISJOINT): (_NONE, _ALL),
}


def detect_inconsistency(sr_x: SRKind, sr_y: SRKind, pr: PRKind) -> Verdict:
    """Verdict for two annotations of one element: the first related to its
    block by ``sr_x``, the second by ``sr_y``, with the blocks comparing as
    ``pr``."""
    consistent, possible = _TABLE1[(sr_x, sr_y)]
    if pr in consistent:
        return Verdict.CONSISTENT
    if pr in possible:
        return Verdict.POSSIBLY_CONSISTENT
    return Verdict.INCONSISTENT


def _closed_entities(
    block: DomainSemantics, knowledge: KnowledgeStore, subclass_closure: bool
) -> frozenset[str]:
    union = knowledge.union_graph()
    for entity_id in block.entities:
        if entity_id not in union:
            raise UnknownEntityError(entity_id)
    if not subclass_closure:
        return block.entities
    closed = set(block.entities)
    for entity_id in block.entities:
        closed |= knowledge.subclass_descendants(entity_id)
    return frozenset(closed)


def compare_domain_semantics(
    p_x: DomainSemantics,
    p_y: DomainSemantics,
    knowledge: KnowledgeStore,
    *,
    subclass_closure: bool = False,
) -> PRKind:
    """Set-algebra comparison of two blocks' entity sets, optionally after
    closing both downward along rdfs:subClassOf."""
    s_x = _closed_entities(p_x, knowledge, subclass_closure)
    s_y = _closed_entities(p_y, knowledge, subclass_closure)
    if s_x == s_y:
        return PRKind.EQUIVALENT
    if s_x > s_y:
        return PRKind.MORE_GENERAL
    if s_x < s_y:
        return PRKind.LESS_GENERAL
    if s_x & s_y:
        return PRKind.OVERLAPPING
    return PRKind.DISJOINT


@dataclass(frozen=True)
class InconsistencyFinding:
    element: str
    sa_x: str
    sa_y: str
    pr: PRKind
    verdict: Verdict

    def to_json_dict(self) -> dict:
        return {
            "element": self.element,
            "saX": self.sa_x,
            "saY": self.sa_y,
            "pr": self.pr.value,
            "verdict": self.verdict.value,
        }


@dataclass(frozen=True)
class ConflictFinding:
    suspects: tuple[str, ...]
    reason: str
    finding_index: int

    def to_json_dict(self) -> dict:
        return {"suspects": list(self.suspects), "reason": self.reason, "finding": self.finding_index}


@dataclass(frozen=True)
class Report:
    suggestions: tuple[SemanticAnnotation, ...]
    inconsistencies: tuple[InconsistencyFinding, ...]
    conflicts: tuple[ConflictFinding, ...]
    stats: dict[str, int]

    def inconsistent_findings(self) -> tuple[InconsistencyFinding, ...]:
        return tuple(f for f in self.inconsistencies if f.verdict is Verdict.INCONSISTENT)

    def to_json_dict(self) -> dict:
        return {
            "suggestions": [s.to_json_dict() for s in self.suggestions],
            "inconsistencies": [f.to_json_dict() for f in self.inconsistencies],
            "conflicts": [c.to_json_dict() for c in self.conflicts],
            "stats": dict(self.stats),
        }

    def canonical_bytes(self) -> bytes:
        return (json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")


def _proposal_id(element: str, sr: SRKind, block: DomainSemantics, provenance: Provenance) -> str:
    payload = json.dumps(
        {
            "element": element,
            "sr": sr.value,
            "block": block.to_json_dict(),
            "provenance": provenance.to_json_dict(),
        },
        sort_keys=True,
    )
    return "sug-" + hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def _nested(a: frozenset[str], b: frozenset[str]) -> bool:
    return a <= b or b <= a


def suggest(
    store: AnnotationStore,
    rg: RelationGraph,
    knowledge: KnowledgeStore,
    *,
    max_inference_depth: int = 4,
) -> list[SemanticAnnotation]:
    """Propose inferred annotations.

    For each annotation whose relation kind can generalize (less/more
    general only), each derived relation incident to its element, and each
    registered association of that derived predicate: ontology relations
    carrying the associated property out of the block's main concept name
    replacement concepts, whose blocks are proposed for the related element.
    Proposals nested (by entity-set containment) inside an existing block on
    the same element are suppressed, and nothing is persisted here.

    Proposal blocks may seed further rounds, up to ``max_inference_depth``.
    """
    union = knowledge.union_graph()
    derived = sorted(
        rg.derived_relations, key=lambda r: (r.predicate, r.source, r.target, r.rule or "")
    )
    model = store.model

    proposals: list[SemanticAnnotation] = []
    seen_keys: set[tuple[str, str, str, frozenset[str]]] = set()
    frontier: list[SemanticAnnotation] = list(store.annotations)

    for _round in range(max(max_inference_depth, 0)):
        fresh: list[SemanticAnnotation] = []
        for annotation in frontier:
            if annotation.sr not in SUGGESTING_KINDS:
                continue
            main = annotation.domain.main
            for assoc in store.associations:
                for rel in derived:
                    if rel.predicate != assoc.derived_predicate:
                        continue
                    if assoc.direction == "forward":
                        if rel.source != annotation.element:
                            continue
                        target = rel.target
                    else:
                        if rel.target != annotation.element:
                            continue
                        target = rel.source
                    if target == annotation.element:
                        continue
                    for ont_rel in sorted(
                        union.out_relations(main), key=lambda r: (r.predicate, r.range)
                    ):
                        if ont_rel.predicate != assoc.ontology_property:
                            continue
                        block = delimit_sb(union, ont_rel.range, Selector.everything())
                        key = (target, annotation.sr.value, block.main, block.entities)
                        if key in seen_keys:
                            continue
                        seen_keys.add(key)
                        if any(
                            _nested(block.entities, existing.domain.entities)
                            for existing in store.by_element(target)
                        ):
                            continue
                        provenance = Provenance.inferred(annotation.element, rel.predicate)
                        fresh.append(
                            SemanticAnnotation(
                                id=_proposal_id(target, annotation.sr, block, provenance),
                                element=target,
                                domain=block,
                                sr=annotation.sr,
                                mme=model.element(target).meta_type,
                                provenance=provenance,
                            )
                        )
        if not fresh:
            break
        proposals.extend(fresh)
        frontier = fresh

    proposals.sort(
        key=lambda p: (
            natural_key(p.element),
            p.domain.main,
            natural_key(p.provenance.source_element or ""),
            p.sr.value,
        )
    )
    return proposals


def identify_conflicts(
    finding: InconsistencyFinding, store: AnnotationStore, *, finding_index: int = 0
) -> ConflictFinding:
    """Localize an inconsistency to the model elements that may be wrong,
    based on the provenance of the two annotations involved."""
    if finding.verdict is not Verdict.INCONSISTENT:
        raise AnnotError(f"finding {finding.sa_x}/{finding.sa_y} is not an inconsistency")
    prov_x = store.get(finding.sa_x).provenance
    prov_y = store.get(finding.sa_y).provenance

    def source(p: Provenance) -> str:
        return p.source_element or ""

    if prov_x.kind is ProvenanceKind.INITIAL and prov_y.kind is ProvenanceKind.INITIAL:
        suspects, reason = {finding.element}, "initialXinitial"
    elif prov_x.kind is ProvenanceKind.INFERRED and prov_y.kind is ProvenanceKind.INFERRED:
        reason = "inferredXinferred"
        if source(prov_x) != source(prov_y):
            suspects = {source(prov_x), source(prov_y)}
        else:
            suspects = {source(prov_x)}
    else:
        inferred = prov_x if prov_x.kind is ProvenanceKind.INFERRED else prov_y
        suspects, reason = {finding.element, source(inferred)}, "initialXinferred"

    return ConflictFinding(
        suspects=tuple(sorted(suspects, key=natural_key)),
        reason=reason,
        finding_index=finding_index,
    )


def run_pipeline(
    model: Model,
    knowledge: KnowledgeStore,
    rules: RuleSet,
    store: AnnotationStore,
    *,
    subclass_closure: bool = False,
    max_inference_depth: int = 4,
    auto_accept: bool = False,
) -> Report:
    """Explicate relations, derive substitute relations from the rules,
    gather suggestions, then compare every annotation pair per element and
    localize the inconsistent ones. The input store is never mutated; with
    ``auto_accept`` the suggestions join the comparison on a working copy."""
    mmo = knowledge.meta_model()
    if mmo is None:
        raise AnnotError("no meta-model ontology loaded")
    rg = explicate_relations(model)
    types = type_elements(model, mmo)
    if subclass_closure:
        effective = set(types)
        for element_id, mme in types:
            for ancestor in knowledge.subclass_ancestors(mme):
                effective.add((element_id, ancestor))
        types = effective
    derived = apply_rules(rg, types, rules)
    rg = rg.with_derived(derived, rules.names)

    working = store.copy()
    proposals = suggest(working, rg, knowledge, max_inference_depth=max_inference_depth)
    if auto_accept:
        for proposal in proposals:
            working.annotate(
                proposal.element, proposal.domain, proposal.sr, proposal.provenance
            )

    findings: list[InconsistencyFinding] = []
    for element_id in sorted(model.element_ids, key=natural_key):
        annotations = working.by_element(element_id)
        for i in range(len(annotations)):
            for j in range(i + 1, len(annotations)):
                sa_x, sa_y = annotations[i], annotations[j]
                pr = compare_domain_semantics(
                    sa_x.domain, sa_y.domain, knowledge, subclass_closure=subclass_closure
                )
                verdict = detect_inconsistency(sa_x.sr, sa_y.sr, pr)
                findings.append(
                    InconsistencyFinding(
                        element=element_id, sa_x=sa_x.id, sa_y=sa_y.id, pr=pr, verdict=verdict
                    )
                )

    conflicts = [
        identify_conflicts(f, working, finding_index=i)
        for i, f in enumerate(findings)
        if f.verdict is Verdict.INCONSISTENT
    ]

    return Report(
        suggestions=tuple(proposals),
        inconsistencies=tuple(findings),
        conflicts=tuple(conflicts),
        stats={"pairsChecked": len(findings), "rulesFired": len(derived)},
    )
