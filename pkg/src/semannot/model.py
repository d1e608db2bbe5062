"""Target models (process/product models), relation explication, and
element typing against the meta-model ontology.

A model file looks like::

    {"id": "prod3-process",
     "metamodel": "&MEGA;",
     "elements": [{"id": "e9", "label": "Bases Turning",
                   "metaType": "&MEGA;Operation"}],
     "links": [{"source": "e9", "target": "sf2",
                "kind": "&BPMN;has_sequence_flow_source_ref_inv"}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import FormatError, UnknownEntityError
from .kstore import Entity, Graph, MetaModelOntology

NATIVE = "native"
DERIVED = "derived"


@dataclass(frozen=True)
class ModelElement:
    id: str
    label: str
    meta_type: str
    attributes: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ModelLink:
    source: str
    target: str
    kind: str


@dataclass(frozen=True)
class Model:
    id: str
    metamodel: str
    elements: tuple[ModelElement, ...]
    links: tuple[ModelLink, ...]

    def element(self, element_id: str) -> ModelElement:
        for e in self.elements:
            if e.id == element_id:
                return e
        raise UnknownEntityError(element_id)

    def has_element(self, element_id: str) -> bool:
        return any(e.id == element_id for e in self.elements)

    @property
    def element_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.elements)


@dataclass(frozen=True)
class ModelRelation:
    """An edge of a relation graph; ``native`` edges come from explicated
    model links, ``derived`` edges from rule application."""

    id: str
    predicate: str
    source: str
    target: str
    provenance: str = NATIVE
    rule: str | None = None

    def as_triple(self) -> tuple[str, str, str]:
        return (self.source, self.predicate, self.target)


class RelationGraph:
    """Explicit relations of a model: one entity per model element, plus
    native and rule-derived relations between them."""

    def __init__(self, model: Model, relations: Iterable[ModelRelation]):
        self._model = model
        ids = set(model.element_ids)
        self._relations: tuple[ModelRelation, ...] = tuple(relations)
        for r in self._relations:
            if r.source not in ids or r.target not in ids:
                raise FormatError(f"relation {r.id} references a non-element endpoint")
            if r.provenance == DERIVED and not r.rule:
                raise FormatError(f"derived relation {r.id} does not cite a rule")
            if r.provenance not in (NATIVE, DERIVED):
                raise FormatError(f"relation {r.id} has unknown provenance {r.provenance!r}")

    @property
    def model(self) -> Model:
        return self._model

    @property
    def entity_ids(self) -> tuple[str, ...]:
        return self._model.element_ids

    @property
    def relations(self) -> tuple[ModelRelation, ...]:
        return self._relations

    @property
    def native_relations(self) -> tuple[ModelRelation, ...]:
        return tuple(r for r in self._relations if r.provenance == NATIVE)

    @property
    def derived_relations(self) -> tuple[ModelRelation, ...]:
        return tuple(r for r in self._relations if r.provenance == DERIVED)

    def facts(self) -> set[tuple[str, str, str]]:
        return {r.as_triple() for r in self._relations}

    def with_derived(
        self, derived: Iterable[ModelRelation], rule_names: Iterable[str] | None = None
    ) -> "RelationGraph":
        derived = tuple(derived)
        if rule_names is not None:
            known = set(rule_names)
            for r in derived:
                if r.rule not in known:
                    raise FormatError(f"derived relation {r.id} cites unknown rule {r.rule!r}")
        return RelationGraph(self._model, self._relations + derived)

    def as_graph(self) -> Graph:
        """Convert to a generic graph (for block delimitation/validation)."""
        entities = [
            Entity(id=e.id, label=e.label, namespace=self._model.id) for e in self._model.elements
        ]
        relations = [
            # BinaryRelation is hashable and carries the same endpoints.
            _to_binary(r)
            for r in self._relations
        ]
        return Graph(entities, relations)


def _to_binary(r: ModelRelation):
    from .kstore import BinaryRelation

    return BinaryRelation(id=r.id, predicate=r.predicate, domain=r.source, range=r.target)


def parse_model(text: str, mmo: MetaModelOntology, *, source: str | None = None) -> Model:
    """Parse a model file, typing every element against ``mmo``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"model syntax error: {exc.msg}", source=source, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise FormatError("model file must be a JSON object", source=source)
    for key in ("id", "metamodel", "elements"):
        if key not in doc:
            raise FormatError(f"missing required key {key!r}", source=source)
    if doc["metamodel"] != mmo.prefix:
        raise FormatError(
            f"model requires meta-model {doc['metamodel']!r} but {mmo.prefix!r} is bound",
            source=source,
        )

    elements: list[ModelElement] = []
    seen: set[str] = set()
    for raw in doc["elements"]:
        try:
            eid, meta_type = raw["id"], raw["metaType"]
        except (TypeError, KeyError):
            raise FormatError(f"malformed element entry: {raw!r}", source=source) from None
        if eid in seen:
            raise FormatError(f"duplicate element id: {eid}", source=source)
        seen.add(eid)
        if meta_type not in mmo.mme:
            raise FormatError(
                f"element {eid}: unknown metaType {meta_type} (not in {mmo.namespace} meta-model)",
                source=source,
            )
        elements.append(
            ModelElement(
                id=eid,
                label=raw.get("label", eid),
                meta_type=meta_type,
                attributes=dict(raw.get("attributes", {})),
            )
        )

    links: list[ModelLink] = []
    for raw in doc.get("links", ()):
        try:
            src, tgt, kind = raw["source"], raw["target"], raw["kind"]
        except (TypeError, KeyError):
            raise FormatError(f"malformed link entry: {raw!r}", source=source) from None
        for endpoint in (src, tgt):
            if endpoint not in seen:
                raise FormatError(
                    f"dangling link {src} -{kind}-> {tgt}: unknown element {endpoint}",
                    source=source,
                )
        if not isinstance(kind, str) or not kind:
            raise FormatError(f"link {src} -> {tgt} has an empty kind", source=source)
        links.append(ModelLink(source=src, target=tgt, kind=kind))

    return Model(
        id=doc["id"], metamodel=doc["metamodel"], elements=tuple(elements), links=tuple(links)
    )


def explicate_relations(m: Model) -> RelationGraph:
    """Represent every element as a graph entity and every model link as a
    native relation whose predicate is the link kind."""
    relations = [
        ModelRelation(id=f"n{i}", predicate=link.kind, source=link.source, target=link.target)
        for i, link in enumerate(m.links)
    ]
    return RelationGraph(m, relations)


def type_elements(m: Model, mmo: MetaModelOntology) -> set[tuple[str, str]]:
    """The instance-of pairs (element id, meta-model concept), one per element."""
    if m.metamodel != mmo.prefix:
        raise FormatError(f"model {m.id} is bound to {m.metamodel}, not {mmo.prefix}")
    return {(e.id, e.meta_type) for e in m.elements}
