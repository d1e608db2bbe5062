"""The semantic-annotation schema: annotations binding model elements to
domain-semantics blocks, their provenance, property associations, and the
JSON persistence format (schemaVersion 1)."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .blocks import RuleSet, SemanticBlock
from .errors import FormatError, InvariantViolation, UnknownEntityError
from .kstore import KnowledgeStore
from .model import Model

SCHEMA_VERSION = 1

# Domain semantics is a semantic block drawn from the PLC-related ontologies.
DomainSemantics = SemanticBlock


class SRKind(Enum):
    """How an element's own semantics relates to its domain-semantics block."""

    EQUIVALENT = "equivalent"
    MORE_GENERAL = "moreGeneral"
    LESS_GENERAL = "lessGeneral"
    OVERLAPPING = "overlapping"
    DISJOINT = "disjoint"


class PRKind(Enum):
    """How two domain-semantics blocks relate to each other."""

    EQUIVALENT = "equivalent"
    MORE_GENERAL = "moreGeneral"
    LESS_GENERAL = "lessGeneral"
    OVERLAPPING = "overlapping"
    DISJOINT = "disjoint"

    def inverse(self) -> "PRKind":
        if self is PRKind.MORE_GENERAL:
            return PRKind.LESS_GENERAL
        if self is PRKind.LESS_GENERAL:
            return PRKind.MORE_GENERAL
        return self


SUGGESTING_KINDS = frozenset({SRKind.MORE_GENERAL, SRKind.LESS_GENERAL})


class ProvenanceKind(Enum):
    INITIAL = "initial"
    INFERRED = "inferred"


@dataclass(frozen=True)
class Provenance:
    kind: ProvenanceKind
    source_element: str | None = None
    via_rule: str | None = None

    def __post_init__(self) -> None:
        if self.kind is ProvenanceKind.INFERRED:
            if not self.source_element or not self.via_rule:
                raise InvariantViolation(
                    "inferred provenance carries a source element and rule",
                    f"source={self.source_element!r} via={self.via_rule!r}",
                )
        elif self.source_element or self.via_rule:
            raise InvariantViolation(
                "initial provenance carries no source", f"source={self.source_element!r}"
            )

    @classmethod
    def initial(cls) -> "Provenance":
        return cls(kind=ProvenanceKind.INITIAL)

    @classmethod
    def inferred(cls, source_element: str, via_rule: str) -> "Provenance":
        return cls(kind=ProvenanceKind.INFERRED, source_element=source_element, via_rule=via_rule)

    def to_json_dict(self) -> dict:
        if self.kind is ProvenanceKind.INITIAL:
            return {"kind": "initial"}
        return {"kind": "inferred", "sourceElement": self.source_element, "viaRule": self.via_rule}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Provenance":
        kind = doc.get("kind")
        if kind == "initial":
            return cls.initial()
        if kind == "inferred":
            return cls.inferred(doc.get("sourceElement", ""), doc.get("viaRule", ""))
        raise FormatError(f"unknown provenance kind {kind!r}")


@dataclass(frozen=True)
class SemanticAnnotation:
    """One element bound to one domain-semantics block with one relation
    kind; the meta-type and the fixed instance-of relation complete the
    annotation tuple."""

    id: str
    element: str
    domain: DomainSemantics
    sr: SRKind
    mme: str
    provenance: Provenance
    mr: str = "io"

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "element": self.element,
            "sr": self.sr.value,
            "mme": self.mme,
            "mr": self.mr,
            "provenance": self.provenance.to_json_dict(),
            "domain": self.domain.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SemanticAnnotation":
        try:
            return cls(
                id=doc["id"],
                element=doc["element"],
                sr=SRKind(doc["sr"]),
                mme=doc["mme"],
                mr=doc.get("mr", "io"),
                provenance=Provenance.from_json_dict(doc["provenance"]),
                domain=SemanticBlock.from_json_dict(doc["domain"]),
            )
        except (KeyError, ValueError) as exc:
            raise FormatError(f"malformed annotation entry: {exc}") from exc


@dataclass(frozen=True)
class PropertyAssociation:
    """Maps a rule-derived predicate onto a PLC-ontology property, in the
    given orientation of the derived relation."""

    derived_predicate: str
    ontology_property: str
    direction: str = "forward"

    def __post_init__(self) -> None:
        if self.direction not in ("forward", "inverse"):
            raise InvariantViolation(
                "association direction is forward or inverse", self.direction
            )

    def to_json_dict(self) -> dict:
        return {
            "derived": self.derived_predicate,
            "property": self.ontology_property,
            "direction": self.direction,
        }


_ID_CHUNKS = re.compile(r"(\d+)")


def natural_key(identifier: str) -> tuple:
    """Sort key that orders e2 before e15 and sa9 before sa10."""
    return tuple(int(c) if c.isdigit() else c for c in _ID_CHUNKS.split(identifier))


def validate_domain(block: DomainSemantics, knowledge: KnowledgeStore) -> None:
    """Domain blocks must be non-empty, internally well-formed, and drawn
    from the loaded PLC-related ontologies."""
    if not block.entities:
        raise InvariantViolation("domain non-empty", "block has no entities")
    block.validate()
    allowed = knowledge.plc_oall()
    stray = block.entities - allowed
    if stray:
        raise InvariantViolation(
            "block entities within the PLC ontologies", ", ".join(sorted(stray))
        )


class AnnotationStore:
    """All annotations of one model, plus the registered property
    associations. Mutations are single-writer; hand out ``copy()`` snapshots
    to readers that must not observe later changes."""

    def __init__(
        self,
        model: Model,
        knowledge: KnowledgeStore,
        annotations: Iterable[SemanticAnnotation] = (),
        associations: Iterable[PropertyAssociation] = (),
    ):
        self._model = model
        self._knowledge = knowledge
        self._annotations: dict[str, SemanticAnnotation] = {}
        for a in annotations:
            if a.id in self._annotations:
                raise FormatError(f"duplicate annotation id: {a.id}")
            self._validate(a)
            self._annotations[a.id] = a
        self._associations: list[PropertyAssociation] = list(associations)

    def _validate(self, a: SemanticAnnotation) -> None:
        if not self._model.has_element(a.element):
            raise UnknownEntityError(a.element)
        element = self._model.element(a.element)
        if a.mme != element.meta_type:
            raise InvariantViolation(
                "mme matches the element's instance-of typing",
                f"{a.element} is {element.meta_type}, annotation says {a.mme}",
            )
        if a.mr != "io":
            raise InvariantViolation("mr is the instance-of kind", a.mr)
        validate_domain(a.domain, self._knowledge)

    @property
    def model(self) -> Model:
        return self._model

    @property
    def knowledge(self) -> KnowledgeStore:
        return self._knowledge

    @property
    def model_ref(self) -> str:
        return self._model.id

    @property
    def annotations(self) -> tuple[SemanticAnnotation, ...]:
        return tuple(sorted(self._annotations.values(), key=lambda a: natural_key(a.id)))

    @property
    def associations(self) -> tuple[PropertyAssociation, ...]:
        return tuple(self._associations)

    def __len__(self) -> int:
        return len(self._annotations)

    def __contains__(self, annotation_id: str) -> bool:
        return annotation_id in self._annotations

    def get(self, annotation_id: str) -> SemanticAnnotation:
        try:
            return self._annotations[annotation_id]
        except KeyError:
            raise UnknownEntityError(annotation_id) from None

    def by_element(self, element_id: str) -> tuple[SemanticAnnotation, ...]:
        return tuple(a for a in self.annotations if a.element == element_id)

    def next_id(self) -> str:
        highest = 0
        for existing in self._annotations:
            m = re.fullmatch(r"sa(\d+)", existing)
            if m:
                highest = max(highest, int(m.group(1)))
        return f"sa{highest + 1}"

    def annotate(
        self,
        element_id: str,
        domain: DomainSemantics,
        sr: SRKind,
        provenance: Provenance,
        *,
        annotation_id: str | None = None,
    ) -> str:
        """Persist a new annotation; several annotations may coexist on one
        element. Returns the assigned id."""
        if not self._model.has_element(element_id):
            raise UnknownEntityError(element_id)
        new_id = annotation_id or self.next_id()
        if new_id in self._annotations:
            raise FormatError(f"duplicate annotation id: {new_id}")
        annotation = SemanticAnnotation(
            id=new_id,
            element=element_id,
            domain=domain,
            sr=sr,
            mme=self._model.element(element_id).meta_type,
            provenance=provenance,
        )
        self._validate(annotation)
        self._annotations[new_id] = annotation
        return new_id

    def remove(self, annotation_id: str) -> None:
        if annotation_id not in self._annotations:
            raise UnknownEntityError(annotation_id)
        del self._annotations[annotation_id]

    def associate_property(
        self, derived_predicate: str, ontology_property: str, direction: str, rules: RuleSet
    ) -> None:
        """Register a derived-predicate/ontology-property association; the
        predicate must come from a loaded rule's consequent and the property
        from a loaded PLC ontology."""
        if derived_predicate not in rules.derived_predicates:
            raise InvariantViolation(
                "derived predicate declared by a loaded rule", derived_predicate
            )
        declared = set()
        for o in self._knowledge.plc_ontologies():
            declared |= o.properties
        if ontology_property not in declared:
            raise InvariantViolation(
                "ontology property declared by a PLC ontology", ontology_property
            )
        self._associations.append(
            PropertyAssociation(
                derived_predicate=derived_predicate,
                ontology_property=ontology_property,
                direction=direction,
            )
        )

    def copy(self) -> "AnnotationStore":
        return AnnotationStore(
            self._model, self._knowledge, self.annotations, self._associations
        )


def save_store(store: AnnotationStore) -> str:
    doc = {
        "model": store.model_ref,
        "schemaVersion": SCHEMA_VERSION,
        "annotations": [a.to_json_dict() for a in store.annotations],
        "associations": [a.to_json_dict() for a in store.associations],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_store(
    text: str, model: Model, knowledge: KnowledgeStore, *, source: str | None = None
) -> AnnotationStore:
    """Load a store file and re-validate every invariant against the current
    model and ontologies; reports stale element ids by name."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"store syntax error: {exc.msg}", source=source, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise FormatError("store file must be a JSON object", source=source)
    version = doc.get("schemaVersion")
    if version != SCHEMA_VERSION:
        raise FormatError(
            f"schema-version mismatch: file has {version!r}, expected {SCHEMA_VERSION}",
            source=source,
        )
    if doc.get("model") != model.id:
        raise FormatError(
            f"store is bound to model {doc.get('model')!r}, not {model.id!r}", source=source
        )
    annotations = []
    for raw in doc.get("annotations", ()):
        a = SemanticAnnotation.from_json_dict(raw)
        if not model.has_element(a.element):
            raise FormatError(
                f"annotation {a.id} references element {a.element}, "
                "which is missing from the model",
                source=source,
            )
        annotations.append(a)
    associations = []
    for raw in doc.get("associations", ()):
        try:
            associations.append(
                PropertyAssociation(
                    derived_predicate=raw["derived"],
                    ontology_property=raw["property"],
                    direction=raw.get("direction", "forward"),
                )
            )
        except (TypeError, KeyError) as exc:
            raise FormatError(f"malformed association entry: {raw!r}", source=source) from exc
    try:
        return AnnotationStore(model, knowledge, annotations, associations)
    except InvariantViolation as exc:
        raise FormatError(f"store violates an invariant: {exc}", source=source) from exc
