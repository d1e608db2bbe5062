"""In-memory knowledge store: entity/relation graphs, ontologies, and the
JSON ontology file format with `&NS;LocalName` qualified names.

An ontology file looks like::

    {"namespace": "AIPL",
     "prefix": "&AIPL;",
     "imports": ["MSDL"],
     "concepts": ["P0110", "Bases"],
     "properties": ["hasShape"],
     "triples": [["P0110", "hasShape", "&MSDL;Cylinder"],
                 ["P0110", "rdfs:subClassOf", "Bases"]]}

Names are either local (resolved against this file's prefix) or fully
qualified `&NS;Name`; a qualified name may only use the file's own
namespace, a namespace listed under ``imports``, or nothing else.
``rdfs:subClassOf`` and ``rdf:type`` are reserved predicates.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import FormatError, UnknownEntityError

RESERVED_PREDICATES = frozenset({"rdfs:subClassOf", "rdf:type"})
SUBCLASS_OF = "rdfs:subClassOf"
RDF_TYPE = "rdf:type"


def is_qualified(name: str) -> bool:
    return name.startswith("&") and ";" in name


def split_qualified(name: str) -> tuple[str, str]:
    """Split `&NS;Local` into (namespace, local name)."""
    if not is_qualified(name):
        raise ValueError(f"not a qualified name: {name!r}")
    ns, _, local = name[1:].partition(";")
    return ns, local


def qualify(namespace: str, local: str) -> str:
    return f"&{namespace};{local}"


@dataclass(frozen=True)
class Entity:
    """A node of a graph: an ontology concept/individual or a model element."""

    id: str
    label: str
    namespace: str


@dataclass(frozen=True)
class BinaryRelation:
    """A directed edge (domain, range) labeled with a predicate name."""

    id: str
    predicate: str
    domain: str
    range: str

    def dom(self) -> str:
        return self.domain

    def ran(self) -> str:
        return self.range

    def as_triple(self) -> tuple[str, str, str]:
        return (self.domain, self.predicate, self.range)


class Graph:
    """An immutable set of entities plus binary relations over them.

    Every relation endpoint must resolve to a member entity; this is checked
    on construction, and mutation is only possible by building a new Graph.
    """

    def __init__(self, entities: Iterable[Entity] = (), relations: Iterable[BinaryRelation] = ()):
        self._entities: dict[str, Entity] = {}
        for e in entities:
            if e.id in self._entities:
                raise FormatError(f"duplicate entity id: {e.id}")
            if not e.namespace:
                raise FormatError(f"entity {e.id} has an empty namespace")
            self._entities[e.id] = e
        self._relations: dict[str, BinaryRelation] = {}
        self._out: dict[str, list[BinaryRelation]] = defaultdict(list)
        self._in: dict[str, list[BinaryRelation]] = defaultdict(list)
        for r in relations:
            if r.id in self._relations:
                raise FormatError(f"duplicate relation id: {r.id}")
            for endpoint in (r.domain, r.range):
                if endpoint not in self._entities:
                    raise FormatError(
                        f"relation {r.id} ({r.domain} -{r.predicate}-> {r.range}) "
                        f"references unknown entity {endpoint}"
                    )
            self._relations[r.id] = r
            self._out[r.domain].append(r)
            self._in[r.range].append(r)

    @property
    def entities(self) -> dict[str, Entity]:
        return dict(self._entities)

    @property
    def relations(self) -> tuple[BinaryRelation, ...]:
        return tuple(self._relations.values())

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self._entities

    def __iter__(self) -> Iterator[Entity]:
        return iter(self._entities.values())

    def __len__(self) -> int:
        return len(self._entities)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._entities == other._entities and self._relations == other._relations

    def entity(self, entity_id: str) -> Entity:
        try:
            return self._entities[entity_id]
        except KeyError:
            raise UnknownEntityError(entity_id) from None

    def out_relations(self, entity_id: str) -> tuple[BinaryRelation, ...]:
        self.entity(entity_id)
        return tuple(self._out.get(entity_id, ()))

    def in_relations(self, entity_id: str) -> tuple[BinaryRelation, ...]:
        self.entity(entity_id)
        return tuple(self._in.get(entity_id, ()))

    def with_additions(
        self, entities: Iterable[Entity] = (), relations: Iterable[BinaryRelation] = ()
    ) -> "Graph":
        """Return a new graph extended with the given entities/relations."""
        return Graph(
            list(self._entities.values()) + list(entities),
            list(self._relations.values()) + list(relations),
        )


def neighbors(
    g: Graph, entity_id: str, direction: str = "both"
) -> set[tuple[BinaryRelation, Entity]]:
    """Adjacent (relation, entity) pairs of ``entity_id``.

    ``out`` pairs have the entity as domain, ``in`` as range, ``both`` is
    their union.
    """
    if direction not in ("out", "in", "both"):
        raise ValueError(f"direction must be out/in/both, got {direction!r}")
    g.entity(entity_id)
    result: set[tuple[BinaryRelation, Entity]] = set()
    if direction in ("out", "both"):
        for r in g.out_relations(entity_id):
            result.add((r, g.entity(r.range)))
    if direction in ("in", "both"):
        for r in g.in_relations(entity_id):
            result.add((r, g.entity(r.domain)))
    return result


@dataclass(frozen=True)
class Ontology:
    """A parsed ontology: concepts, property names, and triple axioms.

    ``concepts`` and ``properties`` hold fully qualified names in the
    ontology's own namespace; axioms may reference imported namespaces.
    """

    namespace: str
    prefix: str
    imports: tuple[str, ...]
    concepts: frozenset[str]
    properties: frozenset[str]
    axioms: tuple[BinaryRelation, ...]
    graph: Graph = field(compare=False)

    @property
    def role(self) -> str:
        return "plc"


@dataclass(frozen=True)
class MetaModelOntology(Ontology):
    """An ontology describing modelling constructs; its concepts are the
    admissible element meta-types (all classes, never individuals)."""

    @property
    def role(self) -> str:
        return "meta-model"

    @property
    def mme(self) -> frozenset[str]:
        return self.concepts


def oall(o: Ontology) -> frozenset[str]:
    """All element names of an ontology: concepts plus properties."""
    return o.concepts | o.properties


def _resolve(name: str, namespace: str, declared: set[str], *, source: str | None) -> str:
    if not isinstance(name, str) or not name:
        raise FormatError(f"names must be non-empty strings, got {name!r}", source=source)
    if is_qualified(name):
        ns, local = split_qualified(name)
        if not ns or not local:
            raise FormatError(f"malformed qualified name {name!r}", source=source)
        if ns not in declared:
            raise FormatError(f"undeclared namespace prefix &{ns}; in {name!r}", source=source)
        return name
    return qualify(namespace, name)


def parse_ontology(text: str, *, source: str | None = None) -> Ontology:
    """Parse one ontology file; returns a MetaModelOntology when the file
    carries ``"role": "meta-model"``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"ontology syntax error: {exc.msg}", source=source, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise FormatError("ontology file must be a JSON object", source=source)
    for key in ("namespace", "prefix", "concepts", "properties", "triples"):
        if key not in doc:
            raise FormatError(f"missing required key {key!r}", source=source)

    namespace = doc["namespace"]
    if not isinstance(namespace, str) or not namespace:
        raise FormatError("namespace must be a non-empty string", source=source)
    if doc["prefix"] != qualify(namespace, ""):
        raise FormatError(
            f"prefix {doc['prefix']!r} does not match namespace {namespace!r}", source=source
        )
    imports = tuple(doc.get("imports", ()))
    for imp in imports:
        if not isinstance(imp, str) or not imp:
            raise FormatError(f"bad imports entry {imp!r}", source=source)
    declared = {namespace, *imports}

    concepts: list[str] = []
    seen: set[str] = set()
    for raw in doc["concepts"]:
        name = _resolve(raw, namespace, declared, source=source)
        if split_qualified(name)[0] != namespace:
            raise FormatError(f"concept {raw!r} lies outside namespace {namespace!r}", source=source)
        if name in seen:
            raise FormatError(f"duplicate concept id: {name}", source=source)
        seen.add(name)
        concepts.append(name)

    properties: list[str] = []
    for raw in doc["properties"]:
        name = _resolve(raw, namespace, declared, source=source)
        if split_qualified(name)[0] != namespace:
            raise FormatError(f"property {raw!r} lies outside namespace {namespace!r}", source=source)
        if name in seen or name in properties:
            raise FormatError(f"duplicate declaration: {name}", source=source)
        properties.append(name)

    entities: dict[str, Entity] = {}

    def register(qname: str) -> None:
        if qname not in entities:
            ns, local = split_qualified(qname)
            entities[qname] = Entity(id=qname, label=local, namespace=ns)

    for c in concepts:
        register(c)

    axioms: list[BinaryRelation] = []
    for i, triple in enumerate(doc["triples"]):
        if not isinstance(triple, (list, tuple)) or len(triple) != 3:
            raise FormatError(f"triple #{i} must be [subject, predicate, object]", source=source)
        raw_s, raw_p, raw_o = triple
        subj = _resolve(raw_s, namespace, declared, source=source)
        if raw_p in RESERVED_PREDICATES:
            pred = raw_p
        else:
            pred = _resolve(raw_p, namespace, declared, source=source)
            if split_qualified(pred)[0] == namespace and pred not in properties:
                raise FormatError(f"undeclared property {raw_p!r} in triple #{i}", source=source)
        obj = _resolve(raw_o, namespace, declared, source=source)
        register(subj)
        register(obj)
        axioms.append(
            BinaryRelation(id=f"{namespace}:t{i}", predicate=pred, domain=subj, range=obj)
        )

    concept_set = frozenset(concepts)
    if doc.get("role") == "meta-model":
        for ax in axioms:
            if ax.predicate == RDF_TYPE and ax.domain in concept_set:
                raise FormatError(
                    f"meta-model concept {ax.domain} is typed as an individual", source=source
                )
        cls = MetaModelOntology
    elif doc.get("role") in (None, "plc"):
        cls = Ontology
    else:
        raise FormatError(f"unknown ontology role {doc.get('role')!r}", source=source)

    return cls(
        namespace=namespace,
        prefix=doc["prefix"],
        imports=imports,
        concepts=concept_set,
        properties=frozenset(properties),
        axioms=tuple(axioms),
        graph=Graph(entities.values(), axioms),
    )


def serialize_ontology(o: Ontology) -> str:
    """Canonical text form: fully qualified names, sorted arrays."""
    doc: dict[str, object] = {
        "namespace": o.namespace,
        "prefix": o.prefix,
        "concepts": sorted(o.concepts),
        "properties": sorted(o.properties),
        "triples": sorted([a.domain, a.predicate, a.range] for a in o.axioms),
    }
    if o.imports:
        doc["imports"] = sorted(o.imports)
    if isinstance(o, MetaModelOntology):
        doc["role"] = "meta-model"
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


class KnowledgeStore:
    """All loaded ontologies keyed by namespace, plus their merged graph.

    Cross-namespace references are validated on construction: an imported
    namespace must be loaded, and a foreign name must be declared (concept
    or property) by its home ontology.
    """

    def __init__(self, ontologies: Iterable[Ontology]):
        self._by_ns: dict[str, Ontology] = {}
        for o in ontologies:
            if o.namespace in self._by_ns:
                raise FormatError(f"namespace loaded twice: {o.namespace}")
            self._by_ns[o.namespace] = o
        meta = [o for o in self._by_ns.values() if isinstance(o, MetaModelOntology)]
        if len(meta) > 1:
            raise FormatError(
                "multiple meta-model ontologies loaded: "
                + ", ".join(sorted(o.namespace for o in meta))
            )
        self._meta = meta[0] if meta else None
        self._validate_references()
        self._union: Graph | None = None

    def _validate_references(self) -> None:
        for o in self._by_ns.values():
            for imp in o.imports:
                if imp not in self._by_ns:
                    raise FormatError(
                        f"ontology {o.namespace} imports {imp}, which is not loaded"
                    )
            for ax in o.axioms:
                for name in (ax.domain, ax.predicate, ax.range):
                    if not is_qualified(name):
                        continue
                    ns, _ = split_qualified(name)
                    if ns == o.namespace:
                        continue
                    home = self._by_ns.get(ns)
                    if home is None:
                        raise FormatError(
                            f"ontology {o.namespace} references &{ns}; but it is not loaded"
                        )
                    if name not in oall(home):
                        raise FormatError(
                            f"{name} referenced by ontology {o.namespace} is not declared in {ns}"
                        )

    @classmethod
    def load_files(cls, paths: Iterable[str | Path]) -> "KnowledgeStore":
        parsed = []
        for p in paths:
            path = Path(p)
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise FormatError(f"cannot read ontology file: {exc}", source=str(path)) from exc
            parsed.append(parse_ontology(text, source=str(path)))
        return cls(parsed)

    @property
    def namespaces(self) -> list[str]:
        return sorted(self._by_ns)

    def __contains__(self, namespace: str) -> bool:
        return namespace in self._by_ns

    def ontology(self, namespace: str) -> Ontology:
        try:
            return self._by_ns[namespace]
        except KeyError:
            raise FormatError(f"no ontology loaded for namespace {namespace!r}") from None

    def meta_model(self) -> MetaModelOntology | None:
        return self._meta

    def plc_ontologies(self) -> list[Ontology]:
        return [o for ns, o in sorted(self._by_ns.items()) if not isinstance(o, MetaModelOntology)]

    def plc_oall(self) -> frozenset[str]:
        names: set[str] = set()
        for o in self.plc_ontologies():
            names |= oall(o)
        return frozenset(names)

    def union_graph(self) -> Graph:
        """Merged graph over every loaded ontology (cached)."""
        if self._union is None:
            entities: dict[str, Entity] = {}
            relations: list[BinaryRelation] = []
            for ns in sorted(self._by_ns):
                o = self._by_ns[ns]
                # Declaring-ontology entities win over referenced-only copies.
                for e in o.graph:
                    if e.id not in entities or e.namespace == ns:
                        entities[e.id] = e
                relations.extend(o.axioms)
            self._union = Graph(entities.values(), relations)
        return self._union

    def subclass_parents(self) -> dict[str, set[str]]:
        """Direct rdfs:subClassOf edges (child -> parents) across ontologies."""
        parents: dict[str, set[str]] = defaultdict(set)
        for o in self._by_ns.values():
            for ax in o.axioms:
                if ax.predicate == SUBCLASS_OF:
                    parents[ax.domain].add(ax.range)
        return dict(parents)

    def subclass_ancestors(self, name: str) -> frozenset[str]:
        """Transitive superclasses of ``name`` (excluding itself)."""
        parents = self.subclass_parents()
        seen: set[str] = set()
        frontier = [name]
        while frontier:
            current = frontier.pop()
            for parent in parents.get(current, ()):
                if parent not in seen:
                    seen.add(parent)
                    frontier.append(parent)
        return frozenset(seen)

    def subclass_descendants(self, name: str) -> frozenset[str]:
        """Transitive subclasses of ``name`` (excluding itself)."""
        children: dict[str, set[str]] = defaultdict(set)
        for parent_map in self.subclass_parents().items():
            child, parent_set = parent_map
            for parent in parent_set:
                children[parent].add(child)
        seen: set[str] = set()
        frontier = [name]
        while frontier:
            current = frontier.pop()
            for child in children.get(current, ()):
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        return frozenset(seen)
