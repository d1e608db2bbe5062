"""Ontology-grounded semantic annotation, suggestion, and consistency
checking for enterprise models."""

from .annotation import (
    AnnotationStore,
    PRKind,
    PropertyAssociation,
    Provenance,
    ProvenanceKind,
    SemanticAnnotation,
    SRKind,
    load_store,
    save_store,
)
from .blocks import (
    Rule,
    RuleSet,
    Selector,
    SemanticBlock,
    SubstitutionBlock,
    ValidationResult,
    apply_rules,
    delimit_sb,
    make_substitution_block,
    parse_rules,
    validate_sbr,
)
from .errors import AnnotError, FormatError, InvariantViolation, RuleSyntaxError, UnknownEntityError
from .kstore import (
    BinaryRelation,
    Entity,
    Graph,
    KnowledgeStore,
    MetaModelOntology,
    Ontology,
    neighbors,
    oall,
    parse_ontology,
    serialize_ontology,
)
from .model import (
    Model,
    ModelElement,
    ModelLink,
    ModelRelation,
    RelationGraph,
    explicate_relations,
    parse_model,
    type_elements,
)
from .project import Project, ProjectConfig
from .reason import (
    ConflictFinding,
    InconsistencyFinding,
    Report,
    Verdict,
    compare_domain_semantics,
    detect_inconsistency,
    identify_conflicts,
    run_pipeline,
    suggest,
)

__version__ = "0.1.0"
