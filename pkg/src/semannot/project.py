"""Project configuration: the file paths and reasoning parameters that one
checking/serving run operates on, plus loading them into live objects."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .annotation import AnnotationStore, load_store
from .blocks import (
    RuleSet,
    Selector,
    SemanticBlock,
    STRICT,
    SYMMETRIC,
    SubstitutionBlock,
    delimit_sb,
    make_substitution_block,
    parse_rules,
)
from .errors import FormatError
from .kstore import KnowledgeStore, MetaModelOntology, is_qualified, split_qualified
from .model import Model, parse_model
from .reason import Report, run_pipeline

PROJECT_DIR_ENV = "ANNOT_PROJECT_DIR"
DEFAULT_CONFIG_NAME = "project.json"


@dataclass
class ProjectConfig:
    """Paths and flags for one project; relative paths resolve against the
    directory of the config file they came from."""

    model: Path
    ontologies: list[Path]
    rules: list[Path]
    annotations: Path
    sbr_mode: str = SYMMETRIC
    subclass_closure: bool = False
    max_inference_depth: int = 4
    auto_accept: bool = False
    base_dir: Path = field(default_factory=Path.cwd)

    def __post_init__(self) -> None:
        if self.sbr_mode not in (STRICT, SYMMETRIC):
            raise FormatError(f"sbrMode must be strict or symmetric, got {self.sbr_mode!r}")
        if self.max_inference_depth < 1:
            raise FormatError(f"maxInferenceDepth must be >= 1, got {self.max_inference_depth}")
        self.model = self._resolve(self.model)
        self.ontologies = [self._resolve(p) for p in self.ontologies]
        self.rules = [self._resolve(p) for p in self.rules]
        self.annotations = self._resolve(self.annotations)
        for path in [self.model, self.annotations, *self.ontologies, *self.rules]:
            if not path.is_file():
                raise FormatError(f"configured path does not exist: {path}")

    def _resolve(self, path: Path | str) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.base_dir / path

    @classmethod
    def from_file(cls, config_path: Path | str, **overrides) -> "ProjectConfig":
        config_path = Path(config_path)
        try:
            doc = json.loads(config_path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise FormatError(f"cannot read config: {exc}", source=str(config_path)) from exc
        except json.JSONDecodeError as exc:
            raise FormatError(
                f"config syntax error: {exc.msg}", source=str(config_path), line=exc.lineno
            ) from exc
        for key in ("model", "ontologies", "rules", "annotations"):
            if key not in doc:
                raise FormatError(f"missing required key {key!r}", source=str(config_path))
        values = dict(
            model=Path(doc["model"]),
            ontologies=[Path(p) for p in doc["ontologies"]],
            rules=[Path(p) for p in doc["rules"]],
            annotations=Path(doc["annotations"]),
            sbr_mode=doc.get("sbrMode", SYMMETRIC),
            subclass_closure=bool(doc.get("subclassClosure", False)),
            max_inference_depth=int(doc.get("maxInferenceDepth", 4)),
            auto_accept=bool(doc.get("autoAccept", False)),
            base_dir=config_path.parent,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def discover_config() -> Path | None:
    """Default config location: $ANNOT_PROJECT_DIR/project.json, else
    ./project.json when present."""
    env_dir = os.environ.get(PROJECT_DIR_ENV)
    if env_dir:
        return Path(env_dir) / DEFAULT_CONFIG_NAME
    candidate = Path.cwd() / DEFAULT_CONFIG_NAME
    return candidate if candidate.is_file() else None


class Project:
    """A fully loaded project: ontologies, model, rules, and annotations,
    cross-validated and ready for reasoning."""

    def __init__(
        self,
        config: ProjectConfig,
        knowledge: KnowledgeStore,
        model: Model,
        rules: RuleSet,
        store: AnnotationStore,
    ):
        self.config = config
        self.knowledge = knowledge
        self.model = model
        self.rules = rules
        self.store = store

    @classmethod
    def load(cls, config: ProjectConfig) -> "Project":
        knowledge = KnowledgeStore.load_files(config.ontologies)
        mmo = knowledge.meta_model()
        if mmo is None:
            raise FormatError("no ontology with role meta-model is configured")
        model = parse_model(
            config.model.read_text(encoding="utf-8"), mmo, source=str(config.model)
        )
        _validate_link_kinds(model, mmo, knowledge)

        rules = RuleSet(())
        for rule_path in config.rules:
            parsed = parse_rules(rule_path.read_text(encoding="utf-8"), source=str(rule_path))
            rules = rules.merged_with(parsed)

        store = load_store(
            config.annotations.read_text(encoding="utf-8"),
            model,
            knowledge,
            source=str(config.annotations),
        )
        return cls(config, knowledge, model, rules, store)

    @property
    def meta_model(self) -> MetaModelOntology:
        mmo = self.knowledge.meta_model()
        assert mmo is not None
        return mmo

    def run(self, store: AnnotationStore | None = None) -> Report:
        return run_pipeline(
            self.model,
            self.knowledge,
            self.rules,
            store if store is not None else self.store,
            subclass_closure=self.config.subclass_closure,
            max_inference_depth=self.config.max_inference_depth,
            auto_accept=self.config.auto_accept,
        )

    def delimit(self, main: str, depth: int | None = None) -> SemanticBlock:
        selector = Selector.everything() if depth is None else Selector.depth_bounded(depth)
        return delimit_sb(self.knowledge.union_graph(), main, selector)

    def make_substitution_block(
        self, left: str, right: str, interior, rels, derived_predicate: str
    ) -> SubstitutionBlock:
        """Delimit a substitution block over the explicated model graph,
        validated in the project's configured mode."""
        from .model import explicate_relations

        graph = explicate_relations(self.model).as_graph()
        return make_substitution_block(
            graph, left, right, interior, rels, derived_predicate, mode=self.config.sbr_mode
        )


def _validate_link_kinds(model: Model, mmo: MetaModelOntology, knowledge: KnowledgeStore) -> None:
    # The structure-semantics registry: the meta-model's own properties plus
    # those of the ontologies it imports.
    registry = set(mmo.properties)
    for imported in mmo.imports:
        registry |= knowledge.ontology(imported).properties
    for link in model.links:
        kind = link.kind
        if is_qualified(kind):
            ns, _ = split_qualified(kind)
            if ns in (mmo.namespace, *mmo.imports) and kind not in registry:
                raise FormatError(
                    f"link kind {kind} is not a property of the meta-model registry"
                )
            if ns not in (mmo.namespace, *mmo.imports):
                raise FormatError(
                    f"link kind {kind} is outside the meta-model's namespaces"
                )
        elif kind not in registry:
            raise FormatError(f"link kind {kind!r} is not declared by the meta-model")
